"""Box-dimension estimation and closed-form dimension formulas."""

from .boxcount import CellGrid, PackedPolylines, box_count, count_cells
from .estimators import box_dim_planar, box_dim_sequence, planar_measures, sequence_measures
from .fitting import (POWER, POWER_LOG, DimensionEstimate, EpsGrid, FitConfig, LogLogFit,
                      fit_loglog, fit_scaling)
from .formulas import (AsymptoticModel, CorollaryDims, corollary_dims, cyclicity_candidates,
                       displacement_asymptotics_formula, induced_away_model, spiral_dim_formula)

__all__ = [
    "AsymptoticModel", "CellGrid", "CorollaryDims", "DimensionEstimate", "EpsGrid", "FitConfig",
    "LogLogFit", "POWER", "POWER_LOG", "PackedPolylines", "box_count", "box_dim_planar",
    "box_dim_sequence", "corollary_dims", "count_cells", "cyclicity_candidates",
    "displacement_asymptotics_formula", "fit_loglog", "fit_scaling", "induced_away_model",
    "planar_measures", "sequence_measures", "spiral_dim_formula",
]
