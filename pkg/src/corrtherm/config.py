"""Central numeric tolerances and default budgets.

All tolerances live here so that tests and the CLI can override them in one
place instead of scattering magic numbers through the modules.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    #: normalization tolerance for probability vectors
    tau_norm: float = 1e-10
    #: per-prefix majorization slack is tau_maj_scale * k at prefix k
    tau_maj_scale: float = 1e-12
    #: bistochastic witness accuracy, ||Lp - q||
    witness: float = 1e-9
    #: Gibbs-preserving witness accuracy
    gibbs_witness: float = 1e-8
    #: margins below this are flagged as Boundary by trumping checks
    boundary_margin: float = 1e-6
    #: absolute tolerance of the minimal-work bisection (units of kT)
    work_bisect: float = 1e-6


DEFAULT_TOL = Tolerances()

#: largest joint-distribution size the extension builder will materialize
MATERIALIZE_CAP = 10**6

#: largest composite dimension for full pipeline assembly
PIPELINE_DIM_CAP = 10**4

#: upper end of the minimal-work bisection, in units of kT
DELTA_HI_DEFAULT = 50.0

#: denominator cap for rational Gibbs approximations
RATIONAL_DENOMINATOR_CAP = 10**5

#: denominator cap when sweeping for a rational exp(-beta*Delta)
WORKBIT_DENOMINATOR_CAP = 10**4


@dataclass(frozen=True)
class AlphaGrid:
    """Sample set over which "for all alpha" conditions are evaluated.

    Geometric grids on +/-[geo_lo, geo_hi] catch the extreme regimes; the
    dense linear section covers the interval where entropy-balance dips
    concentrate.  The +/-infinity and Burg conditions are always checked by
    their closed forms in addition to this grid.
    """

    geo_lo: float = 1e-3
    geo_hi: float = 1e3
    geo_points: int = 200
    lin_lo: float = 0.01
    lin_hi: float = 3.0
    lin_step: float = 0.01
    dip_lo: float = 0.8
    dip_hi: float = 1.2
    dip_step: float = 0.005

    def values(self) -> np.ndarray:
        geo = np.geomspace(self.geo_lo, self.geo_hi, self.geo_points)
        lin = np.arange(self.lin_lo, self.lin_hi + self.lin_step / 2, self.lin_step)
        dip = np.arange(self.dip_lo, self.dip_hi + self.dip_step / 2, self.dip_step)
        alphas = np.concatenate([-geo, geo, lin, dip])
        alphas = np.unique(alphas)
        # 0 and 1 are excluded: they get closed-form treatment elsewhere
        return alphas[(np.abs(alphas) > 1e-12) & (np.abs(alphas - 1.0) > 1e-12)]


DEFAULT_GRID = AlphaGrid()
