"""igclab: a numerical lab for onsite-dissipative lattice models.

Builders for lossy ladder and graph Hamiltonians, solvers for the momenta
where the periodic spectrum touches the real axis, dissipative quantum walks
with two independent escape-probability engines, scaling and edge-burst
analysis, and the damping-matrix (Liouvillian) side of the same physics.
"""

__version__ = "0.1.0"

from .model import (
    OBC, PBC, LadderParams, GeneralModel, HamiltonianMatrix, BlochMatrix,
    build_ladder, build_bloch, build_general, bloch_bands, ladder_to_general,
    verify_dark_modes, linear_gamma, random_gamma, site_index,
)
from .densela import Spectrum, SingularMatrixError, lu_solve, eigendecompose, max_imag
from .igc import (
    IGC, GAPPED, IgcPoint, IgcSolution, solve_connection, f_min_closed_form,
    igc_energies_closed_form, classify,
)
from .walk import (
    TIME, RESOLVENT, WalkConfig, StateVector, LossProfile, WalkResult,
    evolve, loss_profile_time, loss_profile_resolvent, bulk_boundary_equivalence,
)
from .analysis import (
    POWER, EXP, NONE, LEFT, RIGHT, BIPOLAR, FitResult, BurstMetrics,
    fit_bulk, burst_metrics, scan_x0, self_intersections,
)
from .liouville import (
    DampingMatrix, LiouvilleReport, build_damping, liouvillian_gap,
    dark_mode_check, steady_density, propagate_correlation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
