from ._linalg import PSDCertificate, as_fraction, exact_rank, ldl_psd_certificate, solve_exact
from ._sdp import SDPSolution, SemidefiniteProgram, solve_sdp, solve_sdp_projection
from ._simplex import LinearProgram, LPSolution, SolverError, solve_lp

__all__ = [
    "LinearProgram",
    "LPSolution",
    "solve_lp",
    "SolverError",
    "SemidefiniteProgram",
    "SDPSolution",
    "solve_sdp",
    "solve_sdp_projection",
    "as_fraction",
    "exact_rank",
    "solve_exact",
    "ldl_psd_certificate",
    "PSDCertificate",
]
