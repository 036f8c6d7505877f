"""Global numerical defaults.

``FREDRES_RANK_TOL`` overrides the relative rank tolerance used for every
rank and invertibility decision.
"""
import os

DEFAULT_RANK_TOL = 1e-10
AGREE_ATOL = 1e-8
AGREE_RTOL = 1e-8


def rank_tol(value=None):
    """Resolve a rank tolerance: explicit value, else env var, else default."""
    if value is not None:
        return float(value)
    env = os.environ.get("FREDRES_RANK_TOL")
    if env:
        return float(env)
    return DEFAULT_RANK_TOL
