"""Lifted-l1 sparse recovery (C++ core)."""

from ._core import (
    DcaConfig,
    DivergenceError,
    FactorizationError,
    GSpec,
    PreconditionError,
    SolveResult,
    SolverConfig,
    UnsupportedOperation,
    admm_solve,
    coherence,
    dca_solve,
    gen_instance,
    l0_oracle,
    metrics,
    penalty,
    penalty_grad_abs,
    shrink,
    u_minimize,
    verify,
)

__all__ = [
    "DcaConfig",
    "DivergenceError",
    "FactorizationError",
    "GSpec",
    "PreconditionError",
    "SolveResult",
    "SolverConfig",
    "UnsupportedOperation",
    "admm_solve",
    "coherence",
    "dca_solve",
    "gen_instance",
    "l0_oracle",
    "metrics",
    "penalty",
    "penalty_grad_abs",
    "shrink",
    "u_minimize",
    "verify",
]
