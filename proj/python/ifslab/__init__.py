"""Random interval maps: iterated function systems, walks and stationary measures."""

from ._core import (  # noqa: F401
    DomainError,
    Error,
    NumericalError,
    PreconditionError,
    ResourceError,
    SystemParams,
    apply_map,
    char_roots,
    delta_mass,
    divergence_experiment,
    equidistribution_test,
    first_passage,
    gamma,
    loglog_slope,
    make_system,
    martingale_exponent,
    mult_dependence,
    nu1,
    orbit,
    sample_word,
    solve_b,
    sync_experiment,
    transfer_deviation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
