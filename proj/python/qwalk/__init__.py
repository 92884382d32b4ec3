"""Discrete-time Hadamard walk on the line with a decoherent coin."""

from ._qwalk import (
    ChannelModel,
    ChannelStrength,
    DomainError,
    InvariantError,
    KrausChannel,
    PositionDistribution,
    ResourceError,
    __version__,
    apply_channel,
    asymptotic_variance_slope,
    classical_binomial,
    crossover_time,
    dephasing_channel,
    equivalent_parameters,
    evolve_density,
    evolve_unitary,
    first_moment_asymptotic,
    first_moment_exact,
    measurement_channel,
    moment_series,
    run_ensemble,
    second_moment_asymptotic,
    second_moment_exact,
    total_variation,
    weak_measurement_channel,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
