"""Two-layer SIR epidemics: thresholds, mean-field and stochastic dynamics, spillover experiments."""

from ._netspill import (
    CalibrationError,
    EpidemicParams,
    Graph,
    LayeredNetwork,
    NumericError,
    ParameterError,
    __version__,
    adjacency_spectral_radius,
    barabasi_albert,
    block_spectral_radius,
    calibrate_reservoir_rate,
    couple_random,
    couple_to_hubs,
    derive_seed,
    detect_transition,
    epidemic_threshold,
    erdos_renyi,
    erdos_renyi_gnm,
    integrate_meanfield,
    jacobian_leading_eigenvalue,
    run_cli,
    run_ensemble,
    simulate,
    sweep_beta12,
    sweep_links,
    threshold_curve,
    watts_strogatz,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
