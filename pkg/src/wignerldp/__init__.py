"""Numerics for large deviations of the top eigenvalue of deformed Wigner matrices.

The package is organized as:

- :mod:`wignerldp.measures`  -- compactly supported measures and transforms
- :mod:`wignerldp.freeconv`  -- free convolution with the semicircle law
- :mod:`wignerldp.ratefn`    -- tilt thresholds and rate functions
- :mod:`wignerldp.mde`       -- Matrix Dyson Equation solvers
- :mod:`wignerldp.sim`       -- deformed-ensemble sampling and spectra
- :mod:`wignerldp.sphint`    -- Monte Carlo spherical integrals
- :mod:`wignerldp.acceptance` -- end-to-end validation suite
"""

from .errors import (
    ConsistencyError,
    DivergenceError,
    DomainError,
    IterationError,
    SingularityError,
    TiltInfeasibleError,
)
from .measures import (
    Measure,
    Semicircle,
    TransformValue,
    dudley_distance,
    inverse_stieltjes,
    levy_distance,
    log_potential,
    quantile_discretize,
    r_transform,
    stieltjes,
)
from .freeconv import (
    FreeConvolution,
    density_grid,
    edge_stieltjes,
    free_convolution,
    log_potential_fc,
    pastur_stieltjes,
    right_edge,
)
from .ratefn import (
    RateContext,
    RatePoint,
    RateProfile,
    make_context,
    optimal_tilt,
    rate,
    rate_profile,
    spherical_limit,
    thresholds,
    tilt_derivative,
)
from .mde import MDEProblem, MDESolution, mde_wig_gap, solve_mde, wig_pastur_check
from .sim import (
    EnsembleSpec,
    SpectrumSample,
    edge_convergence_study,
    esd_concentration_trial,
    sample_matrix,
    spectrum,
    tail_bound_check,
    tail_probability_naive,
)
from .sphint import (
    SphIntEstimate,
    TiltCenter,
    delocalized_ratio_mc,
    gaussian_identity_check,
    solve_tilt_center,
    spherical_integral_mc,
    tilted_free_energy_mc,
)

__version__ = "0.1.0"
