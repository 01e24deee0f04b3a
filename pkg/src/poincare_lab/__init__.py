"""Triple-stroke quasi-norms of polynomials on the unit cube and numerical
checks of the associated Poincare / Sobolev-type inequalities for p < 1."""

__version__ = "0.1.0"

from .exponents import SobolevParams, sobolev_exponent, window_check  # noqa: E402
from .poly import (  # noqa: E402
    Decomposition,
    Polynomial,
    decompose,
    differentiate,
    evaluate,
    gradient,
    higher_gradient,
    truncate_degree,
    variables,
)
from .norms import (  # noqa: E402
    gradient_triple_norm,
    lq_quasinorm,
    m_gradient_triple_norm,
    monomial_gradient_norm_closed,
    monomial_norm_closed,
    triple_stroke_norm,
)
from .quadrature import (  # noqa: E402
    QuadResult,
    integrate_exact_integer,
    integrate_power,
    integrate_power_mc,
)
from .lab import (  # noqa: E402
    RatioReport,
    mean_inequality_checks,
    mediant_reduction_check,
    monomial_ratio,
    monomial_ratio_sup,
    proof_factor,
    second_factor,
    verify_embedding,
    verify_higher,
    verify_poincare,
)
from .search import (  # noqa: E402
    ConstantEstimate,
    SamplerConfig,
    SearchConfig,
    estimate_constant,
    sample_polynomial,
    sweep,
)
