"""Finite element solver for two-point boundary value problems of fractional
order alpha in (1, 2), covering both Riemann-Liouville and Caputo derivatives,
with closed-form assembly on truncated power sums and a convergence-study
harness."""

from .analytic import EXAMPLES, ExampleCase, adjoint_solution, example_suite, primal_solution
from .assembly import (
    DerivativeKind,
    Formulation,
    LinearSystem,
    assemble_load,
    assemble_potential,
    assemble_stiffness,
    hat_stiffness,
    solve,
)
from .errors import (
    ConfigError,
    EvaluabilityError,
    FracFEMError,
    IntegrabilityError,
    NearSingularMatrixError,
    ParameterError,
    QuadratureConvergenceError,
    RateUndefinedError,
    RepresentabilityError,
    SidednessError,
    SingularEvaluationError,
)
from .femspace import (
    CaputoTestBasis,
    Mesh,
    TrialBasis,
    caputo_test_basis,
    interpolate,
    weight_moment,
    weight_moments,
)
from .fracpoly import (
    FracOrder,
    PiecewiseLinear,
    PowerSum,
    Side,
    Term,
    caputo_derivative,
    derivative,
    evaluate,
    inner_product,
    left_frac_integral,
    riemann_derivative,
    right_frac_integral,
)
from .metrics import (
    ErrorRecord,
    convergence_rates,
    energy_error,
    energy_product,
    l2_error,
    singular_coefficient,
)
from .harness import (
    ConvergenceReport,
    StudyConfig,
    compute_study,
    emit_tables,
    parse_power_expr,
    run_study,
)
from .quadrature import QuadRule, gauss_jacobi_rule, integrate_singular

from ._version import __version__
