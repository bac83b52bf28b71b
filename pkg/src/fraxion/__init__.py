"""Fractional powers of the Laplacian and the heat operator, their
extension problems, and the special-function and quadrature machinery
underneath, on sampled grids."""

from .errors import (
    AliasWarning,
    ConditioningWarning,
    ConvergenceError,
    DomainError,
    ExtrapolationError,
    FraxionError,
    LadderError,
    NonConvergence,
    PoleError,
    ShapeError,
    StencilError,
    TailError,
)
from .extension import (
    ExtensionField,
    KernelCombination,
    PoissonKernel,
    default_y_ladder,
    dtn_elliptic,
    dtn_higher,
    dtn_parabolic,
    kernel_identity_suite,
    kernel_mass,
    la_harmonicity_check,
    solve_elliptic,
    solve_higher,
    solve_parabolic,
    symbolic_y_derivative,
)
from .field import (
    GridSpec,
    ScalarField,
    SpaceTimeField,
    SpaceTimeTestFunction,
    TestFunction,
    convolve,
    fourier,
    gaussian,
    grid_norm,
    inverse_fourier,
    modulated_gaussian,
    polynomial_gaussian,
    radial_fourier,
    to_csv,
)
from .fracops import (
    FracConstants,
    FracOrder,
    constants_table,
    dtn_constant,
    fracheat,
    fracheat_multiplier_oracle,
    fraclap_balakrishnan,
    fraclap_pointwise,
    fraclap_spectral,
    fundamental_solution,
    fundamental_solution_field,
    gamma_ns,
    k_constant,
    laplacian_mean_value_estimate,
    riesz_constant,
    riesz_potential,
)
from .heatsg import apply_pt, apply_pth, heat_kernel, subordination_newtonian
from .quad import QuadResult, QuadSpec, integrate_halfline, integrate_pv
from .report import CheckReport
from .specfun import SpecialValue, bessel, beta, gamma, hyp0f1, hyp2f1, pochhammer

__version__ = "0.1.0"
