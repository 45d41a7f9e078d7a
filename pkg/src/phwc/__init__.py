"""Toolkit for pseudo horizontally weakly conformal maps.

Residual checks for maps from Riemannian domains into Hermitian/Kaehler
charts, the associated f-structure and its integrability conditions, and a
Dirichlet-energy gradient flow that produces numerically harmonic maps.

The layers, bottom up:

- ``jet``: expression trees and second-order forward-mode jets, plus the
  Wirtinger views used everywhere complex derivatives appear;
- ``geometry``: metric fields on the domain and the target chart,
  Christoffel symbols, the Kaehler closedness residual, Laplace-Beltrami;
- ``maps``: smooth maps and the pointwise residuals (three equivalent PHWC
  forms, horizontal weak conformality fit, tension, pluriharmonicity,
  composition with +/-holomorphic maps);
- ``fstruct``: the associated f-structure, its algebra, Nijenhuis and
  parallelism defects, the fundamental 2-form conditions, and the theorem
  implication harness;
- ``flow``: explicit-Euler tension flow on flat torus grids;
- ``cli``: the manifest-driven command line (``phwc check|sweep|flow|
  verify-paper|report``).
"""

from .jet import (
    Const,
    DivisionNearZero,
    Expr,
    Jet2,
    ParseError,
    Var,
    VariableIndexOutOfRange,
    conj,
    conj_jet,
    cos,
    differentiate,
    eval_jet2,
    exp,
    im,
    parse_expr,
    re,
    sin,
    var,
)
from .geometry import (
    HermitianMetricField,
    MetricField,
    MetricNotPD,
    MetricNotSPD,
    SourceNotKaehler,
    TargetNotKaehler,
    christoffel_domain,
    christoffel_kaehler,
    kaehler_residual,
    laplace_beltrami,
)
from .maps import (
    DimensionMismatch,
    HWCReport,
    SmoothMap,
    TensionPoint,
    antiholomorphy_residual,
    compose,
    differential,
    holomorphy_residual,
    hwc_report,
    isotropy_residual,
    phwc_residual_commutator,
    phwc_residual_coord,
    pluriharmonic_residual,
    tension,
)
from .fstruct import (
    FStructurePoint,
    NotPHWCAtPoint,
    RankDeficiencyAmbiguous,
    RankJumpOnStencil,
    SuiteSample,
    SuiteTolerances,
    associated_f_structure,
    constant_f_field,
    domega_12_residual,
    dphi_kernel_residual,
    f_field_of_map,
    f_holomorphy_residual,
    fundamental_two_form,
    met_residual,
    nijenhuis_residual,
    parallel_residual,
    theorem_suite,
)
from .flow import (
    FlowConfig,
    GridMap,
    StepSizeUnderflow,
    dirichlet_energy,
    discrete_phwc_residual,
    discrete_tension,
    grid_to_smooth_map,
    run_flow,
    save_snapshot,
)

__version__ = "0.1.0"
