"""Exact-arithmetic engine for minimal complexes over finite local rings,
graded homological invariants, and tower patching certificates."""

from .complexes import (
    FiniteModulePresentation,
    FreeComplex,
    TauProfile,
    cohomology,
    dual,
    koszul_complex,
    make_complex,
    minimize,
    tau_profile,
    tensor_along,
)
from .graded import (
    GradedModule,
    HAReport,
    ext_module,
    groebner_basis,
    minimal_graded_resolution,
    module_invariants,
    support_height_profile,
    verify_height_amplitude,
)
from .linalg import HowellForm, Matrix, expand_scalars, howell_form, kernel_and_solve
from .patcher import (
    FreenessCertificate,
    PatchingTower,
    RInfinityModel,
    certify,
    patch,
    validate_hypotheses,
)
from .rings import (
    RingMap,
    RingSpec,
    RingTowerElement,
    coefficient_ring,
    graded_ring,
    make_patch_ring,
    reduction_map,
    ring_arith,
)
from .scenarios import ScenarioParams, gen_scenario

__version__ = "0.1.0"
