"""Exact torus twists of coframe models with Hermitian and hypercomplex data."""

from .scalar import GaussianRational, PoleError, Scalar, UnknownVariableError
from .exterior import (
    CoframeModel,
    Form,
    Report,
    VectorField,
    VectorValuedTwoForm,
    exterior_derivative,
    interior,
    lie_bracket,
    lie_derivative,
    validate_model,
    wedge,
)
from .hermitian import (
    AlmostComplexStructure,
    HermitianMetric,
    apply_all,
    apply_index,
    bismut_torsion,
    derivation_action,
    is_skt,
    kaehler_form,
    nijenhuis,
    script_l,
    type_component,
)
from .twist import (
    TwistData,
    bracket_nijenhuis,
    build_twisted_model,
    dc11_transfer,
    dc_transfer,
    dual_twist_data,
    nijenhuis_transfer,
    torsion_transfer,
    twist_integrability,
    twist_tensor,
    twisted_bracket,
    twisted_differential,
    validate_twist_data,
)
from .quaternionic import (
    HypercomplexTriple,
    hkt_twist_condition,
    hypercomplex_twist_condition,
    is_hkt,
    is_hypercomplex,
    is_instanton,
    sl_volume_check,
    volume_twist_condition,
)
from .modelfile import ModelFile, format_model_file, parse_model_file
from .zoo import make_example, solve_lifting_function

__version__ = "0.1.0"
