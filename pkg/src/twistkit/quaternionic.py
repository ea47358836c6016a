"""Hypercomplex triples, HKT conditions and their behaviour under twists."""

from __future__ import annotations

from . import matrix as mx
from .exterior import CoframeModel, DegreeError, Form, Report, exterior_derivative, interior, wedge
from .hermitian import (
    AlmostComplexStructure,
    HermitianMetric,
    NonIntegrableError,
    apply_all,
    kaehler_form,
    nijenhuis,
    preserves_structure,
    script_l,
    type_component,
)
from .scalar import GaussianRational, Scalar
from .twist import (
    NonInvariantError,
    TwistData,
    build_twisted_model,
    twist_tensor,
    twisted_differential,
)

__all__ = [
    "HypercomplexTriple",
    "QuaternionError",
    "is_hypercomplex",
    "is_hkt",
    "hkt_twist_terms",
    "hkt_twist_condition",
    "hypercomplex_twist_condition",
    "is_instanton",
    "volume_twist_condition",
    "sl_volume_check",
    "holomorphic_volume",
]

I_UNIT = Scalar(GaussianRational(0, 1))


class QuaternionError(ValueError):
    """The triple does not satisfy ``IJ = K = -JI``."""


class HypercomplexTriple:
    """Three almost complex structures with the quaternion relations."""

    def __init__(self, I: AlmostComplexStructure, J: AlmostComplexStructure, K: AlmostComplexStructure):
        if not (I.dim == J.dim == K.dim):
            raise QuaternionError("structures have different sizes")
        if not mx.equal(I.compose(J), K.matrix):
            raise QuaternionError("IJ != K")
        if not mx.equal(J.compose(I), mx.scale(K.matrix, -1)):
            raise QuaternionError("JI != -K")
        self.I, self.J, self.K = I, J, K
        self.dim = I.dim

    def __iter__(self):
        return iter((self.I, self.J, self.K))

    def items(self):
        return (("I", self.I), ("J", self.J), ("K", self.K))

    def __repr__(self):
        return f"HypercomplexTriple({self.I.name}, {self.J.name}, {self.K.name})"


def is_hypercomplex(M: CoframeModel, H: HypercomplexTriple) -> Report:
    rep = Report("is_hypercomplex")
    for label, A in H.items():
        N = nijenhuis(M, A)
        rep.checks[f"N_{label} = 0"] = N.is_zero()
        if not N.is_zero():
            rep.witnesses[f"N_{label}"] = N
    return rep


def _require_hyperhermitian(g: HermitianMetric, H: HypercomplexTriple):
    for A in H:
        g.require_compatible(A)


def is_hkt(M: CoframeModel, g: HermitianMetric, H: HypercomplexTriple) -> Report:
    """Check ``I d omega_I = J d omega_J = K d omega_K``.

    The Nijenhuis tensors are recorded as corroboration only.
    """
    _require_hyperhermitian(g, H)
    terms = {}
    for label, A in H.items():
        terms[label] = apply_all(A, exterior_derivative(M, kaehler_form(g, A)))
    rep = Report("is_hkt")
    rep.checks["I domega_I = J domega_J"] = terms["I"] == terms["J"]
    rep.checks["J domega_J = K domega_K"] = terms["J"] == terms["K"]
    for label, t in terms.items():
        rep.witnesses[f"{label} domega_{label}"] = t
    rep.witnesses["hypercomplex"] = is_hypercomplex(M, H).passed
    return rep


def hkt_twist_terms(T: TwistData, g: HermitianMetric, H: HypercomplexTriple) -> dict[str, Form]:
    """``sum b[i][j] A F_j ^ xi_i^flat`` for ``A = I, J, K``."""
    b = T.a_inverse()
    flats = [g.flat(X) for X in T.xi]
    out = {}
    for label, A in H.items():
        total = Form.zero(3)
        for j, F in enumerate(T.F):
            AF = apply_all(A, F)
            if AF.is_zero():
                continue
            for i in range(T.rank):
                if not b[i][j].is_zero():
                    total = total + wedge(AF, flats[i]) * b[i][j]
        out[label] = total
    return out


def _require_preserved(M: CoframeModel, T: TwistData, H: HypercomplexTriple):
    for label, A in H.items():
        for i, X in enumerate(T.xi):
            if not preserves_structure(M, X, A):
                raise NonInvariantError(f"xi_{i} does not preserve {label}")


def hkt_twist_condition(M: CoframeModel, T: TwistData, g: HermitianMetric, H: HypercomplexTriple,
                        cross_check: bool = True) -> Report:
    """Equality of the three twist terms; agrees with ``is_hkt`` on the twist."""
    base = is_hkt(M, g, H)
    if not base.passed:
        raise ValueError("base structure is not HKT")
    _require_preserved(M, T, H)
    terms = hkt_twist_terms(T, g, H)
    rep = Report("hkt_twist_condition")
    rep.checks["I-term = J-term"] = terms["I"] == terms["J"]
    rep.checks["J-term = K-term"] = terms["J"] == terms["K"]
    for label, t in terms.items():
        rep.witnesses[f"{label}-term"] = t
    if cross_check:
        W = build_twisted_model(M, T)
        twisted = is_hkt(W, g, H).passed
        if twisted != rep.passed:
            raise AssertionError("twist condition and HKT check on the twist disagree")
        rep.witnesses["is_hkt(twist)"] = twisted
    return rep


def hypercomplex_twist_condition(T: TwistData, H: HypercomplexTriple, M: CoframeModel | None = None) -> Report:
    """``L_A F = F`` for ``A = I, J, K``; with ``M`` given, cross-checked on the twist."""
    FF = twist_tensor(T)
    rep = Report("hypercomplex_twist_condition")
    for label, A in H.items():
        LF = script_l(A, FF)
        ok = LF == FF
        rep.checks[f"L_{label} F = F"] = ok
        if not ok:
            rep.witnesses[f"L_{label} F - F"] = LF - FF
    if M is not None:
        if not is_hypercomplex(M, H).passed:
            raise NonIntegrableError("base structure is not hypercomplex")
        _require_preserved(M, T, H)
        W = build_twisted_model(M, T)
        twisted = is_hypercomplex(W, H).passed
        if twisted != rep.passed:
            raise AssertionError("twist condition and hypercomplex check on the twist disagree")
        rep.witnesses["is_hypercomplex(twist)"] = twisted
    return rep


def is_instanton(F, H: HypercomplexTriple) -> bool:
    """True iff every form in ``F`` is of type (1,1) for ``I``, ``J`` and ``K``."""
    forms = [F] if isinstance(F, Form) else list(F)
    return all(type_component(A, f, 1, 1) == f for f in forms for A in H)


def volume_twist_condition(M: CoframeModel, T: TwistData, Jc: AlmostComplexStructure, Theta: Form) -> Report:
    """``sum b[i][j] xi_i _| F_j^{1,1} = 0``, cross-checked against ``d_W Theta = 0``.

    The equivalence only holds when the twist is complex; otherwise both
    sides are reported and no cross-check is made.
    """
    dTheta = exterior_derivative(M, Theta)
    if not dTheta.is_zero():
        raise ValueError("volume form is not closed")
    b = T.a_inverse()
    total = Form.zero(1)
    for j, F in enumerate(T.F):
        F11 = type_component(Jc, F, 1, 1)
        if F11.is_zero():
            continue
        for i, X in enumerate(T.xi):
            if not b[i][j].is_zero():
                total = total + interior(X, F11) * b[i][j]
    dW = twisted_differential(M, T, Theta)
    rep = Report("volume_twist_condition")
    rep.checks["a^-1 xi _| F^(1,1) = 0"] = total.is_zero()
    rep.witnesses["a^-1 xi _| F^(1,1)"] = total
    rep.witnesses["d_W Theta"] = dW
    complex_twist = nijenhuis(build_twisted_model(M, T), Jc).is_zero()
    rep.witnesses["twist complex"] = complex_twist
    if complex_twist and dW.is_zero() != total.is_zero():
        raise AssertionError("volume condition and d_W Theta disagree")
    return rep


def holomorphic_volume(g: HermitianMetric, H: HypercomplexTriple) -> Form:
    """``(omega_J + i omega_K)^m`` with ``4m`` the dimension."""
    if H.dim % 4:
        raise DegreeError("dimension is not a multiple of 4")
    m = H.dim // 4
    base = kaehler_form(g, H.J) + kaehler_form(g, H.K) * I_UNIT
    return wedge(*([base] * m))


def sl_volume_check(M: CoframeModel, H: HypercomplexTriple, Theta: Form) -> Report:
    """Report ``d Theta = 0`` and ``J Theta = conj(Theta)``."""
    if 2 * Theta.degree != M.dim:
        raise DegreeError(f"volume form has degree {Theta.degree}, expected {M.dim // 2}")
    rep = Report("sl_volume_check")
    dTheta = exterior_derivative(M, Theta)
    rep.checks["d Theta = 0"] = dTheta.is_zero()
    JTheta = apply_all(H.J, Theta)
    rep.checks["J Theta = conj Theta"] = JTheta == Theta.conjugate()
    rep.witnesses["d Theta"] = dTheta
    rep.witnesses["J Theta - conj Theta"] = JTheta - Theta.conjugate()
    return rep
