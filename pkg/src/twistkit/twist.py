"""Torus twists of coframe models.

Twist data ``(xi, F, a)`` consists of commuting invariant fields ``xi_i``
(indexed by the acting torus), closed invariant 2-forms ``F_j`` (indexed by
the principal torus) and an invertible matrix of functions ``a[j][i]``
with ``da = -xi _| F``.  Writing ``b = a^{-1}`` (so ``b[i][j]``), the twist
replaces ``d`` on invariant forms by

    d_W alpha = d alpha - sum_{i,j} b[i][j] F_j ^ (xi_i _| alpha)

and the bracket of invariant fields by
``[X, Y] - sum_{i,j} b[i][j] F_j(X, Y) xi_i``.

These two rules disagree in sign: the frame brackets of the twisted model
``W`` (read off from ``d_W`` via ``e^k([X_a, X_b]) = -de^k(X_a, X_b)``) are
``[X, Y] + sum b[i][j] F_j(X, Y) xi_i``.  Consequently the Nijenhuis tensor
of ``W`` is ``N_I - (1 - L_I) F``, while the bracket rule above gives
``N_I + (1 - L_I) F``.  Both are available (see ``nijenhuis_transfer`` and
``bracket_nijenhuis``); integrability verdicts do not depend on the sign.
"""

from __future__ import annotations

from typing import Sequence

from . import matrix as mx
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
    NonIntegrableError,
    apply_all,
    bismut_torsion,
    nijenhuis,
    preserves_structure,
    script_l,
    type_component,
)
from .scalar import ZERO, Scalar

__all__ = [
    "TwistData",
    "TwistError",
    "NonInvariantError",
    "validate_twist_data",
    "twist_tensor",
    "twisted_differential",
    "twisted_bracket",
    "build_twisted_model",
    "dual_twist_data",
    "twist_integrability",
    "nijenhuis_transfer",
    "bracket_nijenhuis",
    "torsion_transfer",
    "dc_transfer",
    "dc11_transfer",
]


class TwistError(ValueError):
    """Twist data failed validation."""

    def __init__(self, message: str, report: Report | None = None):
        super().__init__(message)
        self.report = report


class NonInvariantError(ValueError):
    """Input is not invariant under the acting torus."""


class TwistData:
    """Fields ``xi``, curvature forms ``F`` and lifting matrix ``a[j][i]``.

    Instances are treated as immutable; ``a`` is stored as a tuple of rows.
    """

    def __init__(self, xi: Sequence[VectorField], F: Sequence[Form], a):
        self.xi = tuple(xi)
        self.F = tuple(F)
        self.a = tuple(tuple(r) for r in mx.as_matrix(a))
        self._b = None

    @property
    def rank(self) -> int:
        return len(self.xi)

    def a_matrix(self) -> list[list[Scalar]]:
        return [list(r) for r in self.a]

    def a_inverse(self) -> list[list[Scalar]]:
        """``b = a^{-1}``, indexed ``b[i][j]``; raises on singular or non-square ``a``."""
        if self._b is None:
            self._check_shape()
            self._b = mx.inverse(self.a_matrix())
        return self._b

    def _check_shape(self):
        n, n2 = len(self.F), len(self.xi)
        r, c = mx.shape(self.a_matrix())
        if (r, c) != (n, n2) or n != n2:
            raise TwistError(f"a must be {n}x{n2} and square; got {r}x{c} with {n} forms and {n2} fields")

    def __eq__(self, other):
        if not isinstance(other, TwistData):
            return NotImplemented
        return self.xi == other.xi and self.F == other.F and self.a == other.a

    def __hash__(self):
        return hash((self.xi, self.F, self.a))

    def __repr__(self):
        return f"TwistData(rank={self.rank})"


def validate_twist_data(M: CoframeModel, T: TwistData) -> Report:
    """Report every twist-data condition, with witnesses for violations."""
    rep = Report("validate_twist_data")
    n = len(T.xi)
    shape_ok = mx.shape(T.a_matrix()) == (len(T.F), n) and len(T.F) == n
    rep.checks["a is square of size rank"] = shape_ok
    if not shape_ok:
        rep.witnesses["shape"] = (len(T.F), n, mx.shape(T.a_matrix()))
        return rep
    degrees_ok = all(F.degree == 2 or F.is_zero() for F in T.F)
    rep.checks["F are 2-forms"] = degrees_ok
    if not degrees_ok:
        return rep
    det = mx.det(T.a_matrix())
    rep.checks["a invertible"] = not det.is_zero()
    rep.witnesses["det a"] = det

    bad = {}
    for j, F in enumerate(T.F):
        for i, X in enumerate(T.xi):
            lhs = M.differential(T.a[j][i])
            rhs = -interior(X, F) if not F.is_zero() else Form.zero(1)
            if lhs != rhs:
                bad[f"d a[{j}][{i}] + xi_{i} _| F_{j}"] = lhs - rhs
    rep.checks["da = -xi _| F"] = not bad
    rep.witnesses.update(bad)

    bad = {}
    for j, F in enumerate(T.F):
        for i, X in enumerate(T.xi):
            L = lie_derivative(M, X, F)
            if not L.is_zero():
                bad[f"L_xi_{i} F_{j}"] = L
    rep.checks["L_xi F = 0"] = not bad
    rep.witnesses.update(bad)

    bad = {}
    for j, F in enumerate(T.F):
        for i in range(n):
            for k in range(i + 1, n):
                v = F.evaluate(T.xi[i], T.xi[k]) if not F.is_zero() else ZERO
                if not v.is_zero():
                    bad[f"F_{j}(xi_{i}, xi_{k})"] = v
    rep.checks["F(xi, xi) = 0"] = not bad
    rep.witnesses.update(bad)

    bad = {}
    for i in range(n):
        for k in range(i + 1, n):
            br = lie_bracket(M, T.xi[i], T.xi[k])
            if not br.is_zero():
                bad[f"[xi_{i}, xi_{k}]"] = br
    rep.checks["[xi, xi] = 0"] = not bad
    rep.witnesses.update(bad)

    bad = {}
    for x in M.coordinates:
        for i, X in enumerate(T.xi):
            v = M.apply(X, Scalar.var(x))
            if not v.is_zero():
                bad[f"d{x}(xi_{i})"] = v
    rep.checks["dx(xi) = 0"] = not bad
    rep.witnesses.update(bad)

    bad = {}
    for j, F in enumerate(T.F):
        dF = exterior_derivative(M, F)
        if not dF.is_zero():
            bad[f"dF_{j}"] = dF
    rep.checks["dF = 0"] = not bad
    rep.witnesses.update(bad)
    return rep


def _require_valid(M: CoframeModel, T: TwistData):
    rep = validate_twist_data(M, T)
    if not rep.passed:
        raise TwistError("invalid twist data: " + ", ".join(rep.failures()), rep)


def twist_tensor(T: TwistData) -> VectorValuedTwoForm:
    """``sum_{i,j} b[i][j] xi_i (x) F_j``."""
    b = T.a_inverse()
    entries = []
    for i, X in enumerate(T.xi):
        for j, F in enumerate(T.F):
            if not b[i][j].is_zero() and not F.is_zero():
                entries.append((X, F * b[i][j]))
    return VectorValuedTwoForm(entries)


def _correction(T: TwistData, alpha: Form) -> Form:
    """``sum_{i,j} b[i][j] F_j ^ (xi_i _| alpha)``."""
    b = T.a_inverse()
    out = Form.zero(alpha.degree + 1)
    for i, X in enumerate(T.xi):
        contracted = interior(X, alpha)
        if contracted.is_zero():
            continue
        for j, F in enumerate(T.F):
            if not b[i][j].is_zero() and not F.is_zero():
                out = out + wedge(F, contracted) * b[i][j]
    return out


def _require_invariant(M: CoframeModel, T: TwistData, alpha: Form):
    for i, X in enumerate(T.xi):
        L = lie_derivative(M, X, alpha)
        if not L.is_zero():
            raise NonInvariantError(f"form is not invariant under xi_{i}: L_xi {M.format(alpha)} = {M.format(L)}")


def twisted_differential(M: CoframeModel, T: TwistData, alpha, check: bool = True) -> Form:
    """``d_W alpha`` for an invariant form; non-invariant input raises NonInvariantError."""
    if not isinstance(alpha, Form):
        alpha = Form.function(alpha)
    if check:
        _require_invariant(M, T, alpha)
    if alpha.degree == 0:
        return exterior_derivative(M, alpha.scalar())
    return exterior_derivative(M, alpha) - _correction(T, alpha)


def twisted_bracket(M: CoframeModel, T: TwistData, X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y] - sum b[i][j] F_j(X, Y) xi_i`` for invariant ``X``, ``Y``."""
    for V, label in ((X, "X"), (Y, "Y")):
        for i, xi in enumerate(T.xi):
            if not lie_bracket(M, xi, V).is_zero():
                raise NonInvariantError(f"{label} is not invariant under xi_{i}")
    b = T.a_inverse()
    out = lie_bracket(M, X, Y)
    for j, F in enumerate(T.F):
        if F.is_zero():
            continue
        v = F.evaluate(X, Y)
        if v.is_zero():
            continue
        for i, xi in enumerate(T.xi):
            if not b[i][j].is_zero():
                out = out - xi * (b[i][j] * v)
    return out


def build_twisted_model(M: CoframeModel, T: TwistData) -> CoframeModel:
    """Same coframe and coordinates, with ``de^k`` replaced by ``d_W e^k``."""
    _require_valid(M, T)
    structure = [twisted_differential(M, T, Form.basis(k)) for k in range(M.dim)]
    return M.with_structure(structure)


def dual_twist_data(M: CoframeModel, T: TwistData) -> TwistData:
    """Twist data on ``W`` whose twist gives back ``M``.

    ``zeta_j = -sum_i b[i][j] xi_i``, ``F_W[i] = sum_j b[i][j] F_j`` and
    ``a_W = b``; then ``zeta _| F_W = -d(a^{-1})`` on ``W``.
    """
    _require_valid(M, T)
    b = T.a_inverse()
    n = T.rank
    zeta = []
    for j in range(n):
        v = VectorField()
        for i in range(n):
            v = v - T.xi[i] * b[i][j]
        zeta.append(v)
    FW = []
    for i in range(n):
        f = Form.zero(2)
        for j in range(n):
            f = f + T.F[j] * b[i][j]
        FW.append(f)
    return TwistData(zeta, FW, b)


def _adapted_basis_conditions(M: CoframeModel, T: TwistData, Jc: AlmostComplexStructure, s: int, r: int):
    """Adapted-basis conditions; returns (holds, witnesses)."""
    n = T.rank
    if not (0 <= 2 * s <= r <= n):
        raise ValueError(f"orbit data needs 0 <= 2s <= r <= n, got s={s}, r={r}, n={n}")
    xi = T.xi
    for j in range(s):
        if Jc(xi[2 * j]) != xi[2 * j + 1]:
            raise ValueError(f"basis not adapted: I xi_{2 * j} != xi_{2 * j + 1}")
    for k in range(r, n):
        if not xi[k].is_zero():
            raise ValueError(f"basis not adapted: xi_{k} should vanish")
    vecs = list(xi[:r]) + [Jc(xi[k]) for k in range(2 * s, r)]
    if vecs:
        rows = [[v.component(t) for t in range(M.dim)] for v in vecs]
        if mx.rank(rows) != len(vecs):
            raise ValueError("basis not adapted: orbit directions are not independent")
    b = T.a_inverse()
    Fk = []
    for i in range(n):
        f = Form.zero(2)
        for j in range(n):
            f = f + T.F[j] * b[i][j]
        Fk.append(f)
    witnesses = {}
    ok = True
    iu = Scalar.parse("i")
    for j in range(s):
        part = type_component(Jc, Fk[2 * j] + Fk[2 * j + 1] * iu, 0, 2)
        if not part.is_zero():
            ok = False
            witnesses[f"(F_{2 * j}+iF_{2 * j + 1})^(0,2)"] = part
    for k in range(2 * s, r):
        F = Fk[k]
        part = F - type_component(Jc, F, 1, 1)
        if not part.is_zero():
            ok = False
            witnesses[f"F_{k} - F_{k}^(1,1)"] = part
    return ok, witnesses


def twist_integrability(M: CoframeModel, T: TwistData, Jc: AlmostComplexStructure, orbit=None) -> Report:
    """Decide integrability of the twisted structure via ``(1 - L_I) F = 0``.

    With ``orbit=(s, r)`` the fields ``xi`` are taken as an adapted basis and
    the type conditions on ``a^{-1} F`` are evaluated as well; the two
    verdicts must agree.
    """
    if not nijenhuis(M, Jc).is_zero():
        raise NonIntegrableError(f"{Jc.name} is not integrable on the base model")
    for i, X in enumerate(T.xi):
        if not preserves_structure(M, X, Jc):
            raise NonInvariantError(f"xi_{i} does not preserve {Jc.name}")
    FF = twist_tensor(T)
    defect = FF - script_l(Jc, FF)
    rep = Report("twist_integrability")
    rep.checks["(1 - L_I) F = 0"] = defect.is_zero()
    rep.witnesses["(1 - L_I) F"] = defect
    if orbit is not None:
        s, r = orbit
        ok, wit = _adapted_basis_conditions(M, T, Jc, s, r)
        rep.witnesses["type conditions"] = ok
        rep.witnesses.update(wit)
        agree = ok == defect.is_zero()
        if not agree:
            raise AssertionError("type conditions and (1 - L_I) F disagree")
        rep.checks["type conditions agree"] = agree
    return rep


def nijenhuis_transfer(M: CoframeModel, T: TwistData, Jc: AlmostComplexStructure) -> VectorValuedTwoForm:
    """``N_I + (1 - L_I) F``, the predicted Nijenhuis tensor of the twist."""
    FF = twist_tensor(T)
    return nijenhuis(M, Jc) + FF - script_l(Jc, FF)


def bracket_nijenhuis(M: CoframeModel, T: TwistData, Jc: AlmostComplexStructure) -> VectorValuedTwoForm:
    """Nijenhuis tensor evaluated with ``twisted_bracket`` on frame fields.

    Frame fields must be invariant under ``xi``.  The result equals
    ``nijenhuis_transfer``; compare ``nijenhuis(build_twisted_model(M, T), Jc)``.
    """
    return nijenhuis(M, Jc, bracket=lambda X, Y: twisted_bracket(M, T, X, Y))


def _flats(g: HermitianMetric, T: TwistData) -> list[Form]:
    return [g.flat(X) for X in T.xi]


def torsion_transfer(M: CoframeModel, T: TwistData, g: HermitianMetric, Jc: AlmostComplexStructure,
                     c: Form | None = None) -> Form:
    """``c - sum b[i][j] I F_j ^ xi_i^flat``, the torsion of the twist."""
    if c is None:
        c = bismut_torsion(M, g, Jc)
    b = T.a_inverse()
    flats = _flats(g, T)
    out = c
    for j, F in enumerate(T.F):
        IF = apply_all(Jc, F)
        for i in range(T.rank):
            if not b[i][j].is_zero():
                out = out - wedge(IF, flats[i]) * b[i][j]
    return out


def dc_transfer(M: CoframeModel, T: TwistData, g: HermitianMetric, Jc: AlmostComplexStructure,
                c: Form | None = None) -> Form:
    """``dc_W`` expanded in base quantities, including the derivative of ``a^{-1}``."""
    if c is None:
        c = bismut_torsion(M, g, Jc)
    b = T.a_inverse()
    n = T.rank
    xi, F = T.xi, T.F
    flats = _flats(g, T)
    IF = [apply_all(Jc, f) for f in F]
    out = exterior_derivative(M, c)
    for i in range(n):
        xc = interior(xi[i], c) if c.degree else Form.zero(2)
        dflat = exterior_derivative(M, flats[i])
        for j in range(n):
            if b[i][j].is_zero():
                continue
            term = (wedge(F[j], xc) + wedge(exterior_derivative(M, IF[j]), flats[i])
                    + wedge(IF[j], dflat))
            out = out - term * b[i][j]
    for i in range(n):
        for j in range(n):
            if b[i][j].is_zero():
                continue
            for k in range(n):
                gik = g.inner(xi[i], xi[k])
                xIF = interior(xi[k], IF[j])
                for l in range(n):
                    w = b[i][j] * b[k][l]
                    if w.is_zero():
                        continue
                    term = wedge(F[l], IF[j]) * gik + wedge(F[l], xIF, flats[i])
                    out = out + term * w
    # derivative of b: db[i][j] = sum b[i][j'] (xi_i' _| F_j') b[i'][j]
    for i in range(n):
        for j in range(n):
            for jp in range(n):
                for ip in range(n):
                    w = b[i][jp] * b[ip][j]
                    if w.is_zero():
                        continue
                    out = out - wedge(interior(xi[ip], F[jp]), IF[j], flats[i]) * w
    return out


def dc11_transfer(M: CoframeModel, T: TwistData, g: HermitianMetric, Jc: AlmostComplexStructure,
                  c: Form | None = None) -> Form:
    """Instanton-case form ``dc - a^{-1} F ^ (xi _| c + d xi^flat - g(xi, xi) a^{-1} F)``."""
    if c is None:
        c = bismut_torsion(M, g, Jc)
    b = T.a_inverse()
    n = T.rank
    flats = _flats(g, T)
    out = exterior_derivative(M, c)
    for i in range(n):
        inner = (interior(T.xi[i], c) if c.degree else Form.zero(2)) + exterior_derivative(M, flats[i])
        for j in range(n):
            if not b[i][j].is_zero():
                out = out - wedge(T.F[j], inner) * b[i][j]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                gik = g.inner(T.xi[i], T.xi[k])
                if gik.is_zero():
                    continue
                for l in range(n):
                    w = b[i][j] * b[k][l] * gik
                    if not w.is_zero():
                        out = out + wedge(T.F[l], T.F[j]) * w
    return out
