"""Almost complex structures, type decomposition, Nijenhuis tensor and Bismut torsion.

Sign conventions: on a p-form the index operator is
``J_(k) alpha(X_1, ..., X_p) = -alpha(X_1, ..., J X_k, ..., X_p)`` and ``J alpha``
means ``J_(1) ... J_(p) alpha``.  On 2-forms this is ``F(J., J.)``, and the
Bismut torsion is ``c = -J d(omega)``, i.e. ``c(X, Y, Z) = d omega(JX, JY, JZ)``.
With these signs ``Lambda^{1,0}`` is the ``-i`` eigenspace of ``J_(1)``.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Mapping, Sequence

from . import matrix as mx
from .exterior import (
    CoframeModel,
    DegreeError,
    Form,
    Report,
    VectorField,
    VectorValuedTwoForm,
    _sort_sign,
    exterior_derivative,
    lie_bracket,
    wedge,
)
from .scalar import ONE, ZERO, GaussianRational, Scalar

__all__ = [
    "AlmostComplexStructure",
    "HermitianMetric",
    "Tensor",
    "apply_index",
    "apply_all",
    "derivation_action",
    "type_component",
    "type_decomposition",
    "script_l",
    "nijenhuis",
    "is_integrable",
    "kaehler_form",
    "torsion_form",
    "bismut_torsion",
    "is_skt",
    "preserves_structure",
    "NotComplexError",
    "IncompatibleMetricError",
    "NonIntegrableError",
]

HALF = Scalar(GaussianRational(1, 0)) / 2
I_UNIT = Scalar(GaussianRational(0, 1))


class NotComplexError(ValueError):
    """Matrix does not square to minus the identity."""


class IncompatibleMetricError(ValueError):
    """Metric is not Hermitian for the given structure."""


class NonIntegrableError(ValueError):
    """An operation requiring an integrable structure got a non-integrable one."""


class AlmostComplexStructure:
    """Frame matrix ``m`` with ``J X_i = sum_k m[k][i] X_k`` and ``m^2 = -1``."""

    def __init__(self, matrix, name: str = "J"):
        m = mx.as_matrix(matrix)
        if not mx.is_square(m):
            raise NotComplexError(f"{name}: matrix is not square")
        n = len(m)
        if not mx.equal(mx.matmul(m, m), mx.identity(n, -1)):
            raise NotComplexError(f"{name}: matrix does not square to -Id")
        self.matrix = m
        self.name = name
        self.dim = n
        self._one_form_cache: dict[int, Form] = {}

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[tuple[int, int]], name: str = "J"):
        """Structure with ``J X_a = X_b`` and ``J X_b = -X_a`` for each pair."""
        m = mx.identity(n, ZERO)
        for a, b in pairs:
            m[b][a] = ONE
            m[a][b] = -ONE
        return cls(m, name)

    @classmethod
    def from_images(cls, images: Sequence[VectorField], name: str = "J"):
        """Structure from the images ``J X_i`` of the frame fields."""
        n = len(images)
        m = [[images[i].component(k) for i in range(n)] for k in range(n)]
        return cls(m, name)

    def __call__(self, X: VectorField) -> VectorField:
        out: dict[int, Scalar] = {}
        for i, c in X.components.items():
            for k in range(self.dim):
                v = self.matrix[k][i]
                if not v.is_zero():
                    out[k] = out.get(k, ZERO) + v * c
        return VectorField(out)

    def on_one_form(self, t: int) -> Form:
        """``J_(1) e^t = -e^t o J``."""
        f = self._one_form_cache.get(t)
        if f is None:
            f = Form(1, {(i,): -self.matrix[t][i] for i in range(self.dim) if not self.matrix[t][i].is_zero()})
            self._one_form_cache[t] = f
        return f

    def compose(self, other: "AlmostComplexStructure") -> list[list[Scalar]]:
        """Matrix of ``self o other``."""
        return mx.matmul(self.matrix, other.matrix)

    def variables(self) -> set[str]:
        return {v for row in self.matrix for x in row for v in x.variables()}

    def __eq__(self, other):
        if not isinstance(other, AlmostComplexStructure):
            return NotImplemented
        return mx.equal(self.matrix, other.matrix)

    def __repr__(self):
        return f"AlmostComplexStructure({self.name}, {mx.shape(self.matrix)[0]}x{mx.shape(self.matrix)[0]})"


class Tensor:
    """Covariant tensor by components on frame tuples, for non-alternating results."""

    __slots__ = ("degree", "components")

    def __init__(self, degree: int, components: Mapping[tuple[int, ...], Scalar]):
        self.degree = degree
        self.components = {k: v for k, v in components.items() if not v.is_zero()}

    @classmethod
    def from_form(cls, alpha: Form) -> "Tensor":
        comps = {}
        for idx, c in alpha.terms.items():
            for perm in permutations(range(len(idx))):
                key = tuple(idx[p] for p in perm)
                sign, _ = _sort_sign(key)
                comps[key] = c if sign > 0 else -c
        return cls(alpha.degree, comps)

    def is_alternating(self) -> bool:
        for key, v in self.components.items():
            sign, sk = _sort_sign(key)
            if not sign:
                return False
            ref = self.components.get(sk, ZERO)
            if v != (ref if sign > 0 else -ref):
                return False
        return True

    def to_form(self) -> Form:
        if not self.is_alternating():
            raise DegreeError("tensor is not alternating")
        return Form(self.degree, {k: v for k, v in self.components.items() if list(k) == sorted(k)})

    def to_form_if_alternating(self):
        return self.to_form() if self.is_alternating() else self

    def __eq__(self, other):
        if isinstance(other, Form):
            other = Tensor.from_form(other)
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.degree == other.degree and self.components == other.components

    def __neg__(self):
        return Tensor(self.degree, {k: -v for k, v in self.components.items()})

    def __repr__(self):
        return f"Tensor({self.degree}, {len(self.components)} components)"


def apply_index(Jc: AlmostComplexStructure, alpha, k: int):
    """``J_(k) alpha`` for slot ``k`` (1-based).

    Returns a Form when the result is alternating (always for degree 1),
    otherwise a :class:`Tensor`.
    """
    degree = alpha.degree
    if not 1 <= k <= degree:
        raise IndexError(f"slot {k} out of range for degree {degree}")
    if degree == 1 and isinstance(alpha, Form):
        out = Form.zero(1)
        for (t,), c in alpha.terms.items():
            out = out + Jc.on_one_form(t) * c
        return out
    T = Tensor.from_form(alpha) if isinstance(alpha, Form) else alpha
    slot = k - 1
    out: dict[tuple[int, ...], Scalar] = {}
    m = Jc.matrix
    for key, v in T.components.items():
        j = key[slot]
        # J_(k) T(.., X_i, ..) = -sum_j m[j][i] T(.., X_j, ..)
        for i in range(Jc.dim):
            if m[j][i].is_zero():
                continue
            nk = key[:slot] + (i,) + key[slot + 1:]
            out[nk] = out.get(nk, ZERO) - m[j][i] * v
    return Tensor(degree, out).to_form_if_alternating()


def apply_all(Jc: AlmostComplexStructure, alpha: Form) -> Form:
    """``J alpha = J_(1) ... J_(p) alpha``; multiplicative under the wedge."""
    if alpha.degree == 0:
        return alpha
    out = Form.zero(alpha.degree)
    for idx, c in alpha.terms.items():
        out = out + wedge(*[Jc.on_one_form(t) for t in idx]) * c
    return out


def derivation_action(Jc: AlmostComplexStructure, alpha: Form) -> Form:
    """``sum_k J_(k) alpha``, the derivation extension of ``J_(1)``."""
    if alpha.degree == 0:
        return Form.zero(0)
    out = Form.zero(alpha.degree)
    for idx, c in alpha.terms.items():
        for k, t in enumerate(idx):
            factors = [Form.basis(s) for s in idx]
            factors[k] = Jc.on_one_form(t)
            out = out + wedge(*factors) * c
    return out


def _projectors(Jc: AlmostComplexStructure, t: int) -> tuple[Form, Form]:
    e = Form.basis(t)
    Je = Jc.on_one_form(t) * I_UNIT
    return (e + Je) * HALF, (e - Je) * HALF


def type_component(Jc: AlmostComplexStructure, alpha: Form, p: int, q: int) -> Form:
    """The ``(p, q)`` part of ``alpha``.

    Each coframe factor is split as ``e = P10 e + P01 e`` with
    ``P10 e = (e + i J_(1) e) / 2``; collecting the products with ``p`` factors
    of type (1,0) gives the projection.
    """
    if p < 0 or q < 0 or p + q != alpha.degree:
        raise DegreeError(f"type ({p},{q}) does not match degree {alpha.degree}")
    if alpha.degree == 0:
        return alpha
    out = Form.zero(alpha.degree)
    for idx, c in alpha.terms.items():
        parts = [_projectors(Jc, t) for t in idx]
        for holo in combinations(range(len(idx)), p):
            hs = set(holo)
            out = out + wedge(*[parts[k][0] if k in hs else parts[k][1] for k in range(len(idx))]) * c
    return out


def type_decomposition(Jc: AlmostComplexStructure, alpha: Form) -> dict[tuple[int, int], Form]:
    n = alpha.degree
    out = {}
    for p in range(n + 1):
        part = type_component(Jc, alpha, p, n - p)
        if not part.is_zero():
            out[(p, n - p)] = part
    return out


def script_l(Jc: AlmostComplexStructure, tensor: VectorValuedTwoForm) -> VectorValuedTwoForm:
    """``J_(12) + J_(13) + J_(23)`` on ``T (x) Lambda^2``; slot 1 is the vector slot."""
    comps: dict[int, Form] = {}
    for k, F in tensor.components.items():
        JF = apply_all(Jc, F)
        DF = derivation_action(Jc, F)
        comps[k] = comps.get(k, Form.zero(2)) + JF
        JX = Jc(VectorField.frame(k))
        for t, c in JX.components.items():
            comps[t] = comps.get(t, Form.zero(2)) + DF * c
    return VectorValuedTwoForm.from_components(comps)


def nijenhuis(M: CoframeModel, Jc: AlmostComplexStructure, bracket=None) -> VectorValuedTwoForm:
    """``N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]`` assembled on frame pairs.

    ``bracket`` overrides the Lie bracket (used by the twist module to feed
    in a twisted bracket).
    """
    _check_dims(M, Jc)
    if bracket is None:
        def bracket(X, Y):
            return lie_bracket(M, X, Y)
    comps: dict[int, dict] = {}
    n = M.dim
    frame = [VectorField.frame(a) for a in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            X, Y = frame[a], frame[b]
            JX, JY = Jc(X), Jc(Y)
            val = bracket(JX, JY) - Jc(bracket(JX, Y)) - Jc(bracket(X, JY)) - bracket(X, Y)
            for k, c in val.components.items():
                comps.setdefault(k, {})[(a, b)] = c
    return VectorValuedTwoForm.from_components({k: Form(2, t) for k, t in comps.items()})


def is_integrable(M: CoframeModel, Jc: AlmostComplexStructure) -> bool:
    return nijenhuis(M, Jc).is_zero()


def preserves_structure(M: CoframeModel, X: VectorField, Jc: AlmostComplexStructure) -> bool:
    """``L_X J = 0``, tested as ``[X, J Y] = J [X, Y]`` on the frame."""
    for a in range(M.dim):
        Y = VectorField.frame(a)
        if lie_bracket(M, X, Jc(Y)) != Jc(lie_bracket(M, X, Y)):
            return False
    return True


def _check_dims(M: CoframeModel, Jc: AlmostComplexStructure):
    if Jc.dim != M.dim:
        raise ValueError(f"structure {Jc.name} has size {Jc.dim}, model has dimension {M.dim}")


class HermitianMetric:
    """Symmetric nondegenerate matrix ``g[i][j] = g(X_i, X_j)``."""

    def __init__(self, matrix, name: str = "g"):
        g = mx.as_matrix(matrix)
        if not mx.is_square(g):
            raise ValueError(f"{name}: metric matrix is not square")
        if not mx.equal(g, mx.transpose(g)):
            raise ValueError(f"{name}: metric matrix is not symmetric")
        if mx.det(g).is_zero():
            raise ValueError(f"{name}: metric is degenerate")
        self.matrix = g
        self.name = name
        self.dim = len(g)

    @classmethod
    def identity(cls, n: int, name: str = "g") -> "HermitianMetric":
        return cls(mx.identity(n), name)

    def inner(self, X: VectorField, Y: VectorField) -> Scalar:
        total = ZERO
        for i, x in X.components.items():
            for j, y in Y.components.items():
                g = self.matrix[i][j]
                if not g.is_zero():
                    total = total + g * x * y
        return total

    def flat(self, X: VectorField) -> Form:
        """``X^flat = g(X, .)``."""
        comps = {}
        for j in range(self.dim):
            s = ZERO
            for i, x in X.components.items():
                if not self.matrix[i][j].is_zero():
                    s = s + x * self.matrix[i][j]
            if not s.is_zero():
                comps[(j,)] = s
        return Form(1, comps)

    def compatible(self, Jc: AlmostComplexStructure) -> bool:
        m = Jc.matrix
        return mx.equal(mx.matmul(mx.matmul(mx.transpose(m), self.matrix), m), self.matrix)

    def require_compatible(self, Jc: AlmostComplexStructure):
        if Jc.dim != self.dim:
            raise IncompatibleMetricError(f"{self.name} and {Jc.name} have different sizes")
        if not self.compatible(Jc):
            raise IncompatibleMetricError(f"{self.name} is not Hermitian for {Jc.name}")

    def __eq__(self, other):
        if not isinstance(other, HermitianMetric):
            return NotImplemented
        return mx.equal(self.matrix, other.matrix)

    def __repr__(self):
        return f"HermitianMetric({self.name}, {self.dim}x{self.dim})"


def kaehler_form(g: HermitianMetric, Jc: AlmostComplexStructure) -> Form:
    """``omega(X, Y) = g(JX, Y)``."""
    g.require_compatible(Jc)
    n = g.dim
    terms = {}
    for a in range(n):
        JXa = Jc(VectorField.frame(a))
        for b in range(a + 1, n):
            v = g.inner(JXa, VectorField.frame(b))
            if not v.is_zero():
                terms[(a, b)] = v
    return Form(2, terms)


def torsion_form(M: CoframeModel, g: HermitianMetric, Jc: AlmostComplexStructure) -> Form:
    """``-J d omega`` without the integrability guard."""
    _check_dims(M, Jc)
    omega = kaehler_form(g, Jc)
    return -apply_all(Jc, exterior_derivative(M, omega))


def bismut_torsion(M: CoframeModel, g: HermitianMetric, Jc: AlmostComplexStructure) -> Form:
    """Torsion 3-form ``c = -J d omega`` of the Bismut connection.

    Raises NonIntegrableError unless ``J`` is integrable on ``M``.
    """
    N = nijenhuis(M, Jc)
    if not N.is_zero():
        raise NonIntegrableError(f"{Jc.name} is not integrable: Nijenhuis tensor {M.format(N)}")
    return torsion_form(M, g, Jc)


def is_skt(M: CoframeModel, g: HermitianMetric, Jc: AlmostComplexStructure,
           require_integrable: bool = True) -> Report:
    """Report ``c``, ``dc`` and whether ``dc = 0``."""
    c = bismut_torsion(M, g, Jc) if require_integrable else torsion_form(M, g, Jc)
    dc = exterior_derivative(M, c)
    omega = kaehler_form(g, Jc)
    report = Report("is_skt")
    report.checks["dc = 0"] = dc.is_zero()
    report.witnesses["c"] = c
    report.witnesses["dc"] = dc
    report.witnesses["domega"] = exterior_derivative(M, omega)
    return report
