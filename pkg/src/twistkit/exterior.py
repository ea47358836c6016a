"""Coframe models and exterior calculus on their invariant forms.

A :class:`CoframeModel` is a finite coframe ``e^0..e^{N-1}`` together with
the 2-forms ``de^k`` and the differentials ``dx^j`` of global coordinates
written in the coframe.  Forms are sparse with :class:`~twistkit.scalar.Scalar`
coefficients on strictly increasing index tuples.

Conventions: wedge and evaluation use the determinant convention without
factorial prefactors, so ``(a ^ b)(u, v) = a(u) b(v) - a(v) b(u)``, and frame
brackets satisfy ``e^k([X_a, X_b]) = -de^k(X_a, X_b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .scalar import ONE, ZERO, Scalar, UnknownVariableError

__all__ = [
    "Form",
    "VectorField",
    "VectorValuedTwoForm",
    "CoframeModel",
    "Report",
    "wedge",
    "interior",
    "exterior_derivative",
    "lie_bracket",
    "lie_derivative",
    "validate_model",
    "apply_vector",
    "DegreeError",
    "ModelError",
]


class DegreeError(ValueError):
    """An operation received a form of unsuitable degree."""


class ModelError(ValueError):
    """A coframe model is malformed."""


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx``; 0 on a repeated index."""
    lst = list(idx)
    sign = 1
    # insertion sort counts transpositions; tuples are short
    for a in range(1, len(lst)):
        b = a
        while b > 0 and lst[b - 1] > lst[b]:
            lst[b - 1], lst[b] = lst[b], lst[b - 1]
            sign = -sign
            b -= 1
        if b > 0 and lst[b - 1] == lst[b]:
            return 0, ()
    return sign, tuple(lst)


def _merge_sign(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and sorted union for ``e^s ^ e^t``; sign 0 if they overlap."""
    if not s:
        return 1, t
    if not t:
        return 1, s
    out = []
    sign = 1
    i = j = 0
    ls, lt = len(s), len(t)
    while i < ls and j < lt:
        if s[i] < t[j]:
            out.append(s[i])
            i += 1
        elif s[i] > t[j]:
            out.append(t[j])
            j += 1
            if (ls - i) & 1:
                sign = -sign
        else:
            return 0, ()
    out.extend(s[i:])
    out.extend(t[j:])
    return sign, tuple(out)


class Form:
    """Sparse exterior form of fixed degree.

    Parameters
    ----------
    degree : int
        Form degree ``p >= 0``.
    terms : mapping, optional
        Index tuple -> coefficient.  Tuples need not be sorted; they are
        sorted with the permutation sign and repeated indices are dropped.
    """

    __slots__ = ("degree", "terms", "_hash")

    def __init__(self, degree: int, terms: Mapping | None = None):
        if degree < 0:
            raise DegreeError("negative degree")
        self.degree = degree
        out: dict = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DegreeError(f"index {idx} does not have length {degree}")
            sign, key = _sort_sign(idx)
            if not sign:
                continue
            c = Scalar.coerce(c)
            if c.is_zero():
                continue
            c = c if sign > 0 else -c
            if key in out:
                s = out[key] + c
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
            else:
                out[key] = c
        self.terms = out
        self._hash = None

    @classmethod
    def _raw(cls, degree: int, terms: dict) -> "Form":
        f = cls.__new__(cls)
        f.degree = degree
        f.terms = terms
        f._hash = None
        return f

    @classmethod
    def zero(cls, degree: int) -> "Form":
        return cls._raw(degree, {})

    @classmethod
    def basis(cls, *indices: int) -> "Form":
        return cls(len(indices), {tuple(indices): ONE})

    @classmethod
    def function(cls, f) -> "Form":
        f = Scalar.coerce(f)
        return cls._raw(0, {} if f.is_zero() else {(): f})

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, *indices: int) -> Scalar:
        sign, key = _sort_sign(indices)
        if not sign:
            return ZERO
        c = self.terms.get(key, ZERO)
        return c if sign > 0 else -c

    def scalar(self) -> Scalar:
        if self.degree != 0:
            raise DegreeError(f"form of degree {self.degree} is not a function")
        return self.terms.get((), ZERO)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for c in self.terms.values():
            out |= c.variables()
        return out

    def support(self) -> set[int]:
        return {t for idx in self.terms for t in idx}

    # -- linear structure -------------------------------------------------
    def _check_same_degree(self, other: "Form"):
        if self.degree != other.degree and self.terms and other.terms:
            raise DegreeError(f"cannot add forms of degree {self.degree} and {other.degree}")

    def __add__(self, other):
        if isinstance(other, (int, Scalar)) and not isinstance(other, bool):
            other = Form.function(other)
            if self.degree != 0 and not other.is_zero():
                raise DegreeError("cannot add a function to a form of positive degree")
        if not isinstance(other, Form):
            return NotImplemented
        self._check_same_degree(other)
        degree = self.degree if self.terms else other.degree
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                s = out[k] + c
                if s.is_zero():
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = c
        return Form._raw(degree, out)

    __radd__ = __add__

    def __neg__(self):
        return Form._raw(self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Form, int, Scalar)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Form):
            return NotImplemented
        try:
            s = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if s.is_zero():
            return Form.zero(self.degree)
        if s == 1:
            return self
        return Form._raw(self.degree, {k: c * s for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * Scalar.coerce(other).inverse()

    def conjugate(self) -> "Form":
        return Form._raw(self.degree, {k: c.conjugate() for k, c in self.terms.items()})

    def map_coefficients(self, fn) -> "Form":
        return Form(self.degree, {k: fn(c) for k, c in self.terms.items()})

    def evaluate(self, *vectors: "VectorField") -> Scalar:
        """Value ``alpha(V_1, ..., V_p)`` on vector fields."""
        if len(vectors) != self.degree:
            raise DegreeError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        if self.degree == 0:
            return self.scalar()
        total = ZERO
        for idx, c in self.terms.items():
            total = total + c * _det([[v.components.get(t, ZERO) for v in vectors] for t in idx])
        return total

    def __eq__(self, other):
        if isinstance(other, Form):
            if self.degree != other.degree and (self.terms or other.terms):
                return False
            return self.terms == other.terms
        if isinstance(other, (int, Scalar)) and self.degree == 0:
            return self.scalar() == other
        if hasattr(other, "to_form_if_alternating"):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        from .parsing import format_form

        return f"Form({self.degree}, {format_form(self)!r})"

    def __iter__(self):
        return iter(sorted(self.terms.items()))


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ZERO
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def wedge(*forms: Form) -> Form:
    """Wedge product of any number of forms."""
    if not forms:
        return Form.function(ONE)
    result = forms[0]
    for beta in forms[1:]:
        result = _wedge2(result, beta)
    return result


def _wedge2(alpha: Form, beta: Form) -> Form:
    degree = alpha.degree + beta.degree
    out: dict = {}
    for s, a in alpha.terms.items():
        for t, b in beta.terms.items():
            sign, key = _merge_sign(s, t)
            if not sign:
                continue
            c = a * b
            if sign < 0:
                c = -c
            if key in out:
                v = out[key] + c
                if v.is_zero():
                    del out[key]
                else:
                    out[key] = v
            else:
                out[key] = c
    return Form._raw(degree, out)


class VectorField:
    """Scalar combination of the frame fields dual to the coframe."""

    __slots__ = ("components",)

    def __init__(self, components: Mapping[int, object] | None = None):
        self.components = {}
        for k, c in (components or {}).items():
            c = Scalar.coerce(c)
            if not c.is_zero():
                self.components[int(k)] = c

    @classmethod
    def frame(cls, index: int) -> "VectorField":
        return cls({index: ONE})

    @classmethod
    def zero(cls) -> "VectorField":
        return cls()

    def is_zero(self) -> bool:
        return not self.components

    def component(self, k: int) -> Scalar:
        return self.components.get(k, ZERO)

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        out = dict(self.components)
        for k, c in other.components.items():
            out[k] = out.get(k, ZERO) + c
        return VectorField(out)

    def __neg__(self):
        return VectorField({k: -c for k, c in self.components.items()})

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (VectorField, Form)):
            return NotImplemented
        s = Scalar.coerce(other)
        return VectorField({k: c * s for k, c in self.components.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * Scalar.coerce(other).inverse()

    def conjugate(self) -> "VectorField":
        return VectorField({k: c.conjugate() for k, c in self.components.items()})

    def variables(self) -> set[str]:
        out: set[str] = set()
        for c in self.components.values():
            out |= c.variables()
        return out

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(frozenset(self.components.items()))

    def __repr__(self):
        from .parsing import format_vector

        return f"VectorField({format_vector(self)!r})"


class VectorValuedTwoForm:
    """A tensor ``sum_k V_k (x) F_k`` in ``T (x) Lambda^2``.

    Stored canonically as frame components: ``components[k]`` is the 2-form
    multiplying the frame field ``X_k``.
    """

    __slots__ = ("components",)

    def __init__(self, entries: Iterable[tuple[VectorField, Form]] = ()):
        comps: dict[int, Form] = {}
        for vec, form in entries:
            if form.degree != 2 and not form.is_zero():
                raise DegreeError("vector-valued two-forms need 2-form entries")
            for k, c in vec.components.items():
                comps[k] = comps.get(k, Form.zero(2)) + form * c
        self.components = {k: f for k, f in comps.items() if not f.is_zero()}

    @classmethod
    def from_components(cls, comps: Mapping[int, Form]) -> "VectorValuedTwoForm":
        obj = cls.__new__(cls)
        obj.components = {k: f for k, f in comps.items() if not f.is_zero()}
        return obj

    def entries(self) -> list[tuple[VectorField, Form]]:
        return [(VectorField.frame(k), f) for k, f in sorted(self.components.items())]

    def is_zero(self) -> bool:
        return not self.components

    def __call__(self, X: VectorField, Y: VectorField) -> VectorField:
        return VectorField({k: f.evaluate(X, Y) for k, f in self.components.items()})

    def __add__(self, other):
        if not isinstance(other, VectorValuedTwoForm):
            return NotImplemented
        out = dict(self.components)
        for k, f in other.components.items():
            out[k] = out.get(k, Form.zero(2)) + f
        return VectorValuedTwoForm.from_components(out)

    def __neg__(self):
        return VectorValuedTwoForm.from_components({k: -f for k, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        s = Scalar.coerce(other)
        return VectorValuedTwoForm.from_components({k: f * s for k, f in self.components.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorValuedTwoForm):
            return NotImplemented
        return self.components == other.components

    def __repr__(self):
        from .parsing import format_form

        inner = " + ".join(f"X{k} (x) ({format_form(f)})" for k, f in sorted(self.components.items()))
        return f"VectorValuedTwoForm({inner or '0'})"


@dataclass
class Report:
    """Outcome of a report-style check.

    ``checks`` maps a label to pass/fail; ``witnesses`` carries the computed
    objects that justify the verdict.
    """

    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]

    def __bool__(self):
        return self.passed


class CoframeModel:
    """Finite invariant coframe with structure equations.

    Parameters
    ----------
    coframe : sequence of str
        Names of ``e^0..e^{N-1}``.
    structure : mapping or sequence
        ``de^k`` for each coframe element (by name or position); missing
        entries are zero.
    coordinates : sequence of str
        Global coordinate names.
    coordinate_differentials : mapping
        ``dx^j`` as a 1-form in the coframe, required for every coordinate.
    nonzero : sequence of Scalar
        Domain annotations: expressions assumed nowhere zero (e.g. ``x0``).
    """

    def __init__(
        self,
        coframe: Sequence[str],
        structure=None,
        coordinates: Sequence[str] = (),
        coordinate_differentials=None,
        nonzero: Sequence = (),
    ):
        self.coframe = tuple(coframe)
        if len(set(self.coframe)) != len(self.coframe):
            raise ModelError("duplicate coframe names")
        self.coordinates = tuple(coordinates)
        if len(set(self.coordinates)) != len(self.coordinates):
            raise ModelError("duplicate coordinate names")
        clash = set(self.coframe) & set(self.coordinates)
        if clash:
            raise ModelError(f"names used as both coframe and coordinate: {sorted(clash)}")
        self._index = {name: k for k, name in enumerate(self.coframe)}
        n = len(self.coframe)

        de = [Form.zero(2)] * n
        if structure is not None:
            items = structure.items() if isinstance(structure, Mapping) else enumerate(structure)
            for key, form in items:
                k = self._index[key] if isinstance(key, str) else int(key)
                de[k] = self._check_form(form, 2, f"d{self.coframe[k]}")
        self.structure = tuple(de)

        dx = dict(coordinate_differentials or {})
        unknown = set(dx) - set(self.coordinates)
        if unknown:
            raise ModelError(f"differentials given for undeclared coordinates {sorted(unknown)}")
        missing = [x for x in self.coordinates if x not in dx]
        if missing:
            raise ModelError(f"coordinate differentials must be given in the coframe: missing {missing}")
        self.coordinate_differentials = tuple(
            self._check_form(dx[x], 1, f"d{x}") for x in self.coordinates
        )
        self.nonzero = tuple(Scalar.coerce(s) for s in nonzero)
        self._d_cache: dict = {}
        self._bracket_cache: dict = {}

    def _check_form(self, form, degree, label) -> Form:
        if not isinstance(form, Form):
            raise ModelError(f"{label} must be a Form")
        if form.degree != degree and not form.is_zero():
            raise ModelError(f"{label} must have degree {degree}, got {form.degree}")
        if form.is_zero():
            form = Form.zero(degree)
        bad = {t for t in form.support() if t >= len(self.coframe)}
        if bad:
            raise ModelError(f"{label} uses indices outside the coframe: {sorted(bad)}")
        undeclared = form.variables() - set(self.coordinates)
        if undeclared:
            raise UnknownVariableError(f"{label} references undeclared coordinates {sorted(undeclared)}")
        return form

    # -- lookup helpers ----------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.coframe)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown coframe symbol {name!r}") from None

    def e(self, *names) -> Form:
        """Basis form ``e^{a} ^ e^{b} ^ ...`` by names or indices."""
        return Form.basis(*[self.index(n) if isinstance(n, str) else n for n in names])

    def X(self, name) -> VectorField:
        """Frame field dual to a coframe element."""
        return VectorField.frame(self.index(name) if isinstance(name, str) else name)

    def coord(self, name: str) -> Scalar:
        if name not in self.coordinates:
            raise UnknownVariableError(name)
        return Scalar.var(name)

    def frame_index(self) -> dict[str, int]:
        return dict(self._index)

    def namespace(self) -> dict[str, object]:
        ns: dict[str, object] = {x: Scalar.var(x) for x in self.coordinates}
        for k, name in enumerate(self.coframe):
            ns[name] = Form.basis(k)
        return ns

    def form(self, text: str) -> Form:
        from .parsing import parse_form

        return parse_form(text, self)

    def format(self, obj) -> str:
        from .parsing import format_form, format_scalar, format_vector

        if isinstance(obj, Form):
            return format_form(obj, self.coframe)
        if isinstance(obj, VectorField):
            return format_vector(obj, self.coframe)
        if isinstance(obj, Scalar):
            return format_scalar(obj)
        if isinstance(obj, VectorValuedTwoForm):
            parts = [f"X[{self.coframe[k]}] (x) ({format_form(f, self.coframe)})"
                     for k, f in sorted(obj.components.items())]
            return " + ".join(parts) or "0"
        return str(obj)

    def with_structure(self, structure) -> "CoframeModel":
        return CoframeModel(
            self.coframe,
            structure,
            self.coordinates,
            dict(zip(self.coordinates, self.coordinate_differentials)),
            self.nonzero,
        )

    # -- calculus primitives -------------------------------------------------
    def differential(self, f) -> Form:
        """``df`` of a function, through the coordinate differentials."""
        f = Scalar.coerce(f)
        if f.is_constant():
            return Form.zero(1)
        undeclared = f.variables() - set(self.coordinates)
        if undeclared:
            raise UnknownVariableError(f"undeclared coordinates {sorted(undeclared)}")
        out = Form.zero(1)
        for x, dx in zip(self.coordinates, self.coordinate_differentials):
            if x in f.variables():
                out = out + dx * f.diff(x)
        return out

    def apply(self, X: VectorField, f) -> Scalar:
        """Directional derivative ``X(f)``."""
        f = Scalar.coerce(f)
        if f.is_constant():
            return ZERO
        total = ZERO
        for x, dx in zip(self.coordinates, self.coordinate_differentials):
            if x in f.variables():
                pairing = ZERO
                for (t,), c in dx.terms.items():
                    pairing = pairing + c * X.component(t)
                if not pairing.is_zero():
                    total = total + pairing * f.diff(x)
        return total

    def d_basis(self, idx: tuple[int, ...]) -> Form:
        """``d(e^{idx})`` for a sorted index tuple."""
        cached = self._d_cache.get(idx)
        if cached is not None:
            return cached
        out = Form.zero(len(idx) + 1)
        for k, t in enumerate(idx):
            piece = wedge(Form.basis(*idx[:k]) if k else Form.function(ONE), self.structure[t])
            if k + 1 < len(idx):
                piece = wedge(piece, Form.basis(*idx[k + 1:]))
            out = out + (piece if k % 2 == 0 else -piece)
        self._d_cache[idx] = out
        return out

    def frame_bracket(self, a: int, b: int) -> VectorField:
        """``[X_a, X_b]`` from the structure equations."""
        key = (a, b)
        cached = self._bracket_cache.get(key)
        if cached is not None:
            return cached
        comps = {}
        for k, de in enumerate(self.structure):
            c = de.coefficient(a, b)
            if not c.is_zero():
                comps[k] = -c
        v = VectorField(comps)
        self._bracket_cache[key] = v
        return v

    def __eq__(self, other):
        if not isinstance(other, CoframeModel):
            return NotImplemented
        return (
            self.coframe == other.coframe
            and self.coordinates == other.coordinates
            and self.structure == other.structure
            and self.coordinate_differentials == other.coordinate_differentials
            and set(self.nonzero) == set(other.nonzero)
        )

    def __repr__(self):
        eqs = ", ".join(f"d{n} = {self.format(f)}" for n, f in zip(self.coframe, self.structure))
        return f"CoframeModel({list(self.coframe)}; {eqs})"


def exterior_derivative(M: CoframeModel, alpha) -> Form:
    """Exterior derivative on the model, ``d(f e^I) = df ^ e^I + f d(e^I)``."""
    if isinstance(alpha, Scalar) or isinstance(alpha, int):
        return M.differential(alpha)
    degree = alpha.degree + 1
    acc = Form.zero(degree)
    for idx, c in alpha.terms.items():
        if not c.is_constant():
            acc = acc + wedge(M.differential(c), Form._raw(alpha.degree, {idx: ONE}))
        dI = M.d_basis(idx)
        if dI.terms:
            acc = acc + dI * c
    return acc if acc.terms else Form.zero(degree)


def interior(X: VectorField, alpha: Form) -> Form:
    """Interior product ``X _| alpha`` (contraction in the first slot)."""
    if alpha.degree == 0:
        raise DegreeError("interior product of a function is undefined")
    out: dict = {}
    for idx, c in alpha.terms.items():
        for k, t in enumerate(idx):
            x = X.components.get(t)
            if x is None:
                continue
            key = idx[:k] + idx[k + 1:]
            val = c * x
            if k % 2:
                val = -val
            if key in out:
                s = out[key] + val
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
            else:
                out[key] = val
    return Form._raw(alpha.degree - 1, out)


def apply_vector(M: CoframeModel, X: VectorField, f) -> Scalar:
    """``X(f)`` for a function ``f``."""
    return M.apply(X, f)


def lie_bracket(M: CoframeModel, X: VectorField, Y: VectorField) -> VectorField:
    """Lie bracket of vector fields, Leibniz-extended from the frame brackets."""
    out = VectorField()
    for a, xa in X.components.items():
        for b, yb in Y.components.items():
            if a == b:
                continue
            br = M.frame_bracket(a, b)
            if not br.is_zero():
                out = out + br * (xa * yb)
    for b, yb in Y.components.items():
        xf = M.apply(X, yb)
        if not xf.is_zero():
            out = out + VectorField({b: xf})
    for a, xa in X.components.items():
        yf = M.apply(Y, xa)
        if not yf.is_zero():
            out = out - VectorField({a: yf})
    return out


def lie_derivative(M: CoframeModel, X: VectorField, alpha) -> Form:
    """Lie derivative by Cartan's formula ``L_X = d i_X + i_X d``."""
    if isinstance(alpha, (Scalar, int)):
        return Form.function(M.apply(X, alpha))
    if alpha.degree == 0:
        return Form.function(M.apply(X, alpha.scalar()))
    return exterior_derivative(M, interior(X, alpha)) + interior(X, exterior_derivative(M, alpha))


def validate_model(M: CoframeModel) -> Report:
    """Report ``d(de^k) = 0`` and ``d(dx^j) = 0``; violations carry the 3-form (2-form)."""
    report = Report("validate_model")
    for name, de in zip(M.coframe, M.structure):
        dd = exterior_derivative(M, de)
        report.checks[f"d(d{name}) = 0"] = dd.is_zero()
        if not dd.is_zero():
            report.witnesses[f"d(d{name})"] = dd
    for x, dx in zip(M.coordinates, M.coordinate_differentials):
        dd = exterior_derivative(M, dx)
        report.checks[f"d(d{x}) = 0"] = dd.is_zero()
        if not dd.is_zero():
            report.witnesses[f"d(d{x})"] = dd
    return report
