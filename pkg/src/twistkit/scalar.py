"""Exact coefficients: rational functions over the Gaussian rationals Q(i).

A :class:`Scalar` is a quotient of two sparse multivariate polynomials in
named coordinate variables.  Values are kept canonical (reduced, with the
denominator's graded-lex leading coefficient equal to one) so that equality
is a structural comparison.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

__all__ = [
    "GaussianRational",
    "Poly",
    "Scalar",
    "PoleError",
    "UnknownVariableError",
    "ZERO",
    "ONE",
    "I_UNIT",
]


class PoleError(ZeroDivisionError):
    """Raised when a Scalar is evaluated where its denominator vanishes."""


class UnknownVariableError(KeyError):
    """Raised when a variable is not among the declared coordinates."""


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


class GaussianRational:
    """An element ``re + i*im`` of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("floating point complex numbers are not exact")
        return cls(value, 0)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __add__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational(a * c, 0)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(i)")
        if not self.im:
            return GaussianRational(1 / self.re, 0)
        n = self.re * self.re + self.im * self.im
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"


def _imag_str(im: Fraction) -> str:
    if im == 1:
        return "i"
    if im == -1:
        return "-i"
    if im.denominator == 1:
        return f"{im.numerator}*i"
    if im.numerator == 1:
        return f"i/{im.denominator}"
    return f"{im.numerator}*i/{im.denominator}"


def _coerce_gr(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Rational)):
        return GaussianRational(value, 0)
    return NotImplemented


# Monomials are sorted tuples of (variable, exponent>0) pairs.
Monomial = tuple

_ONE_MONO: Monomial = ()


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = dict(m1)
    for v, e in m2:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


class Poly:
    """Sparse polynomial: mapping from monomials to nonzero Gaussian rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, GaussianRational] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls({_ONE_MONO: GaussianRational.coerce(c)})

    @classmethod
    def variable(cls, name: str) -> "Poly":
        return cls({((name, 1),): GaussianRational(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def constant_value(self) -> GaussianRational:
        return self.terms.get(_ONE_MONO, GaussianRational(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                s = out[m] + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return _poly_raw(out)

    def __neg__(self) -> "Poly":
        return _poly_raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return _poly_raw({})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                if m in out:
                    s = out[m] + c
                    if s.is_zero():
                        del out[m]
                    else:
                        out[m] = s
                else:
                    out[m] = c
        return _poly_raw(out)

    def scale(self, c: GaussianRational) -> "Poly":
        if c.is_zero():
            return _poly_raw({})
        return _poly_raw({m: k * c for m, k in self.terms.items()})

    def conjugate(self) -> "Poly":
        return _poly_raw({m: c.conjugate() for m, c in self.terms.items()})

    def derivative(self, var: str) -> "Poly":
        out: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if not e:
                continue
            if e == 1:
                del d[var]
            else:
                d[var] = e - 1
            nm = tuple(sorted(d.items()))
            val = c * e
            out[nm] = out[nm] + val if nm in out else val
        return Poly(out)

    def evaluate(self, point: Mapping[str, GaussianRational]) -> GaussianRational:
        total = GaussianRational(0)
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                try:
                    val = val * point[v] ** e
                except KeyError:
                    raise UnknownVariableError(v) from None
            total = total + val
        return total

    def divide_monomial(self, m: Monomial) -> "Poly":
        out = {}
        md = dict(m)
        for mono, c in self.terms.items():
            d = dict(mono)
            for v, e in md.items():
                d[v] -= e
            out[tuple(sorted((v, e) for v, e in d.items() if e))] = c
        return _poly_raw(out)

    def leading_term(self) -> tuple[Monomial, GaussianRational]:
        """Leading monomial and coefficient under graded-lex order."""
        order = sorted(self.variables())

        def key(m):
            d = dict(m)
            return (_mono_degree(m), tuple(d.get(v, 0) for v in order))

        m = max(self.terms, key=key)
        return m, self.terms[m]

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Poly({self.terms!r})"


def _poly_raw(terms: dict) -> Poly:
    p = Poly.__new__(Poly)
    p.terms = terms
    return p


def _monomial_gcd(polys: Iterable[Poly]) -> Monomial:
    common: dict | None = None
    for p in polys:
        for m in p.terms:
            d = dict(m)
            if common is None:
                common = d
            else:
                common = {v: min(e, d[v]) for v, e in common.items() if v in d}
            if not common:
                return _ONE_MONO
    return tuple(sorted((common or {}).items()))


def _cancel_general(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    # Multivariate gcd over Q(i) is delegated to sympy's polynomial kernel.
    from sympy import Poly as SPoly, QQ_I, Symbol

    names = sorted(num.variables() | den.variables())
    gens = [Symbol(n) for n in names]
    index = {n: k for k, n in enumerate(names)}

    def to_sympy(p: Poly):
        data = {}
        for m, c in p.terms.items():
            exps = [0] * len(names)
            for v, e in m:
                exps[index[v]] = e
            data[tuple(exps)] = QQ_I(c.re, c.im)
        return SPoly.from_dict(data, gens, domain=QQ_I)

    def from_sympy(sp) -> Poly:
        out = {}
        for exps, c in sp.rep.to_dict().items():
            m = tuple((names[k], e) for k, e in enumerate(exps) if e)
            out[m] = GaussianRational(
                Fraction(int(c.x.numerator), int(c.x.denominator)),
                Fraction(int(c.y.numerator), int(c.y.denominator)),
            )
        return Poly(out)

    p, q = to_sympy(num).cancel(to_sympy(den), include=True)
    return from_sympy(p), from_sympy(q)


class Scalar:
    """Canonical rational function ``numerator / denominator`` over Q(i).

    Construct from numbers, :meth:`var`, or :meth:`parse`; combine with the
    usual arithmetic operators.  Instances are immutable and hashable.
    """

    __slots__ = ("num", "den", "_const")

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            num, den, const = value.num, value.den, value._const
        else:
            c = GaussianRational.coerce(value)
            num, den, const = Poly.constant(c), _POLY_ONE, c
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_const", const)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def var(cls, name: str) -> "Scalar":
        return cls.from_polys(Poly.variable(name), _POLY_ONE)

    @classmethod
    def from_polys(cls, num: Poly, den: Poly, *, reduced: bool = False) -> "Scalar":
        if den.is_zero():
            raise ZeroDivisionError("Scalar with zero denominator")
        if num.is_zero():
            return ZERO
        if not reduced:
            num, den = _reduce(num, den)
        else:
            num, den = _normalize_lc(num, den)
        s = cls.__new__(cls)
        object.__setattr__(s, "num", num)
        object.__setattr__(s, "den", den)
        const = num.constant_value() if (num.is_constant() and den.is_constant()) else None
        object.__setattr__(s, "_const", const)
        return s

    @classmethod
    def parse(cls, text: str, variables: Iterable[str] | None = None) -> "Scalar":
        from .parsing import parse_scalar

        return parse_scalar(text, variables)

    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return cls(value)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self._const is not None

    def constant_value(self) -> GaussianRational:
        if self._const is None:
            raise ValueError(f"{self} is not constant")
        return self._const

    def is_real(self) -> bool:
        return self == self.conjugate()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    def is_canonical(self) -> bool:
        num, den = _reduce(self.num, self.den)
        return num == self.num and den == self.den

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        if self._const is not None and other._const is not None:
            return _const_scalar(self._const + other._const)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return Scalar.from_polys(self.num + other.num, self.den)
        return Scalar.from_polys(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        if self._const is not None:
            return _const_scalar(-self._const)
        s = Scalar.__new__(Scalar)
        object.__setattr__(s, "num", -self.num)
        object.__setattr__(s, "den", self.den)
        object.__setattr__(s, "_const", None)
        return s

    def __sub__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        if self._const is not None and other._const is not None:
            return _const_scalar(self._const * other._const)
        if self.is_zero() or other.is_zero():
            return ZERO
        if self._const is not None:
            return _scaled(other, self._const)
        if other._const is not None:
            return _scaled(self, other._const)
        return Scalar.from_polys(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero Scalar")
        if self._const is not None:
            return _const_scalar(self._const.inverse())
        return Scalar.from_polys(self.den, self.num, reduced=True)

    def __truediv__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "Scalar":
        if self._const is not None:
            return _const_scalar(self._const.conjugate())
        return Scalar.from_polys(self.num.conjugate(), self.den.conjugate())

    def diff(self, var: str) -> "Scalar":
        if self._const is not None:
            return ZERO
        dn = self.num.derivative(var)
        dd = self.den.derivative(var)
        if dd.is_zero():
            if dn.is_zero():
                return ZERO
            return Scalar.from_polys(dn, self.den)
        return Scalar.from_polys(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Mapping[str, object]) -> GaussianRational:
        if self._const is not None:
            return self._const
        pt = {k: GaussianRational.coerce(v) for k, v in point.items()}
        missing = self.variables() - set(pt)
        if missing:
            raise UnknownVariableError(", ".join(sorted(missing)))
        d = self.den.evaluate(pt)
        if d.is_zero():
            raise PoleError(f"{self} has a pole at {point}")
        return self.num.evaluate(pt) / d

    # -- comparison / display ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Rational, GaussianRational)):
            return self._const is not None and self._const == other
        return NotImplemented

    def __hash__(self):
        if self._const is not None:
            return hash(self._const)
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    def __str__(self):
        from .parsing import format_scalar

        return format_scalar(self)


def _coerce_scalar(value):
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Rational, GaussianRational)):
        return _const_scalar(GaussianRational.coerce(value))
    return NotImplemented


def _const_scalar(c: GaussianRational) -> Scalar:
    if c.is_zero():
        return ZERO
    s = Scalar.__new__(Scalar)
    object.__setattr__(s, "num", _poly_raw({_ONE_MONO: c}))
    object.__setattr__(s, "den", _POLY_ONE)
    object.__setattr__(s, "_const", c)
    return s


def _scaled(s: Scalar, c: GaussianRational) -> Scalar:
    # the denominator stays normalized under constant scaling
    out = Scalar.__new__(Scalar)
    object.__setattr__(out, "num", s.num.scale(c))
    object.__setattr__(out, "den", s.den)
    object.__setattr__(out, "_const", None)
    return out


def _normalize_lc(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    _, lc = den.leading_term()
    if lc == 1:
        return num, den
    inv = lc.inverse()
    return num.scale(inv), den.scale(inv)


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if den.is_constant():
        c = den.constant_value().inverse()
        return num.scale(c), _POLY_ONE
    if num.is_monomial() or den.is_monomial():
        g = _monomial_gcd((num, den))
        if g:
            num, den = num.divide_monomial(g), den.divide_monomial(g)
        if den.is_constant():
            c = den.constant_value().inverse()
            return num.scale(c), _POLY_ONE
        return _normalize_lc(num, den)
    g = _monomial_gcd((num, den))
    if g:
        num, den = num.divide_monomial(g), den.divide_monomial(g)
    num, den = _cancel_general(num, den)
    if den.is_constant():
        c = den.constant_value().inverse()
        return num.scale(c), _POLY_ONE
    return _normalize_lc(num, den)


_POLY_ONE = _poly_raw({_ONE_MONO: GaussianRational(1)})

ZERO = Scalar.__new__(Scalar)
object.__setattr__(ZERO, "num", _poly_raw({}))
object.__setattr__(ZERO, "den", _POLY_ONE)
object.__setattr__(ZERO, "_const", GaussianRational(0))

ONE = _const_scalar(GaussianRational(1))
I_UNIT = _const_scalar(GaussianRational(0, 1))
