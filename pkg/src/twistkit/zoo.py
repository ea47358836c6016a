"""Registry of worked example models and twist data, and a lifting-function solver.

Compact hyperKaehler surfaces are replaced by a flat 4-torus carrying the
triple ``omega_I = n01 + n23``, ``omega_J = n02 - n13``, ``omega_K = n03 + n12``;
in this orientation the instantons are ``n01 - n23``, ``n02 + n13`` and
``n03 - n12``.  All quaternionic frames follow

    I: X0 -> X1, X2 -> X3      J: X0 -> X2, X3 -> X1      K: X0 -> X3, X1 -> X2
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import matrix as mx
from .exterior import CoframeModel, Form, VectorField, interior
from .hermitian import AlmostComplexStructure, HermitianMetric
from .modelfile import CheckCall, ModelFile, Structures
from .quaternionic import holomorphic_volume, HypercomplexTriple
from .scalar import GaussianRational, Poly, Scalar
from .twist import TwistData

__all__ = [
    "NamedExample",
    "Expectation",
    "UnknownExampleError",
    "make_example",
    "default_examples",
    "registry_names",
    "solve_lifting_function",
    "quaternionic_structures",
    "hyperkaehler_forms",
    "instantons",
    "flat_torus",
    "kodaira_thurston",
    "skt_t2xt2_bundle",
    "skt_non_instanton",
    "halfline_t3",
    "hc_not_hkt_surrogate",
    "su2_su2",
    "hkt_instanton_t4xt4",
]

I_UNIT = Scalar(GaussianRational(0, 1))


class UnknownExampleError(KeyError):
    def __str__(self):
        return str(self.args[0])


@dataclass(frozen=True)
class Expectation:
    """Expected verdict of a named check."""

    call: CheckCall
    passed: bool = True


@dataclass
class NamedExample:
    name: str
    model: CoframeModel
    structures: Structures = field(default_factory=Structures)
    twist: TwistData | None = None
    orbit: tuple[int, int] | None = None
    expectations: list[Expectation] = field(default_factory=list)
    notes: str = ""

    def to_model_file(self) -> ModelFile:
        return ModelFile(
            self.model,
            self.structures,
            self.twist,
            self.orbit,
            [e.call for e in self.expectations],
            _file_name(self.name),
        )

    def complex(self, name: str = "I") -> AlmostComplexStructure:
        return self.structures.complex[name]

    def metric(self, name: str = "g") -> HermitianMetric:
        return self.structures.metrics[name]

    def triple(self, name: str = "H") -> HypercomplexTriple:
        return self.structures.triple(name)


def _file_name(name: str) -> str:
    """``skt_non_instanton(+1,-1)`` becomes ``skt_non_instanton_p1_m1``."""
    out = name.replace("+", "p").replace("-", "m")
    return re.sub(r"[(),]+", "_", out).strip("_")


def _expect(*items) -> list[Expectation]:
    out = []
    for it in items:
        passed = True
        if isinstance(it, tuple) and isinstance(it[-1], bool):
            it, passed = it[0], it[-1]
        name, _, rest = it.partition("(")
        args = tuple(a.strip() for a in rest.rstrip(")").split(",") if a.strip())
        out.append(Expectation(CheckCall(name, args), passed))
    return out


# -- building blocks ------------------------------------------------------------

_QUAT_PAIRS = {
    "I": [(0, 1), (2, 3)],
    "J": [(0, 2), (3, 1)],
    "K": [(0, 3), (1, 2)],
}


def quaternionic_structures(n: int, blocks: Sequence[int] | None = None) -> dict[str, AlmostComplexStructure]:
    """Flat I, J, K acting on consecutive 4-blocks of an ``n``-frame."""
    if blocks is None:
        blocks = range(0, n, 4)
    out = {}
    for label, pairs in _QUAT_PAIRS.items():
        all_pairs = [(s + a, s + b) for s in blocks for a, b in pairs]
        out[label] = AlmostComplexStructure.from_pairs(n, all_pairs, label)
    return out


def hyperkaehler_forms(offset: int = 0) -> dict[str, Form]:
    """Kaehler forms of the flat triple on the 4-block starting at ``offset``."""
    e = lambda a, b: Form.basis(offset + a, offset + b)  # noqa: E731
    return {
        "I": e(0, 1) + e(2, 3),
        "J": e(0, 2) - e(1, 3),
        "K": e(0, 3) + e(1, 2),
    }


def instantons(offset: int = 0) -> list[Form]:
    """The three forms of type (1,1) for all of I, J, K on a 4-block."""
    e = lambda a, b: Form.basis(offset + a, offset + b)  # noqa: E731
    return [e(0, 1) - e(2, 3), e(0, 2) + e(1, 3), e(0, 3) - e(1, 2)]


def _hk_structures(n: int, with_volume: bool = False) -> Structures:
    st = Structures()
    st.complex.update(quaternionic_structures(n))
    st.metrics["g"] = HermitianMetric.identity(n)
    st.hypercomplex["H"] = ("I", "J", "K")
    if with_volume:
        st.forms["Theta"] = holomorphic_volume(st.metrics["g"], st.triple("H"))
    return st


def _names(prefix: str, k: int, start: int = 0) -> list[str]:
    return [f"{prefix}{t}" for t in range(start, start + k)]


# -- examples ---------------------------------------------------------------------

def flat_torus(n: int = 4) -> NamedExample:
    """Flat ``T^n`` with coframe ``b0..b{n-1}``; quaternionic data when ``4 | n``."""
    if n < 1:
        raise ValueError("dimension must be positive")
    M = CoframeModel(_names("b", n))
    st = Structures()
    exp = ["validate_model"]
    if n % 2 == 0:
        st.complex["I"] = AlmostComplexStructure.from_pairs(n, [(k, k + 1) for k in range(0, n, 2)], "I")
        st.metrics["g"] = HermitianMetric.identity(n)
        exp += ["nijenhuis(I)", "kaehler(g, I)", "is_skt(g, I)"]
    if n % 4 == 0:
        st = _hk_structures(n, with_volume=True)
        exp += ["is_hypercomplex(H)", "is_hkt(g, H)", "sl_volume_check(H, Theta)"]
    exp.append("d_squared")
    return NamedExample(f"flat_torus({n})", M, st, expectations=_expect(*exp),
                        notes="flat torus, all structure equations zero")


def kodaira_thurston() -> NamedExample:
    """Flat ``T^4`` twisted along ``X[e4]`` by ``F = e1^e2``; gives ``de4 = -e1^e2``."""
    M = CoframeModel(["e1", "e2", "e3", "e4"])
    st = Structures()
    st.complex["I"] = AlmostComplexStructure.from_pairs(4, [(0, 1), (2, 3)], "I")
    st.metrics["g"] = HermitianMetric.identity(4)
    st.forms["Theta"] = _wedge(M.e("e1") + M.e("e2") * I_UNIT, M.e("e3") + M.e("e4") * I_UNIT)
    T = TwistData([M.X("e4")], [M.e("e1", "e2")], [[1]])
    exp = _expect(
        "validate_model", "validate_twist_data", "validate_model(twisted)",
        "twist_integrability(I)", "nijenhuis_transfer(I)", "round_trip",
        "volume_twist_condition(I, Theta)",
        ("kaehler(g, I, twisted)", False), "is_skt(g, I, twisted)", "torsion_transfer(g, I)",
        "dc_transfer(g, I)", "d_squared",
    )
    return NamedExample("kodaira_thurston", M, st, T, orbit=None, expectations=exp,
                        notes="nilmanifold model obtained from the flat 4-torus")


def _wedge(*forms):
    from .exterior import wedge

    return wedge(*forms)


def skt_t2xt2_bundle() -> NamedExample:
    """Instanton twist of ``T^2 x T^2 x T^2`` by ``(n01, n23)`` along the last factor."""
    M = CoframeModel(_names("n", 4) + ["t0", "t1"])
    st = Structures()
    st.complex["I"] = AlmostComplexStructure.from_pairs(6, [(0, 1), (2, 3), (4, 5)], "I")
    st.metrics["g"] = HermitianMetric.identity(6)
    T = TwistData([M.X("t0"), M.X("t1")], [M.e("n0", "n1"), M.e("n2", "n3")], mx.identity(2))
    exp = _expect(
        "validate_model", "validate_twist_data", "validate_model(twisted)",
        "twist_integrability(I)", "nijenhuis_transfer(I)", "round_trip",
        "is_skt(g, I, twisted)", ("kaehler(g, I, twisted)", False), "torsion_transfer(g, I)",
        "dc_transfer(g, I)", "d_squared",
    )
    return NamedExample("skt_t2xt2_bundle", M, st, T, orbit=(1, 2), expectations=exp,
                        notes="F1^2 + F2^2 = 0 holds, so the twist is SKT but not Kaehler")


def skt_non_instanton(eps1: int = 1, eps2: int = 1, base: str = "I") -> NamedExample:
    """Twist of ``T^4 x T^2`` by ``(eps1 w_base + w_J, eps2 w_base + w_K)``.

    ``base = "I"`` is the SKT construction; ``base = "J"`` is the negative
    control whose twist is neither integrable nor strong.
    """
    if eps1 not in (1, -1) or eps2 not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    M = CoframeModel(_names("n", 4) + ["t0", "t1"])
    st = Structures()
    st.complex["I"] = AlmostComplexStructure.from_pairs(6, [(0, 1), (2, 3), (4, 5)], "I")
    st.metrics["g"] = HermitianMetric.identity(6)
    w = hyperkaehler_forms(0)
    F = [w[base] * eps1 + w["J"], w[base] * eps2 + w["K"]]
    T = TwistData([M.X("t0"), M.X("t1")], F, mx.identity(2))
    if base == "I":
        exp = _expect(
            "validate_model", "validate_twist_data", "validate_model(twisted)",
            "twist_integrability(I)", "nijenhuis_transfer(I)", "round_trip",
            "is_skt(g, I, twisted)", ("kaehler(g, I, twisted)", False), "torsion_transfer(g, I)",
            "dc_transfer(g, I)", "d_squared",
        )
        name = "skt_non_instanton" if (eps1, eps2) == (1, 1) else f"skt_non_instanton({eps1:+d},{eps2:+d})"
    else:
        exp = _expect(
            "validate_twist_data", ("twist_integrability(I)", False), ("nijenhuis_transfer(I)", False),
            ("nijenhuis(I, twisted)", False), ("strong_torsion(g, I, twisted)", False),
        )
        name = f"skt_non_instanton_control({eps1:+d},{eps2:+d})"
    return NamedExample(name, M, st, T, orbit=(1, 2), expectations=exp,
                        notes="non-instanton SKT twist over the flat hyperKaehler surrogate")


def halfline_t3() -> NamedExample:
    """Flat ``R x T^3`` with ``F = (b01, b02, b03)`` and ``a = -x0 Id``.

    The coordinate is oriented so that ``dx0 = -b0``; this makes
    ``da = -xi _| F`` hold for ``a = -x0 Id`` (see the README).
    """
    x0 = Scalar.var("x0")
    M = CoframeModel(_names("b", 4), None, ["x0"], {"x0": -Form.basis(0)}, [x0])
    st = _hk_structures(4)
    T = TwistData([M.X("b1"), M.X("b2"), M.X("b3")],
                  [M.e("b0", "b1"), M.e("b0", "b2"), M.e("b0", "b3")],
                  mx.identity(3, -x0))
    exp = _expect(
        "validate_model", "validate_twist_data", "validate_model(twisted)",
        "hkt_twist_condition(g, H)", "is_hkt(g, H, twisted)", ("is_instanton(H)", False),
        "round_trip", "d_squared",
    )
    return NamedExample("halfline_t3", M, st, T, expectations=exp,
                        notes="non-instanton HKT twist; each twist term equals (2/x0) b1^b2^b3")


def hc_not_hkt_surrogate() -> NamedExample:
    """``T^4 x T^4`` twisted by ``X0 (x) F0 + X1 (x) F_I + X2 (x) F_J + X3 (x) F_K``."""
    M = CoframeModel(_names("n", 4) + _names("b", 4))
    st = _hk_structures(8)
    w = hyperkaehler_forms(0)
    F = [instantons(0)[0], w["I"], w["J"], w["K"]]
    T = TwistData([M.X(f"b{k}") for k in range(4)], F, mx.identity(4))
    exp = _expect(
        "validate_model", "validate_twist_data", "validate_model(twisted)",
        "is_hkt(g, H)", "hypercomplex_twist_condition(H)", "is_hypercomplex(H, twisted)",
        ("hkt_twist_condition(g, H)", False), ("is_hkt(g, H, twisted)", False),
        "nijenhuis_transfer(I)", "round_trip",
    )
    return NamedExample("hc_not_hkt_surrogate", M, st, T, expectations=exp,
                        notes="hypercomplex twist that is not HKT")


def su2_su2() -> NamedExample:
    """Lie algebra ``su(2) + su(2)`` with ``de1 = -e2^e3`` cyclically on each factor."""
    names = _names("e", 6, 1)
    M0 = CoframeModel(names)
    e = M0.e
    structure = {
        "e1": -e("e2", "e3"), "e2": -e("e3", "e1"), "e3": -e("e1", "e2"),
        "e4": -e("e5", "e6"), "e5": -e("e6", "e4"), "e6": -e("e4", "e5"),
    }
    M = M0.with_structure(structure)
    st = Structures()
    # I X1 = X2, I X4 = X5, I X3 = X6
    st.complex["I"] = AlmostComplexStructure.from_pairs(6, [(0, 1), (3, 4), (2, 5)], "I")
    st.metrics["g"] = HermitianMetric.identity(6)
    exp = _expect("validate_model", "nijenhuis(I)", ("kaehler(g, I)", False), "is_skt(g, I)", "d_squared")
    return NamedExample("su2_su2", M, st, expectations=exp,
                        notes="Calabi-Eckmann type SKT structure; torsion -e1^e2^e3 - e4^e5^e6")


def hkt_instanton_t4xt4() -> NamedExample:
    """``T^4 x T^4`` twisted along the second factor by instantons on the first."""
    M = CoframeModel(_names("n", 4) + _names("b", 4))
    st = _hk_structures(8, with_volume=True)
    A = instantons(0)
    F = [A[0], A[1], A[2], A[0] + A[2]]
    T = TwistData([M.X(f"b{k}") for k in range(4)], F, mx.identity(4))
    exp = _expect(
        "validate_model", "validate_twist_data", "validate_model(twisted)",
        "is_instanton(H)", "hkt_twist_condition(g, H)", "is_hkt(g, H, twisted)",
        "hypercomplex_twist_condition(H)", "is_hypercomplex(H, twisted)",
        "volume_twist_condition(I, Theta)", "sl_volume_check(H, Theta, twisted)",
        "twist_integrability(I)", "nijenhuis_transfer(I)", "torsion_transfer(g, I)", "dc_transfer(g, I)",
        "round_trip", "d_squared",
    )
    return NamedExample("hkt_instanton_t4xt4", M, st, T, expectations=exp,
                        notes="instanton HKT twist with a closed complex volume form")


# -- registry -------------------------------------------------------------------------

_REGISTRY: dict[str, Callable[..., NamedExample]] = {
    "flat_torus": flat_torus,
    "kodaira_thurston": kodaira_thurston,
    "skt_t2xt2_bundle": skt_t2xt2_bundle,
    "skt_non_instanton": skt_non_instanton,
    "halfline_t3": halfline_t3,
    "hc_not_hkt_surrogate": hc_not_hkt_surrogate,
    "su2_su2": su2_su2,
    "hkt_instanton_t4xt4": hkt_instanton_t4xt4,
}

_SIGNATURES = {
    "flat_torus": "flat_torus(n)",
    "skt_non_instanton": "skt_non_instanton(eps1,eps2)",
}


def registry_names() -> list[str]:
    return [_SIGNATURES.get(k, k) for k in _REGISTRY]


def make_example(name: str, *args) -> NamedExample:
    """Build a registry example; parameters may be inline, e.g. ``flat_torus(6)``."""
    m = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\))?\s*", name)
    if not m or m.group(1) not in _REGISTRY:
        raise UnknownExampleError(f"unknown example {name!r}; registry: {', '.join(registry_names())}")
    key = m.group(1)
    if m.group(2) is not None:
        try:
            args = tuple(int(p) for p in m.group(2).split(",") if p.strip()) + tuple(args)
        except ValueError:
            raise UnknownExampleError(f"bad parameters in {name!r}") from None
    try:
        return _REGISTRY[key](*args)
    except TypeError as exc:
        raise UnknownExampleError(f"bad parameters for {key}: {exc}") from None


def default_examples() -> list[NamedExample]:
    """One instance of each registry entry, plus the second sign choices."""
    out = [make_example(n) for n in _REGISTRY if n != "flat_torus"]
    out.insert(0, flat_torus(4))
    out.insert(1, flat_torus(6))
    for eps in ((1, -1), (-1, 1), (-1, -1)):
        out.append(skt_non_instanton(*eps))
    return out


# -- lifting functions -------------------------------------------------------------------

def _coefficients_over(s: Scalar, den: Scalar) -> dict:
    """Monomial coefficients of the polynomial ``s * den``."""
    p = s * den
    c = p.den.constant_value()
    return {m: v / c for m, v in p.num.terms.items()}


def solve_lifting_function(M: CoframeModel, xi: Sequence[VectorField], F: Sequence[Form],
                           ansatz: Sequence) -> list[list[Scalar]] | None:
    """Find ``a`` in the span of ``ansatz`` with ``da = -xi _| F``, or None.

    Free coefficients are set to zero and a constant multiple of the
    identity is added if needed to make ``a`` invertible.  None means no
    solution within the ansatz, not that none exists.
    """
    basis = [Scalar.coerce(f) for f in ansatz]
    n = len(xi)
    if len(F) != n:
        return None
    dphi = [M.differential(f) for f in basis]
    a = [[Scalar(0)] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            rhs = -interior(xi[i], F[j])
            # clear every denominator: multiply by the product of distinct ones
            seen, den = set(), Scalar(1)
            for f in [rhs] + dphi:
                for t in range(M.dim):
                    d = f.coefficient(t).den
                    if not d.is_constant() and d not in seen:
                        seen.add(d)
                        den = den * Scalar.from_polys(d, Poly.constant(1))
            rows, values = [], []
            zero = GaussianRational(0)
            for t in range(M.dim):
                cols = [_coefficients_over(d.coefficient(t), den) for d in dphi]
                target = _coefficients_over(rhs.coefficient(t), den)
                monos = set(target).union(*cols)
                for mono in sorted(monos, key=repr):
                    rows.append([c.get(mono, zero) for c in cols])
                    values.append(target.get(mono, zero))
            if not basis:
                if any(not v.is_zero() for v in values):
                    return None
                continue
            sol = mx.solve_linear(rows, values) if rows else [zero] * len(basis)
            if sol is None:
                return None
            total = Scalar(0)
            for coeff, f in zip(sol, basis):
                total = total + f * Scalar(coeff)
            a[j][i] = total
    for shift in range(n + 1):
        cand = [[a[j][i] + (shift if i == j else 0) for i in range(n)] for j in range(n)]
        if not mx.det(cand).is_zero():
            return cand
    return None
