import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from twistkit.exterior import CoframeModel, Form
from twistkit.hermitian import AlmostComplexStructure, HermitianMetric
from twistkit.scalar import GaussianRational, Scalar
from twistkit.twist import TwistData

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


# -- hypothesis strategies ---------------------------------------------------------

small = st.integers(-4, 4)
gaussian = st.builds(GaussianRational, small, small)
nonzero_gaussian = gaussian.filter(lambda g: not g.is_zero())


@st.composite
def polys(draw, variables=("x", "y"), max_terms=3, max_exp=2):
    out = Scalar(0)
    for _ in range(draw(st.integers(0, max_terms))):
        term = Scalar(draw(gaussian))
        for v in variables:
            for _ in range(draw(st.integers(0, max_exp))):
                term = term * Scalar.var(v)
        out = out + term
    return out


@st.composite
def scalars(draw, variables=("x", "y")):
    num = draw(polys(variables))
    den = draw(polys(variables).filter(lambda p: not p.is_zero()))
    return num / den


def constant_forms(n, degree):
    from itertools import combinations

    idx = list(combinations(range(n), degree))

    @st.composite
    def build(draw):
        out = Form.zero(degree)
        for t in draw(st.lists(st.sampled_from(idx), max_size=4)) if idx else []:
            out = out + Form.basis(*t) * draw(small)
        return out

    return build()


# -- seeded random twist data -----------------------------------------------------------

def flat_complex(n: int) -> AlmostComplexStructure:
    return AlmostComplexStructure.from_pairs(n, [(k, k + 1) for k in range(0, n, 2)], "I")


def random_flat_twist(rng: random.Random, n: int):
    """Constant twist data on flat ``T^n``: fields on the last ``r`` directions,
    forms on the others, and a random invertible integer matrix ``a``."""
    M = CoframeModel([f"e{k}" for k in range(n)])
    r = rng.randint(1, 2)
    base = n - r
    xi = [M.X(f"e{k}") for k in range(base, n)]
    F = []
    for _ in range(r):
        f = Form.zero(2)
        for _ in range(rng.randint(1, 4)):
            p, q = sorted(rng.sample(range(base), 2))
            f = f + Form.basis(p, q) * Scalar(GaussianRational(rng.randint(-3, 3)))
        F.append(f)
    while True:
        a = [[rng.randint(-2, 2) for _ in range(r)] for _ in range(r)]
        det = a[0][0] if r == 1 else a[0][0] * a[1][1] - a[0][1] * a[1][0]
        if det:
            break
    return M, TwistData(xi, F, a)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def flat4():
    return CoframeModel(["b0", "b1", "b2", "b3"])


@pytest.fixture
def identity4():
    return HermitianMetric.identity(4)
