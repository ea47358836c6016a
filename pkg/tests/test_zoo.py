import pytest

from twistkit import matrix as mx
from twistkit.checks import run_checks
from twistkit.exterior import CoframeModel, Form, VectorField, interior
from twistkit.quaternionic import hkt_twist_terms
from twistkit.scalar import Scalar
from twistkit.zoo import (
    UnknownExampleError,
    default_examples,
    halfline_t3,
    make_example,
    registry_names,
    skt_non_instanton,
    solve_lifting_function,
)

b = Form.basis
x0 = Scalar.var("x0")

EXAMPLES = default_examples() + [skt_non_instanton(1, 1, base="J")]


@pytest.mark.parametrize("ex", EXAMPLES, ids=lambda ex: ex.name)
def test_expectations(ex):
    reports = run_checks(ex.to_model_file())
    assert len(reports) == len(ex.expectations)
    for rep, exp in zip(reports, ex.expectations):
        assert rep.verdict != "error", f"{rep.check}: {rep.error}"
        assert rep.passed == exp.passed, f"{rep.check}: {rep.checks}"


class TestRegistry:
    def test_names(self):
        names = registry_names()
        assert "flat_torus(n)" in names and "halfline_t3" in names

    def test_inline_parameters(self):
        assert make_example("flat_torus(6)").model.dim == 6
        assert make_example("skt_non_instanton(1,-1)").name == "skt_non_instanton(+1,-1)"
        assert make_example("flat_torus", 2).model.dim == 2

    @pytest.mark.parametrize("name", ["nope", "flat_torus(x)", "kodaira_thurston(3)", "flat torus"])
    def test_errors(self, name):
        with pytest.raises(UnknownExampleError):
            make_example(name)

    def test_error_lists_registry(self):
        with pytest.raises(UnknownExampleError, match="halfline_t3"):
            make_example("nope")

    def test_bad_signs(self):
        with pytest.raises(ValueError):
            skt_non_instanton(2, 1)

    def test_file_names_are_unique(self):
        names = [ex.to_model_file().name for ex in EXAMPLES]
        assert len(set(names)) == len(names)
        assert "skt_non_instanton_p1_m1" in names


def test_halfline_twist_terms():
    ex = halfline_t3()
    terms = hkt_twist_terms(ex.twist, ex.metric(), ex.triple())
    for t in terms.values():
        assert t == b(1, 2, 3) * (2 / x0)


class TestLiftingSolver:
    def test_halfline(self):
        ex = halfline_t3()
        a = solve_lifting_function(ex.model, ex.twist.xi, ex.twist.F, [1, x0])
        assert mx.equal(a, mx.identity(3, -x0))

    def test_no_solution_in_ansatz(self):
        M = CoframeModel(["b0", "b1"], coordinates=["x"], coordinate_differentials={"x": -b(0)})
        assert solve_lifting_function(M, [M.X("b1")], [b(0, 1)], [1]) is None

    def test_constant(self):
        M = CoframeModel(["e1", "e2", "e3"])
        assert mx.equal(solve_lifting_function(M, [M.X("e3")], [b(0, 1)], [1]), [[1]])

    def test_rank_mismatch(self):
        M = CoframeModel(["e1", "e2", "e3"])
        assert solve_lifting_function(M, [M.X("e3")], [b(0, 1), b(0, 2)], [1]) is None

    def test_rational_ansatz(self):
        M = CoframeModel(["b0", "b1"], coordinates=["x"], coordinate_differentials={"x": b(0)})
        x = Scalar.var("x")
        # d(1/x) = -(1/x^2) b0 = -X1 _| F for F = b0 ^ b1 / x^2
        F = b(0, 1) * (1 / (x * x))
        a = solve_lifting_function(M, [VectorField.frame(1)], [F], [1, 1 / x])
        assert a is not None
        assert M.differential(a[0][0]) == -interior(VectorField.frame(1), F)
