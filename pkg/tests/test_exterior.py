import pytest
from hypothesis import given, strategies as st

from conftest import constant_forms
from twistkit.exterior import (
    CoframeModel,
    DegreeError,
    Form,
    ModelError,
    VectorField,
    VectorValuedTwoForm,
    exterior_derivative,
    interior,
    lie_bracket,
    lie_derivative,
    validate_model,
    wedge,
)
from twistkit.scalar import Scalar, UnknownVariableError
from twistkit.zoo import su2_su2

b = Form.basis
x0 = Scalar.var("x0")


def su2():
    return su2_su2().model


def halfline():
    # coordinate with dx0 = -b0 on R x T^3
    return CoframeModel(["b0", "b1", "b2", "b3"], coordinates=["x0"], coordinate_differentials={"x0": -b(0)})


class TestWedge:
    def test_examples(self):
        assert wedge(b(0), b(1)) == b(0, 1)
        assert wedge(b(0), b(0)).is_zero()
        assert wedge(b(1, 3), b(2)) == -b(1, 2, 3)

    @given(st.integers(0, 3), st.integers(0, 3), st.data())
    def test_graded_commutative(self, p, q, data):
        alpha = data.draw(constant_forms(5, p))
        beta = data.draw(constant_forms(5, q))
        assert wedge(alpha, beta) == wedge(beta, alpha) * (-1) ** (p * q)

    @given(constant_forms(5, 1), constant_forms(5, 2), constant_forms(5, 1))
    def test_associative(self, a, c, e):
        assert wedge(wedge(a, c), e) == wedge(a, wedge(c, e))


class TestInterior:
    def test_examples(self):
        X = VectorField.frame
        assert interior(X(1), b(0, 1)) == -b(0)
        assert interior(X(0), b(1, 2)).is_zero()
        f = Scalar.var("f")
        assert interior(X(0) * f, b(0)) == Form.function(f)

    def test_degree_zero(self):
        with pytest.raises(DegreeError):
            interior(VectorField.frame(0), Form.function(1))

    @given(constant_forms(5, 3), st.lists(st.integers(-2, 2), min_size=5, max_size=5))
    def test_nilpotent(self, alpha, comps):
        X = VectorField(dict(enumerate(comps)))
        assert interior(X, interior(X, alpha)).is_zero()

    @given(constant_forms(5, 2), constant_forms(5, 1), st.integers(0, 4))
    def test_antiderivation(self, alpha, beta, k):
        X = VectorField.frame(k)
        lhs = interior(X, wedge(alpha, beta))
        rhs = wedge(interior(X, alpha), beta) + wedge(alpha, interior(X, beta))
        assert lhs == rhs

    def test_evaluation_matches_interior(self):
        alpha = b(0, 1) * 3 - b(1, 2)
        X, Y = VectorField({0: 1, 1: 2}), VectorField({1: 1, 2: -1})
        assert alpha.evaluate(X, Y) == interior(Y, interior(X, alpha)).scalar()


class TestDerivative:
    def test_function_differential(self):
        M = halfline()
        assert exterior_derivative(M, x0 * x0) == -b(0) * (2 * x0)
        assert exterior_derivative(M, b(1) * x0) == -b(0, 1)

    def test_undeclared_variable(self):
        M = halfline()
        with pytest.raises(UnknownVariableError):
            exterior_derivative(M, b(1) * Scalar.var("y"))

    def test_structure_equations(self):
        M = su2()
        assert exterior_derivative(M, b(0)) == -b(1, 2)
        # d(e1^e2) = de1^e2 - e1^de2 = 0 on su(2)
        assert exterior_derivative(M, b(0, 1)).is_zero()

    def test_leibniz(self):
        M = su2()
        a, c = b(0) + b(3), b(1, 4)
        lhs = exterior_derivative(M, wedge(a, c))
        rhs = wedge(exterior_derivative(M, a), c) - wedge(a, exterior_derivative(M, c))
        assert lhs == rhs

    @given(st.integers(0, 4), st.data())
    def test_d_squared(self, p, data):
        M = su2()
        alpha = data.draw(constant_forms(6, p))
        assert exterior_derivative(M, exterior_derivative(M, alpha)).is_zero()


class TestModel:
    def test_validate(self):
        assert validate_model(su2()).passed
        # d(x e12) = dx^e12 = e2^e1^e2 = 0
        M = CoframeModel(["e1", "e2", "e3"], {"e3": b(0, 1) * Scalar.var("x")}, ["x"], {"x": b(1)})
        assert validate_model(M).passed

    def test_failure_witness(self):
        # de1 = e3^e4, de4 = e1^e2: d(de4) = e2^e3^e4 and d(de1) = -e1^e2^e3
        M = CoframeModel(["e1", "e2", "e3", "e4"], {"e1": b(2, 3), "e4": b(0, 1)})
        rep = validate_model(M)
        assert rep.failures() == ["d(de1) = 0", "d(de4) = 0"]
        assert rep.witnesses["d(de4)"] == b(1, 2, 3)
        assert rep.witnesses["d(de1)"] == -b(0, 1, 2)

    def test_self_wedge_is_zero(self):
        M = CoframeModel(["e1", "e2"], {"e1": wedge(b(0), b(0))})
        assert M.structure[0].is_zero() and validate_model(M).passed

    def test_errors(self):
        with pytest.raises(ModelError):
            CoframeModel(["e1", "e1"])
        with pytest.raises(ModelError):
            CoframeModel(["e1"], coordinates=["x"])
        with pytest.raises(ModelError):
            CoframeModel(["e1", "e2"], {"e1": b(0)})
        with pytest.raises(UnknownVariableError):
            CoframeModel(["e1", "e2"], {"e1": b(0, 1) * Scalar.var("y")})


class TestBracketsAndLie:
    def test_frame_bracket_convention(self):
        # e^k([X_a, X_b]) = -de^k(X_a, X_b): on su(2), [X1, X2] = X3
        M = su2()
        assert lie_bracket(M, VectorField.frame(0), VectorField.frame(1)) == VectorField.frame(2)

    def test_jacobi(self):
        M = su2()
        X, Y, Z = VectorField({0: 1, 3: 2}), VectorField({1: 1, 4: -1}), VectorField({2: 1, 0: 3})
        br = lambda u, v: lie_bracket(M, u, v)  # noqa: E731
        assert (br(X, br(Y, Z)) + br(Y, br(Z, X)) + br(Z, br(X, Y))).is_zero()

    def test_function_coefficients(self):
        M = halfline()
        X0, X1 = VectorField.frame(0), VectorField.frame(1)
        # X0(x0) = dx0(X0) = -1
        assert lie_bracket(M, X0, X1 * x0) == X1 * (-1)

    def test_cartan_identity(self):
        M = su2()
        X, Y = VectorField.frame(0), VectorField.frame(1)
        alpha = b(2, 3) + b(0, 5)
        lhs = interior(lie_bracket(M, X, Y), alpha)
        rhs = lie_derivative(M, X, interior(Y, alpha)) - interior(Y, lie_derivative(M, X, alpha))
        assert lhs == rhs

    def test_lie_derivative_commutes_with_d(self):
        M = su2()
        X = VectorField({0: 1, 4: 2})
        alpha = b(1) * 2 + b(3)
        assert lie_derivative(M, X, exterior_derivative(M, alpha)) == exterior_derivative(M, lie_derivative(M, X, alpha))


class TestVectorValued:
    def test_canonical_components(self):
        X = VectorField({0: 1, 1: 1})
        T = VectorValuedTwoForm([(X, b(0, 1)), (VectorField.frame(1), -b(0, 1))])
        assert T == VectorValuedTwoForm([(VectorField.frame(0), b(0, 1))])
        assert T(VectorField.frame(0), VectorField.frame(1)) == VectorField.frame(0)
