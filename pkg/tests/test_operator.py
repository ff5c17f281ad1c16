import numpy as np
import pytest

from matorth.linalg import MatrixPolynomial, hermitian_residual, max_abs
from matorth.operator import (_first_order_factor, apply_operator,
                              build_operator, check_chi_xi,
                              check_symmetry_equations, eigenvalue_matrix,
                              symmetry_bilinear_check)
from matorth.orthogonal import monic_sequence, orthonormalize_sequence
from matorth.weights import WeightParams, build_structure


class TestBuildOperator:
    def test_two_by_two_display(self):
        a, b = 1.2 - 0.7j, 3.0
        op = build_operator(WeightParams(2, (a,), b))
        assert max_abs(op.f2.coeff(0) - np.diag([1.0, b])) == 0.0
        assert max_abs(op.f2.coeff(1) - np.array([[0, a * (b - 1)], [0, 0]])) < 1e-15
        assert max_abs(op.f1.coeff(0) - np.array([[0, 2 * a * b], [0, 0]])) < 1e-15
        assert max_abs(op.f1.coeff(1) + 2 * b * np.eye(2)) == 0.0
        assert max_abs(op.f0.coeff(0) - np.diag([0.0, 2 * b])) == 0.0

    def test_tiny_a_limit_structure(self):
        b = 2.5
        op = build_operator(WeightParams(2, (1e-150,), b))
        assert max_abs(op.f2.coeff(0) - np.diag([1.0, b])) == 0.0
        assert max_abs(op.f2.coeff(1)) < 1e-140
        assert max_abs(op.f1.coeff(0)) < 1e-140
        assert max_abs(op.f1.coeff(1) + 2 * b * np.eye(2)) == 0.0
        assert max_abs(op.f0.coeff(0) - np.diag([0.0, 2 * b])) == 0.0

    def test_three_by_three_constant_term(self):
        op = build_operator(WeightParams(3, (1.0, 1.0), 2.0))
        assert max_abs(op.f2.coeff(0) - np.diag([1.0, 1.5, 2.0])) < 1e-15

    def test_degree_bounds(self):
        op = build_operator(WeightParams(5, (1.0, 0.5, 2.0, 1.0j), 0.4))
        assert op.f2.degree <= 2 and op.f1.degree <= 1 and op.f0.degree <= 0


class TestApplyOperator:
    def test_identity_gives_constant_coefficient(self, flagship):
        op = build_operator(flagship)
        out = apply_operator(op, MatrixPolynomial.constant(np.eye(2)))
        assert (out - op.f0).max_coeff() == 0.0

    def test_linear_polynomial(self, flagship):
        op = build_operator(flagship)
        p = MatrixPolynomial.monomial(np.eye(2), 1)
        expected = op.f1 + MatrixPolynomial.monomial(np.eye(2), 1) * op.f0
        assert (apply_operator(op, p) - expected).max_coeff() == 0.0

    def test_degree_one_monic_eigenpolynomial(self, flagship):
        seq = monic_sequence(flagship, 1)
        op = build_operator(flagship)
        out = apply_operator(op, seq.polys[1])
        lam = np.diag([-2.0 * flagship.b, 0.0]).astype(complex)
        assert (out - seq.polys[1].lmul(lam)).max_coeff() < 1e-13


class TestEigenvalueMatrix:
    def test_two_by_two_closed_form(self):
        p = WeightParams(2, (0.7 + 0.1j,), 1.7)
        for n in (0, 1, 5, 12):
            expected = np.diag([-2 * p.b * n, -2 * p.b * (n - 1)])
            assert max_abs(eigenvalue_matrix(p, n) - expected) < 1e-13

    def test_degree_zero_equals_constant_coefficient(self):
        p = WeightParams(4, (1.0, 0.4, 0.9j), 2.2)
        op = build_operator(p)
        assert max_abs(eigenvalue_matrix(p, 0) - op.f0.coeff(0)) == 0.0

    def test_two_by_two_general_formula_collapses(self):
        # the quadratic corrections vanish because the shift squares to zero
        p = WeightParams(2, (2.0 - 1.0j,), 0.6)
        s = build_structure(p)
        bracket = s.nilpotent @ s.number - s.number @ s.nilpotent
        assert max_abs(s.nilpotent @ bracket) == 0.0
        assert max_abs(s.nilpotent @ s.nilpotent @ s.diag_scale) == 0.0

    def test_orthonormal_conjugation_is_hermitian(self):
        for p, top in ((WeightParams(2, (1.0,), 2.0), 20),
                       (WeightParams(3, (1.0, 0.5 + 0.5j), 1.6), 12)):
            seq = monic_sequence(p, top)
            _, deltas = orthonormalize_sequence(seq)
            for n in range(len(deltas)):
                lam = deltas[n] @ eigenvalue_matrix(p, n) @ np.linalg.inv(deltas[n])
                assert hermitian_residual(lam) < 1e-9 * max(1.0, max_abs(lam))


class TestSymmetryEquations:
    def test_flagship_grid(self, flagship, grid):
        rep = check_symmetry_equations(flagship, grid)
        assert rep.max_residual < 1e-10
        assert rep.boundary_decay_ok

    def test_size_five_small_b(self, grid):
        rng = np.random.default_rng(5)
        a = rng.uniform(0.3, 1.5, 4) * np.exp(2j * np.pi * rng.random(4))
        rep = check_symmetry_equations(WeightParams(5, tuple(a), 0.5), grid)
        assert rep.max_residual < 1e-9
        assert rep.boundary_decay_ok

    def test_tiny_a_first_equation_vanishes(self, grid):
        rep = check_symmetry_equations(WeightParams(2, (1e-200,), 2.0), grid)
        assert rep.residual_ccp < 1e-190

    def test_boundary_decay_small_b(self, grid):
        # exercises the decay sample point scaling ~ 1/sqrt(b)
        rep = check_symmetry_equations(WeightParams(2, (1.0,), 0.25), grid)
        assert rep.boundary_decay_ok


class TestChiXi:
    def test_first_order_factor_at_zero_is_nilpotent_generator(self):
        p = WeightParams(4, (1.0, 0.5, 1.5j), 2.0)
        s = build_structure(p)
        assert max_abs(_first_order_factor(p)(0.0) - s.nilpotent) == 0.0

    def test_xi_at_zero(self):
        p = WeightParams(3, (0.8, 1.1j), 3.0)
        rep = check_chi_xi(p, [0.0])
        assert rep.xi_offdiagonal_residual < 1e-12
        assert rep.xi_diagonal_residual < 1e-12

    def test_xi_closed_diagonal_two_by_two(self):
        # at (b, t) = (3, 1.2) the diagonal is
        # (b + 2 b t^2 d_1, b + 2 b t^2 d_2 + 2 b) with d = (-b/2, -1/2)
        p = WeightParams(2, (1.0,), 3.0)
        rep = check_chi_xi(p, [1.2])
        assert rep.xi_offdiagonal_residual < 1e-12
        assert rep.xi_diagonal_residual < 1e-12

    def test_residuals_on_grid(self, grid):
        for p in (WeightParams(2, (1.0,), 2.0),
                  WeightParams(4, (1.0, 0.9, 0.7j), 4.5),
                  WeightParams(5, (1.0, 0.4, 1.1, 0.6), 0.3)):
            rep = check_chi_xi(p, grid)
            assert rep.chi_hermitian_residual < 1e-9
            assert rep.xi_offdiagonal_residual < 1e-9
            assert rep.xi_diagonal_residual < 1e-9

    def test_tiny_a_literal_chi_hermitian(self, grid):
        rep = check_chi_xi(WeightParams(2, (1e-200,), 2.0), grid)
        assert rep.chi_literal_residual < 1e-12


class TestBilinearSymmetry:
    def test_constant_pair(self, flagship):
        eye = MatrixPolynomial.constant(np.eye(2))
        assert symmetry_bilinear_check(flagship, eye, eye) < 1e-10

    def test_constant_against_linear(self, flagship):
        eye = MatrixPolynomial.constant(np.eye(2))
        lin = MatrixPolynomial.monomial(np.eye(2), 1)
        assert symmetry_bilinear_check(flagship, eye, lin) < 1e-10

    def test_random_cubics_size_three(self):
        p = WeightParams(3, (1.0, 0.6 - 0.8j), 1.4)
        rng = np.random.default_rng(31)
        lhs = MatrixPolynomial(rng.normal(size=(4, 3, 3))
                               + 1j * rng.normal(size=(4, 3, 3)))
        rhs = MatrixPolynomial(rng.normal(size=(4, 3, 3))
                               + 1j * rng.normal(size=(4, 3, 3)))
        assert symmetry_bilinear_check(p, lhs, rhs) < 1e-8

    def test_dimension_mismatch(self, flagship):
        with pytest.raises(ValueError):
            apply_operator(build_operator(flagship),
                           MatrixPolynomial.constant(np.eye(3)))
