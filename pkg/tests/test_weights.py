import math

import numpy as np
import pytest

from matorth.linalg import max_abs
from matorth.weights import (WeightParams, abel_identity_check, alpha_coeff,
                             build_structure, verify_structure_identities,
                             weight_eval, weight_inverse_2x2, weight_moment,
                             weight_symbolic)

SQPI = math.sqrt(math.pi)


class TestParams:
    def test_rejects_small_size(self):
        with pytest.raises(ValueError, match="size"):
            WeightParams(1, (), 2.0)

    def test_rejects_zero_parameter_naming_index(self):
        with pytest.raises(ValueError, match="a_2"):
            WeightParams(3, (1.0, 0.0), 2.0)

    def test_rejects_nonpositive_b(self):
        with pytest.raises(ValueError, match="b"):
            WeightParams(2, (1.0,), 0.0)

    def test_rejects_wrong_parameter_count(self):
        with pytest.raises(ValueError):
            WeightParams(3, (1.0,), 2.0)

    def test_degenerate_flag(self):
        assert WeightParams(2, (1.0,), 1.0).degenerate_b
        assert not WeightParams(2, (1.0,), 2.0).degenerate_b


class TestStructure:
    def test_two_by_two_display(self):
        a, b = 1.5 - 0.5j, 3.0
        s = build_structure(WeightParams(2, (a,), b))
        assert np.array_equal(s.shift, np.array([[0, a], [0, 0]]))
        assert np.array_equal(s.diag_scale, np.diag([1.0, b]))
        assert np.array_equal(s.gauss_diag, np.diag([-b / 2.0, -0.5]))
        assert np.array_equal(s.nilpotent, s.shift)  # size 2: series has one term

    def test_alpha_zero_is_one(self):
        for size in (2, 4, 7):
            assert alpha_coeff(size, 2.7, 0) == 1.0

    def test_alpha_one_matches_reduced_form(self):
        # j = 1 reduces to (1 - b) / (4 b (N - 1)); at N = 4 that is (1-b)/(12b)
        b = 3.2
        assert abs(alpha_coeff(4, b, 1) - (1 - b) / (12 * b)) < 1e-18
        for size in (3, 5, 8):
            assert abs(alpha_coeff(size, b, 1)
                       - (1 - b) / (4 * b * (size - 1))) < 1e-18

    def test_number_and_scale_diagonals(self):
        p = WeightParams(4, (1.0, 1.0, 1.0), 2.0)
        s = build_structure(p)
        assert np.array_equal(np.diag(s.number), np.arange(4))
        psi = 1.0 + np.arange(4) / 3.0
        assert max_abs(np.diag(s.diag_scale) - psi) < 1e-15

    def test_degenerate_b_kills_higher_terms(self):
        p = WeightParams(5, (1.0, 1.0, 1.0, 1.0), 1.0)
        s = build_structure(p)
        assert s.odd_coeffs[0] == 1.0
        assert all(c == 0.0 for c in s.odd_coeffs[1:])
        assert np.array_equal(s.nilpotent, s.shift)


class TestWeightEval:
    def test_two_by_two_display(self):
        a, b = 0.8 + 0.4j, 2.5
        p = WeightParams(2, (a,), b)
        for t in (-2.0, 0.3, 1.7):
            g1, g = math.exp(-b * t * t), math.exp(-t * t)
            expected = np.array([
                [abs(a) ** 2 * t * t * g + g1, a * t * g],
                [np.conj(a) * t * g, g],
            ])
            assert max_abs(weight_eval(p, t)[1] - expected) < 1e-15

    def test_at_zero_both_identity(self):
        p = WeightParams(3, (1.0, 2.0j), 0.7)
        big_t, w = weight_eval(p, 0.0)
        assert max_abs(big_t - np.eye(3)) == 0.0
        assert max_abs(w - np.eye(3)) == 0.0

    def test_tiny_a_is_nearly_diagonal(self):
        b = 3.0
        p = WeightParams(2, (1e-150,), b)
        t = 1.3
        w = weight_eval(p, t)[1]
        assert abs(w[0, 1]) < 1e-140 and abs(w[1, 0]) < 1e-140
        assert max_abs(w - np.diag([math.exp(-b * t * t),
                                    math.exp(-t * t)])) < 1e-15

    def test_hermitian_positive_definite(self):
        rng = np.random.default_rng(11)
        for size in range(2, 9):
            a = rng.uniform(0.2, 1.5, size - 1) * np.exp(2j * np.pi * rng.random(size - 1))
            p = WeightParams(size, tuple(a), float(rng.uniform(0.3, 4.0)))
            for t in np.linspace(-5, 5, 9):
                w = weight_eval(p, t)[1]
                assert max_abs(w - w.conj().T) < 1e-14 * max(1.0, max_abs(w))
                assert np.linalg.eigvalsh(w).min() > 0.0

    def test_determinant_product_law(self):
        # det W = prod_k exp(2 d_k t^2): the polynomial factor is unimodular
        p = WeightParams(3, (1.0, 0.5 + 1.0j), 1.8)
        s = build_structure(p)
        for t in (-1.5, 0.4, 2.0):
            expected = math.exp(2.0 * t * t * float(np.sum(s.gauss_scales)))
            det = np.linalg.det(weight_eval(p, t)[1]).real
            assert abs(det - expected) < 1e-8 * expected

    def test_symbolic_matches_pointwise(self):
        p = WeightParams(4, (1.0, -0.7, 0.3j), 0.6)
        w_sym = weight_symbolic(p)
        for t in (-2.2, 0.1, 1.4):
            assert max_abs(w_sym(t) - weight_eval(p, t)[1]) < 1e-13


class TestMoments:
    def test_zeroth_moment_closed_form(self):
        a, b = 1.3 - 0.2j, 2.0
        p = WeightParams(2, (a,), b)
        expected = np.diag([abs(a) ** 2 * SQPI / 2.0 + math.sqrt(math.pi / b), SQPI])
        assert max_abs(weight_moment(p, 0) - expected) < 1e-14

    def test_second_moment_corner_entry(self):
        p = WeightParams(2, (1.0,), 2.0)
        assert abs(weight_moment(p, 2)[1, 1] - SQPI / 2.0) < 1e-15

    def test_odd_moment_diagonal_vanishes(self):
        p = WeightParams(3, (1.0, 1.5), 2.5)
        for m in (1, 3, 7):
            assert max_abs(np.diag(weight_moment(p, m))) == 0.0

    def test_moments_hermitian(self):
        p = WeightParams(4, (1.0, 0.5j, 2.0), 1.3)
        for m in range(8):
            s = weight_moment(p, m)
            assert max_abs(s - s.conj().T) < 1e-12 * max(1.0, max_abs(s))

    def test_memoized(self):
        p = WeightParams(2, (1.0,), 2.0)
        assert weight_moment(p, 4) is weight_moment(p, 4)


class TestInverse2x2:
    def test_identity_at_zero(self):
        p = WeightParams(2, (2.0,), 0.5)
        assert max_abs(weight_inverse_2x2(p, 0.0) - np.eye(2)) == 0.0

    def test_product_is_identity_on_grid(self):
        p = WeightParams(2, (1.0,), 2.0)
        for t in np.linspace(-3, 3, 13):
            prod = weight_eval(p, t)[1] @ weight_inverse_2x2(p, t)
            assert max_abs(prod - np.eye(2)) < 1e-10

    def test_product_is_identity_complex_parameter(self):
        # |a|^2 = 2 doubles the exp(b t^2) cancellation scale at |t| = 3
        p = WeightParams(2, (1.0 + 1.0j,), 2.0)
        for t in np.linspace(-3, 3, 13):
            prod = weight_eval(p, t)[1] @ weight_inverse_2x2(p, t)
            assert max_abs(prod - np.eye(2)) < 5e-10

    def test_tiny_a_diagonal(self):
        b = 2.0
        p = WeightParams(2, (1e-160,), b)
        t = 1.1
        expected = np.diag([math.exp(b * t * t), math.exp(t * t)])
        assert max_abs(weight_inverse_2x2(p, t) - expected) < 1e-140

    def test_rejects_other_sizes(self):
        with pytest.raises(ValueError):
            weight_inverse_2x2(WeightParams(3, (1.0, 1.0), 2.0), 0.5)


class TestStructureIdentities:
    def test_size_two_is_exact(self):
        p = WeightParams(2, (1.0 - 2.0j,), 3.0)
        rep = verify_structure_identities(p, 0.8)
        # bracket with the number operator gives back the shift; both sides of
        # the defect identity vanish since the shift squares to zero
        assert rep.residuals["bracket_series"] == 0.0
        assert rep.residuals["bracket_defect"] == 0.0
        assert rep.max_residual < 1e-14

    def test_size_five_random(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            a = rng.uniform(0.2, 1.8, 4) * np.exp(2j * np.pi * rng.random(4))
            p = WeightParams(5, tuple(a), 2.0)
            rep = verify_structure_identities(p, 0.7)
            assert not rep.skipped
            assert len(rep.residuals) == 6
            assert rep.max_residual < 1e-10

    def test_degenerate_b_skips_inverse_factor_identity(self):
        p = WeightParams(4, (1.0, 1.0, 1.0), 1.0)
        rep = verify_structure_identities(p, 1.2)
        assert rep.skipped == ("even_power_sum",)
        assert len(rep.residuals) == 5
        assert rep.max_residual < 1e-12

    def test_fifty_draws_across_sizes(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            size = int(rng.integers(2, 9))
            while True:
                b = float(rng.uniform(0.2, 5.0))
                if abs(b - 1.0) > 0.05:
                    break
            a = rng.uniform(0.1, 2.0, size - 1) * np.exp(2j * np.pi * rng.random(size - 1))
            p = WeightParams(size, tuple(a), b)
            for t in (-2.0, 0.3, 1.9):
                assert verify_structure_identities(p, t).max_residual < 1e-10


class TestAbelIdentity:
    def test_k_zero(self):
        lhs, rhs, res = abel_identity_check(0, 0.3 + 1.0j, -0.7 + 0.2j)
        w = -0.7 + 0.2j
        assert abs(lhs - 1.0 / w) < 1e-15
        assert abs(rhs - 1.0 / w) < 1e-15
        assert res < 1e-15

    def test_k_one_hand_expansion(self):
        z, w = 0.0, 1.0
        lhs, rhs, res = abel_identity_check(1, z, w)
        assert abs(rhs - 2.0) < 1e-15  # (z + w + 1)/w = 2
        assert abs(lhs - rhs) < 1e-15

    @pytest.mark.parametrize("k", [1, 3, 6, 12, 20])
    def test_half_half_specialization(self, k):
        # with z = w = 1/2 and the terms rescaled by 2^(k-1), the sum equals
        # 2^k (1 + k)^k
        lhs, rhs, res = abel_identity_check(k, 0.5, 0.5)
        assert res < 1e-13
        assert abs(lhs.real * 2.0 ** (k - 1) - 2.0 ** k * (1 + k) ** k) \
            <= 1e-12 * 2.0 ** k * (1 + k) ** k

    def test_zero_convention_corner(self):
        # m = -z corner exercises 0**0 = 1
        lhs, rhs, res = abel_identity_check(3, -1.0, 1.0)
        assert res < 1e-13

    def test_rejects_large_k(self):
        with pytest.raises(ValueError):
            abel_identity_check(41, 1.0, 1.0)

    def test_rejects_zero_w(self):
        with pytest.raises(ValueError):
            abel_identity_check(3, 1.0, 0.0)
