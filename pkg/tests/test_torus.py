"""Twisted algebra core: phases, products, involution, trace, derivations."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nctorus import (
    AlgebraMismatch,
    DeformationMatrix,
    DimensionMismatch,
    TorusAlgebra,
    TorusElement,
    TruncationOverflow,
    TruncationPolicy,
    adjoint,
    delta,
    delta_tilde,
    l1_norm,
    linear_combine,
    mul,
    trace_tau,
    weyl_phase,
)

from conftest import (
    THETA2,
    THETA3,
    adjoint_phase_oracle,
    element_strategy,
    exponents_strategy,
    random_dense_element,
    word_phase_oracle,
)


class TestDeformationMatrix:
    def test_rejects_non_skew(self):
        with pytest.raises(ValueError, match="skew"):
            DeformationMatrix([[0.0, 0.2], [0.2, 0.0]])

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            DeformationMatrix([[0.0]])

    def test_antisymmetrized_exactly(self):
        theta = DeformationMatrix([[1e-13, -0.25], [0.25 + 1e-13, -1e-13]])
        arr = np.array(theta.to_obj())
        assert np.array_equal(arr, -arr.T)

    def test_roundtrip(self):
        assert DeformationMatrix.from_obj(THETA2.to_obj()) == THETA2


class TestWeylPhase:
    def test_generator_relation_phase(self):
        # U_2 U_1 against the defining relation, theta_21 = 0.31
        got = weyl_phase((0, 1), (1, 0), THETA2)
        assert got == pytest.approx(cmath.exp(2j * math.pi * 0.31), abs=1e-15)

    def test_already_normal_ordered(self):
        n = 4
        theta = DeformationMatrix(
            [[0.0] * 4, [0.0] * 4, [0.0] * 4, [0.0] * 4]
        )
        r = (1, 0, 0, 0)
        s = (0, 1, 0, 0)
        assert weyl_phase(r, s, THETA3 if n == 3 else theta) == 1.0
        assert weyl_phase((1, 0), (0, 1), THETA2) == 1.0

    def test_square_of_mixed_monomial(self):
        # swap oracle for U^{(1,1)} U^{(1,1)}
        got = weyl_phase((1, 1), (1, 1), THETA2)
        assert got == pytest.approx(cmath.exp(2j * math.pi * 0.31), abs=1e-15)

    @given(exponents_strategy(2, 3), exponents_strategy(2, 3))
    def test_against_swap_oracle_n2(self, r, s):
        assert weyl_phase(r, s, THETA2) == pytest.approx(
            word_phase_oracle(r, s, THETA2), abs=1e-12
        )

    @given(exponents_strategy(3, 2), exponents_strategy(3, 2))
    def test_against_swap_oracle_n3(self, r, s):
        assert weyl_phase(r, s, THETA3) == pytest.approx(
            word_phase_oracle(r, s, THETA3), abs=1e-12
        )

    @given(exponents_strategy(3, 4), exponents_strategy(3, 4))
    def test_unit_modulus(self, r, s):
        assert abs(abs(weyl_phase(r, s, THETA3)) - 1.0) <= 1e-15

    @given(exponents_strategy(3, 3), exponents_strategy(3, 3), exponents_strategy(3, 3))
    def test_cocycle_identity(self, r, s, t):
        rs = tuple(a + b for a, b in zip(r, s))
        st_ = tuple(a + b for a, b in zip(s, t))
        lhs = weyl_phase(r, s, THETA3) * weyl_phase(rs, t, THETA3)
        rhs = weyl_phase(r, st_, THETA3) * weyl_phase(s, t, THETA3)
        assert lhs == pytest.approx(rhs, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            weyl_phase((1, 0, 0), (0, 1), THETA2)


class TestMul:
    def test_unitarity(self, alg2):
        u1 = alg2.u(1)
        assert mul(u1, adjoint(u1)).coeffs == {(0, 0): 1.0 + 0.0j}

    def test_generator_relation(self, alg2):
        got = mul(alg2.u(2), alg2.u(1))
        assert set(got.coeffs) == {(1, 1)}
        assert got.coeffs[(1, 1)] == pytest.approx(
            cmath.exp(2j * math.pi * 0.31), abs=1e-15
        )

    def test_single_generator_square(self, alg2):
        u1 = alg2.u(1)
        s = u1 + adjoint(u1)
        sq = mul(s, s)
        assert sq.coeffs == {(-2, 0): 1.0 + 0.0j, (0, 0): 2.0 + 0.0j, (2, 0): 1.0 + 0.0j}

    def test_monomial_product_matches_phase(self, alg3):
        a = alg3.monomial((1, -2, 1), 0.5 + 0.25j)
        b = alg3.monomial((2, 1, -1), -1.5j)
        got = mul(a, b)
        expect = (0.5 + 0.25j) * (-1.5j) * weyl_phase((1, -2, 1), (2, 1, -1), THETA3)
        assert got.coeffs[(3, -1, 0)] == pytest.approx(expect, abs=1e-15)

    @given(st.data())
    def test_associative(self, alg2_strict, data):
        a = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        b = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        c = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        lhs = mul(mul(a, b), c)
        rhs = mul(a, mul(b, c))
        scale = max(1.0, l1_norm(a) * l1_norm(b) * l1_norm(c))
        assert l1_norm(lhs - rhs) <= 1e-12 * scale

    @given(st.data())
    def test_distributive(self, alg2_strict, data):
        a = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        b = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        c = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        lhs = mul(a, b + c)
        rhs = mul(a, b) + mul(a, c)
        scale = max(1.0, l1_norm(a) * (l1_norm(b) + l1_norm(c)))
        assert l1_norm(lhs - rhs) <= 1e-12 * scale

    @given(st.data())
    def test_submultiplicative(self, alg2_strict, data):
        a = data.draw(element_strategy(alg2_strict, radius=2, max_terms=5))
        b = data.draw(element_strategy(alg2_strict, radius=2, max_terms=5))
        assert l1_norm(mul(a, b)) <= l1_norm(a) * l1_norm(b) + 1e-12

    def test_theta_mismatch_rejected(self, alg2):
        other = TorusAlgebra(THETA3, alg2.policy)
        with pytest.raises(AlgebraMismatch):
            mul(alg2.u(1), other.u(1))

    def test_policy_mismatch_rejected(self, alg2):
        other = TorusAlgebra(THETA2, TruncationPolicy(r_max=9))
        with pytest.raises(AlgebraMismatch):
            mul(alg2.u(1), other.u(1))

    def test_strict_overflow(self):
        alg = TorusAlgebra(THETA2, TruncationPolicy(r_max=1, mode="strict"))
        u1 = alg.u(1)
        with pytest.raises(TruncationOverflow):
            mul(mul(u1, u1), u1)

    def test_lossy_overflow_accounted(self):
        alg = TorusAlgebra(THETA2, TruncationPolicy(r_max=1, mode="lossy"))
        u1 = alg.u(1)
        sq = mul(u1, u1)  # support {(2,0)} falls outside the box
        assert sq.is_zero()
        assert sq.truncation_loss == pytest.approx(1.0)

    def test_strict_results_have_zero_loss(self, alg2_strict):
        rng = np.random.default_rng(0)
        a = random_dense_element(alg2_strict, rng, radius=2)
        b = random_dense_element(alg2_strict, rng, radius=2)
        assert mul(a, b).truncation_loss == 0.0

    def test_loss_monotone_through_operations(self):
        alg = TorusAlgebra(THETA2, TruncationPolicy(r_max=2, mode="lossy"))
        a = alg.monomial((2, 0)) + alg.monomial((1, 0))
        sq = mul(a, a)  # (3,0) and (4,0) leave the box
        assert sq.truncation_loss > 0.0
        again = mul(sq, alg.one())
        assert again.truncation_loss >= sq.truncation_loss


class TestLinearCombine:
    def test_cancellation(self, alg2):
        u1 = alg2.u(1)
        assert linear_combine([(1.0, u1), (-1.0, u1)]).is_zero()

    def test_scalar_sum(self, alg2):
        one = alg2.one()
        got = linear_combine([(2.0, one), (3.0, one)])
        assert got.coeffs == {(0, 0): 5.0 + 0.0j}

    def test_support_union(self, alg2):
        got = alg2.u(1) + adjoint(alg2.u(1))
        assert set(got.coeffs) == {(1, 0), (-1, 0)}

    def test_mismatch_rejected(self, alg2, alg3):
        with pytest.raises(AlgebraMismatch):
            linear_combine([(1.0, alg2.u(1)), (1.0, alg3.u(1))])


class TestAdjoint:
    def test_generator(self, alg2):
        star = adjoint(alg2.u(1))
        assert star.coeffs == {(-1, 0): 1.0 + 0.0j}

    def test_mixed_monomial_phase(self, alg2):
        star = adjoint(alg2.monomial((1, 1)))
        assert set(star.coeffs) == {(-1, -1)}
        assert star.coeffs[(-1, -1)] == pytest.approx(
            cmath.exp(2j * math.pi * 0.31), abs=1e-15
        )

    @given(exponents_strategy(3, 3))
    def test_phase_matches_swap_oracle(self, r):
        got = adjoint(TorusAlgebra(THETA3, TruncationPolicy(r_max=4)).monomial(r))
        expect = adjoint_phase_oracle(r, THETA3)
        key = tuple(-x for x in r)
        assert got.coeffs[key] == pytest.approx(expect, abs=1e-12)

    @given(st.data())
    def test_involution(self, alg2, data):
        a = data.draw(element_strategy(alg2, radius=3, max_terms=5))
        assert l1_norm(adjoint(adjoint(a)) - a) <= 1e-13 * max(1.0, l1_norm(a))

    @given(st.data())
    def test_antihomomorphism(self, alg2_strict, data):
        a = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        b = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        lhs = adjoint(mul(a, b))
        rhs = mul(adjoint(b), adjoint(a))
        assert l1_norm(lhs - rhs) <= 1e-12 * max(1.0, l1_norm(a) * l1_norm(b))


class TestTrace:
    def test_unit(self, alg2):
        assert trace_tau(alg2.one()) == 1.0

    def test_nonzero_exponents_vanish(self, alg2):
        assert trace_tau(alg2.monomial((2, -1))) == 0.0
        assert trace_tau(alg2.u(1)) == 0.0

    def test_unitarity(self, alg2):
        u1 = alg2.u(1)
        assert trace_tau(mul(u1, adjoint(u1))) == 1.0

    @given(st.data())
    def test_tracial(self, alg2_strict, data):
        a = data.draw(element_strategy(alg2_strict, radius=2, max_terms=5))
        b = data.draw(element_strategy(alg2_strict, radius=2, max_terms=5))
        scale = max(1.0, l1_norm(a) * l1_norm(b))
        assert abs(trace_tau(mul(a, b)) - trace_tau(mul(b, a))) <= 1e-12 * scale

    @given(st.data())
    def test_positive_and_equals_coefficient_square_sum(self, alg2, data):
        # phase moduli cost about one ulp per term, so "exact" here means a
        # few machine epsilons relative to the mass
        a = data.draw(element_strategy(alg2, radius=3, max_terms=5))
        got = trace_tau(mul(adjoint(a), a))
        expect = sum(abs(c) ** 2 for c in a.coeffs.values())
        assert got.real >= -1e-12
        assert abs(got.imag) <= 1e-14 * max(1.0, expect)
        assert got.real == pytest.approx(expect, rel=1e-13, abs=1e-14)


class TestDerivations:
    def test_coefficient_scaling(self, alg2):
        got = delta_tilde(1, alg2.monomial((2, 3)))
        assert got.coeffs == {(2, 3): 2.0j}

    def test_kills_constants(self, alg2):
        assert delta_tilde(2, alg2.one()).is_zero()
        assert delta(1, alg2.one()).is_zero()

    def test_delta_on_generators(self, alg2):
        assert delta(1, alg2.u(1)).coeffs == {(1, 0): 1.0 + 0.0j}
        assert delta(1, adjoint(alg2.u(1))).coeffs == {(-1, 0): -1.0 + 0.0j}

    def test_delta_is_minus_i_delta_tilde(self, alg2):
        rng = np.random.default_rng(3)
        a = random_dense_element(alg2, rng, radius=2)
        assert delta(1, a) == delta_tilde(1, a) * (-1j)

    def test_axis_out_of_range(self, alg2):
        with pytest.raises(DimensionMismatch):
            delta_tilde(3, alg2.one())
        with pytest.raises(DimensionMismatch):
            delta(0, alg2.one())

    @given(st.data())
    def test_leibniz(self, alg2_strict, data):
        a = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        b = data.draw(element_strategy(alg2_strict, radius=2, max_terms=4))
        for j in (1, 2):
            resid = delta_tilde(j, mul(a, b)) - mul(delta_tilde(j, a), b) - mul(a, delta_tilde(j, b))
            assert l1_norm(resid) <= 1e-12 * max(1.0, l1_norm(a) * l1_norm(b))

    @given(st.data())
    def test_star_derivation(self, alg2, data):
        a = data.draw(element_strategy(alg2, radius=3, max_terms=5))
        for j in (1, 2):
            resid = adjoint(delta_tilde(j, a)) - delta_tilde(j, adjoint(a))
            assert l1_norm(resid) <= 1e-12 * max(1.0, l1_norm(a))

    @given(st.data())
    def test_derivations_commute_exactly(self, alg2, data):
        # exponents up to 2 multiply coefficients by 0, +-1, +-2 only, all of
        # which are exact in floating point
        a = data.draw(element_strategy(alg2, radius=2, max_terms=5))
        lhs = delta_tilde(1, delta_tilde(2, a))
        rhs = delta_tilde(2, delta_tilde(1, a))
        assert lhs.coeffs == rhs.coeffs


class TestSerialization:
    def test_roundtrip(self, alg2):
        a = alg2.element({(1, 0): 0.5 - 0.25j, (-2, 3): 1.5j})
        back = TorusElement.from_obj(alg2, a.to_obj())
        assert back == a

    def test_record_shape(self, alg2):
        obj = alg2.u(1).to_obj()
        assert obj == [{"exp": [1, 0], "re": 1.0, "im": 0.0}]

    def test_rejects_wrong_length(self, alg2):
        with pytest.raises(DimensionMismatch):
            TorusElement.from_obj(alg2, [{"exp": [1, 0, 0], "re": 1.0, "im": 0.0}])
