import numpy as np
import pytest

from core.collusion import (
    ClassDStrategy,
    ClassTag,
    CollusionChannel,
    all_ones,
    all_zeros,
    bernstein,
    bernstein_matrix,
    classA,
    coin_flip,
    conditional_matrices,
    dprob_y1,
    j_value,
    j_value_rho,
    majority,
    minority,
    parse_channel,
    prob_y1,
    prob_y1_given_x,
    q_vectors,
    scalar_rho,
)
from core.errors import CapabilityError, InvalidInputError, StrategyError

PS = np.array([0.0, 0.03, 0.2, 0.5, 0.77, 0.99, 1.0])


class TestCollusionChannel:
    def test_marking_assumption(self):
        with pytest.raises(InvalidInputError, match="marking assumption"):
            CollusionChannel(2, (0.1, 0.5, 1.0))
        with pytest.raises(InvalidInputError, match="marking assumption"):
            CollusionChannel(2, (0.0, 0.5, 0.9))

    def test_length_and_range(self):
        with pytest.raises(InvalidInputError):
            CollusionChannel(3, (0.0, 0.5, 1.0))
        with pytest.raises(InvalidInputError):
            CollusionChannel(3, (0.0, 1.2, 0.5, 1.0))
        with pytest.raises(InvalidInputError):
            CollusionChannel(0, (0.0,))

    def test_tolerance_snaps(self):
        ch = CollusionChannel(2, (1e-12, 0.5, 1.0 + 1e-12))
        assert ch.theta == (0.0, 0.5, 1.0)

    @pytest.mark.parametrize("theta,tag", [
        ((0.0, 0.25, 0.5, 0.75, 1.0), ClassTag.A),
        ((0.0, 0.3, 0.5, 0.7, 1.0), ClassTag.B),
        ((0.0, 0.3, 0.6, 0.9, 1.0), ClassTag.C),
    ])
    def test_class_tag(self, theta, tag):
        assert CollusionChannel(4, theta).class_tag() == tag

    def test_class_a_is_class_b(self):
        assert classA(5).is_class_b()

    def test_to_text(self):
        assert classA(2).to_text(3) == "0.000,0.500,1.000"
        assert parse_channel(classA(3).to_text()).theta == classA(3).theta


class TestNamedAttacks:
    def test_catalogue(self):
        assert majority(3).theta == (0.0, 0.0, 1.0, 1.0)
        assert majority(4).theta == (0.0, 0.0, 0.5, 1.0, 1.0)
        assert minority(3).theta == (0.0, 1.0, 0.0, 1.0)
        assert coin_flip(3).theta == (0.0, 0.5, 0.5, 1.0)
        assert all_ones(3).theta == (0.0, 1.0, 1.0, 1.0)
        assert all_zeros(3).theta == (0.0, 0.0, 0.0, 1.0)

    def test_parse_named(self):
        assert parse_channel("majority:3").theta == majority(3).theta
        assert parse_channel("classA", c=4).theta == classA(4).theta

    def test_parse_list(self):
        assert parse_channel("0,0.5,1").theta == (0.0, 0.5, 1.0)

    @pytest.mark.parametrize("text", ["nope:3", "majority", "majority:x", "0,a,1"])
    def test_parse_invalid(self, text):
        with pytest.raises(InvalidInputError):
            parse_channel(text)

    def test_parse_size_mismatch(self):
        with pytest.raises(InvalidInputError, match="expected 3"):
            parse_channel("0,0.5,1", c=3)


class TestBernstein:
    @pytest.mark.parametrize("c", [1, 2, 5, 20, 50, 60, 200])
    def test_rows_sum_to_one(self, c):
        assert np.allclose(bernstein_matrix(c, PS).sum(axis=1), 1.0, atol=1e-12)

    def test_log_space_matches_exact(self):
        # c = 60 goes through gammaln; compare with exact integers at a few entries
        import math
        p = 0.37
        row = bernstein_matrix(60, [p])[0]
        for s in (0, 7, 22, 45, 60):
            exact = math.comb(60, s) * p ** s * (1 - p) ** (60 - s)
            assert row[s] == pytest.approx(exact, rel=1e-10)

    def test_scalar_value(self):
        assert bernstein(2, 1, 0.5) == pytest.approx(0.5)

    def test_invalid_sigma(self):
        with pytest.raises(InvalidInputError, match="invalid sigma"):
            bernstein(3, 4, 0.5)

    def test_cap(self):
        with pytest.raises(CapabilityError):
            bernstein_matrix(201, [0.5])


class TestProbabilities:
    def test_class_a_reproduces_p(self):
        for c in (2, 5, 9):
            assert np.allclose(prob_y1(classA(c), PS), PS, atol=1e-14)

    def test_endpoints(self):
        ch = CollusionChannel(3, (0.0, 0.9, 0.1, 1.0))
        assert prob_y1(ch, 0.0) == pytest.approx(0.0)
        assert prob_y1(ch, 1.0) == pytest.approx(1.0)

    def test_given_x_class_a(self):
        ch = classA(2)
        assert prob_y1_given_x(ch, 1, 0.5) == pytest.approx(0.75)
        assert prob_y1_given_x(ch, 0, 0.5) == pytest.approx(0.25)

    def test_given_x_invalid(self):
        with pytest.raises(InvalidInputError):
            prob_y1_given_x(classA(2), 2, 0.5)

    def test_total_probability(self):
        rng = np.random.default_rng(3)
        for c in (2, 4, 7):
            ch = CollusionChannel.from_interior(rng.random(c - 1))
            q = prob_y1(ch, PS)
            mixed = PS * prob_y1_given_x(ch, 1, PS) + (1 - PS) * prob_y1_given_x(ch, 0, PS)
            assert np.allclose(q, mixed, atol=1e-14)

    def test_class_b_closure(self):
        # Class B: Pr(Y=1 | X=1, p) = 1 - Pr(Y=1 | X=0, 1-p)
        ch = CollusionChannel(4, (0.0, 0.3, 0.5, 0.7, 1.0))
        for p in (0.1, 0.35, 0.8):
            assert prob_y1_given_x(ch, 1, p) == pytest.approx(1.0 - prob_y1_given_x(ch, 0, 1.0 - p))

    def test_derivative(self):
        ch = CollusionChannel(4, (0.0, 0.2, 0.9, 0.4, 1.0))
        p, step = 0.31, 1e-6
        fd = (prob_y1(ch, p + step) - prob_y1(ch, p - step)) / (2 * step)
        assert dprob_y1(ch, p) == pytest.approx(fd, rel=1e-7)

    def test_conditional_matrix_shapes(self):
        q1, q0 = conditional_matrices(4, PS)
        assert q1.shape == q0.shape == (PS.size, 5)
        assert np.all(q1[:, 0] == 0.0) and np.all(q0[:, -1] == 0.0)


class TestHyperplane:
    @pytest.mark.parametrize("c", [3, 4, 6])
    def test_j_two_ways(self, c):
        rng = np.random.default_rng(c)
        ch = CollusionChannel.from_interior(rng.random(c - 1))
        for p in (0.05, 0.3, 0.5, 0.9):
            assert j_value(ch, p) == pytest.approx(j_value_rho(ch, p), abs=1e-14)

    @pytest.mark.parametrize("c,i", [(4, 1), (4, 2), (5, 3), (6, 5)])
    def test_rho_sign(self, c, i):
        below, above = i / c - 0.05, i / c + 0.05
        assert scalar_rho(c, i, below) > 0.0
        if above < 1.0:
            assert scalar_rho(c, i, above) < 0.0

    def test_rho_closed_form(self):
        import math
        c, i, p = 5, 2, 0.3
        expected = math.comb(c, i) * p ** (i - 1) * (1 - p) ** (c - i - 1) * (i / c - p)
        assert scalar_rho(c, i, p) == pytest.approx(expected, rel=1e-12)

    def test_rho_index(self):
        with pytest.raises(InvalidInputError):
            scalar_rho(4, 0, 0.3)

    def test_q_vectors(self):
        q1, q0 = q_vectors(3, 0.4)
        assert q1.sum() == pytest.approx(1.0)
        assert q0.sum() == pytest.approx(1.0)

    def test_class_a_j_is_positive(self):
        # Class A: Pr(Y=1|X=1) - Pr(Y=1|X=0) = 1/c
        assert j_value(classA(4), 0.37) == pytest.approx(0.25)


class TestClassDStrategy:
    def test_from_pointwise(self):
        strategy = ClassDStrategy.from_pointwise(2, lambda p: (0.0, p, 1.0))
        out = strategy.thetas([0.1, 0.6])
        assert out.tolist() == [[0.0, 0.1, 1.0], [0.0, 0.6, 1.0]]
        assert strategy.channel_at(0.3).theta == (0.0, 0.3, 1.0)

    def test_invalid_rule(self):
        strategy = ClassDStrategy.from_pointwise(2, lambda p: (0.0, 2.0 * p, 1.0))
        with pytest.raises(StrategyError, match="strategy undefined at p=0.8"):
            strategy.thetas([0.2, 0.8])

    def test_wrong_shape(self):
        strategy = ClassDStrategy(2, lambda ps: np.zeros((ps.size, 2)))
        with pytest.raises(StrategyError):
            strategy.thetas([0.5])
