import numpy as np
import pytest
from scipy.optimize import minimize

from core.analysis import classA_divergence
from core.collusion import CollusionChannel, classA
from core.entropy import to_bits
from core.errors import CapabilityError, ConvergenceError, InvalidInputError
from core.rates import (
    Decoder,
    r_joint_classd_closed,
    r_joint_point,
    r_simple_point,
    rate_classd,
    rate_simple,
    rate_tables,
    simple_point_nats,
)
from core.timeshare import parse_dist
from core.worst import (
    SolverConfig,
    _ba_update,
    capacity_classd_joint,
    conv_projection_attack,
    eta_c,
    projection_coefficients,
    projection_gap,
    projection_l2_distance,
    simple_classd_objective,
    worst_joint_bc,
    worst_joint_classb,
    worst_joint_classd,
    worst_simple_bc,
    worst_simple_classb,
    worst_simple_classd,
)

# joint decoder, Tardos pdf, Class C: (c, theta*, rate in bits)
JOINT_TARDOS_TABLE = [
    (2, (0, 0.5, 1), 0.153),
    (3, (0, 0.340, 0.660, 1), 0.071),
    (4, (0, 0.260, 0.5, 0.741, 1), 0.041),
    (5, (0, 0.209, 0.403, 0.597, 0.791, 1), 0.026),
    (6, (0, 0.176, 0.338, 0.5, 0.662, 0.824, 1), 0.019),
    (7, (0, 0.151, 0.291, 0.431, 0.569, 0.709, 0.849, 1), 0.014),
    (8, (0, 0.133, 0.256, 0.378, 0.5, 0.622, 0.744, 0.867, 1), 0.011),
    (9, (0, 0.119, 0.229, 0.338, 0.446, 0.554, 0.662, 0.771, 0.881, 1), 0.008),
]

# simple decoder, Tardos pdf, Class C: (c, published theta*, rate in bits by quadrature)
SIMPLE_TARDOS_TABLE = [
    (2, (0, 0.5, 1), 0.11756),
    (3, (0, 0.652, 0.348, 1), 0.04704),
    (4, (0, 0.488, 0.5, 0.512, 1), 0.02758),
    (5, (0, 0.594, 0.000, 1.000, 0.406, 1), 0.01720),
    (6, (0, 0.503, 0.175, 0.500, 0.825, 0.497, 1), 0.01232),
    (7, (0, 0.492, 0.000, 0.899, 0.101, 1.000, 0.508, 1), 0.00907),
    (8, (0, 0.471, 0.000, 0.689, 0.500, 0.310, 1.000, 0.529, 1), 0.00705),
    (9, (0, 0.440, 0.000, 0.698, 0.230, 0.770, 0.302, 1.000, 0.560, 1), 0.00565),
]

# eta_c - 1/c: (c, mantissa, exponent)
ETA_TABLE = [
    (3, 1.7, -1),
    (4, 7.8, -3),
    (5, 6.3, -4),
    (6, 4.5, -5),
    (10, 2.3, -10),
]


class TestJointStationary:
    @pytest.mark.parametrize("c,theta,rate_bits", JOINT_TARDOS_TABLE)
    def test_table(self, tardos, c, theta, rate_bits):
        ch, value = worst_joint_bc(c, tardos)
        assert value == pytest.approx(rate_bits, abs=1e-3)
        assert np.allclose(ch.as_array(), theta, atol=5e-3)

    def test_c2_is_the_only_class_b_channel(self, tardos, flat):
        for dist in (tardos, flat):
            ch, _ = worst_joint_bc(2, dist)
            assert ch.theta[1] == pytest.approx(0.5, abs=1e-6)

    def test_diagnostics(self, tardos):
        info = {}
        worst_joint_bc(4, tardos, diagnostics_out=info)
        assert info["iterations"] >= 1
        assert info["final_gap_bits"] < 1e-12
        assert info["fixed_point_residual"] < 1e-3
        assert info["node_count"] == 2001

    def test_updates_never_increase_the_rate(self, flat):
        tables = rate_tables(5, flat)
        theta = classA(5).as_array()
        previous = tables.joint_kl_nats(theta)
        for _ in range(30):
            theta = _ba_update(tables, theta)
            current = tables.joint_kl_nats(theta)
            assert current <= previous + 1e-15
            previous = current

    @pytest.mark.parametrize("selector", ["tardos", "flat", "bs:6"])
    def test_symmetric_pdf_gives_class_b(self, selector):
        ch, _ = worst_joint_bc(5, parse_dist(selector))
        assert ch.is_class_b(tol=1e-6)

    def test_worst_is_below_class_a(self, flat):
        from core.rates import rate_joint
        _, value = worst_joint_bc(4, flat)
        assert value <= rate_joint(classA(4), flat) + 1e-12

    def test_flat_diverges_more_than_tardos(self, tardos, flat):
        ch_t, _ = worst_joint_bc(6, tardos)
        ch_f, _ = worst_joint_bc(6, flat)
        assert classA_divergence(ch_f) > classA_divergence(ch_t)

    def test_class_b_for_asymmetric_pdf(self):
        dist = parse_dist("discrete:0.2:0.6,0.7:0.4")
        ch_b, rate_b = worst_joint_classb(4, dist)
        ch_c, rate_c = worst_joint_bc(4, dist)
        assert ch_b.is_class_b(tol=1e-9)
        assert rate_c <= rate_b + 1e-9

    def test_iteration_cap(self, tardos):
        with pytest.raises(ConvergenceError) as info:
            worst_joint_bc(6, tardos, SolverConfig(max_iters=2))
        assert info.value.iterations == 2
        assert info.value.last_gap_bits > 0.0

    def test_caps(self, tardos):
        with pytest.raises(CapabilityError):
            worst_joint_bc(51, tardos)
        with pytest.raises(InvalidInputError):
            worst_joint_bc(1, tardos)


class TestJointClassD:
    def test_rule(self):
        strategy = worst_joint_classd(2)
        assert strategy.channel_at(1.0 / 3.0).theta[1] == pytest.approx(0.2)

    @pytest.mark.parametrize("c", range(2, 21))
    def test_capacity(self, c):
        assert capacity_classd_joint(c) == pytest.approx(1.0 / (c * 2 ** (c - 1)))
        value = rate_classd(worst_joint_classd(c), Decoder.JOINT, parse_dist("dirac:0.5"))
        assert value == pytest.approx(capacity_classd_joint(c), abs=1e-12)

    def test_matches_pointwise_closed_form(self, tardos):
        from core.timeshare import expect
        from core.entropy import to_nats
        value = rate_classd(worst_joint_classd(3), Decoder.JOINT, tardos)
        closed = expect(tardos, lambda ps: to_nats(r_joint_classd_closed(3, ps)))
        assert value == pytest.approx(to_bits(closed), abs=1e-12)

    @pytest.mark.parametrize("c,p", [(2, 0.3), (3, 0.2), (4, 0.45), (5, 0.7)])
    def test_pointwise_optimality(self, c, p):
        best = r_joint_point(worst_joint_classd(c).channel_at(p), p)
        rng = np.random.default_rng(c)
        for _ in range(200):
            other = CollusionChannel.from_interior(rng.random(c - 1))
            assert r_joint_point(other, p) >= best - 1e-12


class TestEta:
    @pytest.mark.parametrize("c,mantissa,exponent", ETA_TABLE)
    def test_table(self, c, mantissa, exponent):
        assert eta_c(c) - 1.0 / c == pytest.approx(mantissa * 10.0 ** exponent, abs=2 * 10.0 ** (exponent - 1))

    def test_c3(self):
        assert eta_c(3) == 0.5

    @pytest.mark.parametrize("c", [15, 20, 100])
    def test_large_c_approaches_inverse(self, c):
        assert 0.0 <= eta_c(c) - 1.0 / c < 1e-12

    def test_root_of_polynomial(self):
        c = 5
        p = eta_c(c)
        assert (1 - p) ** (c - 2) * (1 - c * p) + p ** (c - 1) == pytest.approx(0.0, abs=1e-13)

    def test_small_c(self):
        with pytest.raises(InvalidInputError, match="c >= 3"):
            eta_c(2)


class TestSimpleClassD:
    def test_c2_equals_joint_rule(self):
        ps = np.linspace(0.0, 1.0, 21)
        assert np.allclose(worst_simple_classd(2).thetas(ps), worst_joint_classd(2).thetas(ps))
        assert worst_simple_classd(2).channel_at(0.3).theta[1] == pytest.approx(0.09 / 0.58)

    @pytest.mark.parametrize("c", range(3, 11))
    def test_null_rate_interval(self, c):
        strategy = worst_simple_classd(c)
        eta = eta_c(c)
        for p in np.linspace(eta, 1.0 - eta, 9):
            assert r_simple_point(strategy.channel_at(p), p) == pytest.approx(0.0, abs=1e-12)
        ps = np.random.default_rng(c).uniform(eta, 1.0 - eta, 50)
        rates = to_bits(simple_point_nats(strategy.thetas(ps), ps))
        assert rates.shape == (50,)
        assert np.max(rates) <= 1e-10

    def test_mirror_symmetry(self):
        strategy = worst_simple_classd(4)
        for p in (0.05, 0.2, 0.25, 0.4):
            left = r_simple_point(strategy.channel_at(p), p)
            right = r_simple_point(strategy.channel_at(1.0 - p), 1.0 - p)
            assert left == pytest.approx(right, abs=1e-12)

    def test_shape_of_strategy(self):
        strategy = worst_simple_classd(5)
        low = strategy.channel_at(0.1).theta
        assert all(t == 0.0 for t in low[2:-1])
        high = strategy.channel_at(0.9).theta
        assert all(t == 1.0 for t in high[1:-2])
        # forced theta_1 = 1 between 1/c and eta_c
        assert strategy.channel_at(0.5 * (0.2 + eta_c(5))).theta[1] == 1.0

    def test_objective_matches_kernel(self):
        c, p, t = 4, 0.13, 0.37
        theta = np.array([0.0, t, 0.0, 0.0, 1.0])
        direct = float(simple_point_nats(theta, np.array([p]))[0])
        assert float(simple_classd_objective(c, np.array(t), np.array(p))) == pytest.approx(direct, abs=1e-14)

    def test_line_search_against_box_search(self):
        c, p = 4, 0.05
        found = r_simple_point(worst_simple_classd(c).channel_at(p), p)

        def objective(x):
            theta = np.concatenate([[0.0], x, [1.0]])
            return float(simple_point_nats(theta, np.array([p]))[0])

        rng = np.random.default_rng(0)
        box_best = np.inf
        for _ in range(20):
            res = minimize(objective, rng.random(c - 1), method="L-BFGS-B", bounds=[(0.0, 1.0)] * (c - 1))
            box_best = min(box_best, res.fun)
        assert found <= to_bits(box_best) + 1e-6

    def test_below_joint(self, tardos):
        # the simple decoder never gets more than c times the joint rate
        value = rate_classd(worst_simple_classd(3), Decoder.SIMPLE, tardos)
        joint = rate_classd(worst_joint_classd(3), Decoder.JOINT, tardos)
        assert 0.0 <= value <= 3 * joint


class TestSimpleStationary:
    def test_c2(self, tardos):
        ch, value = worst_simple_bc(2, tardos)
        assert ch.theta[1] == pytest.approx(0.5, abs=1e-6)
        assert value == pytest.approx(0.11756, abs=1e-4)

    def test_c3_class_c(self, tardos):
        info = {}
        ch, value = worst_simple_bc(3, tardos, diagnostics_out=info)
        assert value == pytest.approx(0.04704, abs=1e-4)
        assert "classb_gap_bits" in info
        assert len(info["restart_rates_bits"]) == SolverConfig().restarts
        assert min(info["restart_rates_bits"]) == pytest.approx(info["full_box_rate_bits"])

    def test_deterministic(self, flat):
        first = worst_simple_bc(3, flat, SolverConfig(restarts=5, seed=7))
        second = worst_simple_bc(3, flat, SolverConfig(restarts=5, seed=7))
        assert first[0].theta == second[0].theta
        assert first[1] == second[1]

    def test_class_b_search(self, tardos):
        ch, value = worst_simple_classb(4, tardos)
        assert ch.is_class_b(tol=1e-12)
        assert value == pytest.approx(0.02758, abs=1e-4)

    @pytest.mark.slow
    @pytest.mark.parametrize("selector", ["tardos", "flat"])
    @pytest.mark.parametrize("c", range(3, 7))
    def test_class_b_matches_class_c(self, selector, c):
        info = {}
        _, value = worst_simple_bc(c, parse_dist(selector), diagnostics_out=info)
        assert abs(info["classb_gap_bits"]) <= 1e-4
        assert info["classb_rate_bits"] == pytest.approx(value, abs=1e-4)

    def test_caps(self, tardos):
        with pytest.raises(CapabilityError):
            worst_simple_bc(16, tardos)

    def test_invalid_solver_config(self, tardos):
        with pytest.raises(InvalidInputError, match="restarts"):
            worst_simple_bc(3, tardos, SolverConfig(restarts=0))

    @pytest.mark.slow
    @pytest.mark.parametrize("c,theta,rate_bits", SIMPLE_TARDOS_TABLE)
    def test_table(self, tardos, c, theta, rate_bits):
        info = {}
        ch, value = worst_simple_bc(c, tardos, diagnostics_out=info)
        assert value == pytest.approx(rate_bits, abs=1e-4)
        assert abs(info["classb_gap_bits"]) <= 1e-4
        if np.max(np.abs(ch.as_array() - np.asarray(theta, dtype=float))) > 0.01:
            # a different minimizer must reach the same rate as the published channel
            listed = rate_simple(CollusionChannel(c, theta), tardos)
            assert listed == pytest.approx(value, abs=5e-4)


class TestProjection:
    def test_c2_midpoint(self):
        assert conv_projection_attack(2).theta[1] == pytest.approx(0.5, abs=1e-10)

    def test_raw_coefficients(self):
        raw = projection_coefficients(5)
        assert raw[0] == 0.0 and raw[-1] == 1.0
        # symmetric target: theta_s + theta_(c-s) = 1
        assert np.allclose(raw + raw[::-1], 1.0, atol=1e-8)

    def test_distance_decreases(self):
        distances = {c: projection_l2_distance(c) for c in range(3, 10)}
        # nested spans: never worse with c
        assert all(distances[c + 1] <= distances[c] + 1e-10 for c in range(3, 9))
        # the symmetric target only gains from odd degrees
        odd = [distances[c] for c in (3, 5, 7, 9)]
        assert all(b < a for a, b in zip(odd, odd[1:]))

    def test_diagnostics(self):
        info = {}
        ch = conv_projection_attack(6, diagnostics_out=info)
        assert len(info["raw_theta"]) == 7
        assert info["l2_distance"] > 0.0
        assert ch.c == 6

    def test_gap_against_search(self, flat):
        gap = projection_gap(3, flat, SolverConfig(restarts=4))
        assert set(gap) == {"theta_gap", "projection_rate_bits", "search_rate_bits"}
        assert 0.0 <= gap["theta_gap"] <= 1.0
        assert gap["projection_rate_bits"] > 0.0
        assert gap["search_rate_bits"] >= 0.0
