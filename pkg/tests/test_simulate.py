"""BI-AWGN channel, sum-product decoding, and the Monte-Carlo harness."""

import itertools
import math

import numpy as np
import pytest

from qcforge import (ShiftAssignment, SimConfig, TannerGraph, awgn_llr,
                     bp_decode, code_rate, expand, gf2_rank, monte_carlo,
                     peg_construct, simulate_frames)

from conftest import REF_EDGES


def ref_lift():
    """The 9-variable girth-8 reference lift."""
    base = TannerGraph(3, 3, REF_EDGES)
    return expand(base, ShiftAssignment(3, [1, 0, 0, 0, 0, 1, 0]))


def even_check_code(N=3, seed=5):
    """A lift whose checks all have even degree (two deg-4 checks)."""
    base = TannerGraph(4, 2, [(v, c) for v in range(4) for c in range(2)])
    rng = np.random.default_rng(seed)
    shifts = rng.integers(0, N, size=base.n_edges).tolist()
    return expand(base, ShiftAssignment(N, shifts))


def rate_half_code(N=4, seed=3):
    g = peg_construct(12, 6, [3] * 12, seed=seed)
    rng = np.random.default_rng(seed)
    shifts = rng.integers(0, N, size=g.n_edges).tolist()
    return expand(g, ShiftAssignment(N, shifts))


class TestGf2Rank:
    def test_identity_and_degenerate(self):
        assert gf2_rank(np.eye(5, dtype=np.int64)) == 5
        assert gf2_rank(np.zeros((3, 4), dtype=np.int64)) == 0
        assert gf2_rank(np.ones((4, 6), dtype=np.int64)) == 1

    def test_differs_from_real_rank(self):
        # rows sum to zero mod 2 but are independent over the reals
        m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        assert np.linalg.matrix_rank(m) == 3
        assert gf2_rank(m) == 2

    def test_xor_combination_rows_are_free(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            m = rng.integers(0, 2, size=(rng.integers(2, 8),
                                         rng.integers(2, 8)))
            r = gf2_rank(m)
            assert r <= min(m.shape)
            combo = m[rng.integers(0, m.shape[0], size=3)].sum(0) % 2
            assert gf2_rank(np.vstack([m, combo])) == r
            assert gf2_rank(m[rng.permutation(m.shape[0])]) == r

    def test_multiplicity_matrix_reduces_mod_2(self):
        # parallel edges cancel over GF(2)
        assert gf2_rank(np.array([[2, 1], [0, 3]])) == 1
        assert gf2_rank(np.array([[3, 1], [0, 3]])) == 2
        assert gf2_rank(np.array([[2, 4], [6, 2]])) == 0


class TestCodeRate:
    def test_design_rate(self):
        g = peg_construct(30, 15, [3] * 30, seed=0)
        assert code_rate(g) == 0.5

    def test_punctured_positions_raise_rate(self):
        g = peg_construct(30, 15, [3] * 30, seed=0)
        assert code_rate(g, punctured=(0, 1, 2, 2)) == 15 / 27

    def test_square_code_falls_back_to_rank(self):
        g = ref_lift().expanded
        assert g.n_var == g.n_chk == 9
        r = gf2_rank(g.adjacency_matrix())
        assert r < 9
        assert code_rate(g) == (9 - r) / 9

    def test_full_rank_square_rejected(self):
        g = TannerGraph(2, 2, [(0, 0), (1, 1)])
        with pytest.raises(ValueError, match="no information"):
            code_rate(g)

    def test_all_punctured_rejected(self):
        g = TannerGraph(2, 1, [(0, 0), (1, 0)])
        with pytest.raises(ValueError, match="punctured"):
            code_rate(g, punctured=(0, 1))


class TestAwgnLlr:
    def test_deterministic_given_seed(self):
        bits = np.zeros(64, dtype=np.int64)
        a = awgn_llr(bits, 2.0, 0.5, seed=9)
        b = awgn_llr(bits, 2.0, 0.5, seed=9)
        c = awgn_llr(bits, 2.0, 0.5, seed=10)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_noiseless_limit_recovers_bits(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, size=2000)
        llr = awgn_llr(bits, 40.0, 0.5, seed=1)
        assert np.array_equal((llr < 0).astype(np.int64), bits)

    def test_mean_matches_channel_model(self):
        # bit 0 LLRs are N(2/sigma^2, 4/sigma^2)
        rate, ebn0 = 0.5, 2.0
        sigma2 = 1.0 / (2.0 * rate * 10.0 ** (ebn0 / 10.0))
        llr = awgn_llr(np.zeros(100000, dtype=np.int64), ebn0, rate, seed=3)
        se = (2.0 / math.sqrt(sigma2)) / math.sqrt(llr.shape[0])
        assert abs(llr.mean() - 2.0 / sigma2) < 3.0 * se

    def test_punctured_positions_exactly_zero(self):
        llr = awgn_llr(np.zeros(10, dtype=np.int64), 1.0, 0.5, seed=0,
                       punctured=(2, 7))
        assert llr[2] == 0.0 and llr[7] == 0.0
        assert np.all(llr[[0, 1, 3, 4, 5, 6, 8, 9]] != 0.0)

    def test_rate_validated(self):
        with pytest.raises(ValueError, match="rate"):
            awgn_llr(np.zeros(4, dtype=np.int64), 1.0, 0.0, seed=0)
        with pytest.raises(ValueError, match="rate"):
            awgn_llr(np.zeros(4, dtype=np.int64), 1.0, 1.5, seed=0)


def gf2_codewords(graph):
    """All vectors in the null space of the parity-check matrix."""
    h = graph.adjacency_matrix() & 1
    words = []
    for bits in itertools.product((0, 1), repeat=graph.n_var):
        x = np.array(bits, dtype=np.int64)
        if not np.any((h @ x) & 1):
            words.append(x)
    return words


class TestBpDecode:
    def test_saturated_input_converges_immediately(self):
        code = ref_lift()
        llr = np.full(9, 40.0)
        hard, ok, iters = bp_decode(code, llr)
        assert ok and iters == 1
        assert not hard.any()

    def test_zero_llrs_never_converge(self):
        code = ref_lift()
        hard, ok, iters = bp_decode(code, np.zeros(9), max_iter=20)
        assert not ok and iters == 20

    def test_single_small_flip_corrected_and_matches_ml(self):
        code = ref_lift()
        words = gf2_codewords(code.expanded)
        assert len(words) > 1
        llr = np.full(9, 8.0)
        llr[4] = -0.5
        hard, ok, iters = bp_decode(code, llr)
        assert ok and not hard.any()
        best = max(words, key=lambda x: float(((1 - 2 * x) * llr).sum()))
        assert np.array_equal(hard, best)

    def test_symmetry_on_even_degree_checks(self):
        # negating every LLR flips the decision and nothing else
        code = even_check_code()
        rng = np.random.default_rng(2)
        for _ in range(10):
            llr = rng.normal(0.5, 2.0, size=code.expanded.n_var)
            h1, ok1, it1 = bp_decode(code, llr, max_iter=30)
            h2, ok2, it2 = bp_decode(code, -llr, max_iter=30)
            assert ok1 == ok2 and it1 == it2
            assert np.array_equal(h2, 1 - h1)

    def test_accepts_graph_or_lift(self):
        code = ref_lift()
        llr = awgn_llr(np.zeros(9, dtype=np.int64), 4.0, 0.5, seed=8)
        a = bp_decode(code, llr)
        b = bp_decode(code.expanded, llr)
        assert np.array_equal(a[0], b[0]) and a[1:] == b[1:]

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="variable nodes"):
            bp_decode(ref_lift(), np.zeros(8))
        with pytest.raises(ValueError, match="max_iter"):
            bp_decode(ref_lift(), np.zeros(9), max_iter=0)


class TestSimConfig:
    def test_validation(self):
        with pytest.raises(ValueError, match="EbN0"):
            SimConfig(ebn0_db=())
        with pytest.raises(ValueError, match="max_iterations"):
            SimConfig(ebn0_db=(1.0,), max_iterations=0)
        with pytest.raises(ValueError, match="frame budget"):
            SimConfig(ebn0_db=(1.0,), frames=0)
        with pytest.raises(ValueError, match="max_errors"):
            SimConfig(ebn0_db=(1.0,), max_errors=0)
        with pytest.raises(ValueError, match="rate"):
            SimConfig(ebn0_db=(1.0,), rate=0.0)

    def test_json_roundtrippable_fields(self):
        cfg = SimConfig(ebn0_db=(1, 2), frames=10, seed=4, punctured=(1,))
        blob = cfg.to_json()
        assert blob["ebn0_db"] == [1.0, 2.0]
        assert blob["punctured"] == [1]
        assert blob["rate"] is None


class TestMonteCarlo:
    def test_toy_code_clean_at_high_snr(self):
        cfg = SimConfig(ebn0_db=(12.0,), frames=1000, seed=7)
        res = monte_carlo(ref_lift(), cfg)
        pt = res.points[0]
        assert pt.frames == 1000
        assert pt.frame_errors == 0 and pt.bit_errors == 0
        assert pt.fer == 0.0 and pt.ber(res.n) == 0.0

    def test_budget_one_frame(self):
        cfg = SimConfig(ebn0_db=(1.0,), frames=1, seed=0)
        res = monte_carlo(ref_lift(), cfg)
        assert res.points[0].frames == 1

    def test_stops_at_error_target(self):
        code = rate_half_code()
        cfg = SimConfig(ebn0_db=(-3.0,), frames=10000, max_errors=5, seed=1)
        pt = monte_carlo(code, cfg).points[0]
        assert pt.frame_errors == 5
        assert pt.frames < 100

    def test_count_invariants(self):
        code = rate_half_code()
        cfg = SimConfig(ebn0_db=(0.0, 2.0), frames=200, max_errors=50, seed=2)
        res = monte_carlo(code, cfg)
        for pt in res.points:
            assert pt.frame_errors <= pt.frames
            assert pt.bit_errors <= pt.frames * res.n
            assert pt.avg_iterations >= 1.0

    def test_worker_split_determinism(self):
        code = rate_half_code()
        cfg = SimConfig(ebn0_db=(1.0,), frames=300, seed=6)
        full = simulate_frames(code, cfg, 0, range(300))
        parts = [simulate_frames(code, cfg, 0, range(k, 300, 3))
                 for k in range(3)]
        merged = tuple(sum(p[i] for p in parts) for i in range(4))
        assert merged == full

    def test_repeat_runs_identical(self):
        code = rate_half_code()
        cfg = SimConfig(ebn0_db=(0.0,), frames=150, seed=9)
        a = monte_carlo(code, cfg).to_json()
        b = monte_carlo(code, cfg).to_json()
        assert a == b

    def test_fer_monotone_in_snr(self):
        code = rate_half_code()
        cfg = SimConfig(ebn0_db=(-2.0, 3.0, 8.0), frames=400,
                        max_errors=400, seed=4)
        res = monte_carlo(code, cfg)
        fers = [pt.fer for pt in res.points]
        assert fers[0] > fers[2]
        assert all(a >= b for a, b in zip(fers, fers[1:]))

    def test_explicit_rate_override(self):
        # same noise realizations require the same rate; a lower rate
        # means more noise per transmitted bit
        code = rate_half_code()
        lo = SimConfig(ebn0_db=(0.0,), frames=200, seed=5, rate=0.1)
        hi = SimConfig(ebn0_db=(0.0,), frames=200, seed=5, rate=0.9)
        nlo = monte_carlo(code, lo).points[0].frame_errors
        nhi = monte_carlo(code, hi).points[0].frame_errors
        assert nlo > nhi
