"""Edge-swap optimizer: settling, soundness, the greedy driver."""

import numpy as np
import pytest

from qcforge import (ACESpectrum, ShiftAssignment, TannerGraph, ace_spectrum,
                     algorithm1, collect_walks, embed_assignment,
                     enumerate_tbc_walks, expand, find_problematic_walks,
                     greedy_optimize, lift_spectrum, predicted_lift_spectrum,
                     select_edges, verify_target, walk_order, walk_shift)
from qcforge.design import ParticipationPolicy, SwapState, _WalkIndex
from qcforge.walks import INF, divisors

from conftest import random_assignment, random_graph

GOAL3 = ACESpectrum((INF, INF, INF))


def random_target(rng, d_max):
    vals = [INF]
    for _ in range(d_max - 1):
        vals.append(INF if rng.random() < 0.3 else int(rng.integers(0, 5)))
    return ACESpectrum(tuple(vals))


def step6_holds(graph, walks, assignment, target):
    """Every walk's settle condition under the final shifts."""
    two_dmax = 2 * target.d_max
    for w in walks:
        d = walk_shift(w.edges, assignment)
        k = walk_order(d, assignment.N)
        for kk in divisors(assignment.N):
            klen = kk * w.length
            if klen > two_dmax:
                continue
            # only the realized order matters; other divisors cannot
            # wind this walk
            if kk == k and kk * w.ace < target.eta(klen):
                return False
    return True


class TestAlgorithm1Reference:
    def test_girth8_design_at_n3(self, ref_base):
        report = algorithm1(ref_base, GOAL3, 3, seed=0)
        assert report.success
        assert report.spectrum.values == (INF, INF, INF)
        assert verify_target(expand(ref_base, report.assignment), GOAL3)
        # swaps happened and every record carries nonzero shifts
        assert report.swaps
        for rec in report.swaps:
            assert rec.phase in (1, 2)
            assert set(rec.edges) <= set(rec.walk.edges)
            assert all(0 < v < 3 for v in rec.values)

    def test_impossible_at_n2(self, ref_base):
        # the three cycle shifts obey d(xi3) = d(xi1) - d(xi2), so all
        # three cannot be nonzero mod 2: an honest failure is required
        report = algorithm1(ref_base, GOAL3, 2, seed=0,
                            continue_on_failure=True)
        assert not report.success
        assert report.unsatisfiable
        assert not report.spectrum.dominates(GOAL3)

    def test_already_satisfied_target_needs_no_swaps(self, ref_base):
        target = ACESpectrum((INF, 0, 0))
        report = algorithm1(ref_base, target, 3, seed=0)
        assert report.success
        assert report.swaps == ()
        assert np.all(report.assignment.shifts == 0)

    def test_deterministic_given_seed(self, ref_base):
        a = algorithm1(ref_base, GOAL3, 5, seed=42)
        b = algorithm1(ref_base, GOAL3, 5, seed=42)
        assert a.to_json() == b.to_json()

    def test_swap_records_replay_to_final_shifts(self, ref_base):
        report = algorithm1(ref_base, GOAL3, 7, seed=1)
        assert report.success
        shifts = {}
        swapped = set()
        for rec in report.swaps:
            if rec.phase == 2:
                # phase 2 may only touch edges never swapped before
                assert not (set(rec.edges) & swapped)
            for e, v in zip(rec.edges, rec.values):
                shifts[e] = v
                swapped.add(e)
        rebuilt = ShiftAssignment.from_dict(7, shifts, ref_base.n_edges)
        assert np.array_equal(rebuilt.shifts, report.assignment.shifts)


class TestAlgorithm1Soundness:
    def test_success_implies_verified(self):
        rng = np.random.default_rng(5)
        successes = 0
        for _ in range(60):
            base = random_graph(rng, max_var=6, max_chk=6)
            N = int(rng.integers(2, 8))
            d_max = int(rng.integers(2, 5))
            target = random_target(rng, d_max)
            report = algorithm1(base, target, N,
                                seed=int(rng.integers(1 << 16)))
            if not report.success:
                continue
            successes += 1
            code = expand(base, report.assignment)
            assert verify_target(code, target).passed
            walks = enumerate_tbc_walks(base, 2 * d_max)
            assert step6_holds(base, walks, report.assignment, target)
        assert successes >= 20

    def test_phase1_swaps_one_edge_when_one_suffices(self):
        # a walk that repeats no edge has coefficient +-1 on every edge,
        # so a single swapped edge already reaches every walk shift
        # except the current one; phase 1 must never spend more edges
        # on such a walk (cycles are the canonical case)
        rng = np.random.default_rng(77)
        checked = 0
        for _ in range(70):
            base = random_graph(rng, max_var=6, max_chk=6)
            N = int(rng.integers(2, 8))
            d_max = int(rng.integers(2, 5))
            target = random_target(rng, d_max)
            report = algorithm1(base, target, N, continue_on_failure=True,
                                seed=int(rng.integers(1 << 16)))
            for rec in report.swaps:
                distinct = len(set(rec.walk.edges)) == rec.walk.length
                if rec.phase == 1 and distinct:
                    assert len(rec.edges) == 1
                    checked += 1
        assert checked >= 50

    def test_failure_reports_spectrum_honestly(self):
        rng = np.random.default_rng(9)
        seen_failure = False
        for _ in range(40):
            base = random_graph(rng, max_var=5, max_chk=4)
            target = random_target(rng, 3)
            report = algorithm1(base, target, 2, continue_on_failure=True,
                                seed=int(rng.integers(1 << 16)))
            actual = ace_spectrum(expand(base, report.assignment).expanded, 3)
            assert report.spectrum == actual
            if not report.success:
                seen_failure = True
        assert seen_failure


class TestSelectEdges:
    def test_fresh_edges_first_then_protected(self):
        state = SwapState(N=5, n_edges=6)
        policy = ParticipationPolicy([5, 1, 3, 0, 0, 0])
        walk = enumerate_tbc_walks(TannerGraph(2, 2, [(0, 0), (0, 1),
                                                      (1, 0), (1, 1)]), 4)[0]
        assert walk.edges == (0, 2, 3, 1)
        # all fresh: participation order, ties by id
        assert select_edges(walk, state, policy) == [0, 2, 1, 3]
        state.processed |= {0, 2}
        assert select_edges(walk, state, policy) == [1, 3]
        state.processed |= {1, 3}
        state.swapped |= {0, 1}
        assert select_edges(walk, state, policy) == [2, 3]


class TestWalkIndex:
    def test_problematic_set_matches_reference(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            base = random_graph(rng, max_var=6, max_chk=6)
            N = int(rng.integers(2, 7))
            d_max = int(rng.integers(2, 5))
            target = random_target(rng, d_max)
            walks = enumerate_tbc_walks(base, 2 * d_max)
            index = _WalkIndex(base, walks, N, d_max)
            got = {w.edges for w in index.problematic_set(target).walks()}
            ref = {pw.walk.edges
                   for pw in find_problematic_walks(base, target, N)}
            assert got == ref

    def test_predicted_matches_scan(self):
        rng = np.random.default_rng(29)
        for _ in range(25):
            base = random_graph(rng, max_var=5, max_chk=5)
            N = int(rng.integers(2, 6))
            d_max = int(rng.integers(2, 5))
            walks = enumerate_tbc_walks(base, 2 * d_max)
            index = _WalkIndex(base, walks, N, d_max)
            assignment = random_assignment(rng, base, N)
            predicted = index.predicted(assignment)
            byfunc = predicted_lift_spectrum(base, assignment, walks, d_max)
            scanned, _ = lift_spectrum(expand(base, assignment), d_max)
            assert predicted == byfunc == scanned


class TestEmbedAssignment:
    def test_spectrum_preserved_exactly(self):
        rng = np.random.default_rng(31)
        for _ in range(15):
            base = random_graph(rng, max_var=5, max_chk=5)
            N = int(rng.integers(2, 5))
            m = int(rng.integers(2, 4))
            assignment = random_assignment(rng, base, N)
            small, _ = lift_spectrum(expand(base, assignment), 4)
            grown = embed_assignment(assignment, m)
            assert grown.N == N * m
            big, _ = lift_spectrum(expand(base, grown), 4)
            assert small == big

    def test_preserves_walk_orders(self, ref_base):
        assignment = ShiftAssignment(3, [1, 0, 0, 0, 0, 1, 0])
        grown = embed_assignment(assignment, 4)
        for w in enumerate_tbc_walks(ref_base, 6):
            d_small = walk_shift(w.edges, assignment)
            d_big = walk_shift(w.edges, grown)
            assert walk_order(d_small, 3) == walk_order(d_big, 12)

    def test_rejects_bad_factor(self, ref_base):
        assignment = ShiftAssignment.zero(3, 7)
        with pytest.raises(ValueError):
            embed_assignment(assignment, 0)


class TestCollectWalks:
    def test_complete_through_full_len(self):
        rng = np.random.default_rng(37)
        base = random_graph(rng, max_var=6, max_chk=6)
        pool = collect_walks(base, 8, full_len=4, ace_cap=1)
        keys = {w.edges for w in pool}
        for w in enumerate_tbc_walks(base, 4):
            assert w.edges in keys
        for w in pool:
            assert w.length <= 4 or w.ace <= 1

    def test_no_cap_is_plain_enumeration(self, ref_base):
        pool = collect_walks(ref_base, 6)
        ref = enumerate_tbc_walks(ref_base, 6)
        assert {w.edges for w in pool} == {w.edges for w in ref}


class TestGreedy:
    def test_ref_base_reaches_girth8(self, ref_base):
        report = greedy_optimize(ref_base, 3, 3, attempts=2, seed=0)
        assert report.success
        assert report.spectrum.values == (INF, INF, INF)

    def test_n1_returns_base_spectrum(self, ref_base):
        report = greedy_optimize(ref_base, 1, 3)
        assert report.success
        assert report.spectrum == ace_spectrum(ref_base, 3)
        assert np.all(report.assignment.shifts == 0)

    def test_report_spectrum_is_scan_truth(self):
        rng = np.random.default_rng(41)
        for _ in range(8):
            base = random_graph(rng, max_var=5, max_chk=5)
            N = int(rng.integers(2, 6))
            report = greedy_optimize(base, N, 3, attempts=2,
                                     seed=int(rng.integers(1 << 16)))
            actual = ace_spectrum(expand(base, report.assignment).expanded, 3)
            assert report.spectrum == actual

    def test_floor_with_baseline_never_regresses(self):
        rng = np.random.default_rng(43)
        for _ in range(6):
            base = random_graph(rng, max_var=5, max_chk=5)
            first = greedy_optimize(base, 3, 3, attempts=2, seed=1)
            second = greedy_optimize(
                base, 6, 3, attempts=2, seed=2, floor=first.spectrum,
                baselines=[embed_assignment(first.assignment, 2)])
            assert second.spectrum.dominates(first.spectrum)

    def test_capped_pool_keeps_targets_modest(self, ref_base):
        report = greedy_optimize(ref_base, 4, 3, attempts=2, seed=0,
                                 max_walk_ace=0, full_walk_len=4)
        # length-6 component may not exceed cap+1 under a capped pool
        assert report.target.values[2] == INF or report.target.values[2] <= 1

    def test_floor_depth_mismatch_rejected(self, ref_base):
        with pytest.raises(ValueError):
            greedy_optimize(ref_base, 3, 3, floor=ACESpectrum((INF, INF)))

    def test_baseline_shape_mismatch_rejected(self, ref_base):
        with pytest.raises(ValueError):
            greedy_optimize(ref_base, 3, 3,
                            baselines=[ShiftAssignment.zero(4, 7)])

    def test_deterministic(self, ref_base):
        a = greedy_optimize(ref_base, 5, 3, attempts=2, seed=3)
        b = greedy_optimize(ref_base, 5, 3, attempts=2, seed=3)
        assert a.to_json() == b.to_json()


class TestReportJson:
    def test_roundtrippable_fields(self, ref_base):
        report = algorithm1(ref_base, GOAL3, 3, seed=0)
        blob = report.to_json()
        assert blob["N"] == 3
        assert blob["success"] is True
        assert [s["d"] for s in blob["shifts"]["shifts"]] \
            == report.assignment.shifts.tolist()
        assert len(blob["swaps"]) == len(report.swaps)
        for rec in blob["swaps"]:
            assert set(rec) >= {"walk", "phase", "edges", "values"}
