"""Shift design by cyclic edge swapping under an ACE spectrum target.

Shifts start at zero and change one problematic walk at a time.  A walk
W of length w and ACE eta whose current shift has order k is settled
once

    k * w > 2*d_max   or   k * eta >= eta_{k*w}   (target entry),

its lifted image then being either longer than the spectrum depth or
heavy enough.  Settling a walk protects all of its edges: as long as a
walk still owns unprotected edges, only those may change (a change
there provably cannot disturb any settled walk, which keeps the common
case cheap).  Once every edge of a walk is protected, the optimizer may
touch protected-but-never-changed edges instead, at the price of
re-checking every settled walk that shares them.

The greedy layer on top maximizes the spectrum one component at a time,
trying +inf first and binary-searching the largest finite value
otherwise.  Whatever the bookkeeping says, a report's spectrum is
always recomputed from the expanded graph by cycle scanning before
anything is called a success.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .graph import TannerGraph
from .lifting import (ShiftAssignment, embed_assignment, expand,
                      lifted_image_is_cycle, walk_shift)
from .liftcycles import DEFAULT_SCAN_BUDGET, lift_spectrum, scan_below
from .walks import (ACESpectrum, INF, ProblematicWalkSet, TBCWalk,
                    divisors, enumerate_tbc_walks, find_problematic_walks)


class ParticipationPolicy:
    """Candidate edges ordered by problematic-walk participation.

    Busy edges first: one change there can settle several walks at
    once.  Ties break on edge id so runs reproduce exactly.
    """

    name = "participation"

    def __init__(self, counts):
        self.counts = list(counts)

    def order(self, edges):
        return sorted(edges, key=lambda e: (-self.counts[e], e))


POLICIES = {"participation": ParticipationPolicy}


@dataclass
class SwapState:
    """Mutable optimizer state over one run.

    processed holds the edges of settled walks (protected); swapped the
    edges whose shift was actually changed, always a subset of
    processed once their walk settles.  shifts keeps only the nonzero
    values; absent edges sit at zero.  queue is the walks not yet
    settled, in processing order.
    """

    N: int
    n_edges: int
    processed: set = field(default_factory=set)
    swapped: set = field(default_factory=set)
    shifts: dict = field(default_factory=dict)
    queue: list = field(default_factory=list)

    def assignment(self):
        return ShiftAssignment.from_dict(self.N, self.shifts, self.n_edges)


def select_edges(walk, state, policy):
    """Ordered candidate edges for settling one walk.

    Edges protecting no settled walk come first; only when every edge
    of the walk is protected may never-changed edges be offered, and
    changing those requires re-checking the walks they protect.
    """
    es = set(walk.edges)
    fresh = [e for e in es if e not in state.processed]
    if fresh:
        return policy.order(fresh)
    return policy.order([e for e in es if e not in state.swapped])


def _good_mask(length, ace, N, target):
    """mask[d] = True when shift value d settles a (length, ace) walk."""
    two_dmax = 2 * target.d_max
    mask = np.zeros(N, dtype=bool)
    for d in range(N):
        k = N // math.gcd(N, d)
        kl = k * length
        mask[d] = kl > two_dmax or k * ace >= target.eta(kl)
    return mask


def _signed_coefs(walk):
    """Net signed multiplicity of each edge in a walk.

    The walk's shift is the coefficient-weighted sum of edge shifts, so
    changing edge e by delta moves the walk shift by coefs[e] * delta.
    """
    coefs = defaultdict(int)
    for pos, e in enumerate(walk.edges):
        coefs[e] += 1 if pos % 2 == 0 else -1
    return dict(coefs)


@dataclass(frozen=True)
class SwapRecord:
    """One accepted change: the walk it settled, the phase that allowed
    it (1 = unprotected edges, 2 = protected ones), and the edges with
    their new shift values."""

    walk: TBCWalk
    phase: int
    edges: tuple
    values: tuple


@dataclass
class _SwapOutcome:
    success: bool
    state: SwapState
    swaps: list
    unsatisfiable: list


def _search_values(rng, N, good, d0, coefs, candidates, max_edges, recheck):
    """First edge combo and nonzero values moving the walk shift into
    `good`, growing the combo size up to max_edges.  Values come from a
    fresh seeded permutation of 1..N-1 per edge, so which passing value
    wins is random but reproducible.  `recheck` vetoes trials that
    break settled walks (phase 2); None skips the veto (phase 1).
    """
    usable = [e for e in candidates if coefs.get(e, 0) != 0]
    for r in range(1, max_edges + 1):
        for combo in itertools.combinations(usable, r):
            perms = [rng.permutation(np.arange(1, N)) for _ in combo]
            for values in itertools.product(*perms):
                nd = d0
                for e, v in zip(combo, values):
                    nd += coefs[e] * int(v)
                nd %= N
                if not good[nd]:
                    continue
                if recheck is not None:
                    changes = {e: int(v) for e, v in zip(combo, values)}
                    if not recheck(changes):
                        continue
                return combo, tuple(int(v) for v in values), nd
    return None


def _run_swaps(graph, target, N, pwset, policy, seed, max_swap_edges,
               continue_on_failure):
    """Process problematic walks in order, changing shifts to settle
    each; returns the outcome without any expanded-graph work."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), int(N))))
    state = SwapState(N=N, n_edges=graph.n_edges,
                      queue=[pw.walk for pw in pwset])
    masks = {}

    def mask_for(length, ace):
        key = (length, ace)
        if key not in masks:
            masks[key] = _good_mask(length, ace, N, target)
        return masks[key]

    settled = []  # [walk, coefs, good mask, current shift] per settled walk
    touching = defaultdict(list)  # edge -> settled indices sharing it

    def recheck(changes):
        hit = set()
        for e in changes:
            hit.update(touching[e])
        for si in hit:
            _, coefs2, good2, d2 = settled[si]
            nd2 = d2
            for e, v in changes.items():
                nd2 += coefs2.get(e, 0) * v
            if not good2[nd2 % N]:
                return False
        return True

    swaps = []
    unsatisfiable = []
    while state.queue:
        walk = state.queue[0]
        coefs = _signed_coefs(walk)
        d0 = sum(c * state.shifts.get(e, 0) for e, c in coefs.items()) % N
        good = mask_for(walk.length, walk.ace)
        chosen = None
        phase = 0
        if not good[d0]:
            es = set(walk.edges)
            fresh = policy.order([e for e in es if e not in state.processed])
            chosen = _search_values(rng, N, good, d0, coefs, fresh,
                                    max_swap_edges, None)
            phase = 1
            if chosen is None:
                stale = policy.order(
                    [e for e in es if e not in state.swapped])
                chosen = _search_values(rng, N, good, d0, coefs, stale,
                                        max_swap_edges, recheck)
                phase = 2
            if chosen is None:
                unsatisfiable.append(walk)
                state.queue.pop(0)
                if continue_on_failure:
                    continue
                break
        if chosen is not None:
            combo, values, d_final = chosen
            changes = dict(zip(combo, values))
            for e, v in changes.items():
                state.shifts[e] = v
                state.swapped.add(e)
            hit = set()
            for e in combo:
                hit.update(touching[e])
            for si in hit:
                _, coefs2, _, d2 = settled[si]
                for e, v in changes.items():
                    d2 += coefs2.get(e, 0) * v
                settled[si][3] = d2 % N
            swaps.append(SwapRecord(walk=walk, phase=phase,
                                    edges=combo, values=values))
        else:
            d_final = d0
        si = len(settled)
        settled.append([walk, coefs, good, d_final])
        for e in set(walk.edges):
            state.processed.add(e)
            touching[e].append(si)
        state.queue.pop(0)
    return _SwapOutcome(success=not unsatisfiable, state=state,
                        swaps=swaps, unsatisfiable=unsatisfiable)


@dataclass(frozen=True)
class DesignReport:
    """Outcome of one shift design run.

    spectrum is recomputed from the expanded graph by cycle scanning,
    never inferred from the walk bookkeeping, so success is a property
    of the delivered code rather than of the search's own accounting.
    """

    base: TannerGraph
    N: int
    target: ACESpectrum
    assignment: ShiftAssignment
    spectrum: ACESpectrum
    success: bool
    unsatisfiable: tuple
    swaps: tuple
    seed: int
    policy: str

    @property
    def d_max(self):
        return self.target.d_max

    def to_json(self):
        return {
            "N": self.N,
            "d_max": self.d_max,
            "target": self.target.to_json(),
            "spectrum": self.spectrum.to_json(),
            "success": bool(self.success),
            "seed": int(self.seed),
            "policy": self.policy,
            "shifts": self.assignment.to_json(base=self.base),
            "swaps": [{
                "walk": s.walk.to_json(),
                "phase": s.phase,
                "edges": [int(e) for e in s.edges],
                "values": [int(v) for v in s.values],
            } for s in self.swaps],
            "unsatisfiable": [w.to_json() for w in self.unsatisfiable],
        }


def algorithm1(graph, target, N, walks=None, seed=0, policy="participation",
               max_swap_edges=2, continue_on_failure=False,
               scan_budget=DEFAULT_SCAN_BUDGET):
    """One full swap run against a fixed target spectrum.

    `walks` may be a precomputed TBC walk list (it is filtered down to
    the problematic ones here) or a ready ProblematicWalkSet; by
    default the walks are enumerated on the spot.  On failure the run
    stops at the first unsettleable walk unless continue_on_failure is
    set, in which case it keeps going and reports every failure.

    The returned report's spectrum comes from scanning the expanded
    graph under the final assignment; success means the swap run was
    clean and that verified spectrum dominates the target.
    """
    N = int(N)
    if isinstance(walks, ProblematicWalkSet):
        pwset = walks
    else:
        pwset = find_problematic_walks(graph, target, N, walks=walks)
    if isinstance(policy, str):
        policy_name = policy
        policy = POLICIES[policy](pwset.participation(graph.n_edges))
    else:
        policy_name = getattr(policy, "name", type(policy).__name__)
    outcome = _run_swaps(graph, target, N, pwset, policy, seed,
                         max_swap_edges, continue_on_failure)
    assignment = outcome.state.assignment()
    spectrum, _ = lift_spectrum(expand(graph, assignment), target.d_max,
                                budget=scan_budget)
    return DesignReport(
        base=graph, N=N, target=target, assignment=assignment,
        spectrum=spectrum,
        success=outcome.success and spectrum.dominates(target),
        unsatisfiable=tuple(outcome.unsatisfiable),
        swaps=tuple(outcome.swaps), seed=int(seed), policy=policy_name)


@dataclass(frozen=True)
class VerifyResult:
    """Expanded-graph check of a code against a target spectrum."""

    passed: bool
    counterexamples: tuple  # expanded-graph Cycle objects, by length

    def __bool__(self):
        return self.passed


def verify_target(code, target, budget=DEFAULT_SCAN_BUDGET):
    """Scan the expanded graph for cycles below the target.

    Passes when no cycle anywhere within the spectrum depth falls below
    its target entry; otherwise returns one witness cycle per violated
    length, shortest first.
    """
    _, witnesses = scan_below(code, target, budget=budget)
    cex = tuple(witnesses[length] for length in sorted(witnesses))
    return VerifyResult(passed=not cex, counterexamples=cex)


class _WalkIndex:
    """Vectorized walk bookkeeping shared by the greedy layer.

    Holds the complete walk list once, with flat (walk, edge, coef)
    triplets so walk shifts under any assignment come from one
    scatter-add, and per-target problematic flags from a few masked
    comparisons instead of a python loop per walk.
    """

    def __init__(self, graph, walks, N, d_max):
        self.graph = graph
        self.walks = list(walks)
        self.N = int(N)
        self.d_max = int(d_max)
        n = len(self.walks)
        self.lengths = np.fromiter((w.length for w in self.walks),
                                   np.int64, n)
        self.aces = np.fromiter((w.ace for w in self.walks), np.int64, n)
        wi, ei, ci = [], [], []
        for i, w in enumerate(self.walks):
            for e, c in _signed_coefs(w).items():
                if c:
                    wi.append(i)
                    ei.append(e)
                    ci.append(c)
        self.walk_idx = np.array(wi, np.int64)
        self.edge_idx = np.array(ei, np.int64)
        self.coef = np.array(ci, np.int64)
        self.divs = divisors(self.N)

    def shift_values(self, shifts):
        d = np.zeros(len(self.walks), np.int64)
        np.add.at(d, self.walk_idx, self.coef * shifts[self.edge_idx])
        return d % self.N

    def problematic_set(self, target):
        """Same selection as find_problematic_walks, done with arrays;
        the walk objects go back through it for pairs and ordering."""
        two_dmax = 2 * target.d_max
        tvals = np.array([float(v) for v in target.values])
        flagged = np.zeros(len(self.walks), bool)
        for k in self.divs:
            kl = k * self.lengths
            sel = kl <= two_dmax
            idx = kl[sel] // 2 - 1
            hit = k * self.aces[sel] < tvals[idx]
            flagged[np.flatnonzero(sel)[hit]] = True
        subset = [self.walks[i] for i in np.flatnonzero(flagged)]
        return find_problematic_walks(self.graph, target, self.N,
                                      walks=subset)

    def predicted(self, assignment):
        """Exact lift spectrum under an assignment (see
        predicted_lift_spectrum); vectorized over the stored walks."""
        d = self.shift_values(assignment.shifts)
        k = self.N // np.gcd(np.int64(self.N), d)
        kl = k * self.lengths
        ka = k * self.aces
        vals = [INF] * self.d_max
        cand = np.flatnonzero(kl <= 2 * self.d_max)
        cand = cand[np.argsort(ka[cand], kind="stable")]
        for i in cand:
            idx = int(kl[i]) // 2 - 1
            if vals[idx] <= ka[i]:
                continue
            if lifted_image_is_cycle(self.graph, self.walks[i].edges,
                                     assignment):
                vals[idx] = int(ka[i])
        return ACESpectrum(tuple(vals))

    def candidate_values(self, length):
        """Realizable image ACE values at one image length: k*ace over
        walks with k*w == length for divisors k of N."""
        vals = set()
        for k in self.divs:
            if length % k:
                continue
            sel = self.lengths == length // k
            for a in np.unique(self.aces[sel]):
                vals.add(int(k) * int(a))
        return sorted(v for v in vals if v > 0)


def collect_walks(graph, max_len, full_len=None, ace_cap=None):
    """TBC walk pool for optimizing heavy bases.

    Complete for walks of length <= full_len, ACE-capped at ace_cap for
    longer ones.  Full enumeration grows explosively with length while
    high-ACE walks only matter when the target at their image length is
    high, so a split pool keeps short lengths exact and long lengths
    affordable.  Pass the result to greedy_optimize together with
    matching full_walk_len and max_walk_ace values.
    """
    if full_len is None or full_len >= max_len:
        return enumerate_tbc_walks(graph, max_len, max_ace=ace_cap)
    pool = {w.edges: w for w in enumerate_tbc_walks(graph, full_len)}
    for w in enumerate_tbc_walks(graph, max_len, max_ace=ace_cap):
        pool.setdefault(w.edges, w)
    return list(pool.values())


def _spectrum_key(spectrum):
    """Lexicographic comparison key; +inf sorts above any finite."""
    return tuple(float(v) for v in spectrum.values)


def _floor_replay(floor, d_max, full_walk_len, max_walk_ace):
    """The floor spectrum as a target vector the walk pool can certify.

    None when it cannot: a finite length-2 entry (parallel edges are
    never a design goal) or an infinite entry at a length the pool is
    not complete for.  Finite entries past the complete range clamp to
    cap+1, the highest value invisible walks cannot break.
    """
    if floor.values[0] != INF:
        return None
    vec = [INF]
    for li in range(1, d_max):
        fv = floor.values[li]
        complete = 2 * (li + 1) <= full_walk_len
        if fv == INF:
            if not complete:
                return None
            vec.append(INF)
        else:
            v = int(fv)
            if not complete and max_walk_ace is not None:
                v = min(v, int(max_walk_ace) + 1)
            vec.append(v)
    return vec


def _derive_seed(seed, tvals, attempt):
    # entropy must be nonnegative: finite entries map to v+1, inf to 0
    enc = tuple(0 if v == INF else int(v) + 1 for v in tvals)
    ss = np.random.SeedSequence((int(seed), int(attempt)) + enc)
    return int(ss.generate_state(1)[0])


def greedy_optimize(graph, N, d_max, attempts=4, seed=0, floor=None,
                    baselines=(), walks=None, max_swap_edges=2,
                    max_walk_ace=None, full_walk_len=None,
                    scan_budget=DEFAULT_SCAN_BUDGET):
    """Maximize the ACE spectrum one component at a time.

    Components go in length order, the length-2 entry pinned at +inf
    (no parallel edges may survive in the lift).  Per component the
    driver first tries +inf; failing that it binary-searches the
    largest finite value among the image ACEs its walk set can realize
    at that length.  Each candidate target gets `attempts` swap runs
    under derived seeds, and the best successful assignment (by
    predicted spectrum, earliest attempt on ties) carries forward.  The
    all-zero assignment backs the report when nothing succeeds at all,
    so a report always comes back, honest about what it achieved.

    floor skips candidates below an already-achieved spectrum until
    nothing at or above it works (useful when sweeping N upward);
    baselines are extra assignments entered into the final comparison,
    e.g. embed_assignment of a smaller design when N is a multiple.
    `walks` takes a precomputed pool (enumerate_tbc_walks or
    collect_walks over length 2*d_max).  For heavy bases max_walk_ace
    caps the enumeration; full_walk_len declares through which length
    the pool is complete despite the cap (collect_walks builds such a
    pool).  An incomplete length rules the +inf trial out for image
    lengths it feeds, and finite targets there are clamped to cap+1:
    walks above the cap are invisible, but they also cannot violate any
    target at or below cap+1, so whatever a clean run asserts remains
    true of the lift.  The winning assignment is expanded and scanned,
    and that spectrum is what the report asserts.
    """
    N = int(N)
    d_max = int(d_max)
    if N == 1:
        # nothing to optimize: the lift is the base graph itself
        assignment = ShiftAssignment.zero(1, graph.n_edges)
        spectrum, _ = lift_spectrum(expand(graph, assignment), d_max,
                                    budget=scan_budget)
        return DesignReport(
            base=graph, N=1, target=spectrum, assignment=assignment,
            spectrum=spectrum, success=True, unsatisfiable=(), swaps=(),
            seed=int(seed), policy="participation")
    if floor is not None and floor.d_max != d_max:
        raise ValueError("floor spectrum depth differs from d_max")
    if walks is None:
        if full_walk_len is None:
            full_walk_len = (2 * d_max if max_walk_ace is None
                             else min(6, 2 * d_max))
        walks = collect_walks(graph, 2 * d_max, full_walk_len, max_walk_ace)
    elif full_walk_len is None:
        full_walk_len = 2 * d_max if max_walk_ace is None else 0
    full_walk_len = int(full_walk_len)
    index = _WalkIndex(graph, walks, N, d_max)

    def attempt(tvals):
        """Best clean swap run at a target, or None."""
        target = ACESpectrum(tuple(tvals))
        pwset = index.problematic_set(target)
        policy = ParticipationPolicy(pwset.participation(graph.n_edges))
        best = None
        for a in range(attempts):
            s = _derive_seed(seed, tvals, a)
            outcome = _run_swaps(graph, target, N, pwset, policy, s,
                                 max_swap_edges, False)
            if not outcome.success:
                continue
            assignment = outcome.state.assignment()
            predicted = index.predicted(assignment)
            key = _spectrum_key(predicted)
            if best is None or key > best[0]:
                best = (key, assignment, outcome, s)
        return best

    current = [INF] + [0] * (d_max - 1)
    best_run = attempt(current)
    for li in range(1, d_max):
        length = 2 * (li + 1)
        trial = list(current)
        # the pool sees every walk feeding this image length only when
        # it is complete through the length itself (k=1 always feeds)
        complete = length <= full_walk_len
        if complete:
            trial[li] = INF
            got = attempt(trial)
            if got is not None:
                current = trial
                best_run = got
                continue
        cands = index.candidate_values(length)
        if not complete and max_walk_ace is not None:
            # walks above the cap cannot break a target at cap+1: their
            # image ACE is at least k*(cap+1) at any order k
            cap = int(max_walk_ace)
            cands = sorted(set(v for v in cands if v <= cap) | {cap + 1})
        floor_v = None
        if floor is not None and floor.values[li] != INF:
            floor_v = int(floor.values[li])
        tiers = [cands]
        if floor_v is not None:
            tiers = [[v for v in cands if v >= floor_v],
                     [v for v in cands if v < floor_v]]
        for tier in tiers:
            found = None
            lo, hi = 0, len(tier) - 1
            while lo <= hi:
                mid = (lo + hi) // 2
                trial[li] = tier[mid]
                got = attempt(trial)
                if got is not None:
                    found = (tier[mid], got)
                    lo = mid + 1
                else:
                    hi = mid - 1
            if found is not None:
                current[li] = found[0]
                best_run = found[1]
                break

    target = ACESpectrum(tuple(current))
    finalists = []
    if best_run is not None:
        _, assignment, outcome, run_seed = best_run
        finalists.append((assignment, outcome, run_seed, target))
    else:
        finalists.append((ShiftAssignment.zero(N, graph.n_edges), None, seed,
                          target))
    # raising an early component can starve a later one below its
    # floor; when that happened, replay the floor vector itself and
    # only then raise the final component, which constrains nothing
    if floor is not None and not target.dominates(floor):
        replay = _floor_replay(floor, d_max, full_walk_len, max_walk_ace)
        if replay is not None:
            got = attempt(replay)
            if got is not None and replay[-1] != INF:
                length = 2 * d_max
                cands = index.candidate_values(length)
                if length > full_walk_len and max_walk_ace is not None:
                    cap = int(max_walk_ace)
                    cands = sorted(set(v for v in cands if v <= cap)
                                   | {cap + 1})
                tier = [v for v in cands if v > replay[-1]]
                if length <= full_walk_len:
                    tier.append(INF)
                lo, hi = 0, len(tier) - 1
                while lo <= hi:
                    mid = (lo + hi) // 2
                    probe = replay[:-1] + [tier[mid]]
                    up = attempt(probe)
                    if up is not None:
                        replay, got = probe, up
                        lo = mid + 1
                    else:
                        hi = mid - 1
            if got is not None:
                _, assignment, outcome, run_seed = got
                finalists.append((assignment, outcome, run_seed,
                                  ACESpectrum(tuple(replay))))
    for extra in baselines:
        if extra.N != N or extra.n_edges != graph.n_edges:
            raise ValueError("baseline assignment does not match N or base")
        finalists.append((extra, None, seed, floor if floor is not None
                          else target))
    # every finalist gets the exact expanded-graph scan; meeting the
    # floor outranks any lexicographic gain, so a baseline embedded
    # from a smaller design can never lose to a regression
    best = None
    for assignment, outcome, run_seed, aimed in finalists:
        spectrum, _ = lift_spectrum(expand(graph, assignment), d_max,
                                    budget=scan_budget)
        rank = (floor is None or spectrum.dominates(floor),
                _spectrum_key(spectrum))
        if best is None or rank > best[0]:
            best = (rank, spectrum, assignment, outcome, run_seed, aimed)
    _, spectrum, assignment, outcome, run_seed, target = best
    return DesignReport(
        base=graph, N=N, target=target, assignment=assignment,
        spectrum=spectrum, success=spectrum.dominates(target),
        unsatisfiable=tuple(outcome.unsatisfiable) if outcome else (),
        swaps=tuple(outcome.swaps) if outcome else (),
        seed=int(run_seed), policy="participation")
