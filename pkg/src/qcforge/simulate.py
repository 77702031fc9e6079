"""BPSK-over-AWGN Monte-Carlo harness with sum-product BP decoding.

All-zero-codeword simulation: the channel and decoder are symmetric, so
error rates do not depend on the transmitted codeword and no generator
matrix is ever needed.  Every frame draws its noise from an rng seeded
by (seed, point index, frame index), which makes results bit-identical
no matter how frames are split across workers.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .graph import TannerGraph
from .lifting import LiftedCode

# message magnitude clamp; tanh(CLAMP/2) stays strictly inside (-1, 1)
# so the atanh in the check update cannot overflow
CLAMP = 30.0


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings for one monte_carlo call.

    Per EbN0 point the run stops at `frames` frames or `max_errors`
    frame errors, whichever comes first.  `punctured` variable nodes
    are not transmitted: their channel LLR is exactly 0.
    """

    ebn0_db: tuple
    frames: int = 100000
    max_errors: int = 100
    max_iterations: int = 100
    seed: int = 0
    decoder: str = "sum-product"
    punctured: tuple = ()
    rate: float = None

    def __post_init__(self):
        object.__setattr__(self, "ebn0_db",
                           tuple(float(x) for x in self.ebn0_db))
        object.__setattr__(self, "punctured",
                           tuple(int(v) for v in self.punctured))
        if not self.ebn0_db:
            raise ValueError("need at least one EbN0 point")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.frames < 1:
            raise ValueError("frame budget must be >= 1")
        if self.max_errors < 1:
            raise ValueError("max_errors must be >= 1")
        if self.rate is not None and not 0 < self.rate <= 1:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    def to_json(self):
        return {
            "ebn0_db": list(self.ebn0_db),
            "frames": self.frames,
            "max_errors": self.max_errors,
            "max_iterations": self.max_iterations,
            "seed": self.seed,
            "decoder": self.decoder,
            "punctured": list(self.punctured),
            "rate": self.rate,
        }


@dataclass(frozen=True)
class PointCount:
    """Raw counts at one EbN0 point; rates are always derived."""

    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    iter_total: int

    @property
    def fer(self):
        return self.frame_errors / self.frames

    @property
    def avg_iterations(self):
        return self.iter_total / self.frames

    def ber(self, n):
        return self.bit_errors / (self.frames * n)

    def to_json(self):
        return {
            "ebn0_db": self.ebn0_db,
            "frames": self.frames,
            "frame_errors": self.frame_errors,
            "bit_errors": self.bit_errors,
            "iter_total": self.iter_total,
        }


@dataclass(frozen=True)
class SimResult:
    """Counts per EbN0 point plus the config that produced them."""

    config: SimConfig
    n: int
    points: tuple

    def to_json(self):
        return {
            "config": self.config.to_json(),
            "n": self.n,
            "points": [p.to_json() for p in self.points],
        }


def gf2_rank(matrix):
    """Rank of an integer matrix over GF(2) by Gaussian elimination."""
    a = (np.asarray(matrix, dtype=np.int64) & 1).astype(np.uint8)
    n_rows = a.shape[0]
    rank = 0
    for col in range(a.shape[1]):
        piv = np.nonzero(a[rank:, col])[0]
        if piv.size == 0:
            continue
        piv = int(piv[0]) + rank
        a[[rank, piv]] = a[[piv, rank]]
        hits = np.nonzero(a[:, col])[0]
        hits = hits[hits != rank]
        a[hits] ^= a[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


def code_rate(graph, punctured=()):
    """Code rate over transmitted bits.

    Uses the design count (n - m) when it is positive; a square or
    over-checked parity matrix falls back to the exact GF(2) rank, so
    degenerate toys still get the information bits their redundant
    checks leave behind.
    """
    sent = graph.n_var - len(set(punctured))
    if sent <= 0:
        raise ValueError("every variable node is punctured")
    k = graph.n_var - graph.n_chk
    if k <= 0:
        k = graph.n_var - gf2_rank(graph.adjacency_matrix())
    if k <= 0:
        raise ValueError("parity-check matrix has full column rank; "
                         "the code carries no information bits")
    return k / sent


def awgn_llr(bits, ebn0_db, rate, seed, punctured=()):
    """Channel LLRs for a codeword over BI-AWGN at the given Eb/N0.

    BPSK maps bit b to 1-2b; noise variance is 1/(2*rate*10^(EbN0/10))
    and the LLR of each received sample y is 2y/sigma^2.  Punctured
    positions are not transmitted and get LLR exactly 0.
    """
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    bits = np.asarray(bits, dtype=np.int64)
    rng = np.random.default_rng(seed)
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))
    y = (1.0 - 2.0 * bits) + math.sqrt(sigma2) * rng.standard_normal(
        bits.shape[0])
    llr = 2.0 * y / sigma2
    if len(punctured):
        llr[np.asarray(punctured, dtype=np.int64)] = 0.0
    return llr


@njit(cache=True)
def _bp_kernel(var_ptr, var_e, chk_ptr, chk_e, chk_v, llr, max_iter, hard):
    n_var = var_ptr.shape[0] - 1
    n_chk = chk_ptr.shape[0] - 1
    n_edge = var_e.shape[0]
    m_cv = np.zeros(n_edge, np.float64)
    m_vc = np.empty(n_edge, np.float64)
    work = np.empty(n_edge, np.float64)
    for it in range(1, max_iter + 1):
        for v in range(n_var):
            s = llr[v]
            for p in range(var_ptr[v], var_ptr[v + 1]):
                s += m_cv[var_e[p]]
            for p in range(var_ptr[v], var_ptr[v + 1]):
                e = var_e[p]
                m = s - m_cv[e]
                if m > CLAMP:
                    m = CLAMP
                elif m < -CLAMP:
                    m = -CLAMP
                m_vc[e] = m
        for c in range(n_chk):
            lo = chk_ptr[c]
            hi = chk_ptr[c + 1]
            # leave-one-out tanh products via prefix and suffix passes
            acc = 1.0
            for p in range(lo, hi):
                work[p] = acc
                acc *= math.tanh(0.5 * m_vc[chk_e[p]])
            acc = 1.0
            for p in range(hi - 1, lo - 1, -1):
                prod = work[p] * acc
                acc *= math.tanh(0.5 * m_vc[chk_e[p]])
                m = 2.0 * math.atanh(prod) if -1.0 < prod < 1.0 \
                    else math.copysign(CLAMP, prod)
                if m > CLAMP:
                    m = CLAMP
                elif m < -CLAMP:
                    m = -CLAMP
                m_cv[chk_e[p]] = m
        for v in range(n_var):
            post = llr[v]
            for p in range(var_ptr[v], var_ptr[v + 1]):
                post += m_cv[var_e[p]]
            hard[v] = 1 if post <= 0.0 else 0
        ok = True
        for c in range(n_chk):
            parity = 0
            for p in range(chk_ptr[c], chk_ptr[c + 1]):
                parity ^= hard[chk_v[p]]
            if parity:
                ok = False
                break
        if ok:
            return it, True
    return max_iter, False


def _graph_of(code):
    return code.expanded if isinstance(code, LiftedCode) else code


def bp_decode(code, llrs, max_iter=100):
    """Flooding sum-product decoding of one LLR frame.

    Returns (hard bits, syndrome-zero flag, iterations used).  The
    decoder stops at the first iteration whose hard decision satisfies
    every check; ties in the posterior (exactly zero) decide for bit 1.
    """
    graph = _graph_of(code)
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    if llrs.shape[0] != graph.n_var:
        raise ValueError(
            f"got {llrs.shape[0]} LLRs for {graph.n_var} variable nodes")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    var_ptr, var_e, _, chk_ptr, chk_e, chk_v = graph.csr_arrays()
    hard = np.zeros(graph.n_var, np.uint8)
    iters, ok = _bp_kernel(var_ptr, var_e, chk_ptr, chk_e, chk_v,
                           llrs, int(max_iter), hard)
    return hard, bool(ok), int(iters)


class _FrameRunner:
    """Immutable per-code state shared by every frame of a run."""

    def __init__(self, graph, cfg):
        (self.var_ptr, self.var_e, _,
         self.chk_ptr, self.chk_e, self.chk_v) = graph.csr_arrays()
        self.rate = cfg.rate if cfg.rate is not None \
            else code_rate(graph, cfg.punctured)
        if not 0 < self.rate <= 1:
            raise ValueError(
                f"design rate {self.rate} is not in (0, 1]; this code has "
                "no information bits by the (n - m) / sent count, so pass "
                "an explicit rate in the config")
        self.cfg = cfg
        self.bits = np.zeros(graph.n_var, dtype=np.int64)
        self.hard = np.zeros(graph.n_var, np.uint8)

    def frame(self, point_idx, frame_idx):
        """(had error, bad bits, iterations) for one frame."""
        cfg = self.cfg
        ss = np.random.SeedSequence((cfg.seed, point_idx, int(frame_idx)))
        llr = awgn_llr(self.bits, cfg.ebn0_db[point_idx], self.rate, ss,
                       punctured=cfg.punctured)
        iters, ok = _bp_kernel(self.var_ptr, self.var_e, self.chk_ptr,
                               self.chk_e, self.chk_v, llr,
                               cfg.max_iterations, self.hard)
        nbad = int(self.hard.sum())
        return (nbad > 0 or not ok), nbad, iters


def simulate_frames(code, cfg, point_idx, frame_indices):
    """Exact error counts for specific all-zero-codeword frames.

    The (seed, point, frame) triple fully determines each frame's
    noise, so any partition of the frame indices across workers sums to
    the same totals.  Returns (frames, frame errors, bit errors, total
    iterations).
    """
    runner = _FrameRunner(_graph_of(code), cfg)
    frames = ferr = berr = itot = 0
    for fi in frame_indices:
        bad, nbad, iters = runner.frame(point_idx, fi)
        frames += 1
        itot += iters
        if bad:
            ferr += 1
            berr += nbad
    return frames, ferr, berr, itot


def monte_carlo(code, cfg):
    """FER/BER counts across the config's EbN0 points.

    Each point sends frames in index order until the frame budget or
    the frame-error target is hit.  Counts are exact and deterministic
    given the seed.
    """
    runner = _FrameRunner(_graph_of(code), cfg)
    points = []
    for pi in range(len(cfg.ebn0_db)):
        frames = ferr = berr = itot = 0
        for fi in range(cfg.frames):
            bad, nbad, iters = runner.frame(pi, fi)
            frames += 1
            itot += iters
            if bad:
                ferr += 1
                berr += nbad
                if ferr >= cfg.max_errors:
                    break
        points.append(PointCount(ebn0_db=cfg.ebn0_db[pi], frames=frames,
                                 frame_errors=ferr, bit_errors=berr,
                                 iter_total=itot))
    return SimResult(config=cfg, n=len(runner.bits), points=tuple(points))
