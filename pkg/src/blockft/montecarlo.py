"""Monte Carlo trials, confidence intervals, analytic bounds and exact small-code oracles.

Trials are generated in fixed-size chunks; chunk ``c`` of a run seeded with
``seed`` draws from ``SeedSequence([seed, c])``. Results therefore depend
only on (seed, trial count) and never on the number of worker processes.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .classical import BudgetExceeded, LinearCode
from .css import ConcatSpec, CssCode
from .decoders import (
    SyndromeTree,
    classical_table,
    depolarizing_priors,
    hard_bounded_decode,
    hard_concat_decode,
    soft_decode,
    tree_arrays,
)
from .gf2 import Gf2Error
from .noise import PauliChannel, sample_pauli_codes

CHUNK = 1000


@dataclass(frozen=True)
class RateEstimate:
    trials: int
    failures: int
    rate: float
    ci_lo: float
    ci_hi: float

    @property
    def sigma(self) -> float:
        if self.trials == 0:
            return 0.0
        return math.sqrt(max(self.rate * (1 - self.rate), 0.0) / self.trials)


@dataclass(frozen=True)
class TrialResult:
    seed: int
    index: int
    weight: int  # number of qubits hit
    status: str  # "ok" or the decoder's failure note
    logical_action: int  # residual top-level logical action as a packed integer, 0 = identity
    success: bool


def clopper_pearson(failures: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    """Exact binomial interval; with zero failures, the one-sided upper bound at level 1 - alpha."""
    if not 0 <= failures <= trials:
        raise Gf2Error("failures must lie in [0, trials]")
    if trials == 0:
        return 0.0, 1.0
    if failures == 0:
        return 0.0, 1.0 - alpha ** (1.0 / trials)
    lo = float(stats.beta.ppf(alpha / 2, failures, trials - failures + 1))
    hi = 1.0 if failures == trials else float(stats.beta.ppf(1 - alpha / 2, failures + 1, trials - failures))
    return lo, hi


def estimate(failures: int, trials: int) -> RateEstimate:
    lo, hi = clopper_pearson(failures, trials)
    return RateEstimate(trials, failures, failures / trials if trials else 0.0, lo, hi)


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, chunk]))


def _chunks(n_trials: int) -> list[tuple[int, int]]:
    return [(c, min(CHUNK, n_trials - c * CHUNK)) for c in range((n_trials + CHUNK - 1) // CHUNK)]


def run_chunked(worker: Callable, args: tuple, n_trials: int, seed: int, jobs: int = 1) -> np.ndarray:
    """Sum the per-chunk failure counts returned by ``worker(*args, seed, chunk, size)``."""
    chunks = _chunks(n_trials)
    if jobs <= 1 or len(chunks) <= 1:
        parts = [worker(*args, seed, c, size) for c, size in chunks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = [ex.submit(worker, *args, seed, c, size) for c, size in chunks]
            parts = [f.result() for f in futs]
    return np.sum(np.array(parts, dtype=np.int64), axis=0) if parts else np.zeros(1, dtype=np.int64)


def sample_depolarizing_bits(n: int, p: float, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    codes = sample_pauli_codes(PauliChannel.depolarizing(p), (size, n), rng)
    return (codes & 1).astype(np.int64), (codes >> 1).astype(np.int64)


# --------------------------------------------------------------------------
# memory blocks


@dataclass(frozen=True, eq=False)
class MemoryStack:
    """Hard-decoded memory code: a CSS code from a cyclic code, optionally over an inner one."""

    spec: ConcatSpec
    inner: LinearCode  # classical code of the bottom level
    outer: LinearCode | None = None  # classical code of the top level for two-level stacks

    @property
    def name(self) -> str:
        return self.spec.name


_TABLES: dict[int, tuple[LinearCode, np.ndarray]] = {}


def _table_for(C: LinearCode) -> np.ndarray:
    hit = _TABLES.get(id(C))
    if hit is None or hit[0] is not C:
        hit = (C, classical_table(C))
        _TABLES[id(C)] = hit
    return hit[1]


def _single_level_failures(code: CssCode, C: LinearCode, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Independent X/Z decoding of a CSS code built from a cyclic code C.

    Short codes use a full syndrome table; longer ones call the algebraic
    decoder per trial.
    """
    from .decoders import arrays_for
    from .gf2 import int_to_array

    A = arrays_for(code)
    failed = np.zeros(x.shape[0], dtype=bool)
    if C.r > 16:
        from .classical import decoder_for

        dec = decoder_for(C)
        pw = [1 << q for q in range(C.n)]
        for t in range(x.shape[0]):
            for half, e in ((0, x[t]), (1, z[t])):
                v = sum(pw[q] for q in np.flatnonzero(e).tolist())
                if not v:
                    continue
                out = dec(C.syndrome(v))
                r = v ^ out.error_estimate if out.ok else v
                act = code.logical_action_bits(r, 0) if half == 0 else code.logical_action_bits(0, r)
                failed[t] |= not act.is_identity()
        return failed
    table = _table_for(C)
    est = np.array([int_to_array(max(int(v), 0), C.n) for v in table], dtype=np.int64)
    good = table >= 0
    Hc = np.array([int_to_array(c, C.r) for c in C.columns], dtype=np.int64)
    w = 1 << np.arange(C.r, dtype=np.int64)
    for e, L in ((x, A.lz), (z, A.lx)):
        s = ((e @ Hc) & 1) @ w
        res = e ^ np.where(good[s][:, None], est[s], 0)
        failed |= (((res @ L.T) & 1).sum(axis=1) > 0)
    return failed


def _memory_chunk(stack: MemoryStack, p_eff: float, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = chunk_rng(seed, chunk)
    x, z = sample_depolarizing_bits(stack.spec.n, p_eff, size, rng)
    if stack.spec.depth == 1:
        failed = _single_level_failures(stack.spec.levels[0], stack.inner, x, z)
    else:
        res = hard_concat_decode(stack.spec, stack.inner, stack.outer, x, z, inner_table=_table_for(stack.inner))
        failed = res.failed
    return np.array([int(failed.sum())])


def run_memory_trials(stack: MemoryStack, p_eff: float, n_trials: int, seed: int, jobs: int = 1) -> RateEstimate:
    """Depolarizing(p_eff) on every physical qubit, hard decoding, failure by residual logical action."""
    if not 0.0 <= p_eff < 1.0:
        raise Gf2Error("p_eff must lie in [0, 1)")
    f = run_chunked(_memory_chunk, (stack, p_eff), n_trials, seed, jobs)
    return estimate(int(f[0]), n_trials)


def memory_trial_results(stack: MemoryStack, p_eff: float, seed: int, chunk: int, size: int = CHUNK) -> list[TrialResult]:
    """Per-trial records of one chunk, for audits; the true residual action is recomputed per trial."""
    rng = chunk_rng(seed, chunk)
    x, z = sample_depolarizing_bits(stack.spec.n, p_eff, size, rng)
    if stack.spec.depth != 1:
        raise Gf2Error("per-trial records are provided for single-level stacks")
    code, C = stack.spec.levels[0], stack.inner
    failed = _single_level_failures(code, C, x, z)
    out = []
    from .classical import decoder_for

    dec = decoder_for(C)
    for i in range(size):
        ex = sum(1 << q for q in np.flatnonzero(x[i]).tolist())
        ez = sum(1 << q for q in np.flatnonzero(z[i]).tolist())
        rx, rz = ex, ez
        status = "ok"
        for half in (0, 1):
            e = ex if half == 0 else ez
            d = dec(C.syndrome(e))
            if d.ok:
                e ^= d.error_estimate
            else:
                status = "uncorrectable"
            if half == 0:
                rx = e
            else:
                rz = e
        act = code.logical_action_bits(rx, rz)
        packed = act.x | (act.z << code.k)
        out.append(TrialResult(seed, chunk * CHUNK + i, int((x[i] | z[i]).sum()), status, packed, not bool(failed[i])))
    return out


# --------------------------------------------------------------------------
# concatenated [[15,1,3]] trials


def _soft_failures(spec: ConcatSpec, x: np.ndarray, z: np.ndarray, p_prior: float) -> np.ndarray:
    levels, tx, tz = tree_arrays(spec, x, z)
    priors = depolarizing_priors(spec.n, p_prior)
    T = x.shape[0]
    failed = np.zeros(T, dtype=bool)
    for t in range(T):
        tree = SyndromeTree([lv[t].tolist() for lv in levels])
        act, _ = soft_decode(spec, tree, priors)
        failed[t] = (act.x != int(tx[t, 0])) or (act.z != int(tz[t, 0]))
    return failed


def _rm_chunk(spec: ConcatSpec, p_eff: float, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = chunk_rng(seed, chunk)
    x, z = sample_depolarizing_bits(spec.n, p_eff, size, rng)
    soft = _soft_failures(spec, x, z, p_eff) if p_eff > 0 else np.zeros(size, dtype=bool)
    hard = hard_bounded_decode(spec, x, z)
    return np.array([int(soft.sum()), int(hard.sum()), int((soft & ~hard).sum()), int((hard & ~soft).sum())])


@dataclass(frozen=True)
class PairedRates:
    soft: RateEstimate
    hard: RateEstimate
    soft_only: int  # trials failed by the soft decoder alone
    hard_only: int

    @property
    def paired_sigma(self) -> float:
        """Standard error of (hard - soft) rate from the discordant pairs."""
        n = self.soft.trials
        d = (self.hard_only - self.soft_only) / n
        var = (self.hard_only + self.soft_only) / n - d * d
        return math.sqrt(max(var, 0.0) / n)


def run_rm_trials(
    spec: ConcatSpec, p_eff: float, n_trials: int, seed: int, jobs: int = 1, allow_large: bool = False
) -> PairedRates:
    """Soft MAP decoding and the hard bounded-distance baseline on the same error samples."""
    if spec.depth > 2 and not allow_large:
        raise BudgetExceeded("three or more levels need allow_large=True")
    if not 0.0 <= p_eff < 1.0:
        raise Gf2Error("p_eff must lie in [0, 1)")
    f = run_chunked(_rm_chunk, (spec, p_eff), n_trials, seed, jobs)
    return PairedRates(estimate(int(f[0]), n_trials), estimate(int(f[1]), n_trials), int(f[2]), int(f[3]))


def sample_fixed_weight(n: int, w: int, error_type: str, size: int, rng: np.random.Generator):
    """Uniformly random supports of size w; Z-only or uniform X/Y/Z on the support."""
    if not 0 <= w <= n:
        raise Gf2Error("weight outside [0, n]")
    keys = rng.random((size, n))
    supp = np.argsort(keys, axis=1)[:, :w]
    x = np.zeros((size, n), dtype=np.int64)
    z = np.zeros((size, n), dtype=np.int64)
    rows = np.arange(size)[:, None]
    if error_type == "Z":
        z[rows, supp] = 1
    elif error_type == "any":
        c = rng.integers(1, 4, size=(size, w))  # 2-bit codes X=1, Z=2, Y=3
        x[rows, supp] = c & 1
        z[rows, supp] = c >> 1
    else:
        raise Gf2Error(f"unknown error type {error_type}")
    return x, z


def _fixed_chunk(spec: ConcatSpec, w: int, error_type: str, p_eff: float, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = chunk_rng(seed, chunk)
    x, z = sample_fixed_weight(spec.n, w, error_type, size, rng)
    return np.array([int(_soft_failures(spec, x, z, p_eff).sum())])


def run_fixed_weight_trials(
    spec: ConcatSpec, w: int, error_type: str, p_eff: float, n_trials: int, seed: int, jobs: int = 1
) -> RateEstimate:
    """Soft-decoding failure rate for uniformly placed errors of exact weight w (priors at p_eff)."""
    if w == 0:
        return estimate(0, n_trials)
    f = run_chunked(_fixed_chunk, (spec, w, error_type, p_eff), n_trials, seed, jobs)
    return estimate(int(f[0]), n_trials)


# --------------------------------------------------------------------------
# analytic bounds


def _log_binom_pmf(n: int, w: np.ndarray, p: float) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    lg = np.vectorize(math.lgamma)
    return lg(n + 1) - lg(w + 1) - lg(n - w + 1) + w * math.log(p) + (n - w) * math.log1p(-p)


def _logsumexp(a: np.ndarray) -> float:
    if a.size == 0:
        return -math.inf
    m = float(a.max())
    if m == -math.inf:
        return m
    return m + math.log(float(np.exp(a - m).sum()))


def weighted_tail(n: int, lo: int, hi: int, p: float, base: float = 1.0) -> float:
    """sum_{w=lo}^{hi} base^w C(n,w) p^w (1-p)^(n-w), in the log domain."""
    lo, hi = max(lo, 0), min(hi, n)
    if lo > hi:
        return 0.0
    if p <= 0.0:
        return 1.0 if lo == 0 else 0.0
    if p >= 1.0:
        return base**n if hi == n else 0.0
    if base == 1.0 and hi == n:
        # plain upper tail: the survival function stays accurate near 1 as well
        return float(stats.binom.sf(lo - 1, n, p))
    w = np.arange(lo, hi + 1)
    terms = _log_binom_pmf(n, w, p) + w * math.log(base)
    return math.exp(_logsumexp(terms))


def analytic_bound(n: int, d: int, p: float) -> float:
    """P_n(p): probability of more than t=(d-1)//2 errors among n independent qubits."""
    if not 0.0 <= p <= 1.0:
        raise Gf2Error("p outside [0, 1]")
    t = (d - 1) // 2
    return min(weighted_tail(n, t + 1, n, p), 1.0)


def memory_bound(outer_n: int, outer_d: int, inner_n: int, inner_d: int, p: float) -> float:
    """Outer tail evaluated at the inner block failure probability."""
    return analytic_bound(outer_n, outer_d, analytic_bound(inner_n, inner_d, p))


RM_STRATA = ((14, 34), (35, 50), (51, 100))


def rm_upper_bound(p_eff: float, conditional_rates: dict[int, float], n: int = 3375) -> float:
    """Weight-stratified bound for the three-level [[15,1,3]] code.

    Weights 14..34 use the Z-only rate at 34, 35..50 the rate at 50, 51..100
    count every (2/3)^w-weighted error as a failure, and weights above 100
    count every error as a failure.
    """
    p34, p50 = conditional_rates[34], conditional_rates[50]
    b = 2.0 / 3.0
    s1 = p34 * weighted_tail(n, 14, 34, p_eff, b)
    s2 = p50 * weighted_tail(n, 35, 50, p_eff, b)
    s3 = weighted_tail(n, 51, 100, p_eff, b)
    s4 = weighted_tail(n, 101, n, p_eff)
    return s1 + s2 + s3 + s4


def rm_bound_terms(p_eff: float, conditional_rates: dict[int, float], n: int = 3375) -> list[float]:
    b = 2.0 / 3.0
    return [
        conditional_rates[34] * weighted_tail(n, 14, 34, p_eff, b),
        conditional_rates[50] * weighted_tail(n, 35, 50, p_eff, b),
        weighted_tail(n, 51, 100, p_eff, b),
        weighted_tail(n, 101, n, p_eff),
    ]


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float

    def __call__(self, p: float) -> float:
        return 10 ** (self.intercept + self.slope * math.log10(p))


def loglog_fit(points: Sequence[tuple[float, float]]) -> LogLogFit:
    """Least-squares line through (log10 p, log10 rate)."""
    pts = [(p, r) for p, r in points]
    if len(pts) < 2:
        raise Gf2Error("need at least two points")
    if any(p <= 0 or r <= 0 for p, r in pts):
        raise Gf2Error("points must have positive abscissa and rate")
    xs = np.log10([p for p, _ in pts])
    ys = np.log10([r for _, r in pts])
    if np.ptp(xs) == 0:
        raise Gf2Error("degenerate fit: identical abscissae")
    slope, intercept = np.polyfit(xs, ys, 1)
    return LogLogFit(float(slope), float(intercept))


# --------------------------------------------------------------------------
# exact oracles for small codes


def _span_table(vectors: Sequence[int]) -> np.ndarray:
    """Entry i is the XOR of vectors[j] over the set bits j of i."""
    out = np.zeros(1, dtype=np.int64)
    for v in vectors:
        out = np.concatenate([out, out ^ np.int64(v)])
    return out


def exact_memory_failure(code: CssCode, C: LinearCode, p: float) -> float:
    """Exact failure probability of independent X/Z table decoding under depolarizing(p).

    Enumerates every X pattern and every Z pattern (2^n each), marks which
    ones the decoder leaves with a logical residual, and sums the joint
    probability with a tensor-power contraction.
    """
    n = code.n
    if n > 24 or code.k != 1:
        raise Gf2Error("exact oracle limited to k=1 and n <= 24")
    table = _table_for(C)
    e = np.arange(1 << n, dtype=np.int64)
    s = _span_table(list(C.columns))
    est = np.where(table[s] >= 0, table[s], 0)
    res = e ^ est
    ok_x = (np.bitwise_count(res & code.logical_z_bits[0]) & 1) == 0
    ok_z = (np.bitwise_count(res & code.logical_x_bits[0]) & 1) == 0
    M = np.array([[1 - p, p / 3], [p / 3, p / 3]])  # row: x bit, column: z bit
    v = ok_z.astype(float)
    for q in range(n):
        # contract qubit q of the z pattern with M, leaving it indexed by the x bit
        v = v.reshape(-1, 2, 1 << q)
        v = np.einsum("ab,ibj->iaj", M, v).reshape(-1)
    return float(1.0 - ok_x.astype(float) @ v)


def exact_map_failure(code: CssCode, p: float) -> float:
    """Exact failure probability of optimal (MAP) decoding of a k=1 code under depolarizing(p).

    The joint law of (syndrome, logical class) is the image of a product
    measure under a linear map, so it is the Walsh-Hadamard transform of
    (1 - 4p/3)^{number of qubits touched by the dual functional}.
    """
    if code.k != 1:
        raise Gf2Error("single logical qubit expected")
    n = code.n
    # functionals as (ux, uz): measure <ux, x> + <uz, z>
    funcs = [(0, h) for h in code.hx] + [(h, 0) for h in code.hz]
    funcs += [(code.logical_z_bits[0], 0), (0, code.logical_x_bits[0])]
    m = len(funcs)
    if m > 26:
        raise Gf2Error("too many functionals for the exact transform")
    ux = _span_table([f[0] for f in funcs])
    uz = _span_table([f[1] for f in funcs])
    touched = np.bitwise_count(ux | uz)
    f = (1 - 4 * p / 3) ** touched.astype(float)
    # in-place fast Walsh-Hadamard transform
    h = 1
    f = f.copy()
    while h < f.size:
        f = f.reshape(-1, 2, h)
        a, b = f[:, 0, :].copy(), f[:, 1, :].copy()
        f[:, 0, :], f[:, 1, :] = a + b, a - b
        f = f.reshape(-1)
        h *= 2
    P = f / f.size  # index: syndrome bits low, then logical X bit, logical Z bit
    r = m - 2
    P = P.reshape(4, 1 << r)
    return float(1.0 - P.max(axis=0).sum())


def fixed_weight_exact(spec: ConcatSpec, w: int, p_eff: float, error_type: str = "Z") -> float:
    """Exact soft-decoding failure fraction over every support of size w (Z errors)."""
    import itertools

    if error_type != "Z":
        raise Gf2Error("exhaustive enumeration implemented for Z errors")
    n = spec.n
    combos = list(itertools.combinations(range(n), w))
    z = np.zeros((len(combos), n), dtype=np.int64)
    for i, c in enumerate(combos):
        z[i, list(c)] = 1
    x = np.zeros_like(z)
    return float(_soft_failures(spec, x, z, p_eff).mean())

