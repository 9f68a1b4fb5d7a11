"""Soft-decision MAP decoding of concatenated codes and hard two-layer decoding.

Priors and posteriors use the API order [I, X, Y, Z]. Internally a Pauli on
one qubit is the 2-bit code x + 2z (I=0, X=1, Z=2, Y=3) so that products
are XORs.
"""

from __future__ import annotations

import io
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .classical import LinearCode, decoder_for
from .css import ConcatSpec, CssCode, LogicalAction
from .gf2 import Gf2Error, int_to_array, popcount

API_TO_CODE = np.array([0, 1, 3, 2])  # API index -> 2-bit code
CODE_TO_API = np.array([0, 1, 3, 2])  # 2-bit code -> API index
_NEG = -1e300  # stands in for log(0) inside matrix products


class ZeroMassError(Gf2Error):
    """Every error consistent with the syndrome has prior probability zero."""


@dataclass(frozen=True)
class LogicalPosterior:
    probs: np.ndarray  # [I, X, Y, Z]

    def __post_init__(self) -> None:
        p = self.probs
        if p.shape != (4,) or (p < 0).any() or abs(p.sum() - 1) > 1e-12:
            raise Gf2Error(f"invalid posterior {p}")

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.probs))

    def action(self) -> LogicalAction:
        c = int(API_TO_CODE[self.argmax])
        return LogicalAction(1, c & 1, c >> 1)

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log2(p)).sum())


def bits_to_codes(x: int, z: int, n: int) -> np.ndarray:
    return (int_to_array(x, n) + 2 * int_to_array(z, n)).astype(np.uint8)


def _group_codes(code: CssCode) -> np.ndarray:
    """All 2^(n-k) stabilizer group elements as (M, n) arrays of 2-bit codes."""
    gens = [bits_to_codes(v, 0, code.n) for v in code.hx] + [bits_to_codes(0, v, code.n) for v in code.hz]
    out = np.zeros((1, code.n), dtype=np.uint8)
    for g in gens:
        out = np.concatenate([out, out ^ g[None, :]])
    return out


class BlockPosterior:
    """Exact P(L | s) for a k=1 CSS code by enumerating its stabilizer group.

    Each evaluation is a one-hot matrix product over the cached group in the
    log domain, so the cost is group size times 4n per logical class.
    """

    def __init__(self, code: CssCode, cache_size: int = 1 << 16) -> None:
        if code.k != 1:
            raise Gf2Error("block posterior needs a single logical qubit")
        self.code = code
        n = code.n
        G = _group_codes(code)
        onehot = np.zeros((G.shape[0], n * 4))
        onehot[np.arange(G.shape[0])[:, None], np.arange(n)[None, :] * 4 + G] = 1.0
        self.onehot = onehot
        lx, lz = code.logical_x_bits[0], code.logical_z_bits[0]
        # API order I, X, Y, Z as 2-bit codes per qubit
        self.class_codes = np.stack([
            bits_to_codes(0, 0, n),
            bits_to_codes(lx, 0, n),
            bits_to_codes(lx, lz, n),
            bits_to_codes(0, lz, n),
        ])
        self._pure: dict[int, np.ndarray] = {}
        self._cache: dict[tuple[int, bytes], np.ndarray] = {}
        self._cache_size = cache_size
        self._cols = np.arange(4)[None, :]

    def pure_codes(self, s: int) -> np.ndarray:
        out = self._pure.get(s)
        if out is None:
            t = self.code.pure_error(s)
            out = bits_to_codes(t.x, t.z, self.code.n)
            self._pure[s] = out
        return out

    def __call__(self, s: int, priors: np.ndarray, cache: bool = False) -> np.ndarray:
        priors = np.asarray(priors, dtype=float)
        n = self.code.n
        if priors.shape != (n, 4):
            raise Gf2Error(f"priors must have shape ({n}, 4)")
        key = None
        if cache:
            key = (s, priors.tobytes())
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        with np.errstate(divide="ignore"):
            lp = np.log(priors[:, CODE_TO_API])  # columns indexed by 2-bit code
        lp = np.where(np.isfinite(lp), lp, _NEG)
        pe = self.pure_codes(s)
        shifts = self.class_codes ^ pe[None, :]  # (4, n)
        # lp for error code c at qubit q after XOR with shift v: lp[q, c ^ v_q]
        idx = self._cols ^ shifts[:, :, None]  # (4, n, 4)
        W = np.take_along_axis(np.broadcast_to(lp, (4, n, 4)), idx.astype(np.intp), axis=2)
        logw = self.onehot @ W.reshape(4, n * 4).T  # (M, 4)
        m = logw.max()
        if m <= _NEG / 2:
            raise ZeroMassError(f"zero total mass for syndrome {s:#x}")
        tot = np.exp(logw - m).sum(axis=0)
        post = tot / tot.sum()
        if key is not None and len(self._cache) < self._cache_size:
            self._cache[key] = post
        return post


_ENGINES: dict[int, BlockPosterior] = {}


def engine_for(code: CssCode) -> BlockPosterior:
    e = _ENGINES.get(id(code))
    if e is None or e.code is not code:
        e = BlockPosterior(code)
        _ENGINES[id(code)] = e
    return e


def block_posterior(code: CssCode, s: int, priors: np.ndarray) -> LogicalPosterior:
    """P(L | s) over [I, X, Y, Z] for independent per-qubit priors (rows [I, X, Y, Z])."""
    return LogicalPosterior(engine_for(code)(s, priors))


def brute_force_posterior(code: CssCode, s: int, priors: np.ndarray) -> np.ndarray:
    """Oracle: sum over all 4^n Paulis with syndrome s, grouped by logical class."""
    n = code.n
    if n > 10:
        raise Gf2Error("brute force limited to n <= 10")
    priors = np.asarray(priors, dtype=float)
    out = np.zeros(4)
    for x in range(1 << n):
        for z in range(1 << n):
            if code.syndrome_bits(x, z) != s:
                continue
            w = 1.0
            for q in range(n):
                c = ((x >> q) & 1) | (((z >> q) & 1) << 1)
                w *= priors[q, CODE_TO_API[c]]
            act = code.logical_action_bits(x, z)
            out[CODE_TO_API[act.x | (act.z << 1)]] += w
    tot = out.sum()
    if tot == 0:
        raise ZeroMassError("zero total mass")
    return out / tot


# --------------------------------------------------------------------------
# concatenation trees


def depolarizing_priors(n: int, p: float) -> np.ndarray:
    return np.tile([1 - p, p / 3, p / 3, p / 3], (n, 1))


@dataclass
class SyndromeTree:
    """levels[l][b] is the syndrome of block b at level l (0 = top)."""

    levels: list[list[int]]

    def check_shape(self, spec: ConcatSpec) -> None:
        if len(self.levels) != spec.depth:
            raise Gf2Error("tree depth does not match the concatenation")
        for lvl, syn in enumerate(self.levels):
            if len(syn) != spec.blocks(lvl):
                raise Gf2Error(f"level {lvl} has {len(syn)} blocks, expected {spec.blocks(lvl)}")


@dataclass
class CodeArrays:
    """Dense 0/1 matrices of a CSS code for batched syndrome evaluation."""

    hx: np.ndarray
    hz: np.ndarray
    lx: np.ndarray
    lz: np.ndarray
    weights_x: np.ndarray  # powers of two packing X-generator syndrome bits
    weights_z: np.ndarray

    @classmethod
    def of(cls, code: CssCode) -> CodeArrays:
        n = code.n
        mat = lambda rows: np.array([int_to_array(r, n) for r in rows], dtype=np.int64).reshape(len(rows), n)  # noqa: E731
        rx, rz = len(code.hx), len(code.hz)
        return cls(
            mat(code.hx),
            mat(code.hz),
            mat(code.logical_x_bits),
            mat(code.logical_z_bits),
            (1 << np.arange(rx, dtype=np.int64)) if rx < 63 else None,
            (1 << np.arange(rz, dtype=np.int64)) if rz < 63 else None,
        )


_ARRAYS: dict[int, tuple[CssCode, CodeArrays]] = {}


def arrays_for(code: CssCode) -> CodeArrays:
    hit = _ARRAYS.get(id(code))
    if hit is None or hit[0] is not code:
        hit = (code, CodeArrays.of(code))
        _ARRAYS[id(code)] = hit
    return hit[1]


def block_syndromes(code: CssCode, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Packed syndromes for error bits of shape (..., n); X-generator part in the low bits."""
    A = arrays_for(code)
    sx = (z @ A.hx.T) & 1
    sz = (x @ A.hz.T) & 1
    rx = len(code.hx)
    return (sx @ A.weights_x) | ((sz @ A.weights_z) << rx)


def block_logicals(code: CssCode, x: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Logical action bits (..., k) of error bits (..., n)."""
    A = arrays_for(code)
    return (x @ A.lz.T) & 1, (z @ A.lx.T) & 1


def tree_arrays(spec: ConcatSpec, x: np.ndarray, z: np.ndarray):
    """Syndromes per level and the true top-level action for a batch of errors.

    ``x`` and ``z`` have shape (T, n). Returns (list of (T, blocks) syndrome
    arrays with level 0 first, top X bits (T, k), top Z bits (T, k)).
    """
    T = x.shape[0]
    levels: list[np.ndarray] = []
    cx, cz = x.astype(np.int64), z.astype(np.int64)
    for lvl in range(spec.depth - 1, -1, -1):
        code = spec.levels[lvl]
        B = spec.blocks(lvl)
        bx = cx.reshape(T, B, code.n)
        bz = cz.reshape(T, B, code.n)
        levels.append(block_syndromes(code, bx, bz))
        ax, az = block_logicals(code, bx, bz)
        if lvl > 0:
            cx, cz = ax[..., 0], az[..., 0]
        else:
            top_x, top_z = ax[:, 0, :], az[:, 0, :]
    levels.reverse()
    return levels, top_x, top_z


def syndrome_tree(spec: ConcatSpec, x: int, z: int) -> tuple[SyndromeTree, LogicalAction]:
    """Single-error version of :func:`tree_arrays` on integer bit masks."""
    xa = int_to_array(x, spec.n)[None, :]
    za = int_to_array(z, spec.n)[None, :]
    levels, tx, tz = tree_arrays(spec, xa, za)
    k = spec.k
    act = LogicalAction(k, sum(int(b) << i for i, b in enumerate(tx[0])), sum(int(b) << i for i, b in enumerate(tz[0])))
    return SyndromeTree([[int(s) for s in lv[0]] for lv in levels]), act


@dataclass
class DecodeTrace:
    """Per-level record of a soft decode (syndromes, per-block argmax, posterior entropy)."""

    levels: list[list[tuple[int, int, float]]]

    def dump(self) -> str:
        buf = io.StringIO()
        for lvl, rows in enumerate(self.levels):
            buf.write(f"level {lvl}\n")
            for b, (s, arg, h) in enumerate(rows):
                buf.write(f"  block {b}: syndrome={s:#x} argmax={'IXYZ'[arg]} entropy={h:.6g}\n")
        return buf.getvalue()


def soft_decode(
    spec: ConcatSpec,
    tree: SyndromeTree,
    leaf_priors: np.ndarray,
    trace: DecodeTrace | None = None,
) -> tuple[LogicalAction, LogicalPosterior]:
    """Message passing up the tree; child posteriors become the parent's per-qubit priors.

    ``leaf_priors`` has shape (n_physical, 4). Leaf blocks with identical
    priors share cached posteriors.
    """
    if spec.k != 1:
        raise Gf2Error("soft decoding needs k = 1 at the top")
    tree.check_shape(spec)
    leaf_priors = np.asarray(leaf_priors, dtype=float)
    if leaf_priors.shape != (spec.n, 4):
        raise Gf2Error(f"leaf priors must have shape ({spec.n}, 4)")
    cur = leaf_priors
    for lvl in range(spec.depth - 1, -1, -1):
        code = spec.levels[lvl]
        eng = engine_for(code)
        B = spec.blocks(lvl)
        syn = tree.levels[lvl]
        blocks = cur.reshape(B, code.n, 4)
        post = np.stack([eng(syn[b], blocks[b], cache=True) for b in range(B)])
        if trace is not None:
            trace.levels.insert(0, [(syn[b], int(np.argmax(post[b])), LogicalPosterior(post[b]).entropy()) for b in range(B)])
        cur = post
    top = LogicalPosterior(cur[0])
    return top.action(), top


# --------------------------------------------------------------------------
# hard decoding


class BoundedDistanceTable:
    """Minimum-weight X and Z corrections up to the code's correction radius, per syndrome half."""

    def __init__(self, code: CssCode, t_x: int | None = None, t_z: int | None = None) -> None:
        self.code = code
        dx = code.d_x if code.d_x is not None else code.d
        dz = code.d_z if code.d_z is not None else code.d
        self.t_x = (dx - 1) // 2 if t_x is None else t_x  # X errors detected by Z generators
        self.t_z = (dz - 1) // 2 if t_z is None else t_z
        n = code.n
        self.x_table = self._build(code.hz, n, self.t_x)
        self.z_table = self._build(code.hx, n, self.t_z)

    @staticmethod
    def _build(rows: Sequence[int], n: int, t: int) -> dict[int, int]:
        import itertools

        table: dict[int, int] = {}
        for w in range(t + 1):
            for qs in itertools.combinations(range(n), w):
                e = sum(1 << q for q in qs)
                s = sum(1 << i for i, h in enumerate(rows) if popcount(h & e) & 1)
                table.setdefault(s, e)
        return table

    def decode(self, s: int) -> tuple[int, int, bool]:
        """(x correction, z correction, ok); a failed half contributes no correction."""
        sx, sz = self.code.split_syndrome(s)
        ex = self.x_table.get(sz)
        ez = self.z_table.get(sx)
        return ex or 0, ez or 0, ex is not None and ez is not None


def hard_bounded_decode(spec: ConcatSpec, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Level-by-level bounded-distance decoding of k=1 trees; returns failure flags (T,).

    Each block is corrected using only its own syndrome; the residual
    logical action of every block is the symbol seen by the level above.
    """
    T = x.shape[0]
    cx, cz = x.astype(np.int64), z.astype(np.int64)
    for lvl in range(spec.depth - 1, -1, -1):
        code = spec.levels[lvl]
        table = BoundedDistanceTable(code)
        B = spec.blocks(lvl)
        bx = cx.reshape(T, B, code.n)
        bz = cz.reshape(T, B, code.n)
        syn = block_syndromes(code, bx, bz)
        corr_x = np.zeros_like(bx)
        corr_z = np.zeros_like(bz)
        for s in np.unique(syn).tolist():
            ex, ez, _ = table.decode(int(s))
            mask = syn == s
            corr_x[mask] = int_to_array(ex, code.n)
            corr_z[mask] = int_to_array(ez, code.n)
        ax, az = block_logicals(code, bx ^ corr_x, bz ^ corr_z)
        cx, cz = ax[..., 0], az[..., 0]
    return (cx[:, 0] | cz[:, 0]).astype(bool)


@dataclass
class HardDecodeResult:
    failed: np.ndarray  # (T,) residual has a nontrivial top-level logical action
    inner_failures: np.ndarray  # (T,) count of inner blocks flagged uncorrectable
    outer_failures: np.ndarray  # (T,) count of outer decoder failures (X and Z halves)


def classical_table(C: LinearCode) -> np.ndarray:
    """Error estimate for every syndrome of a short cyclic code (-1 on decoder failure)."""
    dec = decoder_for(C)
    out = np.full(1 << C.r, -1, dtype=np.int64)
    for s in range(1 << C.r):
        res = dec(s)
        if res.ok:
            out[s] = res.error_estimate
    return out


def hard_concat_decode(
    spec: ConcatSpec,
    inner_classical: LinearCode,
    outer_classical: LinearCode,
    x: np.ndarray,
    z: np.ndarray,
    inner_table: np.ndarray | None = None,
) -> HardDecodeResult:
    """Two-layer hard decoding of an outer CSS code over a k=1 inner code.

    X and Z errors are decoded independently with the classical decoders of
    the underlying cyclic codes: a table decoder for the inner blocks and the
    algebraic decoder on the outer symbols. An inner block its decoder cannot
    correct is left uncorrected (identity symbol) and counted.
    """
    if spec.depth != 2:
        raise Gf2Error("two-level memory stack expected")
    outer, inner = spec.levels
    T = x.shape[0]
    B, n_in = outer.n, inner.n
    table = classical_table(inner_classical) if inner_table is None else inner_table
    est_bits = np.array([int_to_array(max(int(v), 0), n_in) for v in table], dtype=np.int64)
    ok_tab = table >= 0
    A = arrays_for(inner)
    syn_w = 1 << np.arange(inner_classical.r, dtype=np.int64)
    Hc = np.array([int_to_array(c, inner_classical.r) for c in inner_classical.columns], dtype=np.int64)  # (n, r)

    inner_fail = np.zeros(T, dtype=np.int64)
    symbols = []
    for e in (x, z):
        b = e.astype(np.int64).reshape(T, B, n_in)
        s = ((b @ Hc) & 1) @ syn_w
        good = ok_tab[s]
        inner_fail += (~good).sum(axis=1)
        corr = np.where(good[..., None], est_bits[s], 0)
        res = b ^ corr
        # X residual symbol: overlap with logical Z; Z residual: overlap with logical X
        L = A.lz if e is x else A.lx
        symbols.append(((res @ L.T) & 1)[..., 0])
    sym_x, sym_z = symbols
    dec = decoder_for(outer_classical)
    outer_fail = np.zeros(T, dtype=np.int64)
    failed = np.zeros(T, dtype=bool)
    pw = [1 << i for i in range(B)]
    for t in range(T):
        bad = False
        for half, sym in ((0, sym_x[t]), (1, sym_z[t])):
            v = sum(pw[i] for i in np.flatnonzero(sym).tolist())
            if v == 0:
                continue
            out = dec(outer_classical.syndrome(v))
            r = v
            if out.ok:
                r = v ^ out.error_estimate
            else:
                outer_fail[t] += 1
            if r:
                act = outer.logical_action_bits(r, 0) if half == 0 else outer.logical_action_bits(0, r)
                bad = bad or not act.is_identity()
        failed[t] = bad
    return HardDecodeResult(failed, inner_fail, outer_fail)
