"""Classical cyclic codes and their decoders.

Syndromes of cyclic codes are taken in remainder form, ``s(x) = e(x) mod g(x)``:
column ``i`` of ``H`` is ``x^i mod g``. The row space is the same as the one
spanned by shifts of the reversed check polynomial, but remainder form makes
both error trapping (rotate the syndrome) and BCH syndrome evaluation
(``S_j = s(beta^j)`` since ``g(beta^j) = 0``) direct.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .gf2 import (
    Gf2Error,
    Gf2Matrix,
    Gf2mField,
    Gf2Poly,
    field_degree_for_length,
    parity,
    poly_divmod,
    poly_mod,
    poly_mul,
    popcount,
    rank,
    rotate,
    support,
)
from .gf2 import field as gf_field

# Generator polynomials as exponent lists.
GOLAY23_EXPONENTS = (11, 10, 6, 5, 4, 2, 0)
BCH89_EXPONENTS = (33, 30, 27, 26, 25, 24, 22, 21, 20, 16, 15, 14, 11, 10, 9, 6, 3, 2, 0)
BCH127_EXPONENTS = (35, 34, 33, 28, 24, 23, 22, 19, 17, 15, 12, 11, 9, 8, 6, 4, 2, 1, 0)
BCH255_EXPONENTS = (
    56, 51, 50, 49, 46, 43, 41, 40, 39, 34, 30, 26, 25, 24, 22, 20, 17, 16, 11, 10, 8, 7, 4, 3, 2, 1, 0,
)  # fmt: skip


class DecodeStatus(enum.Enum):
    CORRECTED = "corrected"
    DETECTED_UNCORRECTABLE = "detected_uncorrectable"


@dataclass(frozen=True)
class DecodeOutcome:
    error_estimate: int
    status: DecodeStatus

    @property
    def ok(self) -> bool:
        return self.status is DecodeStatus.CORRECTED


UNCORRECTABLE = DecodeOutcome(0, DecodeStatus.DETECTED_UNCORRECTABLE)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class BchParams:
    """Field data for syndrome decoding: ``beta = alpha^beta_log`` has order ``n``
    and ``g(beta^j) = 0`` for ``j = 1..2t``."""

    m: int
    primitive_poly: int
    beta_log: int
    t: int


@dataclass(frozen=True, eq=False)
class LinearCode:
    n: int
    k: int
    claimed_d: int
    G: Gf2Matrix
    H: Gf2Matrix
    generator_poly: Gf2Poly | None = None
    name: str = ""
    bch: BchParams | None = None
    # column i of H as an integer (the syndrome of a weight-one error at i)
    columns: tuple[int, ...] = dc_field(default=(), repr=False)

    def __post_init__(self) -> None:
        if not self.columns:
            object.__setattr__(self, "columns", tuple(self.H.transpose().rows))

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def t(self) -> int:
        return (self.claimed_d - 1) // 2

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"LinearCode{label}[{self.n},{self.k},{self.claimed_d}]"

    def params(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.claimed_d)

    def syndrome(self, word: int) -> int:
        if word >> self.n:
            raise Gf2Error(f"word longer than n={self.n}")
        if self.generator_poly is not None:
            return poly_mod(word, self.generator_poly.bits)
        return self.H.mul_vec(word)

    def is_codeword(self, word: int) -> bool:
        return self.syndrome(word) == 0

    def encode(self, message: int) -> int:
        out = 0
        for i in support(message):
            out ^= self.G.rows[i]
        return out

    def to_text(self) -> str:
        if self.generator_poly is None:
            raise Gf2Error("text export is defined for cyclic codes only")
        return f"n={self.n} k={self.k} d={self.claimed_d} g={self.generator_poly.hex()}\n"

    @classmethod
    def from_text(cls, text: str) -> LinearCode:
        fields = dict(item.split("=", 1) for item in text.split())
        code = cyclic_code(Gf2Poly.from_hex(fields["g"]), int(fields["n"]), claimed_d=int(fields["d"]))
        if code.k != int(fields["k"]):
            raise Gf2Error("stored k disagrees with the generator polynomial")
        return code


def cyclic_code(genpoly: Gf2Poly, n: int, claimed_d: int | None = None, name: str = "") -> LinearCode:
    """Cyclic [n, n - deg g] code generated by ``genpoly``."""
    g = genpoly.bits
    if g == 0:
        raise Gf2Error("zero generator polynomial")
    deg = genpoly.degree
    if deg > n:
        raise Gf2Error("generator degree exceeds block length")
    quotient, rem = poly_divmod((1 << n) | 1, g)
    if rem:
        raise Gf2Error(f"{genpoly} does not divide X^{n}+1")
    k = n - deg
    G = Gf2Matrix(tuple(g << i for i in range(k)), n)
    cols = tuple(poly_mod(1 << i, g) for i in range(n))
    H = Gf2Matrix(tuple(sum(((c >> r) & 1) << i for i, c in enumerate(cols)) for r in range(deg)), n)
    bch = None
    if n % 2 == 1 and deg > 0:
        bch = _bch_params(g, n)
    if claimed_d is None:
        claimed_d = 2 * bch.t + 1 if bch is not None else 1
    return LinearCode(n, k, claimed_d, G, H, genpoly, name, bch, cols)


def check_matrix_from_check_poly(code: LinearCode) -> Gf2Matrix:
    """Textbook parity-check matrix: shifts of the reciprocal check polynomial."""
    if code.generator_poly is None:
        raise Gf2Error("cyclic code required")
    n, k = code.n, code.k
    h, rem = poly_divmod((1 << n) | 1, code.generator_poly.bits)
    assert rem == 0
    hrev = int(format(h, f"0{k + 1}b")[::-1], 2)
    return Gf2Matrix(tuple(hrev << i for i in range(n - k)), n)


def _bch_params(g: int, n: int) -> BchParams:
    m = field_degree_for_length(n)
    F = gf_field(m)
    step = F.order // n
    roots = {j for j in range(n) if F.eval_poly(g, F.alpha_pow(step * j)) == 0}
    best_a, best_run = 1, 0
    for a in range(1, n):
        if math.gcd(a, n) != 1:
            continue
        run = 0
        while run < n and (a * (run + 1)) % n in roots:
            run += 1
        if run > best_run:
            best_a, best_run = a, run
    return BchParams(m, F.poly.bits, (step * best_a) % F.order, best_run // 2)


def golay23() -> LinearCode:
    return cyclic_code(Gf2Poly.from_exponents(GOLAY23_EXPONENTS), 23, claimed_d=7, name="golay23")


def bch89() -> LinearCode:
    return cyclic_code(Gf2Poly.from_exponents(BCH89_EXPONENTS), 89, claimed_d=9, name="bch89")


def bch127() -> LinearCode:
    return cyclic_code(Gf2Poly.from_exponents(BCH127_EXPONENTS), 127, claimed_d=11, name="bch127")


def bch255() -> LinearCode:
    return cyclic_code(Gf2Poly.from_exponents(BCH255_EXPONENTS), 255, claimed_d=15, name="bch255")


def hamming(m: int) -> LinearCode:
    polys = {3: 0b1011, 4: 0b10011}
    n = (1 << m) - 1
    return cyclic_code(Gf2Poly(polys[m]), n, claimed_d=3, name=f"hamming{n}")


def repetition(n: int) -> LinearCode:
    """The [n,1,n] repetition code, generated by 1 + X + ... + X^{n-1}."""
    return cyclic_code(Gf2Poly((1 << n) - 1), n, claimed_d=n, name=f"rep{n}")


def even_weight(n: int) -> LinearCode:
    """The [n,n-1,2] code of even-weight words (over GF(2), X+1 divides X^n+1)."""
    return cyclic_code(Gf2Poly(0b11), n, claimed_d=2, name=f"even{n}")


# --------------------------------------------------------------------------
# containment / distance


def selfdual_containment(code: LinearCode) -> bool:
    """True iff the dual code is contained in the code (H H^T = 0)."""
    return all(parity(a & b) == 0 for a in code.H.rows for b in code.H.rows)


def codeword_weights(code: LinearCode, max_k: int = 16) -> np.ndarray:
    """Weights of all 2^k codewords (Gray-code walk)."""
    if code.k > max_k:
        raise BudgetExceeded(f"2^{code.k} codewords exceed the enumeration budget 2^{max_k}")
    out = np.zeros(1 << code.k, dtype=np.int64)
    w = 0
    for i in range(1, 1 << code.k):
        w ^= code.G.rows[(i & -i).bit_length() - 1]
        out[i] = popcount(w)
    return out


@dataclass(frozen=True)
class DistanceResult:
    value: int
    exact: bool

    def __str__(self) -> str:
        return f"{self.value}" if self.exact else f">={self.value}"


def min_distance(code: LinearCode, max_k: int = 16, budget: int = 5_000_000) -> DistanceResult:
    """Exact minimum distance when 2^k is enumerable, otherwise a lower bound.

    The bound comes from a pattern search: if all error patterns of weight at
    most ``h`` have distinct syndromes then no nonzero codeword has weight
    ``<= 2h``. ``h`` grows while the number of patterns stays within ``budget``.
    """
    if code.k <= max_k:
        w = codeword_weights(code, max_k)
        return DistanceResult(int(w[1:].min()) if len(w) > 1 else code.n + 1, True)
    cols = np.array(code.columns, dtype=object if code.r > 62 else np.int64)
    best = 0
    total = 1
    h = 0
    while h < code.n and total + math.comb(code.n, h + 1) <= budget:
        h += 1
        total += math.comb(code.n, h)
        syn = _low_weight_syndromes(cols, code.n, h)
        uniq = len(set(syn.tolist())) if syn.dtype == object else len(np.unique(syn))
        if uniq != len(syn):
            break
        best = h
    return DistanceResult(2 * best + 1, False)


def _low_weight_syndromes(cols: np.ndarray, n: int, h: int) -> np.ndarray:
    """Syndromes of every error of weight <= h."""
    out = [np.zeros(1, dtype=cols.dtype)]
    cur_syn = np.zeros(1, dtype=cols.dtype)
    cur_max = np.full(1, -1, dtype=np.int64)
    for _ in range(h):
        nxt_syn, nxt_max = [], []
        for j in range(n):
            sel = cur_max < j
            if not sel.any():
                continue
            nxt_syn.append(cur_syn[sel] ^ cols[j])
            nxt_max.append(np.full(int(sel.sum()), j, dtype=np.int64))
        cur_syn = np.concatenate(nxt_syn)
        cur_max = np.concatenate(nxt_max)
        out.append(cur_syn)
    return np.concatenate(out)


# --------------------------------------------------------------------------
# oracle decoder


def brute_force_decode(code: LinearCode, s: int, wmax: int, budget: int = 10_000_000) -> DecodeOutcome:
    """Minimum-weight error of weight <= wmax with syndrome ``s``.

    Ties are broken by the lexicographically first support (ascending
    positions), matching the order of :func:`itertools.combinations`.
    """
    total = sum(math.comb(code.n, w) for w in range(wmax + 1))
    if total > budget:
        raise BudgetExceeded(f"{total} patterns exceed the budget {budget}")
    if s == 0:
        return DecodeOutcome(0, DecodeStatus.CORRECTED)
    cols = code.columns
    for w in range(1, wmax + 1):
        for combo in itertools.combinations(range(code.n), w):
            acc = 0
            for i in combo:
                acc ^= cols[i]
            if acc == s:
                return DecodeOutcome(sum(1 << i for i in combo), DecodeStatus.CORRECTED)
    return UNCORRECTABLE


def syndrome_table(code: LinearCode, wmax: int) -> dict[int, int]:
    """Map each syndrome reachable by weight <= wmax to its first (lowest-weight,
    lexicographically first) error. Same tie-breaking as :func:`brute_force_decode`."""
    table: dict[int, int] = {0: 0}
    cols = code.columns
    for w in range(1, wmax + 1):
        for combo in itertools.combinations(range(code.n), w):
            acc = 0
            for i in combo:
                acc ^= cols[i]
            if acc not in table:
                table[acc] = sum(1 << i for i in combo)
    return table


# --------------------------------------------------------------------------
# Kasami error trapping for the Golay code

# Covering patterns (positions inside the information window 11..22). Every
# error of weight <= 3 has some rotation in which, after removing one of these
# patterns, all remaining bits lie in the parity window 0..10.
GOLAY_COVERING_POSITIONS = (11, 15)


class KasamiDecoder:
    """Error-trapping decoder for a cyclic code with small ``t``."""

    def __init__(self, code: LinearCode, covering: tuple[int, ...] = GOLAY_COVERING_POSITIONS) -> None:
        if code.generator_poly is None:
            raise Gf2Error("error trapping needs a cyclic code")
        self.code = code
        self.g = code.generator_poly.bits
        self.r = code.r
        self.t = code.t
        self.patterns: list[tuple[int, int, int]] = [(0, 0, 0)]  # (error bits, syndrome, weight)
        for q in covering:
            if not self.r <= q < code.n:
                raise Gf2Error("covering positions must lie in the information window")
            self.patterns.append((1 << q, code.columns[q], 1))

    def decode(self, s: int) -> DecodeOutcome:
        n, g = self.code.n, self.g
        if s == 0:
            return DecodeOutcome(0, DecodeStatus.CORRECTED)
        si = s
        for i in range(n):
            # si is the syndrome of x^i e(x) mod (x^n + 1)
            for qbits, qsyn, qw in self.patterns:
                rest = si ^ qsyn
                if popcount(rest) <= self.t - qw:
                    est = rotate(rest | qbits, n - i, n)
                    return DecodeOutcome(est, DecodeStatus.CORRECTED)
            si <<= 1
            if si >> self.r:
                si ^= g
        return UNCORRECTABLE

    @functools.cached_property
    def table(self) -> np.ndarray:
        """Decoded error for every syndrome; ``-1`` marks a detected failure."""
        out = np.full(1 << self.r, -1, dtype=np.int64)
        for s in range(1 << self.r):
            res = self.decode(s)
            if res.ok:
                out[s] = res.error_estimate
        return out


@functools.lru_cache(maxsize=None)
def _golay_decoder() -> KasamiDecoder:
    return KasamiDecoder(golay23())


def decode_golay_kasami(s: int) -> DecodeOutcome:
    if s >> 11:
        raise Gf2Error("Golay syndromes have 11 bits")
    return _golay_decoder().decode(s)


# --------------------------------------------------------------------------
# Berlekamp-Massey for the BCH codes


class BchDecoder:
    def __init__(self, code: LinearCode) -> None:
        if code.bch is None or code.generator_poly is None:
            raise Gf2Error("BCH decoding needs a cyclic code with a root run")
        self.code = code
        self.params = code.bch
        self.F: Gf2mField = gf_field(code.bch.m)
        if self.F.poly.bits != code.bch.primitive_poly:
            self.F = Gf2mField(code.bch.m, code.bch.primitive_poly)
        self.t = min(code.bch.t, code.t)
        order = self.F.order
        b = code.bch.beta_log
        # exponent of beta^{-i k} for the Chien search, shape (t+1, n)
        k_idx = np.arange(self.t + 1)[:, None]
        i_idx = np.arange(code.n)[None, :]
        self._chien_exp = (-(b * i_idx * k_idx)) % order
        self._exp = self.F.exp[:order]

    def syndromes(self, s: int) -> list[int]:
        """S_1..S_2t from the remainder-form syndrome bits."""
        F, b = self.F, self.params.beta_log
        pos = support(s)
        out = [0] * (2 * self.t + 1)
        for j in range(1, 2 * self.t + 1):
            if j % 2 == 0:
                out[j] = F.mul(out[j // 2], out[j // 2])
                continue
            acc = 0
            for i in pos:
                acc ^= F.alpha_pow(b * i * j)
            out[j] = acc
        return out[1:]

    def locator(self, S: list[int]) -> list[int]:
        """Berlekamp-Massey: connection polynomial coefficients, lowest first."""
        F = self.F
        C = [1]
        B = [1]
        L = 0
        m = 1
        bcoef = 1
        for r in range(len(S)):
            d = S[r]
            for i in range(1, L + 1):
                if i < len(C):
                    d ^= F.mul(C[i], S[r - i])
            if d == 0:
                m += 1
                continue
            coef = F.div(d, bcoef)
            T = list(C)
            shifted = [0] * m + [F.mul(coef, x) for x in B]
            if len(shifted) > len(C):
                C = C + [0] * (len(shifted) - len(C))
            for i, v in enumerate(shifted):
                C[i] ^= v
            if 2 * L <= r:
                L = r + 1 - L
                B = T
                bcoef = d
                m = 1
            else:
                m += 1
        while len(C) > 1 and C[-1] == 0:
            C.pop()
        return C

    def chien(self, C: list[int]) -> list[int]:
        """Positions ``i`` with ``C(beta^{-i}) = 0``."""
        deg = len(C) - 1
        if deg > self.t:
            return []
        logs = np.array([self.F._log[c] if c else -1 for c in C], dtype=np.int64)
        acc = np.zeros(self.code.n, dtype=np.int64)
        order = self.F.order
        for kk in range(deg + 1):
            if logs[kk] < 0:
                continue
            acc ^= self._exp[(logs[kk] + self._chien_exp[kk]) % order]
        return np.flatnonzero(acc == 0).tolist()

    def decode(self, s: int) -> DecodeOutcome:
        if s == 0:
            return DecodeOutcome(0, DecodeStatus.CORRECTED)
        S = self.syndromes(s)
        C = self.locator(S)
        deg = len(C) - 1
        if deg == 0 or deg > self.t:
            return UNCORRECTABLE
        roots = self.chien(C)
        if len(roots) != deg:
            return UNCORRECTABLE
        est = 0
        for i in roots:
            est |= 1 << i
        if self.code.syndrome(est) != s:
            return UNCORRECTABLE
        return DecodeOutcome(est, DecodeStatus.CORRECTED)


@functools.lru_cache(maxsize=None)
def _bch_decoder(code: LinearCode) -> BchDecoder:
    return BchDecoder(code)


def decode_bch_bm(code: LinearCode, s: int) -> DecodeOutcome:
    if s >> code.r:
        raise Gf2Error(f"syndrome longer than {code.r} bits")
    return _bch_decoder(code).decode(s)


def decoder_for(code: LinearCode):
    """Bounded-distance decoder callable ``s -> DecodeOutcome`` for a named code."""
    if code.params() == (23, 12, 7):
        dec = KasamiDecoder(code)
        return dec.decode
    return BchDecoder(code).decode


def random_error(n: int, weight: int, rng: np.random.Generator) -> int:
    pos = rng.choice(n, size=weight, replace=False)
    out = 0
    for p in pos.tolist():
        out |= 1 << p
    return out


__all__ = [
    "BchDecoder",
    "BchParams",
    "BudgetExceeded",
    "DecodeOutcome",
    "DecodeStatus",
    "DistanceResult",
    "KasamiDecoder",
    "LinearCode",
    "bch89",
    "bch127",
    "bch255",
    "brute_force_decode",
    "check_matrix_from_check_poly",
    "codeword_weights",
    "cyclic_code",
    "decode_bch_bm",
    "decode_golay_kasami",
    "decoder_for",
    "even_weight",
    "golay23",
    "hamming",
    "min_distance",
    "poly_mul",
    "random_error",
    "rank",
    "repetition",
    "selfdual_containment",
    "syndrome_table",
]
