"""CSS codes: logical operators, symplectic partners, encoding matrix.

A code is described by X-type generators (rows of ``hx``) and Z-type
generators (rows of ``hz``), both as integer bit masks over ``n`` qubits.
Ordering everywhere is X-type generators first, then Z-type.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .classical import LinearCode, selfdual_containment
from .gf2 import (
    Gf2Error,
    Gf2Matrix,
    independent_subset,
    nullspace,
    parity,
    popcount,
    rank,
    solve_many,
    support,
)
from .pauli import PauliOperator


@dataclass(frozen=True)
class LogicalAction:
    """A k-qubit Pauli label: ``x`` and ``z`` are k-bit vectors."""

    k: int
    x: int = 0
    z: int = 0

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __mul__(self, other: LogicalAction) -> LogicalAction:
        return LogicalAction(self.k, self.x ^ other.x, self.z ^ other.z)

    def __str__(self) -> str:
        return "".join("IXZY"[((self.x >> i) & 1) | (((self.z >> i) & 1) << 1)] for i in range(self.k))

    @property
    def symbol(self) -> int:
        """For k=1: 0=I, 1=X, 2=Y, 3=Z."""
        return {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}[(self.x & 1, self.z & 1)]


@dataclass(frozen=True, eq=False)
class CssCode:
    n: int
    k: int
    d: int
    hx: tuple[int, ...]
    hz: tuple[int, ...]
    logical_x_bits: tuple[int, ...]
    logical_z_bits: tuple[int, ...]
    # partners of the X-type generators are Z-type vectors; partners of the
    # Z-type generators are X-type vectors
    partner_z_bits: tuple[int, ...]
    partner_x_bits: tuple[int, ...]
    name: str = ""
    d_x: int | None = None
    d_z: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"CssCode{label}[[{self.n},{self.k},{self.d}]]"

    def params(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.d)

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def rx(self) -> int:
        return len(self.hx)

    @property
    def rz(self) -> int:
        return len(self.hz)

    # operator views ---------------------------------------------------
    @property
    def stabilizers(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, v, 0) for v in self.hx] + [PauliOperator(self.n, 0, v) for v in self.hz]

    @property
    def logical_x(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, v, 0) for v in self.logical_x_bits]

    @property
    def logical_z(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, 0, v) for v in self.logical_z_bits]

    @property
    def partners(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, 0, v) for v in self.partner_z_bits] + [
            PauliOperator(self.n, v, 0) for v in self.partner_x_bits
        ]

    @property
    def encoding_matrix(self) -> Gf2Matrix:
        if "C" not in self._cache:
            self._cache["C"] = build_encoding_matrix(self)
        return self._cache["C"]

    # syndromes and decomposition -------------------------------------
    def syndrome(self, e: PauliOperator) -> int:
        """Bit ``i`` set when ``e`` anticommutes with stabilizer ``i``."""
        return self.syndrome_bits(e.x, e.z)

    def syndrome_bits(self, ex: int, ez: int) -> int:
        s = 0
        for i, v in enumerate(self.hx):
            if parity(v & ez):
                s |= 1 << i
        off = self.rx
        for i, v in enumerate(self.hz):
            if parity(v & ex):
                s |= 1 << (off + i)
        return s

    def split_syndrome(self, s: int) -> tuple[int, int]:
        """(X-generator part, Z-generator part)."""
        return s & ((1 << self.rx) - 1), s >> self.rx

    def pure_error(self, s: int) -> PauliOperator:
        if s >> self.r:
            raise Gf2Error(f"syndrome longer than {self.r} bits")
        sx, sz = self.split_syndrome(s)
        z = 0
        for i in support(sx):
            z ^= self.partner_z_bits[i]
        x = 0
        for i in support(sz):
            x ^= self.partner_x_bits[i]
        return PauliOperator(self.n, x, z)

    def logical_action(self, e: PauliOperator) -> LogicalAction:
        return self.logical_action_bits(e.x, e.z)

    def logical_action_bits(self, ex: int, ez: int) -> LogicalAction:
        # partners commute with every logical operator, so the pure-error
        # part never contributes and need not be stripped first
        a = 0
        b = 0
        for i in range(self.k):
            if parity(ex & self.logical_z_bits[i]):
                a |= 1 << i
            if parity(ez & self.logical_x_bits[i]):
                b |= 1 << i
        return LogicalAction(self.k, a, b)

    def in_stabilizer_group(self, e: PauliOperator) -> bool:
        return _in_span(e.x, self.hx) and _in_span(e.z, self.hz)

    def logical_operator(self, label: LogicalAction) -> PauliOperator:
        """Physical representative of the Hermitian logical Pauli ``label``.

        Built as i^{|a&b|} prod X̄^a Z̄^b, which is Hermitian with a real sign.
        """
        x = z = 0
        for i in support(label.x):
            x ^= self.logical_x_bits[i]
        for i in support(label.z):
            z ^= self.logical_z_bits[i]
        # X^x Z^z = i^{-|x&z|} sigma(x, z)
        e = (popcount(label.x & label.z) - popcount(x & z)) % 4
        if e % 2:
            raise Gf2Error("non-Hermitian logical representative")
        return PauliOperator(self.n, x, z, -1 if e == 2 else 1)

    # serialization ----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"css n={self.n} k={self.k} d={self.d} name={self.name or '-'}"]
        for tag, vals in (
            ("hx", self.hx),
            ("hz", self.hz),
            ("lx", self.logical_x_bits),
            ("lz", self.logical_z_bits),
            ("tz", self.partner_z_bits),
            ("tx", self.partner_x_bits),
        ):
            for v in vals:
                lines.append(f"{tag} {v:x}")
        if self.d_x is not None:
            lines.append(f"dx {self.d_x}")
        if self.d_z is not None:
            lines.append(f"dz {self.d_z}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> CssCode:
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        head = dict(item.split("=", 1) for item in lines[0][1:])
        groups: dict[str, list[int]] = {t: [] for t in ("hx", "hz", "lx", "lz", "tz", "tx")}
        dx = dz = None
        for tag, val in lines[1:]:
            if tag == "dx":
                dx = int(val)
            elif tag == "dz":
                dz = int(val)
            else:
                groups[tag].append(int(val, 16))
        code = cls(
            int(head["n"]),
            int(head["k"]),
            int(head["d"]),
            tuple(groups["hx"]),
            tuple(groups["hz"]),
            tuple(groups["lx"]),
            tuple(groups["lz"]),
            tuple(groups["tz"]),
            tuple(groups["tx"]),
            "" if head["name"] == "-" else head["name"],
            dx,
            dz,
        )
        check_code(code)
        return code


def _in_span(v: int, rows: Sequence[int]) -> bool:
    return rank(list(rows) + [v]) == rank(rows)


# --------------------------------------------------------------------------
# construction


def css_code(
    hx: Sequence[int],
    hz: Sequence[int],
    n: int,
    d: int | None = None,
    logical_z_candidates: Sequence[int] | None = None,
    name: str = "",
    d_x: int | None = None,
    d_z: int | None = None,
    logical_x: Sequence[int] | None = None,
) -> CssCode:
    """General CSS code; ``logical_x`` fixes X̄ instead of solving for it."""
    hx = tuple(hx)
    hz = tuple(hz)
    if rank(hx) != len(hx) or rank(hz) != len(hz):
        raise Gf2Error("stabilizer generators must be independent")
    for a in hx:
        for b in hz:
            if parity(a & b):
                raise Gf2Error("X-type and Z-type generators do not commute")
    k = n - len(hx) - len(hz)
    lz = logical_z_from_candidates(hx, hz, n, k, logical_z_candidates)
    lx = list(logical_x) if logical_x is not None else solve_logical_x(hz, lz, n)
    tz, tx = solve_partners(hx, hz, lx, lz, n)
    if d is None:
        if d_x is not None and d_z is not None:
            d = min(d_x, d_z)
        else:
            d = 0
    return CssCode(n, k, d, hx, hz, tuple(lx), tuple(lz), tuple(tz), tuple(tx), name, d_x, d_z)


def css_from_selfdual(C: LinearCode, name: str = "") -> CssCode:
    """[[n, 2k-n]] code with both generator types taken from the rows of H."""
    if not selfdual_containment(C):
        raise Gf2Error(f"{C} does not contain its dual")
    cands = None
    if C.generator_poly is not None:
        g = C.generator_poly.bits
        cands = [g << i for i in range(C.k)]
    rows = C.H.rows
    return css_code(rows, rows, C.n, d=C.claimed_d, logical_z_candidates=cands, name=name or C.name)


def logical_z_from_shifts(code: CssCode, C: LinearCode) -> list[PauliOperator]:
    """Z-type logicals chosen from the shifts of the generator polynomial."""
    if C.generator_poly is None:
        raise Gf2Error("cyclic code required")
    g = C.generator_poly.bits
    bits = logical_z_from_candidates(code.hx, code.hz, code.n, code.k, [g << i for i in range(C.k)])
    return [PauliOperator(code.n, 0, v) for v in bits]


def logical_z_from_candidates(
    hx: Sequence[int], hz: Sequence[int], n: int, k: int, candidates: Sequence[int] | None
) -> list[int]:
    if k == 0:
        return []
    kernel = nullspace(list(hx), n)
    pool = list(candidates) if candidates is not None else []
    pool += kernel
    pool = [v for v in pool if all(parity(v & s) == 0 for s in hx)]
    idx = independent_subset(pool, base=hz)
    if len(idx) < k:
        raise Gf2Error("could not find enough independent logical Z operators")
    return [pool[i] for i in idx[:k]]


def solve_logical_x(hz: Sequence[int], lz: Sequence[int], n: int) -> list[int]:
    """X-type X̄_i: commutes with Z-generators and Z̄_j (j != i), anticommutes with Z̄_i."""
    k = len(lz)
    if k == 0:
        return []
    A = Gf2Matrix(tuple(hz) + tuple(lz), n)
    off = len(hz)
    sols = solve_many(A, [1 << (off + i) for i in range(k)])
    if any(s is None for s in sols):
        raise Gf2Error("logical X system is unsolvable")
    return list(sols)  # type: ignore[arg-type]


def solve_partners(
    hx: Sequence[int], hz: Sequence[int], lx: Sequence[int], lz: Sequence[int], n: int
) -> tuple[list[int], list[int]]:
    """Pure-error generators ``T`` with ``T_i ⊙ S_j = δ_ij`` commuting with all logicals.

    Partners of X-type generators are sought among Z-type vectors and vice
    versa; a final pass multiplies X-type partners by X-type generators so
    the whole set of partners commutes.
    """
    Ax = Gf2Matrix(tuple(hx) + tuple(lx), n)
    tz = solve_many(Ax, [1 << i for i in range(len(hx))])
    Az = Gf2Matrix(tuple(hz) + tuple(lz), n)
    tx = solve_many(Az, [1 << i for i in range(len(hz))])
    if any(s is None for s in tz) or any(s is None for s in tx):
        raise Gf2Error("partner system is unsolvable")
    tz_l: list[int] = list(tz)  # type: ignore[arg-type]
    tx_l: list[int] = list(tx)  # type: ignore[arg-type]
    for b in range(len(tx_l)):
        v = tx_l[b]
        for a in range(len(tz_l)):
            if parity(tz_l[a] & v):
                v ^= hx[a]
        tx_l[b] = v
    return tz_l, tx_l


def stabilizer_group_bits(rows: Sequence[int]) -> np.ndarray:
    """All 2^r elements of the span, Gray-code order, as Python ints in an object array."""
    out = [0] * (1 << len(rows))
    v = 0
    for i in range(1, len(out)):
        v ^= rows[(i & -i).bit_length() - 1]
        out[i] = v
    return np.array(out, dtype=object)


# --------------------------------------------------------------------------
# encoding matrix and checks


def _pauli_row(n: int, x: int, z: int) -> int:
    """Row in the column order X_n..X_1, Z_n..Z_1 (qubit n-1 first)."""
    row = 0
    for q in range(n):
        c = n - 1 - q
        if (x >> q) & 1:
            row |= 1 << c
        if (z >> q) & 1:
            row |= 1 << (n + c)
    return row


def symplectic_form(n: int) -> Gf2Matrix:
    return Gf2Matrix(tuple(1 << ((i + n) % (2 * n)) for i in range(2 * n)), 2 * n)


def build_encoding_matrix(code: CssCode) -> Gf2Matrix:
    """Rows: partners, logical X, stabilizers, logical Z."""
    n = code.n
    ops = code.partners + code.logical_x + code.stabilizers + code.logical_z
    C = Gf2Matrix(tuple(_pauli_row(n, p.x, p.z) for p in ops), 2 * n)
    if (C @ symplectic_form(n) @ C.T) != symplectic_form(n):
        raise Gf2Error("operator set is not symplectic")
    return C


def check_code(code: CssCode) -> dict[str, bool]:
    """Evaluate every structural invariant, raising on the first failure."""
    n = code.n
    S = code.stabilizers
    report = {}
    report["stabilizers_commute"] = all(a.commutes(b) for a in S for b in S)
    L = code.logical_x + code.logical_z
    report["logicals_commute_with_stabilizers"] = all(l.commutes(s) for l in L for s in S)
    LX, LZ = code.logical_x, code.logical_z
    report["logical_pairs"] = all(
        (not LX[i].commutes(LZ[j])) == (i == j) for i in range(code.k) for j in range(code.k)
    )
    T = code.partners
    report["partners"] = all((not T[i].commutes(S[j])) == (i == j) for i in range(len(T)) for j in range(len(S)))
    C = Gf2Matrix(
        tuple(_pauli_row(n, p.x, p.z) for p in T + LX + S + LZ),
        2 * n,
    )
    report["symplectic"] = (C @ symplectic_form(n) @ C.T) == symplectic_form(n)
    report["rank"] = C.rank() == 2 * n
    bad = [k for k, v in report.items() if not v]
    if bad:
        raise Gf2Error(f"{code} fails invariants: {bad}")
    return report


def css_distances(code: CssCode, max_dim: int = 20) -> tuple[int, int]:
    """(d_x, d_z): smallest weight of an X-type (Z-type) nontrivial logical.

    Exhaustive over ker(hz) and ker(hx); raises when either kernel exceeds
    2^max_dim elements.
    """
    out = []
    for checks, stabs in ((code.hz, code.hx), (code.hx, code.hz)):
        kern = nullspace(list(checks), code.n)
        if len(kern) > max_dim:
            raise Gf2Error(f"kernel dimension {len(kern)} exceeds budget {max_dim}")
        base = rank(stabs)
        best = code.n + 1
        v = 0
        for i in range(1, 1 << len(kern)):
            v ^= kern[(i & -i).bit_length() - 1]
            w = popcount(v)
            if w < best and rank(list(stabs) + [v]) > base:
                best = w
        out.append(best)
    return out[0], out[1]


# --------------------------------------------------------------------------
# concatenation


@dataclass(frozen=True, eq=False)
class ConcatSpec:
    """Uniform concatenation tree; ``levels[0]`` is the top code.

    Physical qubit ``q`` is addressed most-significant digit first: at level
    ``l`` the block index is ``q // N_l`` where ``N_l = prod(n_j for j > l)``,
    so bottom-level blocks are contiguous ranges of ``n_bottom`` qubits.
    """

    levels: tuple[CssCode, ...]
    name: str = ""

    def __post_init__(self) -> None:
        for c in self.levels[1:]:
            if c.k != 1:
                raise Gf2Error("every code below the top level must encode one qubit")

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def n(self) -> int:
        return math.prod(c.n for c in self.levels)

    @property
    def k(self) -> int:
        return self.levels[0].k if self.levels else 1

    @property
    def d(self) -> int:
        return math.prod(c.d for c in self.levels)

    @property
    def d_x(self) -> int:
        return math.prod(c.d_x if c.d_x is not None else c.d for c in self.levels)

    @property
    def d_z(self) -> int:
        return math.prod(c.d_z if c.d_z is not None else c.d for c in self.levels)

    def params(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.d)

    def blocks(self, level: int) -> int:
        """Number of code blocks at ``level`` (0 = top)."""
        return math.prod(c.n for c in self.levels[:level])

    def block_size(self, level: int) -> int:
        """Physical qubits under one block at ``level``."""
        return math.prod(c.n for c in self.levels[level:])

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"ConcatSpec{label}[[{self.n},{self.k},{self.d}]]"


def concatenate(outer: CssCode | ConcatSpec, inner: CssCode | ConcatSpec, name: str = "") -> ConcatSpec:
    lo = outer.levels if isinstance(outer, ConcatSpec) else (outer,)
    li = inner.levels if isinstance(inner, ConcatSpec) else (inner,)
    if li and li[0].k != 1:
        raise Gf2Error("the lower code must encode a single qubit")
    return ConcatSpec(lo + li, name)


def identity_code() -> CssCode:
    """The trivial [[1,1,1]] code."""
    return CssCode(1, 1, 1, (), (), (1,), (1,), (), (), "identity", 1, 1)
