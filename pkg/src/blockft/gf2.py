"""Exact arithmetic over GF(2), GF(2)[X] and GF(2^m).

Bit-vectors are plain Python integers: bit ``i`` is coordinate ``i``. Integers
are arbitrary-precision word arrays, so every XOR/AND below is a word-wise
kernel and no separate packing layer is needed.
"""

from __future__ import annotations

import functools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np


class Gf2Error(ValueError):
    """Raised for malformed GF(2) objects or impossible operations."""


def popcount(v: int) -> int:
    return bin(v).count("1")


def parity(v: int) -> int:
    return popcount(v) & 1


def bits_to_int(bits: Iterable[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b & 1:
            out |= 1 << i
    return out


def int_to_bits(v: int, n: int) -> list[int]:
    return [(v >> i) & 1 for i in range(n)]


def int_to_array(v: int, n: int) -> np.ndarray:
    return np.array(int_to_bits(v, n), dtype=np.uint8)


def array_to_int(a: np.ndarray) -> int:
    return bits_to_int(int(b) for b in np.asarray(a).ravel())


def support(v: int) -> list[int]:
    out = []
    i = 0
    while v:
        if v & 1:
            out.append(i)
        v >>= 1
        i += 1
    return out


def rotate(v: int, shift: int, n: int) -> int:
    """Cyclic shift ``v(x) -> x^shift v(x) mod (x^n + 1)``."""
    shift %= n
    mask = (1 << n) - 1
    return ((v << shift) | (v >> (n - shift))) & mask


# --------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Gf2Poly:
    """Polynomial over GF(2); bit ``i`` of ``bits`` is the coefficient of X^i."""

    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0:
            raise Gf2Error("polynomial coefficients must be a nonnegative bit mask")

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> Gf2Poly:
        v = 0
        for e in exponents:
            v ^= 1 << e
        return cls(v)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[int]) -> Gf2Poly:
        """Build from a coefficient list, lowest degree first."""
        return cls(bits_to_int(coefficients))

    @classmethod
    def from_hex(cls, text: str) -> Gf2Poly:
        return cls(int(text, 16))

    def hex(self) -> str:
        return format(self.bits, "x")

    @property
    def degree(self) -> int:
        """Degree, with -1 as the sentinel for the zero polynomial."""
        return self.bits.bit_length() - 1

    @property
    def coefficients(self) -> list[int]:
        return int_to_bits(self.bits, max(self.degree + 1, 1))

    def exponents(self) -> list[int]:
        return support(self.bits)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(poly_mul(self.bits, other.bits))

    def __divmod__(self, other: Gf2Poly) -> tuple[Gf2Poly, Gf2Poly]:
        q, r = poly_divmod(self.bits, other.bits)
        return Gf2Poly(q), Gf2Poly(r)

    def __floordiv__(self, other: Gf2Poly) -> Gf2Poly:
        return divmod(self, other)[0]

    def __mod__(self, other: Gf2Poly) -> Gf2Poly:
        return divmod(self, other)[1]

    def __str__(self) -> str:
        if self.bits == 0:
            return "0"
        terms = []
        for e in reversed(self.exponents()):
            terms.append("1" if e == 0 else ("X" if e == 1 else f"X^{e}"))
        return "+".join(terms)


def poly_mul(a: int, b: int) -> int:
    """Carry-less product of two bit-mask polynomials."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    out = 0
    shift = 0
    while b:
        if b & 1:
            out ^= a << shift
        b >>= 1
        shift += 1
    return out


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        s = a.bit_length() - db
        a ^= b << s
        q |= 1 << s
    return q, a


def poly_mod(a: int, b: int) -> int:
    return poly_divmod(a, b)[1]


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


# --------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Gf2Matrix:
    """Immutable GF(2) matrix stored as a tuple of packed integer rows."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self) -> None:
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise Gf2Error(f"row {r:#x} does not fit in {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[int], ncols: int) -> Gf2Matrix:
        return cls(tuple(rows), ncols)

    @classmethod
    def from_array(cls, a: np.ndarray | Sequence[Sequence[int]]) -> Gf2Matrix:
        arr = np.asarray(a, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise Gf2Error("expected a 2-d array")
        return cls(tuple(array_to_int(r) for r in arr), arr.shape[1])

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> Gf2Matrix:
        """Rows as '0'/'1' strings, leftmost character is column 0."""
        ncols = len(lines[0])
        if any(len(s) != ncols for s in lines):
            raise Gf2Error("ragged rows")
        return cls(tuple(int(s[::-1], 2) for s in lines), ncols)

    @classmethod
    def identity(cls, n: int) -> Gf2Matrix:
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Gf2Matrix:
        return cls((0,) * nrows, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"index {idx} out of range for shape {self.shape}")
        return (self.rows[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i] = int_to_bits(r, self.ncols)
        return out

    def to_strings(self) -> list[str]:
        return ["".join(str((r >> j) & 1) for j in range(self.ncols)) for r in self.rows]

    def transpose(self) -> Gf2Matrix:
        cols = []
        for j in range(self.ncols):
            c = 0
            for i, r in enumerate(self.rows):
                if (r >> j) & 1:
                    c |= 1 << i
            cols.append(c)
        return Gf2Matrix(tuple(cols), self.nrows)

    @property
    def T(self) -> Gf2Matrix:
        return self.transpose()

    def mul_vec(self, v: int) -> int:
        """Matrix-vector product; bit ``i`` of the result is row ``i`` . v."""
        out = 0
        for i, r in enumerate(self.rows):
            if parity(r & v):
                out |= 1 << i
        return out

    def __matmul__(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.ncols != other.nrows:
            raise Gf2Error(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for r in self.rows:
            acc = 0
            j = 0
            while r:
                if r & 1:
                    acc ^= other.rows[j]
                r >>= 1
                j += 1
            out.append(acc)
        return Gf2Matrix(tuple(out), other.ncols)

    def vstack(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.ncols != other.ncols:
            raise Gf2Error("column mismatch in vstack")
        return Gf2Matrix(self.rows + other.rows, self.ncols)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def rank(self) -> int:
        return rank(self.rows)

    def row_space_contains(self, v: int) -> bool:
        basis = _echelon_basis(self.rows)
        return _reduce(v, basis) == 0

    def solve(self, b: int) -> int | None:
        return solve_gf2(self, b)

    def nullspace(self) -> list[int]:
        return nullspace(self.rows, self.ncols)


def _echelon_basis(rows: Iterable[int]) -> dict[int, int]:
    """Pivot (lowest set bit) -> row, fully reduced on pivots."""
    basis: dict[int, int] = {}
    for r in rows:
        r = _reduce(r, basis)
        if r:
            p = (r & -r).bit_length() - 1
            for k, v in basis.items():
                if (v >> p) & 1:
                    basis[k] = v ^ r
            basis[p] = r
    return basis


def _reduce(v: int, basis: dict[int, int]) -> int:
    for p, r in basis.items():
        if (v >> p) & 1:
            v ^= r
    return v


def rank(rows: Iterable[int]) -> int:
    return len(_echelon_basis(rows))


def independent_subset(rows: Iterable[int], base: Iterable[int] = ()) -> list[int]:
    """Indices of rows that extend span(base), scanning in order."""
    basis = _echelon_basis(base)
    keep = []
    for i, r in enumerate(rows):
        red = _reduce(r, basis)
        if red:
            keep.append(i)
            p = (red & -red).bit_length() - 1
            for k, v in basis.items():
                if (v >> p) & 1:
                    basis[k] = v ^ red
            basis[p] = red
    return keep


class _Eliminated:
    """Row-reduced form of ``A`` with the row operations recorded.

    ``combo[i]`` gives which original rows were summed to produce reduced
    row ``i``; pivots are chosen lowest column first.
    """

    def __init__(self, rows: Sequence[int], ncols: int) -> None:
        red = list(rows)
        combo = [1 << i for i in range(len(rows))]
        pivots: list[int] = []
        r = 0
        for col in range(ncols):
            bit = 1 << col
            piv = next((i for i in range(r, len(red)) if red[i] & bit), None)
            if piv is None:
                continue
            red[r], red[piv] = red[piv], red[r]
            combo[r], combo[piv] = combo[piv], combo[r]
            for i in range(len(red)):
                if i != r and red[i] & bit:
                    red[i] ^= red[r]
                    combo[i] ^= combo[r]
            pivots.append(col)
            r += 1
        self.red = red
        self.combo = combo
        self.pivots = pivots
        self.rank = r

    def solve(self, b: int) -> int | None:
        # The reduced system is E A x = E b; E b bit i = parity(combo[i] & b).
        x = 0
        for i, col in enumerate(self.pivots):
            if parity(self.combo[i] & b):
                x |= 1 << col
        for i in range(self.rank, len(self.red)):
            if parity(self.combo[i] & b):
                return None
        return x


def solve_gf2(A: Gf2Matrix, b: int) -> int | None:
    """Solve ``A x = b``; ``b`` bit ``i`` is the right-hand side of row ``i``.

    Returns the solution with every free variable set to zero under lowest-
    column-first pivoting, or ``None`` when the system is inconsistent.
    """
    if b >> A.nrows:
        raise Gf2Error("right-hand side longer than the number of rows")
    return _Eliminated(A.rows, A.ncols).solve(b)


def solve_many(A: Gf2Matrix, rhs: Sequence[int]) -> list[int | None]:
    """Same as :func:`solve_gf2` for several right-hand sides, one elimination."""
    elim = _Eliminated(A.rows, A.ncols)
    return [elim.solve(b) for b in rhs]


def nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    elim = _Eliminated(rows, ncols)
    piv = set(elim.pivots)
    out = []
    for free in range(ncols):
        if free in piv:
            continue
        v = 1 << free
        for i, col in enumerate(elim.pivots):
            if (elim.red[i] >> free) & 1:
                v |= 1 << col
        out.append(v)
    return out


# --------------------------------------------------------------------------
# symplectic vectors: (x, z) pairs of n-bit integers


def symplectic_inner(x1: int, z1: int, x2: int, z2: int) -> int:
    return parity((x1 & z2) ^ (z1 & x2))


def symplectic_gram(rows: Sequence[tuple[int, int]]) -> Gf2Matrix:
    out = []
    for x1, z1 in rows:
        r = 0
        for j, (x2, z2) in enumerate(rows):
            if symplectic_inner(x1, z1, x2, z2):
                r |= 1 << j
        out.append(r)
    return Gf2Matrix(tuple(out), len(rows))


def symplectic_complete(stabilizers: Sequence[tuple[int, int]], n: int) -> list[tuple[int, int]]:
    """Destabilizers for ``n`` independent commuting generators.

    Returns ``D`` with ``D_i . S_j = delta_ij`` and mutually commuting ``D``.
    """
    if len(stabilizers) != n:
        raise Gf2Error(f"need {n} generators, got {len(stabilizers)}")
    # Row j of the system matrix is S_j with x and z swapped, so that
    # A . (x | z << n) equals the symplectic products with each S_j.
    A = Gf2Matrix(tuple(z | (x << n) for x, z in stabilizers), 2 * n)
    sols = solve_many(A, [1 << i for i in range(n)])
    if any(s is None for s in sols):
        raise Gf2Error("generators are not independent")
    mask = (1 << n) - 1
    dest = [(s & mask, s >> n) for s in sols]  # type: ignore[operator]
    for j in range(n):
        xj, zj = dest[j]
        for i in range(j):
            xi, zi = dest[i]
            if symplectic_inner(xi, zi, xj, zj):
                sx, sz = stabilizers[i]
                xj ^= sx
                zj ^= sz
        dest[j] = (xj, zj)
    return dest


# --------------------------------------------------------------------------
# GF(2^m)

# A fixed primitive polynomial per extension degree (bit masks).
PRIMITIVE_POLYNOMIALS: dict[int, int] = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,  # X^7 + X^3 + 1
    8: 0b100011101,  # X^8 + X^4 + X^3 + X^2 + 1
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,  # X^11 + X^2 + 1
    12: 0b1000001010011,
}


class Gf2mField:
    """GF(2^m) with log/antilog tables; elements are ints < 2^m."""

    def __init__(self, m: int, primitive_poly: int | None = None) -> None:
        if primitive_poly is None:
            if m not in PRIMITIVE_POLYNOMIALS:
                raise Gf2Error(f"no default primitive polynomial for m={m}")
            primitive_poly = PRIMITIVE_POLYNOMIALS[m]
        if primitive_poly.bit_length() - 1 != m:
            raise Gf2Error("primitive polynomial has the wrong degree")
        self.m = m
        self.poly = Gf2Poly(primitive_poly)
        self.order = (1 << m) - 1
        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.full(1 << m, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            exp[i] = x
            if log[x] != -1:
                raise Gf2Error(f"{self.poly} is not primitive")
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= primitive_poly
        exp[self.order :] = exp[: self.order]
        self.exp = exp
        self.log = log
        self._exp = [int(v) for v in exp[: self.order]]
        self._log = [int(v) for v in log]

    def __repr__(self) -> str:
        return f"Gf2mField(m={self.m}, poly={self.poly})"

    def alpha_pow(self, e: int) -> int:
        return self._exp[e % self.order]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % self.order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        return self._exp[(-self._log[a]) % self.order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero has no inverse in GF(2^m)")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % self.order]

    def mul_slow(self, a: int, b: int) -> int:
        """Shift-and-add multiplication, independent of the tables."""
        return poly_mod(poly_mul(a, b), self.poly.bits)

    def eval_poly(self, poly: int, x: int) -> int:
        """Evaluate a GF(2)[X] polynomial at a field element."""
        if x == 0:
            return poly & 1
        lx = self._log[x]
        acc = 0
        for e in support(poly):
            acc ^= self._exp[(lx * e) % self.order]
        return acc


@functools.lru_cache(maxsize=None)
def field(m: int) -> Gf2mField:
    return Gf2mField(m)


def field_degree_for_length(n: int) -> int:
    """Smallest ``m`` with ``n | 2^m - 1``."""
    if n % 2 == 0:
        raise Gf2Error("cyclic code length must be odd")
    m = 1
    while ((1 << m) - 1) % n:
        m += 1
    return m
