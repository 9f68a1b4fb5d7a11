"""Pauli operators as paired X/Z bit-vectors with a sign.

Convention: ``PauliOperator(n, x, z, sign)`` denotes ``sign * sigma(x, z)`` where
``sigma`` is the tensor product of the Hermitian single-qubit Paulis, with
``Y = i X Z`` at each position where both bits are set.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .gf2 import Gf2Error, parity, popcount

_CHARS = "IXZY"  # indexed by x + 2z


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0
    sign: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise Gf2Error("sign must be +1 or -1")
        if (self.x | self.z) >> self.n:
            raise Gf2Error(f"bit-vector exceeds {self.n} qubits")

    # construction ---------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        """Parse e.g. ``"-XIZY"``; character ``i`` acts on qubit ``i``."""
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        x = z = 0
        for i, c in enumerate(text.upper()):
            if c in "XY":
                x |= 1 << i
            if c in "ZY":
                z |= 1 << i
            if c not in "IXYZ_":
                raise Gf2Error(f"bad Pauli character {c!r}")
        return cls(len(text), x, z, sign)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> PauliOperator:
        kind = kind.upper()
        b = 1 << qubit
        return cls(n, b if kind in "XY" else 0, b if kind in "ZY" else 0)

    @classmethod
    def x_type(cls, n: int, bits: int) -> PauliOperator:
        return cls(n, bits, 0)

    @classmethod
    def z_type(cls, n: int, bits: int) -> PauliOperator:
        return cls(n, 0, bits)

    # queries --------------------------------------------------------------
    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def support(self) -> int:
        return self.x | self.z

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def commutes(self, other: PauliOperator) -> bool:
        return symplectic_product(self, other) == 0

    def unsigned(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z)

    def __neg__(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, -self.sign)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        """Product; the factor ``i`` of anticommuting pairs is dropped."""
        e = product_phase(self, other)
        sign = self.sign * other.sign * (-1 if e in (2, 3) else 1)
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, sign)

    def __str__(self) -> str:
        body = "".join(_CHARS[((self.x >> i) & 1) | (((self.z >> i) & 1) << 1)] for i in range(self.n))
        return ("-" if self.sign < 0 else "+") + body

    def to_hex(self) -> str:
        return f"{'-' if self.sign < 0 else '+'}{self.x:x}:{self.z:x}"

    @classmethod
    def from_hex(cls, n: int, text: str) -> PauliOperator:
        sign = -1 if text[0] == "-" else 1
        xs, zs = text.lstrip("+-").split(":")
        return cls(n, int(xs, 16), int(zs, 16), sign)

    def restrict(self, qubits: Iterable[int]) -> PauliOperator:
        qs = list(qubits)
        x = z = 0
        for j, q in enumerate(qs):
            x |= ((self.x >> q) & 1) << j
            z |= ((self.z >> q) & 1) << j
        return PauliOperator(len(qs), x, z, self.sign)

    def embed(self, n: int, qubits: Iterable[int]) -> PauliOperator:
        """Place this operator on the listed qubits of an ``n``-qubit register."""
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> j) & 1) << q
            z |= ((self.z >> j) & 1) << q
        return PauliOperator(n, x, z, self.sign)

    def tensor(self, other: PauliOperator) -> PauliOperator:
        return PauliOperator(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.sign * other.sign,
        )


def product_phase(a: PauliOperator, b: PauliOperator) -> int:
    """Exponent ``e`` with ``sigma(a) sigma(b) = i^e sigma(a+b)`` (signs excluded)."""
    if a.n != b.n:
        raise Gf2Error(f"length mismatch {a.n} vs {b.n}")
    return product_phase_bits(a.x, a.z, b.x, b.z)


def product_phase_bits(x1: int, z1: int, x2: int, z2: int) -> int:
    # sigma(x,z) = i^{|x&z|} X^x Z^z; moving Z^{z1} past X^{x2} gives (-1)^{|z1&x2|}.
    return (popcount(x1 & z1) + popcount(x2 & z2) + 2 * popcount(z1 & x2) - popcount((x1 ^ x2) & (z1 ^ z2))) % 4


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    if a.n != b.n:
        raise Gf2Error(f"length mismatch {a.n} vs {b.n}")
    return parity((a.x & b.z) ^ (a.z & b.x))


def pauli_product(ops: Iterable[PauliOperator], n: int) -> PauliOperator:
    out = PauliOperator(n)
    for op in ops:
        out = out * op
    return out
