"""The [[15,1,3]] shortened Reed-Muller code and its concatenations."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .css import ConcatSpec, CssCode, check_code, css_code, identity_code
from .gf2 import Gf2Error


def rm14_vectors() -> list[int]:
    """v_0..v_4 of RM(1,4) as 16-bit masks; bit p of v_j (j>=1) is bit j-1 of p."""
    out = [(1 << 16) - 1]
    for j in range(1, 5):
        out.append(sum(1 << p for p in range(16) if (p >> (j - 1)) & 1))
    return out


def shorten(v: int) -> int:
    """Delete the first coordinate."""
    return v >> 1


def _span(rows: list[int]) -> list[int]:
    out = [0]
    for r in rows:
        out += [v ^ r for v in out]
    return out


@dataclass(frozen=True, eq=False)
class Rm15Code:
    code: CssCode
    c_prime: tuple[int, ...]  # generators v_0'..v_4'
    c0_prime: tuple[int, ...]  # generators v_1'..v_4'

    def c0_codewords(self) -> list[int]:
        return _span(list(self.c0_prime))

    def c0_coset_codewords(self) -> list[int]:
        v0 = self.c_prime[0]
        return [u ^ v0 for u in self.c0_codewords()]


def build_rm15() -> Rm15Code:
    v = rm14_vectors()
    vs = [shorten(x) for x in v]
    singles = [vs[4], vs[3], vs[2], vs[1]]
    # pairwise products in the order v3v4, v2v4, v1v4, v2v3, v1v3, v1v2
    pairs = [(3, 4), (2, 4), (1, 4), (2, 3), (1, 3), (1, 2)]
    products = [shorten(v[a] & v[b]) for a, b in pairs]
    full = (1 << 15) - 1
    code = css_code(
        singles,
        singles + products,
        15,
        d=3,
        logical_z_candidates=[full],
        logical_x=[full],
        name="rm15",
        d_x=7,
        d_z=3,
    )
    check_code(code)
    return Rm15Code(code, tuple(vs), tuple(vs[1:]))


def stabilizer_strings(code: CssCode) -> tuple[list[str], list[str]]:
    """Generators as 0/1 strings, character i = qubit i (X-type, Z-type)."""
    fmt = lambda r: "".join(str((r >> i) & 1) for i in range(code.n))  # noqa: E731
    return [fmt(r) for r in code.hx], [fmt(r) for r in code.hz]


@dataclass(frozen=True)
class PhaseReport:
    phase0: complex
    phase1: complex
    expected1: complex
    max_deviation: float  # largest |T†|x> - phase |x>| amplitude error over both x
    superposition_error: float

    @property
    def ok(self) -> bool:
        return (
            abs(self.phase0 - 1) < 1e-10
            and abs(self.phase1 - self.expected1) < 1e-10
            and self.max_deviation < 1e-10
            and self.superposition_error < 1e-10
        )


def logical_basis_states(rm: Rm15Code) -> tuple[np.ndarray, np.ndarray]:
    """|0>_L and |1>_L as normalized 2^15 state vectors (bit q of the index = qubit q)."""
    dim = 1 << 15
    states = []
    for words in (rm.c0_codewords(), rm.c0_coset_codewords()):
        psi = np.zeros(dim, dtype=complex)
        psi[words] = 1.0
        states.append(psi / np.linalg.norm(psi))
    return states[0], states[1]


def _weights(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.int64)).astype(np.int64)


def transversal_tdag(psi: np.ndarray, n: int) -> np.ndarray:
    """Apply T† on every qubit: basis state |v> picks up e^{-i pi wt(v)/4}."""
    return psi * np.exp(-1j * np.pi * _weights(n) / 4)


def verify_transversal_t(rm: Rm15Code | None = None) -> PhaseReport:
    rm = rm or build_rm15()
    zero, one = logical_basis_states(rm)
    out0 = transversal_tdag(zero, 15)
    out1 = transversal_tdag(one, 15)
    ph0 = complex(np.vdot(zero, out0))
    ph1 = complex(np.vdot(one, out1))
    dev = max(float(np.abs(out0 - ph0 * zero).max()), float(np.abs(out1 - ph1 * one).max()))
    expected1 = cmath.exp(-7j * math.pi / 4)
    plus = (zero + one) / math.sqrt(2)
    target = (zero + expected1 * one) / math.sqrt(2)
    sup = float(np.abs(transversal_tdag(plus, 15) - target).max())
    return PhaseReport(ph0, ph1, expected1, dev, sup)


def rm_concat(levels: int) -> ConcatSpec:
    """[[15^l, 1, 3^l]] with X-distance 7^l; level 0 is the bare qubit."""
    if levels not in (0, 1, 2, 3):
        raise Gf2Error(f"unsupported concatenation depth {levels}")
    if levels == 0:
        return ConcatSpec((identity_code(),), "rm15x0")
    code = build_rm15().code
    return ConcatSpec((code,) * levels, f"rm15x{levels}" if levels > 1 else "rm15")
