"""Stabilizer tableau with destabilizers (Aaronson-Gottesman style).

Rows are Python-int bit masks over the qubits: rows ``0..N-1`` are
destabilizers, ``N..2N-1`` stabilizers. Signs of destabilizers are not
meaningful and only kept for shape.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .gf2 import Gf2Error, parity, popcount, symplectic_complete
from .pauli import PauliOperator, product_phase_bits


class MeasurementConflict(RuntimeError):
    """A forced outcome contradicts a deterministic measurement."""


class Tableau:
    def __init__(self, n: int) -> None:
        """The all-|0> state on ``n`` qubits."""
        self.n = n
        self.x = [1 << i for i in range(n)] + [0] * n
        self.z = [0] * n + [1 << i for i in range(n)]
        self.s = [0] * (2 * n)  # 0 for +, 1 for -

    # construction ---------------------------------------------------------
    def copy(self) -> Tableau:
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.x = list(self.x)
        t.z = list(self.z)
        t.s = list(self.s)
        return t

    @classmethod
    def from_stabilizers(cls, stabs: Sequence[PauliOperator]) -> Tableau:
        n = stabs[0].n
        if len(stabs) != n:
            raise Gf2Error(f"need {n} stabilizers, got {len(stabs)}")
        for a in stabs:
            for b in stabs:
                if not a.commutes(b):
                    raise Gf2Error("stabilizers must commute")
        dest = symplectic_complete([(p.x, p.z) for p in stabs], n)
        t = cls.__new__(cls)
        t.n = n
        t.x = [d[0] for d in dest] + [p.x for p in stabs]
        t.z = [d[1] for d in dest] + [p.z for p in stabs]
        t.s = [0] * n + [1 if p.sign < 0 else 0 for p in stabs]
        return t

    def tensor(self, other: Tableau) -> Tableau:
        n, m = self.n, other.n
        t = Tableau.__new__(Tableau)
        t.n = n + m
        t.x = self.x[:n] + [v << n for v in other.x[:m]] + self.x[n:] + [v << n for v in other.x[m:]]
        t.z = self.z[:n] + [v << n for v in other.z[:m]] + self.z[n:] + [v << n for v in other.z[m:]]
        t.s = self.s[:n] + other.s[:m] + self.s[n:] + other.s[m:]
        return t

    def permute(self, perm: Sequence[int]) -> Tableau:
        """Relabel qubits in place: old qubit ``q`` becomes qubit ``perm[q]``."""
        if sorted(perm) != list(range(self.n)):
            raise Gf2Error("not a permutation")

        def mv(v: int) -> int:
            out = 0
            q = 0
            while v:
                if v & 1:
                    out |= 1 << perm[q]
                v >>= 1
                q += 1
            return out

        self.x = [mv(v) for v in self.x]
        self.z = [mv(v) for v in self.z]
        return self

    # views -------------------------------------------------------------
    def stabilizers(self) -> list[PauliOperator]:
        n = self.n
        return [PauliOperator(n, self.x[i], self.z[i], -1 if self.s[i] else 1) for i in range(n, 2 * n)]

    def destabilizers(self) -> list[PauliOperator]:
        n = self.n
        return [PauliOperator(n, self.x[i], self.z[i]) for i in range(n)]

    def check(self) -> None:
        n = self.n
        for i in range(2 * n):
            for j in range(2 * n):
                sp = parity((self.x[i] & self.z[j]) ^ (self.z[i] & self.x[j]))
                want = 1 if abs(i - j) == n else 0
                if sp != want:
                    raise Gf2Error(f"tableau rows {i},{j} have symplectic product {sp}")

    # gates -------------------------------------------------------------
    def _q(self, q: int) -> int:
        if not 0 <= q < self.n:
            raise IndexError(f"qubit {q} out of range for {self.n} qubits")
        return 1 << q

    def h(self, q: int) -> Tableau:
        b = self._q(q)
        x, z, s = self.x, self.z, self.s
        for i in range(2 * self.n):
            xi, zi = x[i] & b, z[i] & b
            if xi and zi:
                s[i] ^= 1
            if bool(xi) != bool(zi):
                x[i] ^= b
                z[i] ^= b
        return self

    def s_gate(self, q: int) -> Tableau:
        b = self._q(q)
        x, z, s = self.x, self.z, self.s
        for i in range(2 * self.n):
            if x[i] & b:
                if z[i] & b:
                    s[i] ^= 1
                z[i] ^= b
        return self

    def sdg(self, q: int) -> Tableau:
        for _ in range(3):
            self.s_gate(q)
        return self

    def cnot(self, c: int, t: int) -> Tableau:
        bc, bt = self._q(c), self._q(t)
        if bc == bt:
            raise Gf2Error("control and target coincide")
        x, z, s = self.x, self.z, self.s
        for i in range(2 * self.n):
            xc = x[i] & bc
            zt = z[i] & bt
            if xc and zt and (bool(x[i] & bt) == bool(z[i] & bc)):
                s[i] ^= 1
            if xc:
                x[i] ^= bt
            if zt:
                z[i] ^= bc
        return self

    def cnot_block(self, ctrl_start: int, targ_start: int, size: int) -> Tableau:
        """Transversal CNOT from qubits ``ctrl_start+j`` to ``targ_start+j``."""
        if ctrl_start < 0 or targ_start < 0 or max(ctrl_start, targ_start) + size > self.n:
            raise IndexError("block out of range")
        if not (ctrl_start + size <= targ_start or targ_start + size <= ctrl_start):
            raise Gf2Error("blocks overlap")
        m = (1 << size) - 1
        x, z, s = self.x, self.z, self.s
        for i in range(2 * self.n):
            xc = (x[i] >> ctrl_start) & m
            zc = (z[i] >> ctrl_start) & m
            xt = (x[i] >> targ_start) & m
            zt = (z[i] >> targ_start) & m
            s[i] ^= parity(xc & zt & ~(xt ^ zc))
            x[i] ^= xc << targ_start
            z[i] ^= zt << ctrl_start
        return self

    def apply_pauli(self, p: PauliOperator) -> Tableau:
        if p.n != self.n:
            raise Gf2Error("Pauli length mismatch")
        x, z, s = self.x, self.z, self.s
        for i in range(2 * self.n):
            s[i] ^= parity((x[i] & p.z) ^ (z[i] & p.x))
        return self

    def apply(self, gate: str, *qubits: int) -> Tableau:
        g = gate.upper()
        if g == "H":
            return self.h(*qubits)
        if g == "S":
            return self.s_gate(*qubits)
        if g in ("SDG", "S_DAG"):
            return self.sdg(*qubits)
        if g in ("CNOT", "CX"):
            return self.cnot(*qubits)
        if g in ("X", "Y", "Z"):
            (q,) = qubits
            return self.apply_pauli(PauliOperator.single(self.n, q, g))
        raise Gf2Error(f"unknown gate {gate}")

    # row algebra ---------------------------------------------------------
    def _rowmul(self, h: int, i: int) -> None:
        """row_h <- row_h * row_i (sign tracked for Hermitian products)."""
        e = product_phase_bits(self.x[h], self.z[h], self.x[i], self.z[i])
        self.s[h] ^= self.s[i] ^ (1 if e in (2, 3) else 0)
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    # measurement ---------------------------------------------------------
    def _anti(self, i: int, p: PauliOperator) -> int:
        return parity((self.x[i] & p.z) ^ (self.z[i] & p.x))

    def peek(self, p: PauliOperator) -> int:
        """Expectation value: +1/-1 if determined, 0 if random. Does not change state."""
        n = self.n
        if any(self._anti(i, p) for i in range(n, 2 * n)):
            return 0
        x = z = 0
        sgn = 0
        for i in range(n):
            if self._anti(i, p):
                e = product_phase_bits(x, z, self.x[n + i], self.z[n + i])
                sgn ^= self.s[n + i] ^ (1 if e in (2, 3) else 0)
                x ^= self.x[n + i]
                z ^= self.z[n + i]
        if x != p.x or z != p.z:
            raise Gf2Error("observable commutes with the state but is not in its group")
        value = -1 if sgn else 1
        return value * p.sign

    def measure(self, p: PauliOperator, rng: np.random.Generator | None = None, forced: int | None = None) -> int:
        """Projective measurement of the Hermitian Pauli ``p``. Returns +1 or -1."""
        if p.n != self.n:
            raise Gf2Error("Pauli length mismatch")
        n = self.n
        piv = next((i for i in range(n, 2 * n) if self._anti(i, p)), None)
        if piv is None:
            out = self.peek(p)
            if forced is not None and forced != out:
                raise MeasurementConflict(f"forced {forced} but outcome is determined as {out}")
            return out
        if forced is not None:
            out = forced
        else:
            if rng is None:
                raise Gf2Error("random outcome requires an rng or a forced value")
            out = 1 if rng.integers(2) == 0 else -1
        for i in range(2 * n):
            if i != piv and self._anti(i, p):
                self._rowmul(i, piv)
        d = piv - n
        self.x[d], self.z[d], self.s[d] = self.x[piv], self.z[piv], self.s[piv]
        self.x[piv], self.z[piv] = p.x, p.z
        self.s[piv] = (1 if p.sign < 0 else 0) ^ (1 if out < 0 else 0)
        return out

    def measure_z(self, q: int, rng=None, forced=None) -> int:
        return self.measure(PauliOperator.single(self.n, q, "Z"), rng, forced)

    def measure_x(self, q: int, rng=None, forced=None) -> int:
        return self.measure(PauliOperator.single(self.n, q, "X"), rng, forced)

    # comparison ----------------------------------------------------------
    def canonical(self) -> tuple[tuple[int, int, int], ...]:
        """Reduced row-echelon form of the stabilizer group with signs."""
        n = self.n
        rows = [(self.x[i] | (self.z[i] << n), self.s[i]) for i in range(n, 2 * n)]
        return canonical_rows(rows, n)

    def same_state(self, other: Tableau) -> bool:
        return self.n == other.n and self.canonical() == other.canonical()

    def reduced(self, keep: Sequence[int]) -> Tableau:
        """State on the qubits ``keep`` when the rest factor out as a pure product."""
        n = self.n
        keep = list(keep)
        drop = [q for q in range(n) if q not in set(keep)]
        dmask = sum(1 << q for q in drop)
        dmask2 = dmask | (dmask << n)
        rows = [(self.x[i] | (self.z[i] << n), self.s[i]) for i in range(n, 2 * n)]
        # eliminate on the dropped columns first: rows left without support there
        # generate the reduced group
        red = _eliminate(rows, n, order=_col_order(n, drop) + _col_order(n, keep))
        sub = [r for r in red if not (r[0] & dmask2)]
        if len(sub) != len(keep):
            raise Gf2Error("kept qubits are entangled with the discarded ones")
        stabs = []
        for v, sgn in sub:
            P = PauliOperator(n, v & ((1 << n) - 1), v >> n, -1 if sgn else 1)
            stabs.append(P.restrict(keep))
        return Tableau.from_stabilizers(stabs)


def _col_order(n: int, qubits: Iterable[int]) -> list[int]:
    out = []
    for q in qubits:
        out += [q, n + q]
    return out


def _rowmul_packed(a: tuple[int, int], b: tuple[int, int], n: int) -> tuple[int, int]:
    mask = (1 << n) - 1
    e = product_phase_bits(a[0] & mask, a[0] >> n, b[0] & mask, b[0] >> n)
    return a[0] ^ b[0], a[1] ^ b[1] ^ (1 if e in (2, 3) else 0)


def _eliminate(rows: list[tuple[int, int]], n: int, order: Sequence[int]) -> list[tuple[int, int]]:
    rows = list(rows)
    r = 0
    for col in order:
        bit = 1 << col
        piv = next((i for i in range(r, len(rows)) if rows[i][0] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][0] & bit:
                rows[i] = _rowmul_packed(rows[i], rows[r], n)
        r += 1
    return rows


def canonical_rows(rows: list[tuple[int, int]], n: int) -> tuple[tuple[int, int, int], ...]:
    red = _eliminate(rows, n, order=_col_order(n, range(n)))
    mask = (1 << n) - 1
    return tuple((v & mask, v >> n, sg) for v, sg in red)


def stabilizer_state(ops: Sequence[PauliOperator]) -> Tableau:
    return Tableau.from_stabilizers(ops)


def pauli_weight(p: PauliOperator) -> int:
    return popcount(p.x | p.z)
