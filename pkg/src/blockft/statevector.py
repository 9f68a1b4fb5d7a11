"""Dense state vectors for small non-Clifford checks (bit q of the index = qubit q)."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .pauli import PauliOperator

_I_POW = np.array([1, 1j, -1, -1j])


class StateVector:
    def __init__(self, n: int, psi: np.ndarray | None = None) -> None:
        self.n = n
        if psi is None:
            psi = np.zeros(1 << n, dtype=complex)
            psi[0] = 1.0
        self.psi = np.asarray(psi, dtype=complex)
        self._idx = np.arange(1 << n, dtype=np.int64)

    def copy(self) -> StateVector:
        return StateVector(self.n, self.psi.copy())

    def pauli_apply(self, p: PauliOperator, vec: np.ndarray | None = None) -> np.ndarray:
        """sign * i^{|x&z|} X^x Z^z applied to ``vec``."""
        v = self.psi if vec is None else vec
        idx = self._idx
        zpar = np.bitwise_count(idx & p.z) & 1
        phase = np.where(zpar == 1, -1.0, 1.0) * _I_POW[bin(p.x & p.z).count("1") % 4] * p.sign
        out = np.empty_like(v)
        out[idx ^ p.x] = v * phase
        return out

    def apply_pauli(self, p: PauliOperator) -> StateVector:
        self.psi = self.pauli_apply(p)
        return self

    def expectation(self, p: PauliOperator) -> float:
        return float(np.vdot(self.psi, self.pauli_apply(p)).real)

    def project(self, op_apply, sign: int) -> float:
        """Apply (I + sign*O)/2 where ``op_apply`` applies a Hermitian unitary O; return the norm^2."""
        new = 0.5 * (self.psi + sign * op_apply(self.psi))
        nrm = float(np.vdot(new, new).real)
        if nrm > 0:
            self.psi = new / np.sqrt(nrm)
        return nrm

    def measure(self, p: PauliOperator, rng: np.random.Generator | None = None, forced: int | None = None) -> int:
        prob_plus = 0.5 * (1.0 + self.expectation(p))
        if forced is None:
            if rng is None:
                raise ValueError("random outcome requires an rng or a forced value")
            out = 1 if rng.random() < prob_plus else -1
        else:
            out = forced
        pr = prob_plus if out == 1 else 1.0 - prob_plus
        if pr < 1e-12:
            raise RuntimeError(f"forced outcome {out} has probability {pr}")
        self.project(lambda v: self.pauli_apply(p, v), out)
        return out

    def phase_by_weight(self, qubits: Sequence[int], angle: float) -> StateVector:
        """Multiply |v> by exp(i*angle*wt(v restricted to qubits)), i.e. a transversal phase gate."""
        mask = sum(1 << q for q in qubits)
        w = np.bitwise_count(self._idx & mask)
        self.psi = self.psi * np.exp(1j * angle * w)
        return self

    def fidelity(self, other: StateVector) -> float:
        return float(abs(np.vdot(self.psi, other.psi)) ** 2)


def stabilizer_vector(n: int, projectors, rng: np.random.Generator) -> StateVector:
    """Unique state fixed by a complete list of (apply, sign) projectors.

    Starts from a random vector so that no projector annihilates it.
    """
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    sv = StateVector(n, v / np.linalg.norm(v))
    for apply, sign in projectors:
        if sv.project(apply, sign) < 1e-12:
            raise RuntimeError("projection annihilated the state")
    return sv
