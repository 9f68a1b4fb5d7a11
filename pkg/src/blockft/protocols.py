"""Steane extraction, logical measurements and measurement-based logical gates.

Register layout for one extraction round: the data block sits at
``[offset, offset + n)`` of the caller's tableau; the round appends an X
ancilla (``|0>_L`` style, measured in the X basis, reveals Z errors) and a Z
ancilla (``|+>_L`` style, measured in the Z basis, reveals X errors). The
circuit is CNOT(data -> Z ancilla), then CNOT(X ancilla -> data), then
single-qubit measurements.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .css import CssCode, LogicalAction
from .gf2 import Gf2Error, parity, popcount, rank, support
from .noise import NoiseParams, PauliChannel, sample_pauli_codes, sample_two_qubit_gate_error
from .pauli import PauliOperator
from .tableau import MeasurementConflict, Tableau

# --------------------------------------------------------------------------
# codes and encodings


def direct_sum(*codes: CssCode, name: str = "") -> CssCode:
    """Codes side by side; logical qubits numbered block by block."""
    n = 0
    hx: list[int] = []
    hz: list[int] = []
    lx: list[int] = []
    lz: list[int] = []
    tz: list[int] = []
    tx: list[int] = []
    for c in codes:
        hx += [v << n for v in c.hx]
        hz += [v << n for v in c.hz]
        lx += [v << n for v in c.logical_x_bits]
        lz += [v << n for v in c.logical_z_bits]
        tz += [v << n for v in c.partner_z_bits]
        tx += [v << n for v in c.partner_x_bits]
        n += c.n
    k = sum(c.k for c in codes)
    d = min(c.d for c in codes)
    return CssCode(n, k, d, tuple(hx), tuple(hz), tuple(lx), tuple(lz), tuple(tz), tuple(tx), name or "+".join(c.name for c in codes))


def logical_pauli(k: int, text: str) -> LogicalAction:
    """Parse a k-character label such as ``"XIZ"`` into a LogicalAction."""
    p = PauliOperator.from_string(text)
    if p.n != k:
        raise Gf2Error("label length mismatch")
    return LogicalAction(k, p.x, p.z)


def physical_logical(code: CssCode, op: PauliOperator, n_total: int, offset: int = 0) -> PauliOperator:
    """Lift a signed k-qubit logical Pauli to the data block at ``offset`` of an n_total register."""
    rep = code.logical_operator(LogicalAction(code.k, op.x, op.z))
    lifted = rep.embed(n_total, range(offset, offset + code.n))
    return lifted if op.sign > 0 else -lifted


def encode_state(code: CssCode, logical: Tableau) -> Tableau:
    """Physical state for a logical stabilizer state on ``k + r`` qubits.

    The first ``k`` logical qubits are encoded in the block (physical qubits
    ``0..n-1``); the remaining ``r`` are reference qubits carried unencoded
    at physical positions ``n..n+r-1``.
    """
    k, n = code.k, code.n
    nref = logical.n - k
    N = n + nref
    stabs = [s.embed(N, range(n)) for s in code.stabilizers]
    kmask = (1 << k) - 1
    for L in logical.stabilizers():
        rep = code.logical_operator(LogicalAction(k, L.x & kmask, L.z & kmask)).embed(N, range(n))
        ref = PauliOperator(N, (L.x >> k) << n, (L.z >> k) << n)
        op = rep * ref
        stabs.append(op if L.sign > 0 else -op)
    return Tableau.from_stabilizers(stabs)


# --------------------------------------------------------------------------
# ancillas


def ancilla_stabilizers(code: CssCode) -> list[PauliOperator]:
    """X ancilla |0>_L^k on qubits 0..n-1 and Z ancilla |+>_L^k on n..2n-1."""
    n = code.n
    N = 2 * n
    out = []
    for off in (0, n):
        out += [s.embed(N, range(off, off + n)) for s in code.stabilizers]
    out += [z.embed(N, range(n)) for z in code.logical_z]
    out += [x.embed(N, range(n, 2 * n)) for x in code.logical_x]
    return out


def logical_measurement_operator(code: CssCode, label: LogicalAction) -> tuple[int, int, int]:
    """Physical (a, b, sign) with logical_operator(label) = sign * sigma(a, b)."""
    rep = code.logical_operator(label)
    return rep.x, rep.z, rep.sign


def build_ancilla(code: CssCode, label: LogicalAction | None = None) -> Tableau:
    """Ancilla pair for plain extraction, or for measuring the logical Pauli ``label``.

    For a label with physical form (a, b) the default pair is projected onto
    the +1 eigenspace of X^a (X ancilla) ⊗ sigma(a, b) (Z ancilla).
    """
    t = Tableau.from_stabilizers(ancilla_stabilizers(code))
    if label is None or label.is_identity():
        return t
    n = code.n
    a, b, _ = logical_measurement_operator(code, label)
    A0 = PauliOperator(2 * n, a | (a << n), b << n)
    if t.measure(A0, forced=1) != 1:
        raise Gf2Error("ancilla projection failed")
    return t


# --------------------------------------------------------------------------
# one extraction round


@dataclass
class Record:
    x_out: list[int]  # X-basis outcomes on the X ancilla
    z_out: list[int]  # Z-basis outcomes on the Z ancilla

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(self.x_out), tuple(self.z_out)


def _outcome_bits(out: Sequence[int]) -> int:
    return sum(1 << q for q, v in enumerate(out) if v < 0)


def syndromes_from_record(code: CssCode, rec: Record) -> tuple[int, int]:
    """(X-generator syndrome, Z-generator syndrome) as bit masks."""
    mx = _outcome_bits(rec.x_out)
    mz = _outcome_bits(rec.z_out)
    sx = sum(1 << i for i, h in enumerate(code.hx) if parity(h & mx))
    sz = sum(1 << i for i, h in enumerate(code.hz) if parity(h & mz))
    return sx, sz


N_SLOTS = 3  # fault slots: before CNOT 1, between the CNOTs, before measurement


def steane_round(
    state: Tableau,
    code: CssCode,
    ancilla: Tableau,
    offset: int = 0,
    rng: np.random.Generator | None = None,
    faults: Sequence[Sequence[PauliOperator]] | None = None,
    forced: Record | None = None,
) -> tuple[Tableau, Record]:
    """Run one round; ``faults[s]`` are Paulis on the enlarged register injected at slot ``s``."""
    n = code.n
    N = state.n
    if offset + n > N:
        raise IndexError("data block outside the register")
    t = state.tensor(ancilla.copy())
    xa, za = N, N + n
    faults = faults or [[], [], []]
    for f in faults[0]:
        t.apply_pauli(f)
    t.cnot_block(offset, za, n)
    for f in faults[1]:
        t.apply_pauli(f)
    t.cnot_block(xa, offset, n)
    for f in faults[2]:
        t.apply_pauli(f)
    x_out = [t.measure_x(xa + q, rng, None if forced is None else forced.x_out[q]) for q in range(n)]
    z_out = [t.measure_z(za + q, rng, None if forced is None else forced.z_out[q]) for q in range(n)]
    return t.reduced(range(N)), Record(x_out, z_out)


def steane_extraction(
    code: CssCode,
    state: Tableau,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
    offset: int = 0,
) -> tuple[int, int, Tableau]:
    """Measure all generators of the block at ``offset``; optionally with circuit noise."""
    rng = rng if rng is not None else np.random.default_rng()
    faults = None
    if noise is not None:
        faults = sample_round_faults(code, state.n, offset, noise, rng)
    anc = build_ancilla(code)
    out, rec = steane_round(state, code, anc, offset, rng, faults=faults)
    sx, sz = syndromes_from_record(code, rec)
    return sx, sz, out


def sample_round_faults(
    code: CssCode, N: int, offset: int, noise: NoiseParams, rng: np.random.Generator
) -> list[list[PauliOperator]]:
    """Faults at every location class: memory, preparation, two-qubit gates, measurement."""
    n = code.n
    T = N + 2 * n
    xa, za = N, N + n
    slots: list[list[PauliOperator]] = [[], [], []]

    def one(q: int, c: int) -> PauliOperator:
        return PauliOperator(T, (c & 1) << q, ((c >> 1) & 1) << q)

    mem = sample_pauli_codes(PauliChannel.depolarizing(noise.eps), n, rng)
    prep = sample_pauli_codes(PauliChannel.depolarizing(noise.r), 2 * n, rng)
    for q in range(n):
        if mem[q]:
            slots[0].append(one(offset + q, int(mem[q])))
    for q in range(2 * n):
        if prep[q]:
            slots[0].append(one(xa + q, int(prep[q])))
    for slot, (ca, cb) in ((1, (offset, za)), (2, (xa, offset))):
        for q in range(n):
            e = sample_two_qubit_gate_error(noise.p_g2, rng)
            if not e.is_identity():
                slots[slot].append(PauliOperator(2, e.x, e.z).embed(T, [ca + q, cb + q]))
    flips = rng.random(2 * n) < noise.p_m
    for q in np.flatnonzero(flips).tolist():
        if q < n:
            slots[2].append(PauliOperator(T, 0, 1 << (xa + q)))  # flips an X-basis outcome
        else:
            slots[2].append(PauliOperator(T, 1 << (za + q - n), 0))  # flips a Z-basis outcome
    return slots


# --------------------------------------------------------------------------
# logical measurement


def measure_logical_operator(
    code: CssCode,
    label: LogicalAction,
    state: Tableau,
    rng: np.random.Generator | None = None,
    offset: int = 0,
    method: str = "steane",
) -> tuple[int, Tableau, tuple[int, int]]:
    """Measure the Hermitian logical Pauli ``label`` (e.g. X̄_u Z̄_v) on the block at ``offset``.

    ``method="steane"`` runs an extraction round with the entangled ancilla
    and also returns the syndromes; ``method="direct"`` measures the
    physical representative on the tableau.
    """
    rng = rng if rng is not None else np.random.default_rng()
    if label.k != code.k:
        raise Gf2Error("label size does not match the code")
    if label.is_identity():
        raise Gf2Error("identity is not a measurable observable")
    a, b, sign = logical_measurement_operator(code, label)
    if method == "direct":
        P = PauliOperator(code.n, a, b, sign).embed(state.n, range(offset, offset + code.n))
        t = state.copy()
        return t.measure(P, rng), t, (0, 0)
    if method != "steane":
        raise Gf2Error(f"unknown method {method}")
    anc = build_ancilla(code, label)
    out, rec = steane_round(state, code, anc, offset, rng)
    mu = 1
    for q in support(a):
        mu *= rec.x_out[q]
    for q in support(b):
        mu *= rec.z_out[q]
    value = (-1 if popcount(a & b) % 2 else 1) * mu * sign
    return value, out, syndromes_from_record(code, rec)


# --------------------------------------------------------------------------
# protocols as sequences of logical measurements


Measure = Callable[[LogicalAction], int]


def _lab(k: int, **ops: Sequence[int]) -> LogicalAction:
    x = z = 0
    for q in ops.get("x", ()):
        x ^= 1 << q
    for q in ops.get("z", ()):
        z ^= 1 << q
    return LogicalAction(k, x, z)


@dataclass
class ProtocolRun:
    outcomes: list[int]
    frame: LogicalAction  # logical Pauli to apply afterwards
    # slot relabelling: logical qubit q before the protocol ends up at perm[q]
    perm: list[int]
    # freed slot and the Pauli it is left an eigenstate of, with its eigenvalue
    reset: list[tuple[int, str, int]] = field(default_factory=list)


def hadamard_protocol(k: int, i: int, buffer: int, measure: Measure) -> ProtocolRun:
    """Buffer starts in |0>. Result H|psi> lands on the buffer slot; slot i ends in |±>."""
    if i == buffer:
        raise Gf2Error("target coincides with the buffer")
    m1 = measure(_lab(k, x=[buffer], z=[i]))
    m2 = measure(_lab(k, x=[i]))
    frame = _lab(k, x=[buffer] if m2 < 0 else [], z=[buffer] if m1 < 0 else [])
    perm = list(range(k))
    perm[i], perm[buffer] = buffer, i
    return ProtocolRun([m1, m2], frame, perm, [(i, "X", m2)])


def cnot_protocol(k: int, i: int, j: int, buffer: int, measure: Measure) -> ProtocolRun:
    """CNOT from slot i to slot j; control ends on j, target on the buffer, slot i in |±>."""
    if len({i, j, buffer}) != 3:
        raise Gf2Error("control, target and buffer must be distinct")
    m1 = measure(_lab(k, x=[buffer, j]))
    m2 = measure(_lab(k, z=[i, j]))
    m3 = measure(_lab(k, x=[i]))
    fx = ([j, buffer] if m2 < 0 else [])
    fz = ([j] if m3 < 0 else []) + ([buffer] if m1 < 0 else [])
    frame = _lab(k, x=fx, z=fz)
    perm = list(range(k))
    perm[i], perm[j], perm[buffer] = j, buffer, i
    return ProtocolRun([m1, m2, m3], frame, perm, [(i, "X", m3)])


def phase_protocol(k: int, i: int, buffer: int, measure: Measure) -> ProtocolRun:
    """S on slot i via measurements of X_b Y_i then Z_i; the result lands on the buffer."""
    if i == buffer:
        raise Gf2Error("target coincides with the buffer")
    m1 = measure(_lab(k, x=[buffer, i], z=[i]))
    m2 = measure(_lab(k, z=[i]))
    frame = _lab(k, x=[buffer] if m2 < 0 else [], z=[buffer] if m1 > 0 else [])
    perm = list(range(k))
    perm[i], perm[buffer] = buffer, i
    return ProtocolRun([m1, m2], frame, perm, [(i, "Z", m2)])


def swap_protocol(k: int, i: int, j: int, buffer: int, measure: Measure) -> ProtocolRun:
    """Swap slots i and j; the buffer is left in |±>."""
    if len({i, j, buffer}) != 3:
        raise Gf2Error("slots and buffer must be distinct")
    m1 = measure(_lab(k, x=[buffer, i, j]))
    m2 = measure(_lab(k, z=[buffer, i, j]))
    m3 = measure(_lab(k, x=[buffer]))
    frame = _lab(k, x=[i, j] if m2 < 0 else [], z=[i, j] if m1 * m3 < 0 else [])
    # the measurements themselves exchange the slots; no relabelling on top
    return ProtocolRun([m1, m2, m3], frame, list(range(k)), [(buffer, "X", m3)])


def teleport_protocol(
    k: int,
    j: int,
    measure: Measure,
    apply_logical: Callable[[LogicalAction], None],
    gate: Callable[[], None] | None = None,
    proc: int = 0,
    buffer: int = 1,
) -> ProtocolRun:
    """Move slot j to the processor slot, optionally act there, and move it back.

    The processor correction is applied before ``gate``; the returned frame
    is the final correction on slot j. Processor and buffer are left in a
    Bell pair with X0X1 = m5 and Z0Z1 = m6.
    """
    if j in (proc, buffer):
        raise Gf2Error("slot j must differ from the processor and buffer slots")
    m1 = measure(_lab(k, x=[proc, buffer]))
    m2 = measure(_lab(k, z=[proc, buffer]))
    m3 = measure(_lab(k, x=[buffer, j]))
    m4 = measure(_lab(k, z=[buffer, j]))
    corr = _lab(k, x=[proc] if m2 * m4 < 0 else [], z=[proc] if m1 * m3 < 0 else [])
    if not corr.is_identity():
        apply_logical(corr)
    if gate is not None:
        gate()
    m5 = measure(_lab(k, x=[proc, buffer]))
    m6 = measure(_lab(k, z=[proc, buffer]))
    frame = _lab(k, x=[j] if m4 * m6 < 0 else [], z=[j] if m3 * m5 < 0 else [])
    return ProtocolRun([m1, m2, m3, m4, m5, m6], frame, list(range(k)), [])


# --------------------------------------------------------------------------
# logical-level ideal runs


def logical_single(k: int, q: int, kind: str, nref: int = 0) -> PauliOperator:
    return PauliOperator.single(k + nref, q, kind)


def set_eigenstate(t: Tableau, q: int, kind: str, value: int, rng: np.random.Generator) -> None:
    """Force qubit q (a product factor) into the ``value`` eigenstate of the Pauli ``kind``."""
    P = PauliOperator.single(t.n, q, kind)
    out = t.measure(P, rng)
    if out != value:
        flip = "Z" if kind in "XY" else "X"
        t.apply_pauli(PauliOperator.single(t.n, q, flip))


def set_pair(t: Tableau, P: PauliOperator, value: int, fix: PauliOperator, rng: np.random.Generator) -> None:
    """Project onto the ``value`` eigenspace of P, using ``fix`` (anticommuting with P) if needed."""
    if t.measure(P, rng) != value:
        t.apply_pauli(fix)


def ideal_gate(t: Tableau, name: str, slots: Sequence[int]) -> None:
    if name == "hadamard":
        t.h(slots[0])
    elif name == "phase":
        t.s_gate(slots[0])
    elif name == "cnot":
        t.cnot(slots[0], slots[1])
    elif name == "swap":
        a, b = slots
        t.cnot(a, b).cnot(b, a).cnot(a, b)
    elif name in ("identity", "teleport"):
        pass
    else:
        raise Gf2Error(f"unknown gate {name}")


def apply_run_to_ideal(t: Tableau, run: ProtocolRun, k: int, rng: np.random.Generator) -> None:
    perm = list(run.perm) + list(range(k, t.n))
    t.permute(perm)
    for q, kind, value in run.reset:
        set_eigenstate(t, q, kind, value, rng)


# --------------------------------------------------------------------------
# input states


SINGLE_STATES = [("Z", 1), ("Z", -1), ("X", 1), ("X", -1), ("Y", 1), ("Y", -1)]


def product_logical_state(k: int, assignments: dict[int, tuple[str, int]]) -> Tableau:
    """Logical product state: slot q in the given eigenstate, other slots |0>."""
    stabs = []
    for q in range(k):
        kind, val = assignments.get(q, ("Z", 1))
        P = PauliOperator.single(k, q, kind)
        stabs.append(P if val > 0 else -P)
    return Tableau.from_stabilizers(stabs)


def choi_logical_state(k: int, slots: Sequence[int]) -> Tableau:
    """Each listed slot maximally entangled with its own reference qubit; others |0>."""
    nref = len(slots)
    N = k + nref
    stabs = []
    for r, q in enumerate(slots):
        stabs.append(PauliOperator(N, (1 << q) | (1 << (k + r)), 0))
        stabs.append(PauliOperator(N, 0, (1 << q) | (1 << (k + r))))
    for q in range(k):
        if q not in slots:
            stabs.append(PauliOperator.single(N, q, "Z"))
    return Tableau.from_stabilizers(stabs)


def random_logical_state(k: int, free: Sequence[int], rng: np.random.Generator, depth: int = 30) -> Tableau:
    """Random stabilizer state on the ``free`` slots via a random Clifford circuit."""
    t = Tableau(k)
    free = list(free)
    for _ in range(depth):
        g = rng.integers(3)
        if g == 0:
            t.h(int(rng.choice(free)))
        elif g == 1:
            t.s_gate(int(rng.choice(free)))
        elif len(free) > 1:
            a, b = rng.choice(free, size=2, replace=False)
            t.cnot(int(a), int(b))
    paulis = rng.integers(4, size=len(free))
    for q, c in zip(free, paulis.tolist()):
        if c:
            t.apply_pauli(PauliOperator.single(k, q, "IXYZ"[c]))
    return t


# --------------------------------------------------------------------------
# verification harness


@dataclass
class ProtocolReport:
    protocol: str
    code: str
    cases: int
    failures: int
    details: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def __str__(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.protocol} on {self.code}: {self.cases - self.failures}/{self.cases} cases"


class BlockRunner:
    """Execute logical measurements on an encoded register (block at qubits 0..n-1)."""

    def __init__(self, code: CssCode, state: Tableau, rng: np.random.Generator, method: str) -> None:
        self.code = code
        self.state = state
        self.rng = rng
        self.method = method

    def measure(self, label: LogicalAction) -> int:
        val, self.state, _ = measure_logical_operator(self.code, label, self.state, self.rng, method=self.method)
        return val

    def apply_logical(self, label: LogicalAction) -> None:
        rep = self.code.logical_operator(label).embed(self.state.n, range(self.code.n))
        self.state.apply_pauli(rep)


GATE_ARITY = {"hadamard": 1, "phase": 1, "cnot": 2, "swap": 2, "teleport": 1}


def _run_protocol(name: str, runner: BlockRunner, slots: Sequence[int], buffer: int) -> ProtocolRun:
    k = runner.code.k
    if name == "hadamard":
        return hadamard_protocol(k, slots[0], buffer, runner.measure)
    if name == "phase":
        return phase_protocol(k, slots[0], buffer, runner.measure)
    if name == "cnot":
        return cnot_protocol(k, slots[0], slots[1], buffer, runner.measure)
    if name == "swap":
        return swap_protocol(k, slots[0], slots[1], buffer, runner.measure)
    if name == "teleport":
        return teleport_protocol(k, slots[0], runner.measure, runner.apply_logical)
    raise Gf2Error(f"unknown protocol {name}")


def default_slots(name: str, code: CssCode) -> tuple[list[int], int, list[str]]:
    """(active slots, buffer slot) for a protocol on a code, plus the slots with prescribed init."""
    k = code.k
    if name == "teleport":
        if k < 3:
            raise Gf2Error("teleport needs processor, buffer and one memory slot")
        return [2], 1, []
    need = GATE_ARITY[name] + 1
    if k < need:
        raise Gf2Error(f"{name} needs {need} logical qubits, {code} has {k}")
    if name in ("hadamard", "phase"):
        return [1], 0, []
    return [1, 2], 0, []


def check_protocol_case(
    name: str, code: CssCode, logical_in: Tableau, slots: Sequence[int], buffer: int, rng: np.random.Generator, method: str
) -> bool:
    """Run protocol on the encoded input and compare with the ideal logical evolution."""
    k = code.k
    phys = encode_state(code, logical_in)
    runner = BlockRunner(code, phys, rng, method)
    run = _run_protocol(name, runner, slots, buffer)
    runner.apply_logical(run.frame)
    ideal = logical_in.copy()
    if name == "teleport":
        # processor and buffer end as a Bell pair fixed by the last two outcomes
        set_pair(ideal, PauliOperator(ideal.n, 0b11, 0), run.outcomes[4], PauliOperator.single(ideal.n, 0, "Z"), rng)
        set_pair(ideal, PauliOperator(ideal.n, 0, 0b11), run.outcomes[5], PauliOperator.single(ideal.n, 0, "X"), rng)
    else:
        ideal_gate(ideal, name, list(slots))
        apply_run_to_ideal(ideal, run, k, rng)
    expected = encode_state(code, ideal)
    return runner.state.same_state(expected)


def verify_protocol(
    name: str,
    code: CssCode,
    method: str = "steane",
    seed: int = 0,
    n_random: int = 0,
) -> ProtocolReport:
    """All product stabilizer inputs on the active slots, a Choi input, and optional random inputs."""
    rng = np.random.default_rng(seed)
    slots, buffer, _ = default_slots(name, code)
    k = code.k
    fixed = [buffer] + ([0] if name == "teleport" else [])
    report = ProtocolReport(name, code.name or repr(code), 0, 0)
    inputs: list[tuple[str, Tableau]] = []
    for combo in itertools.product(SINGLE_STATES, repeat=len(slots)):
        inputs.append((str(combo), product_logical_state(k, dict(zip(slots, combo)))))
    others = [q for q in range(k) if q not in fixed]
    inputs.append(("choi", choi_logical_state(k, others)))
    for r in range(n_random):
        inputs.append((f"random{r}", random_logical_state(k, others, rng)))
    for tag, lin in inputs:
        report.cases += 1
        try:
            ok = check_protocol_case(name, code, lin, slots, buffer, rng, method)
        except MeasurementConflict as exc:  # pragma: no cover - reported as failure
            ok = False
            tag = f"{tag}: {exc}"
        if not ok:
            report.failures += 1
            report.details.append(tag)
    return report


def measurement_observables(k: int) -> list[LogicalAction]:
    """Single-qubit X̄, Z̄, Ȳ on every slot, plus X̄_iX̄_j, Z̄_iZ̄_j, X̄_iZ̄_j on pairs of the first three slots."""
    out = []
    for q in range(k):
        for kind in "XZY":
            P = PauliOperator.single(k, q, kind)
            out.append(LogicalAction(k, P.x, P.z))
    for i, j in itertools.permutations(range(min(k, 3)), 2):
        out.append(_lab(k, x=[i], z=[j]))
        if i < j:
            out.append(_lab(k, x=[i, j]))
            out.append(_lab(k, z=[i, j]))
    return out


def verify_logical_measurement(code: CssCode, seed: int = 0, n_random: int = 0) -> ProtocolReport:
    """Ancilla-based measurement vs direct projective measurement of the same observable."""
    rng = np.random.default_rng(seed)
    k = code.k
    report = ProtocolReport("logical-measure", code.name or repr(code), 0, 0)
    touched = list(range(min(k, 2)))
    inputs = [
        product_logical_state(k, dict(zip(touched, combo)))
        for combo in itertools.product(SINGLE_STATES, repeat=len(touched))
    ]
    inputs.append(choi_logical_state(k, list(range(k))))
    inputs += [random_logical_state(k, list(range(k)), rng) for _ in range(n_random)]
    for obs in measurement_observables(k):
        for lin in inputs:
            report.cases += 1
            phys = encode_state(code, lin)
            val, out, synd = measure_logical_operator(code, obs, phys, rng, method="steane")
            direct = phys.copy()
            a, b, sign = logical_measurement_operator(code, obs)
            P = PauliOperator(code.n, a, b, sign).embed(direct.n, range(code.n))
            try:
                direct.measure(P, forced=val)
                ok = direct.same_state(out) and synd == (0, 0)
            except MeasurementConflict:
                ok = False
            if not ok:
                report.failures += 1
                report.details.append(f"{obs} on input {report.cases}")
    return report


# --------------------------------------------------------------------------
# effective error model check


@dataclass(frozen=True)
class FaultLocation:
    slot: int
    kind: str  # memory | prep | gate1 | gate2 | measure
    qubits: tuple[int, ...]
    pauli: PauliOperator  # on the enlarged register


def enumerate_faults(code: CssCode, N: int, offset: int = 0) -> list[FaultLocation]:
    """Every single-fault location and Pauli type of one round."""
    n = code.n
    T = N + 2 * n
    xa, za = N, N + n
    out: list[FaultLocation] = []

    def single(slot, kind, q):
        for c in "XYZ":
            out.append(FaultLocation(slot, kind, (q,), PauliOperator.single(T, q, c)))

    for q in range(n):
        single(0, "memory", offset + q)
    for q in range(2 * n):
        single(0, "prep", xa + q)
    for slot, kind, (ca, cb) in ((1, "gate1", (offset, za)), (2, "gate2", (xa, offset))):
        for q in range(n):
            for c in range(1, 16):
                a, b = c & 3, c >> 2
                two = PauliOperator(2, (a & 1) | ((b & 1) << 1), (a >> 1) | ((b >> 1) << 1))
                out.append(FaultLocation(slot, kind, (ca + q, cb + q), two.embed(T, [ca + q, cb + q])))
    for slot in (1, 2):
        for q in range(n):
            single(slot, "memory", offset + q)
    for q in range(n):
        out.append(FaultLocation(2, "measure", (xa + q,), PauliOperator(T, 0, 1 << (xa + q))))
        out.append(FaultLocation(2, "measure", (za + q,), PauliOperator(T, 1 << (za + q), 0)))
    return out


def _cnot_block_pauli(p: PauliOperator, c0: int, t0: int, size: int) -> PauliOperator:
    m = (1 << size) - 1
    xc = (p.x >> c0) & m
    zt = (p.z >> t0) & m
    return PauliOperator(p.n, p.x ^ (xc << t0), p.z ^ (zt << c0))


def propagate_to_end(code: CssCode, N: int, offset: int, f: FaultLocation) -> PauliOperator:
    n = code.n
    xa, za = N, N + n
    p = f.pauli.unsigned()
    if f.slot <= 0:
        p = _cnot_block_pauli(p, offset, za, n)
    if f.slot <= 1:
        p = _cnot_block_pauli(p, xa, offset, n)
    return p


def effective_pair(code: CssCode, N: int, offset: int, f: FaultLocation) -> tuple[PauliOperator, PauliOperator]:
    """(pre, post) data-only Paulis equivalent to the fault, from propagation rules.

    Flipped X-basis outcomes on the X ancilla come from Z errors on the
    matching data qubits before the round, flipped Z-basis outcomes on the
    Z ancilla from X errors; whatever remains on the data is the post error.
    """
    n = code.n
    xa, za = N, N + n
    m = (1 << n) - 1
    p = propagate_to_end(code, N, offset, f)
    flips_x = (p.z >> xa) & m  # X-basis outcomes flipped
    flips_z = (p.x >> za) & m  # Z-basis outcomes flipped
    pre = PauliOperator(N, flips_z << offset, flips_x << offset)
    dx = (p.x >> offset) & m
    dz = (p.z >> offset) & m
    post = PauliOperator(N, (dx ^ flips_z) << offset, (dz ^ flips_x) << offset)
    return pre, post


@dataclass
class EquivalenceReport:
    code: str
    single_locations: int
    single_cases: int
    single_mismatches: int
    double_trials: int
    double_mismatches: int
    by_kind: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.single_mismatches == 0 and self.double_mismatches == 0

    def __str__(self) -> str:
        return (
            f"{self.single_mismatches} mismatches / {self.single_locations} fault locations "
            f"({self.single_cases} cases); "
            f"{self.double_mismatches} mismatches / {self.double_trials} double faults"
        )


def choi_code_state(code: CssCode) -> Tableau:
    """Block with each logical qubit maximally entangled with a reference qubit."""
    return encode_state(code, choi_logical_state(code.k, list(range(code.k))) if code.k else Tableau(0))


def _equivalent(
    code: CssCode,
    state: Tableau,
    anc: Tableau,
    faults: list[FaultLocation],
    rng: np.random.Generator,
) -> bool:
    N = state.n
    slots: list[list[PauliOperator]] = [[], [], []]
    pre = PauliOperator(N)
    post = PauliOperator(N)
    for f in faults:
        slots[f.slot].append(f.pauli)
        a, b = effective_pair(code, N, 0, f)
        pre, post = pre * a, post * b
    faulty, rec = steane_round(state, code, anc, 0, rng, faults=slots)
    eff_in = state.copy().apply_pauli(pre)
    try:
        eff, _ = steane_round(eff_in, code, anc, 0, rng, forced=rec)
    except MeasurementConflict:
        return False
    eff.apply_pauli(post)
    return faulty.same_state(eff)


def effective_error_equivalence_check(
    code: CssCode, n_double: int = 0, seed: int = 0, with_data_error: bool = True
) -> EquivalenceReport:
    """Every single fault (and optional random fault pairs) vs its data-only (pre, post) pair."""
    rng = np.random.default_rng(seed)
    base = choi_code_state(code)
    anc = build_ancilla(code)
    N = base.n
    states = [base]
    if with_data_error:
        # a pre-existing data error makes the syndrome nontrivial
        e = PauliOperator(N, int(rng.integers(1 << code.n)), int(rng.integers(1 << code.n)))
        states.append(base.copy().apply_pauli(e))
    locs = enumerate_faults(code, N)
    rep = EquivalenceReport(code.name or repr(code), len(locs), 0, 0, 0, 0)
    for f in locs:
        for st in states:
            rep.single_cases += 1
            if not _equivalent(code, st, anc, [f], rng):
                rep.single_mismatches += 1
                rep.by_kind[f.kind] = rep.by_kind.get(f.kind, 0) + 1
    for _ in range(n_double):
        i, j = rng.choice(len(locs), size=2, replace=False)
        st = states[int(rng.integers(len(states)))]
        rep.double_trials += 1
        if not _equivalent(code, st, anc, [locs[int(i)], locs[int(j)]], rng):
            rep.double_mismatches += 1
    return rep


def unique_single_faults(code: CssCode) -> int:
    """Count of (location, Pauli type) pairs for one round."""
    return len(enumerate_faults(code, code.n + code.k))


# --------------------------------------------------------------------------
# public gate wrappers on encoded states


@dataclass
class PauliFrame:
    """Pending logical Pauli correction, one LogicalAction per register."""

    action: LogicalAction

    @classmethod
    def empty(cls, k: int) -> PauliFrame:
        return cls(LogicalAction(k, 0, 0))

    def update(self, other: LogicalAction) -> PauliFrame:
        self.action = self.action * other
        return self

    def apply(self, code: CssCode, state: Tableau, offset: int = 0) -> Tableau:
        """Apply the correction to ``state`` and clear the frame."""
        rep = code.logical_operator(self.action).embed(state.n, range(offset, offset + code.n))
        state.apply_pauli(rep)
        self.action = LogicalAction(self.action.k, 0, 0)
        return state


class BufferError(Gf2Error):
    pass


def _require_eigenstate(code: CssCode, state: Tableau, slot: int, kind: str) -> None:
    P = physical_logical(code, PauliOperator.single(code.k, slot, kind), state.n)
    if state.peek(P) != 1:
        raise BufferError(f"buffer slot {slot} is not in the +1 eigenstate of {kind}")


def _wrapped(name: str, code: CssCode, slots: list[int], buffer: int, state: Tableau, rng, method: str):
    _require_eigenstate(code, state, buffer, "Z")
    runner = BlockRunner(code, state.copy(), rng if rng is not None else np.random.default_rng(), method)
    run = _run_protocol(name, runner, slots, buffer)
    return runner.state, run


def logical_hadamard(code: CssCode, i: int, state: Tableau, rng=None, buffer: int = 0, method: str = "steane"):
    """H on slot i; returns (state', run) with the result on ``buffer`` and ``run.frame`` pending."""
    return _wrapped("hadamard", code, [i], buffer, state, rng, method)


def logical_phase(code: CssCode, i: int, state: Tableau, rng=None, buffer: int = 0, method: str = "steane"):
    return _wrapped("phase", code, [i], buffer, state, rng, method)


def logical_cnot(code: CssCode, i: int, j: int, state: Tableau, rng=None, buffer: int = 0, method: str = "steane"):
    return _wrapped("cnot", code, [i, j], buffer, state, rng, method)


def logical_swap(code: CssCode, i: int, j: int, state: Tableau, rng=None, buffer: int = 0, method: str = "steane"):
    return _wrapped("swap", code, [i, j], buffer, state, rng, method)


def teleport_register(mem: CssCode, proc: CssCode) -> CssCode:
    """Processor block first (logical 0), then memory (logical 1 is the buffer)."""
    if mem.k < 2:
        raise Gf2Error("memory block needs a buffer and at least one stored qubit")
    return direct_sum(proc, mem)


def logical_teleport(mem: CssCode, proc: CssCode, j: int, state: Tableau, rng=None, method: str = "steane"):
    """Round-trip slot j through the processor (register from :func:`teleport_register`)."""
    code = teleport_register(mem, proc)
    if j in (0, 1) or not 0 <= j < code.k:
        raise Gf2Error(f"invalid memory slot {j}")
    runner = BlockRunner(code, state.copy(), rng if rng is not None else np.random.default_rng(), method)
    run = teleport_protocol(code.k, j, runner.measure, runner.apply_logical)
    return runner.state, run


# --------------------------------------------------------------------------
# teleported transversal T, checked on state vectors


@dataclass
class TTeleportReport:
    inputs: int
    min_fidelity: float

    @property
    def ok(self) -> bool:
        return self.inputs > 0 and 1.0 - self.min_fidelity < 1e-10


def _logical_apply(code: CssCode, label: LogicalAction, N: int, sv):
    P = code.logical_operator(label).embed(N, range(code.n))
    return lambda v: sv.pauli_apply(P, v)


def t_teleport_check(mem: CssCode | None = None, seed: int = 0) -> TTeleportReport:
    """Teleport a memory qubit into an RM15 processor, apply transversal T†, and teleport back.

    Transversal T† on the processor acts as logical T. The output on the
    memory slot is compared with T applied to each single-qubit Pauli
    eigenstate input, for every measurement record drawn.
    """
    from .classical import even_weight
    from .css import css_from_selfdual
    from .rm15 import build_rm15
    from .statevector import StateVector, stabilizer_vector

    mem = mem or css_from_selfdual(even_weight(4), "even4")
    proc = build_rm15().code
    code = teleport_register(mem, proc)
    k, n = code.k, code.n
    j = 2
    rng = np.random.default_rng(seed)
    inv = 1 / np.sqrt(2)
    worst = 1.0
    count = 0

    def label(q, kind):
        P = PauliOperator.single(k, q, kind)
        return LogicalAction(k, P.x, P.z)

    for kind, val in SINGLE_STATES:
        inp = product_logical_state(k, {j: (kind, val)})
        tab = encode_state(code, inp)
        scratch = StateVector(n)
        proj = [((lambda P: lambda v: scratch.pauli_apply(P, v))(s), 1) for s in tab.stabilizers()]
        sv = stabilizer_vector(n, proj, rng)

        def measure(lab: LogicalAction) -> int:
            P = code.logical_operator(lab).embed(n, range(n))
            return sv.measure(P, rng)

        def apply_logical(lab: LogicalAction) -> None:
            sv.apply_pauli(code.logical_operator(lab).embed(n, range(n)))

        def gate() -> None:
            sv.phase_by_weight(range(proc.n), -np.pi / 4)

        run = teleport_protocol(k, j, measure, apply_logical, gate)
        apply_logical(run.frame)
        # expected: code space, Bell pair on (0,1), slot j stabilized by T P T†
        X = _logical_apply(code, label(j, "X"), n, sv)
        Y = _logical_apply(code, label(j, "Y"), n, sv)
        Z = _logical_apply(code, label(j, "Z"), n, sv)
        if kind == "X":
            op = lambda v: inv * (X(v) + Y(v))  # noqa: E731
        elif kind == "Y":
            op = lambda v: inv * (Y(v) - X(v))  # noqa: E731
        else:
            op = Z
        projs = [(lambda P: lambda v: sv.pauli_apply(P, v))(s.embed(n, range(n))) for s in code.stabilizers]
        projs = [(p, 1) for p in projs]
        projs.append((_logical_apply(code, _lab(k, x=[0, 1]), n, sv), run.outcomes[4]))
        projs.append((_logical_apply(code, _lab(k, z=[0, 1]), n, sv), run.outcomes[5]))
        for q in range(3, k):
            projs.append((_logical_apply(code, label(q, "Z"), n, sv), 1))
        projs.append((op, val))
        expected = stabilizer_vector(n, projs, rng)
        worst = min(worst, sv.fidelity(expected))
        count += 1
    return TTeleportReport(count, worst)
