from __future__ import annotations

import numpy as np
import pytest

from blockft import protocols as P
from blockft.css import LogicalAction
from blockft.gf2 import Gf2Error
from blockft.noise import NoiseParams
from blockft.pauli import PauliOperator
from blockft.protocols import (
    BufferError,
    PauliFrame,
    build_ancilla,
    choi_code_state,
    effective_error_equivalence_check,
    encode_state,
    enumerate_faults,
    logical_cnot,
    logical_hadamard,
    logical_phase,
    logical_teleport,
    measure_logical_operator,
    physical_logical,
    product_logical_state,
    steane_extraction,
    steane_round,
    t_teleport_check,
    teleport_register,
    verify_logical_measurement,
    verify_protocol,
)
from blockft.registry import protocol_code
from blockft.tableau import Tableau


def peek_logical(code, state, text):
    return state.peek(physical_logical(code, PauliOperator.from_string(text), state.n))


def frame_applied(code, state, run):
    out = state.copy()
    return PauliFrame(run.frame).apply(code, out)


# --- extraction -------------------------------------------------------------


def test_clean_extraction_is_trivial_and_non_destructive(steane):
    state = choi_code_state(steane)
    sx, sz, out = steane_extraction(steane, state, rng=np.random.default_rng(0))
    assert (sx, sz) == (0, 0)
    assert out.same_state(state)


def test_extraction_reveals_data_error(steane):
    state = choi_code_state(steane)
    rng = np.random.default_rng(1)
    for q in range(7):
        for kind in "XYZ":
            e = PauliOperator.single(state.n, q, kind)
            sx, sz, _ = steane_extraction(steane, state.copy().apply_pauli(e), rng=rng)
            assert steane.split_syndrome(steane.syndrome(e.restrict(range(7)))) == (sx, sz)


def test_noisy_extraction_replays_by_seed(steane):
    state = choi_code_state(steane)
    noise = NoiseParams.uniform(0.05)
    a = steane_extraction(steane, state, noise, np.random.default_rng(9))
    b = steane_extraction(steane, state, noise, np.random.default_rng(9))
    assert a[:2] == b[:2] and a[2].same_state(b[2])


def test_fault_enumeration_size(steane):
    locs = enumerate_faults(steane, 8)
    kinds = {f.kind for f in locs}
    assert {"prep", "gate1", "gate2", "measure", "memory"} <= kinds
    assert len(locs) == 329


def test_single_fault_equivalence_on_steane(steane):
    rep = effective_error_equivalence_check(steane, n_double=200, seed=2)
    assert rep.ok, str(rep)
    assert rep.single_locations == 329


def test_wrong_propagation_rule_is_detected(steane, monkeypatch):
    """Negative control: swapping the pre/post roles must produce mismatches."""
    real = P.effective_pair

    def swapped(code, N, offset, f):
        pre, post = real(code, N, offset, f)
        return post, pre

    monkeypatch.setattr(P, "effective_pair", swapped)
    rep = effective_error_equivalence_check(steane, n_double=0, seed=2)
    assert rep.single_mismatches > 0


def test_no_fault_is_identity_pair(steane):
    state = choi_code_state(steane)
    anc = build_ancilla(steane)
    a, rec = steane_round(state, steane, anc, 0, np.random.default_rng(0))
    b, _ = steane_round(state, steane, anc, 0, forced=rec)
    assert a.same_state(b) and a.same_state(state)


# --- logical measurement -------------------------------------------------------


def test_measure_x_on_zero_is_random(steane):
    state = encode_state(steane, Tableau(1))
    rng = np.random.default_rng(4)
    vals = [measure_logical_operator(steane, LogicalAction(1, 1, 0), state, rng)[0] for _ in range(200)]
    assert 60 < vals.count(1) < 140


def test_measure_xx_on_bell_pair():
    code = protocol_code("even4")
    bell = Tableau(2).h(0).cnot(0, 1)
    state = encode_state(code, bell)
    rng = np.random.default_rng(0)
    for _ in range(10):
        val, out, synd = measure_logical_operator(code, LogicalAction(2, 0b11, 0), state, rng)
        assert val == 1 and synd == (0, 0) and out.same_state(state)


def test_measure_xz_same_qubit_is_y():
    # X̄_i Z̄_i is -iY on the same qubit; as a Hermitian observable it is Ȳ
    code = protocol_code("even4")
    state = encode_state(code, Tableau(2).h(0).s_gate(0))  # |+i> on slot 0
    val, _, _ = measure_logical_operator(code, LogicalAction(2, 1, 1), state, np.random.default_rng(0))
    assert val == 1


@pytest.mark.parametrize("name", ["even4", "steane7"])
def test_ancilla_measurement_matches_direct(name):
    rep = verify_logical_measurement(protocol_code(name), seed=3, n_random=5)
    assert rep.ok, rep.details[:5]


def test_unsupported_observable(steane):
    with pytest.raises(Gf2Error):
        measure_logical_operator(steane, LogicalAction(1, 0, 0), choi_code_state(steane))


# --- gate protocols -----------------------------------------------------------


@pytest.mark.parametrize(
    "protocol,code",
    [("hadamard", "even4"), ("phase", "even4"), ("cnot", "even6"), ("swap", "even6"), ("teleport", "even4+rm15")],
)
def test_protocol_suite(protocol, code):
    rep = verify_protocol(protocol, protocol_code(code), seed=5, n_random=3)
    assert rep.ok, (str(rep), rep.details[:5])


def test_hadamard_on_zero_gives_plus():
    code = protocol_code("even4")
    state = encode_state(code, Tableau(2))
    out, run = logical_hadamard(code, 1, state, np.random.default_rng(0), buffer=0)
    out = frame_applied(code, out, run)
    dest = run.perm[1]
    label = "".join("X" if q == dest else "I" for q in range(2))
    assert peek_logical(code, out, label) == 1


def test_cnot_on_one_zero_gives_one_one():
    code = protocol_code("even6")
    logical = Tableau(4).apply("X", 1)  # slots 1, 2 = |1>|0>, buffer 0 in |0>
    state = encode_state(code, logical)
    out, run = logical_cnot(code, 1, 2, state, np.random.default_rng(3), buffer=0)
    out = frame_applied(code, out, run)
    for src in (1, 2):
        label = "".join("Z" if q == run.perm[src] else "I" for q in range(4))
        assert peek_logical(code, out, label) == -1
    # control moved to j, target to the buffer, buffer to i
    assert run.perm[1] == 2 and run.perm[2] == 0 and run.perm[0] == 1


def test_phase_on_plus_gives_plus_i():
    code = protocol_code("even4")
    state = encode_state(code, Tableau(2).h(1))
    out, run = logical_phase(code, 1, state, np.random.default_rng(1), buffer=0)
    out = frame_applied(code, out, run)
    dest = run.perm[1]
    assert peek_logical(code, out, "".join("Y" if q == dest else "I" for q in range(2))) == 1


def test_buffer_must_be_initialized():
    code = protocol_code("even4")
    state = encode_state(code, Tableau(2).h(0))  # buffer in |+>
    with pytest.raises(BufferError):
        logical_hadamard(code, 1, state, np.random.default_rng(0), buffer=0)


def test_teleport_round_trip_and_errors():
    mem = protocol_code("even4")
    proc = protocol_code("rm15")
    code = teleport_register(mem, proc)
    assert code.k == 3 and code.n == 19
    rng = np.random.default_rng(8)
    logical = product_logical_state(3, {2: ("Y", -1)})
    state = encode_state(code, logical)
    out, run = logical_teleport(mem, proc, 2, state, rng)
    out = frame_applied(code, out, run)
    assert peek_logical(code, out, "IIY") == -1
    with pytest.raises(Gf2Error):
        logical_teleport(mem, proc, 1, state, rng)


def test_transversal_t_teleport():
    rep = t_teleport_check(seed=1)
    assert rep.ok and rep.inputs == 6


def test_pauli_frame_apply_clears():
    code = protocol_code("even4")
    state = encode_state(code, Tableau(2))
    frame = PauliFrame.empty(2).update(LogicalAction(2, 0b01, 0))
    frame.apply(code, state)
    assert frame.action.is_identity()
    assert peek_logical(code, state, "ZI") == -1
