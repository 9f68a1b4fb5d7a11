"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from blockft.classical import KasamiDecoder, bch89, bch127, bch255, decoder_for, golay23, random_error
from blockft.cli import main
from blockft.decoders import block_posterior, brute_force_posterior
from blockft.montecarlo import (
    analytic_bound,
    exact_memory_failure,
    loglog_fit,
    memory_bound,
    rm_upper_bound,
    run_fixed_weight_trials,
    run_memory_trials,
    run_rm_trials,
)
from blockft.noise import NoiseParams, effective_channel
from blockft.protocols import effective_error_equivalence_check, t_teleport_check, verify_logical_measurement, verify_protocol
from blockft.registry import build_named, protocol_code
from blockft.rm15 import rm_concat, verify_transversal_t

from conftest import ACCEPTANCE


def record(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[num] = (ok, detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_1_effective_channel():
    t0 = time.perf_counter()
    p = 1e-3
    ch = effective_channel(NoiseParams.uniform(p))
    rel = {
        "X": abs(ch.p_x / (71 * p / 15) - 1),
        "Z": abs(ch.p_z / (71 * p / 15) - 1),
        "Y": abs(ch.p_y / (23 * p / 15) - 1),
    }

    def residual(q: float) -> float:
        c = effective_channel(NoiseParams.uniform(q))
        return max(abs(c.p_x - 71 * q / 15), abs(c.p_y - 23 * q / 15), abs(c.p_z - 71 * q / 15))

    ratio = residual(p) / residual(p / 2)
    elapsed = time.perf_counter() - t0
    ok = max(rel.values()) < 0.02 and 3.6 < ratio < 4.4 and elapsed < 1.0
    record(
        1,
        ok,
        f"rel dev X={rel['X']:.2e} Y={rel['Y']:.2e} Z={rel['Z']:.2e}; residual ratio on halving p {ratio:.3f}; {elapsed:.3f}s",
    )


def test_criterion_2_analytic_bounds():
    t0 = time.perf_counter()
    inner = analytic_bound(23, 7, 0.007)
    vals = {
        89: (memory_bound(89, 9, 23, 7, 0.007), 3e-17, 3e-16),
        127: (memory_bound(127, 11, 23, 7, 0.007), 8e-20, 8e-19),
        255: (memory_bound(255, 15, 23, 7, 0.007), 2e-24, 2e-23),
    }
    elapsed = time.perf_counter() - t0
    ok = all(lo <= v <= hi for v, lo, hi in vals.values()) and elapsed < 1.0
    detail = f"P23(0.007)={inner:.4e}; " + ", ".join(f"P{n}={v:.4e}" for n, (v, _, _) in vals.items())
    record(2, ok, f"{detail}; {elapsed:.3f}s")


def test_criterion_3_decoder_exhaustiveness():
    t0 = time.perf_counter()
    C = golay23()
    dec = KasamiDecoder(C)
    golay_total = golay_ok = 0
    for w in range(4):
        for supp in itertools.combinations(range(23), w):
            e = sum(1 << q for q in supp)
            out = dec.decode(C.syndrome(e))
            golay_total += 1
            golay_ok += out.ok and out.error_estimate == e
    parts = [f"Golay {golay_ok}/{golay_total}"]
    ok = golay_ok == golay_total == 2048
    for ctor in (bch89, bch127, bch255):
        B = ctor()
        d = decoder_for(B)
        rng = np.random.default_rng(B.n)
        good = 0
        n = 100_000
        for _ in range(n):
            e = random_error(B.n, int(rng.integers(0, B.t + 1)), rng)
            out = d(B.syndrome(e))
            good += out.ok and out.error_estimate == e
        parts.append(f"BCH{B.n} {good}/{n}")
        ok = ok and good == n
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 300
    record(3, ok, ", ".join(parts) + f"; {elapsed:.1f}s")


def test_criterion_4_map_oracle(steane):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(100):
        s = int(rng.integers(1 << steane.r))
        if i % 2:
            p = float(rng.uniform(0.01, 0.3))
            pri = np.tile([1 - p, p / 3, p / 3, p / 3], (7, 1))
        else:
            pri = rng.dirichlet(np.ones(4), size=7)
        got = block_posterior(steane, s, pri).probs
        worst = max(worst, float(np.abs(got - brute_force_posterior(steane, s, pri)).max()))
    elapsed = time.perf_counter() - t0
    record(4, worst <= 1e-12 and elapsed < 300, f"max |diff| {worst:.2e} over 100 instances; {elapsed:.1f}s")


def test_criterion_5_extraction_equivalence(steane):
    t0 = time.perf_counter()
    rep = effective_error_equivalence_check(steane, n_double=10_000, seed=5)
    elapsed = time.perf_counter() - t0
    record(5, rep.ok and elapsed < 600, f"{rep}; {elapsed:.1f}s")


PROTOCOL_CODES = {
    "hadamard": ["even4", "even6", "steane7x2", "hamming15"],
    "phase": ["even4", "even6", "steane7x2", "hamming15"],
    "cnot": ["even6", "steane7x3", "hamming15"],
    "swap": ["even6", "steane7x3", "hamming15"],
    "teleport": ["even4+rm15"],
}


def test_criterion_6_protocol_suite():
    t0 = time.perf_counter()
    lines = []
    ok = True
    for name, codes in PROTOCOL_CODES.items():
        for code in codes:
            rep = verify_protocol(name, protocol_code(code), seed=6)
            ok &= rep.ok
            lines.append(f"{rep.protocol}/{rep.code} {rep.cases - rep.failures}/{rep.cases}")
    for code in ("even4", "steane7"):
        rep = verify_logical_measurement(protocol_code(code), seed=6)
        ok &= rep.ok
        lines.append(f"logical-measure/{code} {rep.cases - rep.failures}/{rep.cases}")
    t = verify_transversal_t()
    phase_err = max(abs(t.phase0 - 1), abs(t.phase1 - t.expected1))
    tel = t_teleport_check(seed=6)
    ok &= t.ok and phase_err < 1e-10 and tel.ok
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    lines.append(f"T phase error {phase_err:.1e}, teleported T fidelity {tel.min_fidelity:.12f}")
    record(6, ok, "; ".join(lines) + f"; {elapsed:.1f}s")


GOLAY_SWEEP = (0.015, 0.02, 0.03)


def test_criterion_7_desk_scale_monte_carlo():
    t0 = time.perf_counter()
    golay = build_named("golay23")
    stack = golay.memory_stack()
    code, C = stack.spec.levels[0], stack.inner

    # (a) single-block rate against the exact oracle and the analytic bound
    est = run_memory_trials(stack, 0.05, 100_000, seed=7)
    exact = exact_memory_failure(code, C, 0.05)
    sigma = math.sqrt(exact * (1 - exact) / est.trials)
    z = (est.rate - exact) / sigma
    bound = analytic_bound(23, 7, 0.05)
    ok_a = abs(z) <= 2 and est.rate < bound
    part_a = f"(a) {est.rate:.5f} vs exact {exact:.5f} ({z:+.2f} sigma), bound {bound:.4f}"

    # (b) soft vs hard on two-level [[15,1,3]] with paired samples
    spec = rm_concat(2)
    ok_b = True
    part_b = []
    for i, p in enumerate((0.02, 0.03)):
        res = run_rm_trials(spec, p, 10_000, seed=70 + i)
        diff = res.soft.rate - res.hard.rate
        ok_b &= diff <= 2 * res.paired_sigma
        part_b.append(f"p={p}: soft {res.soft.rate:.4f} hard {res.hard.rate:.4f}")
    part_b_text = "(b) " + ", ".join(part_b)

    # (c) slope of the Golay sweep
    pts = []
    for i, p in enumerate(GOLAY_SWEEP):
        r = run_memory_trials(stack, p, 1_000_000, seed=700 + i)
        pts.append((p, r.rate))
    slope = loglog_fit(pts).slope
    ok_c = 3.4 <= slope <= 4.6
    part_c = f"(c) slope {slope:.3f} over p_eff {GOLAY_SWEEP}"

    elapsed = time.perf_counter() - t0
    record(7, ok_a and ok_b and ok_c and elapsed < 7200, f"{part_a}; {part_b_text}; {part_c}; {elapsed:.1f}s")


SWEEP_CONFIG = 'code = "golay23"\np_eff = [0.03, 0.04, 0.05]\ntrials = 5000\nseed = 8\n'


def test_criterion_8_reproducibility(tmp_path):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(SWEEP_CONFIG)
    outs = []
    for run, jobs in enumerate((1, 2, 1)):
        d = tmp_path / f"run{run}"
        d.mkdir()
        out = d / "result.csv"
        assert main(["simulate", str(cfg), "--jobs", str(jobs), "--out", str(out)]) == 0
        outs.append(out.read_bytes().replace(str(d).encode(), b"DIR"))
    same = outs[0] == outs[1] == outs[2]
    rows = outs[0].count(b"\n") - 3
    record(8, same, f"3 runs (jobs 1, 2, 1) byte-identical: {same}; {rows} data rows")


@pytest.mark.slow
def test_criterion_9_rm_stratified_bound():
    t0 = time.perf_counter()
    spec = rm_concat(3)
    r34 = run_fixed_weight_trials(spec, 34, "Z", 0.01, 10_000, seed=34)
    r50 = run_fixed_weight_trials(spec, 50, "Z", 0.01, 10_000, seed=50)
    bound = rm_upper_bound(0.01, {34: r34.rate, 50: r50.rate})
    elapsed = time.perf_counter() - t0
    ok = 2e-11 <= bound <= 2e-9
    record(
        9,
        ok,
        f"P34={r34.failures}/{r34.trials}, P50={r50.failures}/{r50.trials}, bound {bound:.3e} (target 2e-10 within 10x); {elapsed:.0f}s",
    )
