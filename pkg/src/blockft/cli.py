"""Command line front-end: build, simulate, bound, verify, channel.

Exit codes: 0 success, 1 usage or configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .gf2 import Gf2Error

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# --------------------------------------------------------------------------
# configuration


CONFIG_KEYS = {
    "code": str,
    "p_eff": list,
    "p": list,
    "trials": int,
    "seed": int,
    "out": str,
    "decoder": str,
}
REQUIRED_KEYS = ("code", "trials", "seed")


def _key_line(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), 1):
        if line.split("=", 1)[0].strip() == key:
            return i
    return 0


def parse_config(text: str, source: str = "<config>") -> dict:
    """Flat TOML with a fixed schema; unknown keys and missing rates are errors."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"{source}: {exc}") from exc
    for key, val in raw.items():
        line = _key_line(text, key)
        if key not in CONFIG_KEYS:
            raise UsageError(f"{source}:{line}: unknown key {key!r}")
        want = CONFIG_KEYS[key]
        if want is int and (isinstance(val, bool) or not isinstance(val, int)):
            raise UsageError(f"{source}:{line}: {key} must be an integer")
        if want is not int and not isinstance(val, want):
            raise UsageError(f"{source}:{line}: {key} must be a {want.__name__}")
        if want is list and not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val):
            raise UsageError(f"{source}:{line}: {key} must be a list of numbers")
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise UsageError(f"{source}: missing required key {key!r}")
    if ("p_eff" in raw) == ("p" in raw):
        raise UsageError(f"{source}: give exactly one of 'p_eff' or 'p' (no default rates)")
    sweep = raw.get("p_eff", raw.get("p"))
    if not sweep:
        raise UsageError(f"{source}:{_key_line(text, 'p_eff' if 'p_eff' in raw else 'p')}: empty sweep")
    if raw["trials"] <= 0:
        raise UsageError(f"{source}:{_key_line(text, 'trials')}: trials must be positive")
    if raw.get("decoder", "soft") not in ("soft", "hard"):
        raise UsageError(f"{source}:{_key_line(text, 'decoder')}: decoder must be 'soft' or 'hard'")
    return raw


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    return parse_config(text, path)


# --------------------------------------------------------------------------
# subcommands


def _named(name: str):
    from .registry import build_named

    try:
        return build_named(name)
    except Gf2Error as exc:
        raise UsageError(str(exc)) from exc


def cmd_build(args) -> int:
    from .registry import invariant_report

    named = _named(args.code)
    n, k, d = named.params
    print(f"{named.name}: [[{n},{k},{d}]]")
    try:
        report = invariant_report(named)
    except Gf2Error as exc:
        print(f"invariant check failed: {exc}")
        return EXIT_VERIFY
    for level, checks in report.items():
        for key, ok in checks.items():
            print(f"  {level}: {key}: {'ok' if ok else 'FAILED'}")
    if args.out:
        seen, parts = set(), []
        for code in named.spec.levels:
            if id(code) not in seen:
                seen.add(id(code))
                parts.append(code.to_text())
        Path(args.out).write_text(f"# blockft {__version__} {named.name}\n" + "\n".join(parts))
    return EXIT_OK if all(all(c.values()) for c in report.values()) else EXIT_VERIFY


def simulate_rows(cfg: dict, jobs: int = 1) -> list[dict]:
    from .montecarlo import run_memory_trials, run_rm_trials
    from .noise import p_eff as to_peff

    named = _named(cfg["code"])
    physical = "p" in cfg
    rows = []
    for i, value in enumerate(cfg["p"] if physical else cfg["p_eff"]):
        try:
            pe = to_peff(value) if physical else float(value)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if not 0.0 <= pe < 1.0:
            raise UsageError(f"p_eff={pe} outside [0, 1)")
        seed = cfg["seed"] + i
        if named.classical:
            est = run_memory_trials(named.memory_stack(), pe, cfg["trials"], seed, jobs)
        else:
            paired = run_rm_trials(named.spec, pe, cfg["trials"], seed, jobs, allow_large=True)
            est = paired.hard if cfg.get("decoder", "soft") == "hard" else paired.soft
        rows.append(
            {
                "p": repr(float(value)) if physical else "",
                "p_eff": repr(pe),
                "code": named.name,
                "trials": est.trials,
                "failures": est.failures,
                "rate": repr(est.rate),
                "ci_lo": repr(est.ci_lo),
                "ci_hi": repr(est.ci_hi),
                "seed": seed,
            }
        )
    return rows


CSV_COLUMNS = ["p", "p_eff", "code", "trials", "failures", "rate", "ci_lo", "ci_hi", "seed"]


def render_csv(rows: list[dict], cfg: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# blockft {__version__}\n")
    buf.write(f"# config {json.dumps(cfg, sort_keys=True)}\n")
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def render_json(rows: list[dict], cfg: dict) -> str:
    return json.dumps({"version": __version__, "config": cfg, "results": rows}, indent=2, sort_keys=True) + "\n"


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.peff:
        cfg.pop("p", None)
        cfg["p_eff"] = list(args.peff)
    if args.out:
        cfg["out"] = args.out
    rows = simulate_rows(cfg, args.jobs)
    text = render_csv(rows, cfg)
    out = cfg.get("out")
    if out:
        path = Path(out)
        path.write_text(text)
        path.with_suffix(".json").write_text(render_json(rows, cfg))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def load_rates(path: str) -> dict[int, float]:
    try:
        raw = tomllib.loads(Path(path).read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read conditional rates: {exc}") from exc
    try:
        return {34: float(raw["rate34"]), 50: float(raw["rate50"])}
    except KeyError as exc:
        raise UsageError(f"conditional-rate file needs rate34 and rate50 (missing {exc})") from exc


def bound_lines(name: str, pe: float, rates: dict[int, float] | None = None) -> list[str]:
    from .montecarlo import analytic_bound, rm_bound_terms

    named = _named(name)
    spec = named.spec
    lines = [f"code {named.name} [[{spec.n},{spec.k},{spec.d}]] p_eff={pe!r}"]
    if named.name == "rm15x3":
        if rates is None:
            raise UsageError("the rm15x3 bound needs a conditional-rate file (--rates)")
        terms = rm_bound_terms(pe, rates, spec.n)
        for label, t in zip(("w=14..34", "w=35..50", "w=51..100", "w>100"), terms):
            lines.append(f"  {label}: {t:.6e}")
        lines.append(f"  bound: {sum(terms):.6e}")
        return lines
    # compose P_n level by level from the bottom; bottom-level failure feeds the next level
    p = pe
    for code in reversed(spec.levels):
        p = analytic_bound(code.n, code.d, p)
        lines.append(f"  P_{code.n}(d={code.d}): {p:.6e}")
    lines.append(f"  bound: {p:.6e}")
    return lines


def cmd_bound(args) -> int:
    from .noise import p_eff as to_peff

    if (args.peff is None) == (args.p is None):
        raise UsageError("give exactly one of --peff or --p")
    try:
        pe = float(args.peff[0]) if args.peff is not None else to_peff(args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not 0.0 <= pe <= 1.0:
        raise UsageError("p_eff must lie in [0, 1]")
    rates = load_rates(args.rates) if args.rates else None
    for line in bound_lines(args.code, pe, rates):
        print(line)
    return EXIT_OK


VERIFY_PROTOCOLS = (
    "extraction-equivalence",
    "hadamard",
    "cnot",
    "phase",
    "swap",
    "teleport",
    "transversal-t",
    "logical-measure",
)


def run_verify(protocol: str, code_name: str, seed: int = 0, doubles: int = 10_000) -> tuple[bool, list[str]]:
    from . import protocols as P
    from .registry import protocol_code
    from .rm15 import verify_transversal_t

    if protocol not in VERIFY_PROTOCOLS:
        raise UsageError(f"unknown protocol {protocol!r}; choose from {', '.join(VERIFY_PROTOCOLS)}")
    try:
        code = protocol_code(code_name)
    except Gf2Error as exc:
        raise UsageError(str(exc)) from exc
    if protocol == "transversal-t":
        if code_name != "rm15":
            raise UsageError("transversal-t is defined for rm15")
        rep = verify_transversal_t()
        tel = P.t_teleport_check(seed=seed)
        lines = [
            f"|0>_L phase {rep.phase0:.12f}",
            f"|1>_L phase {rep.phase1:.12f} (expected e^(-7i pi/4) = {rep.expected1:.12f})",
            f"max deviation {rep.max_deviation:.3e}",
            f"teleported T on {tel.inputs} inputs: min fidelity {tel.min_fidelity:.15f}",
        ]
        ok = rep.ok and tel.ok
        return ok, lines + [("PASS" if ok else "FAIL") + " transversal-t"]
    if protocol == "extraction-equivalence":
        rep = P.effective_error_equivalence_check(code, n_double=doubles, seed=seed)
        return rep.ok, [str(rep)]
    if protocol == "logical-measure":
        rep = P.verify_logical_measurement(code, seed=seed, n_random=20)
        return rep.ok, [str(rep)]
    try:
        rep = P.verify_protocol(protocol, code, seed=seed, n_random=20)
    except Gf2Error as exc:
        raise UsageError(f"unsupported pair {protocol}/{code_name}: {exc}") from exc
    return rep.ok, [str(rep)] + [f"  failed input {d}" for d in rep.details]


def cmd_verify(args) -> int:
    protocol = args.protocol_opt or args.protocol
    code = args.code_opt or args.code
    if not protocol or not code:
        raise UsageError("verify needs a protocol and a code")
    ok, lines = run_verify(protocol, code, args.seed if args.seed is not None else 0)
    for line in lines:
        print(line)
    if args.out:
        Path(args.out).write_text(
            json.dumps({"version": __version__, "protocol": protocol, "code": code, "ok": ok, "report": lines}, indent=2)
            + "\n"
        )
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_channel(args) -> int:
    from .noise import NoiseParams, effective_channel, first_order_channel, p_eff

    if args.p is not None:
        params = NoiseParams.uniform(args.p)
    else:
        vals = [args.eps, args.r, args.pm, args.pg1, args.pg2]
        if any(v is None for v in vals):
            raise UsageError("give --p or all of --eps --r --pm --pg1 --pg2")
        params = NoiseParams(*vals)
    ch = effective_channel(params)
    fo = first_order_channel(params)
    print("exact:       " + " ".join(f"p_{k}={v:.10e}" for k, v in zip("IXYZ", ch.vector)))
    print("first order: " + " ".join(f"p_{k}={v:.10e}" for k, v in zip("IXYZ", fo.vector)))
    print(f"total error {ch.error_rate:.10e}")
    if args.p is not None and args.p <= 5 / 71:
        print(f"p_eff {p_eff(args.p):.10e}")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="blockft", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"blockft {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="construct a named code and check its invariants")
    b.add_argument("code")
    b.add_argument("--out", help="write the serialized code here")
    b.set_defaults(fn=cmd_build)

    s = sub.add_parser("simulate", help="Monte Carlo sweep from a config file")
    s.add_argument("config")
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--peff", type=float, nargs="+")
    s.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_simulate)

    bd = sub.add_parser("bound", help="analytic logical error bounds")
    bd.add_argument("code")
    bd.add_argument("--peff", type=float, nargs=1)
    bd.add_argument("--p", type=float, help="physical rate, converted with p_eff = 71p/5")
    bd.add_argument("--rates", help="TOML file with rate34 and rate50 for the rm15x3 bound")
    bd.set_defaults(fn=cmd_bound)

    v = sub.add_parser("verify", help="protocol and fault-model checks")
    v.add_argument("protocol", nargs="?")
    v.add_argument("code", nargs="?")
    v.add_argument("--protocol", dest="protocol_opt")
    v.add_argument("--code", dest="code_opt")
    v.add_argument("--seed", type=int)
    v.add_argument("--out")
    v.set_defaults(fn=cmd_verify)

    c = sub.add_parser("channel", help="effective channel of one extraction round")
    c.add_argument("--p", type=float, help="set every rate to p")
    for flag in ("--eps", "--r", "--pm", "--pg1", "--pg2"):
        c.add_argument(flag, type=float)
    c.set_defaults(fn=cmd_channel)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Gf2Error, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
