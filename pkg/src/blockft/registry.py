"""Named codes and stacks used by the command line."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .classical import LinearCode, bch89, bch127, bch255, golay23, hamming
from .css import ConcatSpec, CssCode, check_code, concatenate, css_from_selfdual
from .gf2 import Gf2Error
from .montecarlo import MemoryStack
from .rm15 import rm_concat

CODE_NAMES = (
    "golay23",
    "bch89",
    "bch127",
    "bch255",
    "steane7",
    "rm15",
    "rm15x2",
    "rm15x3",
    "mem2047",
    "mem2921",
    "mem5865",
)

_MEMORY_OUTER = {"mem2047": "bch89", "mem2921": "bch127", "mem5865": "bch255"}
_CLASSICAL = {"golay23": golay23, "bch89": bch89, "bch127": bch127, "bch255": bch255}


@dataclass(frozen=True, eq=False)
class NamedCode:
    name: str
    spec: ConcatSpec
    classical: tuple[LinearCode, ...] = ()  # bottom first, for hard-decoded stacks

    @property
    def params(self) -> tuple[int, int, int]:
        return self.spec.params()

    @property
    def is_rm(self) -> bool:
        return self.name.startswith("rm15")

    def memory_stack(self) -> MemoryStack:
        if not self.classical:
            raise Gf2Error(f"{self.name} is not a hard-decoded memory code")
        inner = self.classical[0]
        outer = self.classical[1] if len(self.classical) > 1 else None
        return MemoryStack(self.spec, inner, outer)


@lru_cache(maxsize=None)
def classical_code(name: str) -> LinearCode:
    return _CLASSICAL[name]()


@lru_cache(maxsize=None)
def css_block(name: str) -> CssCode:
    if name == "steane7":
        return css_from_selfdual(hamming(3), "steane7")
    return css_from_selfdual(classical_code(name), name)


@lru_cache(maxsize=None)
def build_named(name: str) -> NamedCode:
    if name not in CODE_NAMES:
        raise Gf2Error(f"unknown code {name!r}; choose from {', '.join(CODE_NAMES)}")
    if name in _CLASSICAL:
        return NamedCode(name, ConcatSpec((css_block(name),), name), (classical_code(name),))
    if name == "steane7":
        return NamedCode(name, ConcatSpec((css_block(name),), name))
    if name.startswith("rm15"):
        levels = 1 if name == "rm15" else int(name[-1])
        return NamedCode(name, rm_concat(levels))
    outer = _MEMORY_OUTER[name]
    spec = concatenate(css_block(outer), css_block("golay23"), name)
    return NamedCode(name, spec, (classical_code("golay23"), classical_code(outer)))


def invariant_report(named: NamedCode) -> dict[str, object]:
    """Structural checks on every distinct level of the named code."""
    out: dict[str, object] = {}
    seen = set()
    for code in named.spec.levels:
        if id(code) in seen:
            continue
        seen.add(id(code))
        out[code.name or "level"] = check_code(code)
    return out


# small codes for protocol verification
PROTOCOL_CODES = ("steane7", "rm15", "even4", "even6", "hamming15", "steane7x2", "steane7x3", "even4+rm15")


@lru_cache(maxsize=None)
def protocol_code(name: str) -> CssCode:
    from .classical import even_weight
    from .protocols import direct_sum
    from .rm15 import build_rm15

    if name == "steane7":
        return css_block("steane7")
    if name == "rm15":
        return build_rm15().code
    if name in ("even4", "even6"):
        return css_from_selfdual(even_weight(int(name[-1])), name)
    if name == "hamming15":
        return css_from_selfdual(hamming(4), name)
    if name in ("steane7x2", "steane7x3"):
        s = css_block("steane7")
        return direct_sum(*([s] * int(name[-1])), name=name)
    if name == "even4+rm15":
        # processor first, then the memory block
        return direct_sum(build_rm15().code, protocol_code("even4"), name=name)
    raise Gf2Error(f"unknown protocol code {name!r}; choose from {', '.join(PROTOCOL_CODES)}")
