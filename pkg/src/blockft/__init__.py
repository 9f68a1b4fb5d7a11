"""Toolkit for teleportation-based fault-tolerant computation on CSS block codes."""

from __future__ import annotations

__version__ = "0.1.0"

from .classical import LinearCode, bch89, bch127, bch255, golay23
from .css import ConcatSpec, CssCode, css_code, css_from_selfdual
from .noise import NoiseParams, PauliChannel, effective_channel, p_eff
from .pauli import PauliOperator
from .tableau import Tableau

__all__ = [
    "ConcatSpec",
    "CssCode",
    "LinearCode",
    "NoiseParams",
    "PauliChannel",
    "PauliOperator",
    "Tableau",
    "__version__",
    "bch89",
    "bch127",
    "bch255",
    "css_code",
    "css_from_selfdual",
    "effective_channel",
    "golay23",
    "p_eff",
]
