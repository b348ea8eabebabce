"""Loschmidt amplitudes of purified mixed states.

Quasistatic and quench dynamics, Uhlmann holonomies, closed forms for the
two-level, three-level and Creutz-ladder models, the two-level spinor picture,
and grid scans that locate amplitude zeros.
"""

from __future__ import annotations

from .errors import (
    DimMismatch,
    DomainError,
    GaplessPath,
    GridTooCoarse,
    LoschmidtError,
    NoSignChange,
    NotClosed,
    NotHermitian,
    NotPositive,
    NotUnitary,
    RankDeficient,
)
from .purification import Amplitude, DensityMatrix, PurifiedState, purify, reduce
from .dynamics import dynamical_phase, loschmidt_amplitude
from .uhlmann import DensityPath, holonomy, uhlmann_loschmidt
from .scan import GridAxis, PhaseDiagram, scan_dynamics, scan_uhlmann

__version__ = "0.1.0"

__all__ = [
    "Amplitude",
    "DensityMatrix",
    "DensityPath",
    "DimMismatch",
    "DomainError",
    "GaplessPath",
    "GridAxis",
    "GridTooCoarse",
    "LoschmidtError",
    "NoSignChange",
    "NotClosed",
    "NotHermitian",
    "NotPositive",
    "NotUnitary",
    "PhaseDiagram",
    "PurifiedState",
    "RankDeficient",
    "dynamical_phase",
    "holonomy",
    "loschmidt_amplitude",
    "purify",
    "reduce",
    "scan_dynamics",
    "scan_uhlmann",
    "uhlmann_loschmidt",
]
