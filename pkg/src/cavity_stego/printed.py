"""Hand transcriptions of the published evolved states and code tables.

These are copied term for term, typos included, so the derived objects can
be diffed against them. Nothing in the simulator reads them as ground truth
except the S- row of the swap table, which fixes which collection carries
which code.

Kets are written over the pipeline register (A, D, B, E, C) as
``"ad be c"`` with spaces for readability.
"""
from __future__ import annotations

from math import sqrt

import numpy as np

from .states import BellKind, GhzKind, StateVector, ket_index
from .cavity import PIPELINE_REGISTER

_AMP = sqrt(2) / 4

# Terms (coefficient, ket); every state carries an overall sqrt(2)/4.
EVOLVED_TERMS: dict[BellKind, list[tuple[complex, str]]] = {
    BellKind.PSI_MINUS: [
        (-1j, "gg gg g"), (1j, "eg eg g"), (1j, "ge ge g"), (-1j, "ee ee g"),
        (-1, "gg ee e"), (-1, "eg ge e"), (1, "ge eg e"), (1, "ee gg e"),
    ],
    BellKind.PSI_PLUS: [
        (-1, "ee gg g"), (-1, "eg ge g"), (1, "ge eg g"), (1, "gg ee g"),
        (1j, "gg gg e"), (1j, "eg eg e"), (1j, "ge eg e"), (1j, "ee ee e"),
    ],
    BellKind.PHI_MINUS: [
        (-1j, "gg ge g"), (1j, "eg ee g"), (1j, "ge gg g"), (-1j, "ee eg g"),
        (-1, "gg eg e"), (-1, "eg gg e"), (1, "ge ee e"), (1, "ee ge e"),
    ],
    BellKind.PHI_PLUS: [
        (-1, "eg gg g"), (1, "ge ee g"), (-1, "ee ge g"), (1, "gg eg g"),
        (1j, "ge gg e"), (1j, "eg eg e"), (1j, "ee eg e"), (1j, "gg ge e"),
    ],
}

# Printed outcome collections, keyed by code, in printed member order.
COLLECTIONS: dict[str, list[str]] = {
    "00": ["gg gg g", "eg eg g", "ge ge g", "ee ee g",
           "gg ee e", "eg ge e", "ge eg e", "ee gg e"],
    "11": ["ee gg g", "eg ge g", "ge eg g", "gg ee g",
           "gg gg e", "eg eg e", "ge ge e", "ee ee e"],
    "01": ["gg ge g", "eg ee g", "ge gg g", "ee eg g", "gg eg g",
           "gg eg e", "eg gg e", "ge ee e", "ee ge e"],
    "10": ["eg gg g", "ge ee g", "ee ge g", "gg eg g",
           "ge gg e", "eg ee e", "ee eg e", "gg ge e"],
}

_COLUMNS = (BellKind.PSI_PLUS, BellKind.PSI_MINUS, BellKind.PHI_PLUS, BellKind.PHI_MINUS)
_ROWS = {
    GhzKind.S_PLUS: "00 11 01 10",
    GhzKind.S_MINUS: "11 00 10 01",
    GhzKind.P_PLUS: "10 01 11 00",
    GhzKind.P_MINUS: "01 10 00 11",
    GhzKind.Q_PLUS: "10 01 11 00",
    GhzKind.Q_MINUS: "01 10 00 11",
    GhzKind.R_PLUS: "00 11 01 10",
    GhzKind.R_MINUS: "11 00 10 01",
}
SWAP_TABLE: dict[tuple[GhzKind, BellKind], str] = {
    (g, b): cell
    for g, row in _ROWS.items()
    for b, cell in zip(_COLUMNS, row.split())
}

# Pair code for the four initial pairs that carry secret 111.
PAIR_CODE = {"1100": "00", "0011": "01", "1010": "10", "0101": "11"}


def compact(ket: str) -> str:
    return ket.replace(" ", "")


def evolved_amplitudes(bell: BellKind) -> np.ndarray:
    """Amplitude vector of the printed evolved state, summing repeated kets."""
    amps = np.zeros(32, dtype=complex)
    for coeff, ket in EVOLVED_TERMS[bell]:
        amps[ket_index(compact(ket))] += coeff * _AMP
    return amps


def evolved_state(bell: BellKind) -> StateVector | None:
    """The printed state as a StateVector, or None if it is not normalized."""
    amps = evolved_amplitudes(bell)
    if abs(np.vdot(amps, amps).real - 1) > 1e-12:
        return None
    return StateVector(PIPELINE_REGISTER, amps)


def duplicate_terms(bell: BellKind) -> list[str]:
    seen: set[str] = set()
    dups = []
    for _, ket in EVOLVED_TERMS[bell]:
        if ket in seen:
            dups.append(ket)
        seen.add(ket)
    return dups
