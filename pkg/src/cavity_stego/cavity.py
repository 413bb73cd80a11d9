"""Two-atom cavity gate from the effective Hamiltonian, and the five-atom swap pipeline.

Only the dimensionless products ``Omega*t`` and ``lambda*t`` matter. The gate
carried by the protocol uses ``Omega*t = pi`` and ``lambda*t = pi/4``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isclose, pi, sqrt
from typing import Sequence

import numpy as np

from .errors import BadParameter
from .states import (
    HADAMARD,
    BellKind,
    GhzKind,
    QubitLabel,
    StateVector,
    Unitary,
    apply,
    label,
    make_bell,
    make_ghz,
    tensor,
)

_RAISE = np.array([[0, 0], [1, 0]], dtype=complex)  # S+ = |e><g|
_LOWER = _RAISE.conj().T  # S- = |g><e|
_ID2 = np.eye(2, dtype=complex)

READINGS = ("literal", "exchange-only")


def _on(op: np.ndarray, atom: int) -> np.ndarray:
    """Single-atom operator embedded on atom 0 or 1 of the pair."""
    return np.kron(op, _ID2) if atom == 0 else np.kron(_ID2, op)


@dataclass(frozen=True)
class CavityParams:
    Omega: float = pi
    g_coupling: float = sqrt(pi)
    delta: float = 2.0
    t: float = 1.0
    omega0: float = 1.0
    omega_a: float = 1.0
    omega: float = 1.0

    @property
    def lam(self) -> float:
        return self.g_coupling**2 / (2 * self.delta)

    @property
    def large_detuning(self) -> bool:
        return self.delta >= 10 * self.g_coupling

    @property
    def strong_driving(self) -> bool:
        return self.Omega >= 10 * self.delta

    @property
    def is_protocol_setting(self) -> bool:
        return abs(self.Omega * self.t - pi) <= 1e-12 and abs(self.lam * self.t - pi / 4) <= 1e-12

    def validate(self) -> None:
        if self.delta <= 0 or self.g_coupling <= 0:
            raise BadParameter("coupling and detuning must be positive")
        if self.Omega < 0 or self.t < 0:
            raise BadParameter("Rabi frequency and interaction time must be non-negative")
        if not isclose(self.omega0, self.omega, rel_tol=1e-12, abs_tol=1e-12):
            raise BadParameter("atomic transition and driving frequencies must coincide")

    def regime_flags(self) -> dict[str, bool]:
        return {
            "large_detuning": self.large_detuning,
            "strong_driving": self.strong_driving,
            "protocol_setting": self.is_protocol_setting,
        }

    @classmethod
    def for_products(cls, omega_t: float, lambda_t: float, t: float = 1.0) -> "CavityParams":
        """Parameters realizing the requested products, with ``delta = 2``."""
        if not (lambda_t > 0 and t > 0):
            raise BadParameter("lambda*t and t must be positive")
        delta = 2.0
        g = sqrt(2 * delta * lambda_t / t)
        return cls(Omega=omega_t / t, g_coupling=g, delta=delta, t=t)


def effective_hamiltonian(lam: float, reading: str = "literal") -> np.ndarray:
    """Two-atom effective generator over (gg, ge, eg, ee).

    ``literal`` keeps every printed term: the per-atom projector sum (an
    identity) plus ``S_i^+ S_j^- + S_i^+ S_j^+ + h.c.`` summed over ordered
    pairs ``i != j``. ``exchange-only`` drops the ``S^+ S^+`` terms and is kept
    as a diagnostic alternative.
    """
    if reading not in READINGS:
        raise BadParameter(f"unknown reading {reading!r}")
    if not lam > 0:
        raise BadParameter(f"lambda must be positive, got {lam}")
    proj = _RAISE @ _LOWER + _LOWER @ _RAISE  # |e><e| + |g><g|
    diag = _on(proj, 0) + _on(proj, 1)
    coupling = np.zeros((4, 4), dtype=complex)
    for i, j in ((0, 1), (1, 0)):
        term = _on(_RAISE, i) @ _on(_LOWER, j)
        if reading == "literal":
            term = term + _on(_RAISE, i) @ _on(_RAISE, j)
        coupling += term + term.conj().T
    return (lam / 2) * (diag + coupling)


def driving_hamiltonian(Omega: float) -> np.ndarray:
    return Omega * (_on(_RAISE + _LOWER, 0) + _on(_RAISE + _LOWER, 1))


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolution_gate(params: CavityParams | None = None, reading: str = "literal") -> Unitary:
    """Interaction-picture evolution ``exp(-i H0 t) exp(-i He t)``."""
    params = params or CavityParams()
    params.validate()
    u_drive = expm_hermitian(driving_hamiltonian(params.Omega), params.t)
    u_eff = expm_hermitian(effective_hamiltonian(params.lam, reading), params.t)
    return Unitary(u_drive @ u_eff)


def reference_gate() -> Unitary:
    """Closed form of the protocol gate, global phase dropped.

    Each basis state ``|xy>`` goes to ``(|xy> - i|x'y'>)/sqrt(2)`` with both
    atoms flipped in the second term.
    """
    flip = np.fliplr(np.eye(4, dtype=complex))
    return Unitary((np.eye(4) - 1j * flip) / sqrt(2))


def gate_deviation(u: Unitary | np.ndarray, v: Unitary | np.ndarray) -> float:
    """Max-entry distance between two gates after removing a global phase."""
    a = u.matrix if isinstance(u, Unitary) else np.asarray(u)
    b = v.matrix if isinstance(v, Unitary) else np.asarray(v)
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    c = a[k] / b[k]
    c = c / abs(c) if abs(c) else 1.0
    return float(np.abs(a - c * b).max())


def swap_and_rotate(
    state: StateVector,
    gate: Unitary,
    first_pair: Sequence[QubitLabel],
    second_pair: Sequence[QubitLabel],
    hadamard_target: QubitLabel,
) -> StateVector:
    """One cavity pass per pair followed by the Hadamard on the spare GHZ atom."""
    state = apply(state, gate, first_pair)
    state = apply(state, gate, second_pair)
    return apply(state, HADAMARD, (hadamard_target,))


PIPELINE_REGISTER = tuple(label(r) for r in "ADBEC")


def pipeline(ghz: GhzKind, bell: BellKind, gate: Unitary | None = None) -> StateVector:
    """Evolve ``ghz`` on (A,B,C) with ``bell`` on (D,E); result over (A,D,B,E,C)."""
    gate = gate or reference_gate()
    a, b, c, d, e = (label(r) for r in "ABCDE")
    joint = tensor(make_ghz(ghz, (a, b, c)), make_bell(bell, (d, e)))
    out = swap_and_rotate(joint, gate, (a, d), (b, e), c)
    return out.reorder(PIPELINE_REGISTER)
