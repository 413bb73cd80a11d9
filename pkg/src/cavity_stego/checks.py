"""Eavesdropping-check predicates.

A check measures every atom of one prepared state in a common basis. The
predicate accepts a joint outcome iff the ideal (undisturbed) state gives it
nonzero probability, so on an ideal channel every check passes.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .states import (
    HADAMARD,
    BellKind,
    GhzKind,
    MeasBasis,
    QubitLabel,
    StateVector,
    apply,
    index_ket,
    make_bell,
    make_ghz,
)


def joint_distribution(state: StateVector, qubits: tuple[QubitLabel, ...], basis: MeasBasis) -> np.ndarray:
    """Outcome probabilities of ``qubits`` (in order) measured in ``basis``, rest traced out."""
    if basis is MeasBasis.X:
        for q in qubits:
            state = apply(state, HADAMARD, (q,))
    rest = tuple(q for q in state.register if q not in qubits)
    amps = state.reorder(qubits + rest).amplitudes.reshape(1 << len(qubits), -1)
    return np.einsum("ij,ij->i", amps.conj(), amps).real


def _allowed(state: StateVector, basis: MeasBasis) -> frozenset[str]:
    probs = joint_distribution(state, state.register, basis)
    return frozenset(index_ket(int(i), state.n_qubits) for i in np.flatnonzero(probs > 1e-12))


@lru_cache(maxsize=None)
def allowed_outcomes(kind: GhzKind | BellKind, basis: MeasBasis) -> frozenset[str]:
    """Joint outcomes (as g/e letters, 'g' = + in X) the ideal state can produce."""
    state = make_bell(kind) if isinstance(kind, BellKind) else make_ghz(kind)
    return _allowed(state, basis)


def check_passes(kind: GhzKind | BellKind, basis: MeasBasis, outcome: str) -> bool:
    """``outcome`` lists the transit atom first, then Bob's partner atoms in order."""
    return outcome in allowed_outcomes(kind, basis)


def render_outcome(basis: MeasBasis, outcome: str) -> str:
    if basis is MeasBasis.Z:
        return outcome
    return outcome.translate(str.maketrans("ge", "+-"))
