"""Exact state-vector algebra over labelled atom registers.

Conventions used throughout the package:

* ``|g>`` is bit 0 and ``|e>`` is bit 1.
* The first label of a register is the most significant bit of the
  amplitude index, so kets print left to right in register order.
* Measured qubits are removed from the register.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import BadBasis, DuplicateQubit, ShapeError, UnknownQubit

NORM_TOL = 1e-12
BASIS_TOL = 1e-10
STATE_TOL = 1e-9

_S = 1 / np.sqrt(2)


class Role(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    # Eve's ancilla qubits; never part of Alice's or Bob's registers.
    EVE = "Eve"


@dataclass(frozen=True, order=True)
class QubitLabel:
    role: Role
    index: int = 1
    tag: str = ""

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"qubit index must be positive, got {self.index}")

    def __str__(self) -> str:
        base = f"{self.role.value}{self.index}"
        return f"{base}[{self.tag}]" if self.tag else base


def label(role: str | Role, index: int = 1, tag: str = "") -> QubitLabel:
    return QubitLabel(Role(role), index, tag)


class MeasBasis(str, Enum):
    Z = "Z"
    X = "X"


class BellKind(Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @property
    def code(self) -> str:
        """Code of the single-atom unitary taking psi- to this kind."""
        return _BELL_CODES[self]

    @classmethod
    def from_code(cls, code: str) -> "BellKind":
        return _BELL_BY_CODE[code]

    def __str__(self) -> str:
        return self.value


class Family(str, Enum):
    SP = "SP"
    QR = "QR"


class GhzKind(Enum):
    S_PLUS = "S+"
    S_MINUS = "S-"
    P_PLUS = "P+"
    P_MINUS = "P-"
    Q_PLUS = "Q+"
    Q_MINUS = "Q-"
    R_PLUS = "R+"
    R_MINUS = "R-"

    @property
    def family(self) -> Family:
        return Family.SP if self.value[0] in "SP" else Family.QR

    @property
    def code(self) -> str:
        """Code of the unitary on the first atom taking the family reference here."""
        return _GHZ_CODES[self]

    @classmethod
    def from_code(cls, family: Family, code: str) -> "GhzKind":
        return _GHZ_BY_CODE[(Family(family), code)]

    @classmethod
    def reference(cls, family: Family) -> "GhzKind":
        return cls.S_MINUS if Family(family) is Family.SP else cls.Q_MINUS

    def __str__(self) -> str:
        return self.value


_BELL_CODES = {
    BellKind.PSI_PLUS: "11",
    BellKind.PSI_MINUS: "00",
    BellKind.PHI_PLUS: "10",
    BellKind.PHI_MINUS: "01",
}
_BELL_BY_CODE = {c: k for k, c in _BELL_CODES.items()}
_GHZ_CODES = {
    GhzKind.S_PLUS: "11",
    GhzKind.S_MINUS: "00",
    GhzKind.P_PLUS: "10",
    GhzKind.P_MINUS: "01",
    GhzKind.Q_PLUS: "11",
    GhzKind.Q_MINUS: "00",
    GhzKind.R_PLUS: "10",
    GhzKind.R_MINUS: "01",
}
_GHZ_BY_CODE = {(k.family, c): k for k, c in _GHZ_CODES.items()}

# (ket, ket, sign) as printed: (|first> + sign |second>) / sqrt 2
_BELL_KETS = {
    BellKind.PHI_PLUS: ("gg", "ee", 1),
    BellKind.PHI_MINUS: ("gg", "ee", -1),
    BellKind.PSI_PLUS: ("ge", "eg", 1),
    BellKind.PSI_MINUS: ("ge", "eg", -1),
}
_GHZ_KETS = {
    GhzKind.S_PLUS: ("gee", "egg", 1),
    GhzKind.S_MINUS: ("gee", "egg", -1),
    GhzKind.P_PLUS: ("ggg", "eee", 1),
    GhzKind.P_MINUS: ("ggg", "eee", -1),
    GhzKind.Q_PLUS: ("gge", "eeg", 1),
    GhzKind.Q_MINUS: ("gge", "eeg", -1),
    GhzKind.R_PLUS: ("geg", "ege", 1),
    GhzKind.R_MINUS: ("geg", "ege", -1),
}


def ket_index(ket: str) -> int:
    """Amplitude index of a ket written in g/e letters, e.g. ``"geg" -> 2``."""
    return int(ket.translate(str.maketrans("ge", "01")), 2)


def index_ket(index: int, width: int) -> str:
    return format(index, f"0{width}b").translate(str.maketrans("01", "ge")) if width else ""


@dataclass(frozen=True)
class Unitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise ShapeError(f"unitary must be square with power-of-two size, got {m.shape}")
        dev = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
        if dev > NORM_TOL:
            raise ShapeError(f"matrix is not unitary (deviation {dev:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dimension.bit_length() - 1


@dataclass(frozen=True, eq=False)
class StateVector:
    register: tuple[QubitLabel, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        reg = tuple(self.register)
        if len(set(reg)) != len(reg):
            raise DuplicateQubit(f"duplicate labels in register {[str(q) for q in reg]}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 1 << len(reg):
            raise ShapeError(f"{amps.size} amplitudes for {len(reg)} qubits")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > NORM_TOL:
            raise ShapeError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "register", reg)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return len(self.register)

    def position(self, q: QubitLabel) -> int:
        try:
            return self.register.index(q)
        except ValueError:
            raise UnknownQubit(str(q)) from None

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def reorder(self, register: Sequence[QubitLabel]) -> "StateVector":
        """Same state expressed over a permutation of its register."""
        register = tuple(register)
        if register == self.register:
            return self
        if sorted(register) != sorted(self.register):
            raise ShapeError("reorder requires a permutation of the register")
        perm = [self.position(q) for q in register]
        amps = np.transpose(self.tensor_view(), perm).reshape(-1)
        return StateVector(register, amps)

    def support(self, tol: float = 1e-9) -> list[str]:
        """Kets (g/e strings in register order) with nonzero amplitude."""
        idx = np.flatnonzero(np.abs(self.amplitudes) > tol)
        return [index_ket(int(i), self.n_qubits) for i in idx]

    def amplitude(self, ket: str) -> complex:
        return complex(self.amplitudes[ket_index(ket)])

    def relabel(self, mapping: dict[QubitLabel, QubitLabel]) -> "StateVector":
        return StateVector(tuple(mapping.get(q, q) for q in self.register), self.amplitudes)

    def __str__(self) -> str:
        terms = [
            f"({self.amplitudes[ket_index(k)]:.4g})|{k}>" for k in self.support()
        ]
        return " + ".join(terms) + " over " + ",".join(map(str, self.register))


def basis_state(ket: str, register: Sequence[QubitLabel]) -> StateVector:
    amps = np.zeros(1 << len(ket), dtype=complex)
    amps[ket_index(ket)] = 1
    return StateVector(tuple(register), amps)


def _two_term(kets: tuple[str, str, int], register: Sequence[QubitLabel]) -> StateVector:
    first, second, sign = kets
    amps = np.zeros(1 << len(first), dtype=complex)
    amps[ket_index(first)] = _S
    amps[ket_index(second)] = sign * _S
    return StateVector(tuple(register), amps)


def _default_register(roles: str) -> tuple[QubitLabel, ...]:
    return tuple(label(r) for r in roles)


def make_bell(kind: BellKind, register: Sequence[QubitLabel] | None = None) -> StateVector:
    return _two_term(_BELL_KETS[kind], register or _default_register("DE"))


def make_ghz(kind: GhzKind, register: Sequence[QubitLabel] | None = None) -> StateVector:
    return _two_term(_GHZ_KETS[kind], register or _default_register("ABC"))


def x_eigenstate(outcome: int, q: QubitLabel) -> StateVector:
    return StateVector((q,), np.array([_S, _S if outcome == 0 else -_S]))


def eigenstate(basis: MeasBasis, outcome: int, q: QubitLabel) -> StateVector:
    if basis is MeasBasis.Z:
        return basis_state("ge"[outcome], (q,))
    return x_eigenstate(outcome, q)


_PAULI = {
    "00": np.eye(2, dtype=complex),
    "01": np.array([[0, 1], [1, 0]], dtype=complex),
    # |g><e| - |e><g|
    "10": np.array([[0, 1], [-1, 0]], dtype=complex),
    "11": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI_U = {code: Unitary(m) for code, m in _PAULI.items()}

HADAMARD = Unitary(np.array([[1, 1], [1, -1]], dtype=complex) * _S)


def pauli_gate(code: str) -> Unitary:
    """The dense-coding unitary U_0..U_3 addressed by its two-bit code."""
    try:
        return _PAULI_U[code]
    except KeyError:
        raise ValueError(f"unitary code must be two bits, got {code!r}") from None


def tensor(a: StateVector, b: StateVector) -> StateVector:
    if set(a.register) & set(b.register):
        raise DuplicateQubit("tensor of overlapping registers")
    return StateVector(a.register + b.register, np.kron(a.amplitudes, b.amplitudes))


def tensor_all(states: Iterable[StateVector]) -> StateVector:
    it = iter(states)
    out = next(it)
    for s in it:
        out = tensor(out, s)
    return out


def apply(state: StateVector, u: Unitary | np.ndarray, targets: Sequence[QubitLabel]) -> StateVector:
    """Apply ``u`` to ``targets`` (first target = most significant bit of ``u``)."""
    m = u.matrix if isinstance(u, Unitary) else np.asarray(u, dtype=complex)
    k = len(targets)
    if m.shape != (1 << k, 1 << k):
        raise ShapeError(f"{m.shape} operator on {k} target qubits")
    axes = [state.position(q) for q in targets]
    if len(set(axes)) != k:
        raise DuplicateQubit("repeated target qubit")
    psi = state.tensor_view()
    gate = m.reshape((2,) * (2 * k))
    out = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return StateVector(state.register, out.reshape(-1))


def _split(state: StateVector, targets: Sequence[QubitLabel]) -> tuple[np.ndarray, tuple[QubitLabel, ...]]:
    """Matrix (target index, remainder index) and the remainder register."""
    for q in targets:
        state.position(q)
    rest = tuple(q for q in state.register if q not in targets)
    view = state.reorder(tuple(targets) + rest).amplitudes
    return view.reshape(1 << len(targets), 1 << len(rest)), rest


def _collapse(coeffs: np.ndarray, probs: np.ndarray, rest: tuple[QubitLabel, ...], rng) -> tuple[int, StateVector]:
    u = rng.random()
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, u * cum[-1], side="right"))
    idx = min(idx, len(probs) - 1)
    while probs[idx] <= 0:
        idx -= 1
    post = coeffs[idx] / np.sqrt(probs[idx])
    return idx, StateVector(rest, post)


def outcome_probabilities(state: StateVector, target: QubitLabel, basis: MeasBasis) -> np.ndarray:
    mat, _ = _split(state, (target,))
    if basis is MeasBasis.X:
        mat = HADAMARD.matrix @ mat
    return np.einsum("ij,ij->i", mat.conj(), mat).real


def measure(state: StateVector, target: QubitLabel, basis: MeasBasis, rng) -> tuple[int, StateVector]:
    """Projective single-qubit measurement; 0 means ``g`` (Z) or ``+`` (X)."""
    mat, rest = _split(state, (target,))
    if basis is MeasBasis.X:
        mat = HADAMARD.matrix @ mat
    probs = np.einsum("ij,ij->i", mat.conj(), mat).real
    return _collapse(mat, probs, rest, rng)


def project(state: StateVector, target: QubitLabel, basis: MeasBasis, outcome: int) -> tuple[float, StateVector | None]:
    """Probability of ``outcome`` and the collapsed remainder (None if impossible)."""
    mat, rest = _split(state, (target,))
    if basis is MeasBasis.X:
        mat = HADAMARD.matrix @ mat
    row = mat[outcome]
    p = float(np.vdot(row, row).real)
    if p <= 1e-15:
        return p, None
    return p, StateVector(rest, row / np.sqrt(p))


def measure_z_all(state: StateVector, targets: Sequence[QubitLabel], rng) -> tuple[str, StateVector]:
    """Joint Z measurement of several qubits; returns the ket in ``targets`` order."""
    mat, rest = _split(state, targets)
    probs = np.einsum("ij,ij->i", mat.conj(), mat).real
    idx, post = _collapse(mat, probs, rest, rng)
    return index_ket(idx, len(targets)), post


def check_orthonormal(basis_states: Sequence[StateVector], tol: float = BASIS_TOL) -> np.ndarray:
    vecs = np.array([b.amplitudes for b in basis_states])
    dim = vecs.shape[1]
    if len(basis_states) != dim:
        raise BadBasis(f"{len(basis_states)} vectors for a {dim}-dimensional space")
    dev = np.abs(vecs.conj() @ vecs.T - np.eye(dim)).max()
    if dev > tol:
        raise BadBasis(f"basis is not orthonormal (deviation {dev:.3e})")
    return vecs


def measure_in_state_basis(
    state: StateVector,
    targets: Sequence[QubitLabel],
    basis_states: Sequence[StateVector],
    rng,
) -> tuple[int, StateVector]:
    """Projective measurement of ``targets`` onto an arbitrary orthonormal basis.

    The basis vectors are read positionally: their first register slot lines
    up with ``targets[0]`` regardless of how they are labelled.
    """
    vecs = check_orthonormal(basis_states)
    if vecs.shape[1] != 1 << len(targets):
        raise ShapeError("basis dimension does not match number of targets")
    mat, rest = _split(state, targets)
    coeffs = vecs.conj() @ mat
    probs = np.einsum("ij,ij->i", coeffs.conj(), coeffs).real
    return _collapse(coeffs, probs, rest, rng)


def state_basis_probabilities(
    state: StateVector, targets: Sequence[QubitLabel], basis_states: Sequence[StateVector]
) -> np.ndarray:
    vecs = check_orthonormal(basis_states)
    mat, _ = _split(state, targets)
    coeffs = vecs.conj() @ mat
    return np.einsum("ij,ij->i", coeffs.conj(), coeffs).real


def global_phase(a: StateVector, b: StateVector) -> complex:
    """Unit c minimising ``|a - c b|``, anchored on b's largest amplitude."""
    b = b.reorder(a.register) if b.register != a.register else b
    k = int(np.argmax(np.abs(b.amplitudes)))
    ratio = a.amplitudes[k] / b.amplitudes[k]
    return ratio / abs(ratio) if abs(ratio) > 0 else 1.0


def max_phase_deviation(a: StateVector, b: StateVector) -> float:
    if sorted(a.register) != sorted(b.register):
        raise ShapeError("states live on different registers")
    b = b.reorder(a.register)
    c = global_phase(a, b)
    return float(np.abs(a.amplitudes - c * b.amplitudes).max())


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = STATE_TOL) -> bool:
    return max_phase_deviation(a, b) <= tol


BELL_ORDER = (BellKind.PHI_PLUS, BellKind.PHI_MINUS, BellKind.PSI_PLUS, BellKind.PSI_MINUS)
GHZ_ORDER = tuple(GhzKind)


def bell_basis() -> list[StateVector]:
    return [make_bell(k) for k in BELL_ORDER]


def ghz_basis() -> list[StateVector]:
    return [make_ghz(k) for k in GHZ_ORDER]


def measure_bell(state: StateVector, pair: Sequence[QubitLabel], rng) -> tuple[BellKind, StateVector]:
    idx, post = measure_in_state_basis(state, pair, _BELL_BASIS, rng)
    return BELL_ORDER[idx], post


def measure_ghz(state: StateVector, triple: Sequence[QubitLabel], rng) -> tuple[GhzKind, StateVector]:
    idx, post = measure_in_state_basis(state, triple, _GHZ_BASIS, rng)
    return GHZ_ORDER[idx], post


_BELL_BASIS = bell_basis()
_GHZ_BASIS = ghz_basis()
