"""Eve: intercept-measure-resend, the unitary ancilla probe, and their error rates."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product
from math import sqrt
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .cavity import PIPELINE_REGISTER, pipeline
from .checks import check_passes, joint_distribution
from .codec import ALL_PAYLOADS, collection_code, encode_payload, OutcomeTriple
from .errors import BadProbe, Unsupported
from .states import (
    HADAMARD,
    BellKind,
    Family,
    GhzKind,
    MeasBasis,
    QubitLabel,
    Role,
    StateVector,
    apply,
    eigenstate,
    index_ket,
    label,
    make_bell,
    make_ghz,
    measure,
    measure_z_all,
    project,
    tensor,
)

PROBE_TOL = 1e-10


class Variant(str, Enum):
    NONE = "none"
    MEASURE_RESEND = "measure-resend"
    PROBE = "probe"


class BasisPolicy(str, Enum):
    RANDOM = "random"
    Z = "Z"
    X = "X"

    def draw(self, rng) -> MeasBasis:
        if self is BasisPolicy.RANDOM:
            return MeasBasis.Z if rng.random() < 0.5 else MeasBasis.X
        return MeasBasis(self.value)

    def weights(self) -> dict[MeasBasis, float]:
        if self is BasisPolicy.RANDOM:
            return {MeasBasis.Z: 0.5, MeasBasis.X: 0.5}
        return {MeasBasis(self.value): 1.0}


class Line(str, Enum):
    D = "D"
    A = "A"
    BOTH = "both"

    def covers(self, line: "Line") -> bool:
        return self is Line.BOTH or self is line


@dataclass(frozen=True)
class EveModel:
    variant: Variant = Variant.NONE
    basis_policy: BasisPolicy = BasisPolicy.RANDOM
    alpha: complex = 1.0
    beta: complex = 0.0
    alpha_p: complex = 1.0
    beta_p: complex = 0.0
    target_line: Line = Line.D
    # Whether Eve also sits on the return trip of the encoded atoms.
    return_trip: bool = False

    def __post_init__(self):
        if self.variant is Variant.PROBE:
            validate_probe(self.alpha, self.beta, self.alpha_p, self.beta_p)

    @classmethod
    def none(cls) -> "EveModel":
        return cls()

    @classmethod
    def measure_resend(cls, basis: BasisPolicy | str = BasisPolicy.RANDOM, line: Line | str = Line.D, **kw) -> "EveModel":
        return cls(Variant.MEASURE_RESEND, BasisPolicy(basis), target_line=Line(line), **kw)

    @classmethod
    def probe(cls, disturbance: float, line: Line | str = Line.D, phase: float = 0.0, **kw) -> "EveModel":
        """Probe with ``|beta|^2 = disturbance``; ``beta' = -conj(beta)`` keeps the 2x2 block unitary."""
        if not 0 <= disturbance <= 1:
            raise BadProbe(f"disturbance must lie in [0, 1], got {disturbance}")
        a = sqrt(1 - disturbance)
        b = sqrt(disturbance) * np.exp(1j * phase)
        return cls(Variant.PROBE, alpha=a, beta=b, alpha_p=a, beta_p=-np.conj(b), target_line=Line(line), **kw)

    @property
    def disturbance(self) -> float:
        return abs(self.beta) ** 2

    def attacks(self, line: Line) -> bool:
        return self.variant is not Variant.NONE and self.target_line.covers(line)

    def describe(self) -> dict:
        out = {"variant": self.variant.value, "target_line": self.target_line.value, "return_trip": self.return_trip}
        if self.variant is Variant.MEASURE_RESEND:
            out["basis_policy"] = self.basis_policy.value
        if self.variant is Variant.PROBE:
            out["beta_squared"] = self.disturbance
        return out


def validate_probe(alpha, beta, alpha_p, beta_p) -> None:
    a, b, ap, bp = (complex(x) for x in (alpha, beta, alpha_p, beta_p))
    checks = {
        "|alpha|^2 + |beta|^2 = 1": abs(a) ** 2 + abs(b) ** 2 - 1,
        "|alpha'|^2 + |beta'|^2 = 1": abs(ap) ** 2 + abs(bp) ** 2 - 1,
        "|alpha| = |alpha'|": abs(a) ** 2 - abs(ap) ** 2,
        "|beta| = |beta'|": abs(b) ** 2 - abs(bp) ** 2,
    }
    block = np.array([[a, b], [bp, ap]])
    checks["2x2 probe block unitary"] = np.abs(block @ block.conj().T - np.eye(2)).max()
    bad = [k for k, v in checks.items() if abs(v) > PROBE_TOL]
    if bad:
        raise BadProbe("probe violates " + ", ".join(bad))
    u = probe_unitary(a, b, ap, bp)
    dev = np.abs(u.conj().T @ u - np.eye(8)).max()
    if dev > PROBE_TOL:
        raise BadProbe(f"assembled probe is not unitary ({dev:.2e})")


def probe_unitary(alpha, beta, alpha_p, beta_p) -> np.ndarray:
    """8x8 operator on transit (x) 4-dim ancilla, ancilla starting in its first basis state.

    The ancilla basis vectors 0..3 stand for eps_00, eps_01, eps_10, eps_11.
    """
    col_g = np.zeros(8, dtype=complex)
    col_g[0b000] = alpha
    col_g[0b101] = beta
    col_e = np.zeros(8, dtype=complex)
    col_e[0b010] = beta_p
    col_e[0b111] = alpha_p
    u = np.zeros((8, 8), dtype=complex)
    u[:, 0], u[:, 4] = col_g, col_e
    rest = null_space(np.stack([col_g, col_e]).conj())
    u[:, [1, 2, 3, 5, 6, 7]] = rest
    return u


def ancilla_labels(tag: str) -> tuple[QubitLabel, QubitLabel]:
    return QubitLabel(Role.EVE, 1, tag), QubitLabel(Role.EVE, 2, tag)


def intercept_with_record(
    model: EveModel, transit: QubitLabel, joint: StateVector, rng, tag: str | None = None
) -> tuple[StateVector, dict | None]:
    if model.variant is Variant.NONE:
        joint.position(transit)
        return joint, None
    register = joint.register
    if model.variant is Variant.MEASURE_RESEND:
        basis = model.basis_policy.draw(rng)
        outcome, rest = measure(joint, transit, basis, rng)
        fresh = tensor(eigenstate(basis, outcome, transit), rest).reorder(register)
        return fresh, {"basis": basis.value, "outcome": outcome}
    anc = ancilla_labels(tag or str(transit))
    ready = tensor(joint, StateVector(anc, np.array([1, 0, 0, 0], dtype=complex)))
    u = probe_unitary(model.alpha, model.beta, model.alpha_p, model.beta_p)
    return apply(ready, u, (transit,) + anc), {"ancilla": [str(q) for q in anc]}


def intercept(model: EveModel, transit: QubitLabel, joint: StateVector, rng, tag: str | None = None) -> StateVector:
    """Pass ``transit`` through Eve; the returned state keeps the register order."""
    return intercept_with_record(model, transit, joint, rng, tag)[0]


# Error rate of a measure-resend attack for (line, Eve basis, check basis),
# from the hand case analysis of the resent eigenstates. The (A, X, Z) entry
# assumes Eve's X outcome leaves all three atoms in an X product state; the
# partners actually stay entangled, and exact_error_rate gives 0.5 there.
_MR_RATE = {
    (Line.D, MeasBasis.Z, MeasBasis.Z): 0.0,
    (Line.D, MeasBasis.Z, MeasBasis.X): 0.5,
    (Line.D, MeasBasis.X, MeasBasis.Z): 0.5,
    (Line.D, MeasBasis.X, MeasBasis.X): 0.0,
    (Line.A, MeasBasis.Z, MeasBasis.Z): 0.0,
    (Line.A, MeasBasis.Z, MeasBasis.X): 0.5,
    (Line.A, MeasBasis.X, MeasBasis.Z): 0.75,
    (Line.A, MeasBasis.X, MeasBasis.X): 0.0,
}


def analytic_error_rate(model: EveModel, line: Line | str, check_policy: BasisPolicy | str = BasisPolicy.RANDOM) -> float:
    """Closed-form per-check error probability."""
    line, check_policy = Line(line), BasisPolicy(check_policy)
    if line is Line.BOTH:
        raise Unsupported("rates are per line")
    if model.variant is Variant.NONE or not model.target_line.covers(line):
        raise Unsupported("no attack on this line")
    if model.variant is Variant.MEASURE_RESEND:
        return sum(
            pe * pc * _MR_RATE[(line, eb, cb)]
            for eb, pe in model.basis_policy.weights().items()
            for cb, pc in check_policy.weights().items()
        )
    if check_policy is not BasisPolicy.Z:
        raise Unsupported("the probe has a closed-form rate only under Z checks")
    return model.disturbance


def reference_state(line: Line, family: Family = Family.SP) -> tuple[StateVector, GhzKind | BellKind, QubitLabel]:
    """Ideal prepared state on one line, its kind and the transit atom."""
    if line is Line.D:
        return make_bell(BellKind.PSI_MINUS), BellKind.PSI_MINUS, label("D")
    kind = GhzKind.reference(family)
    return make_ghz(kind), kind, label("A")


def exact_error_rate(
    model: EveModel, line: Line | str, check_policy: BasisPolicy | str = BasisPolicy.RANDOM, family: Family = Family.SP
) -> float:
    """Error probability by exhaustive branch enumeration (no sampling)."""
    line, check_policy = Line(line), BasisPolicy(check_policy)
    ideal, kind, transit = reference_state(line, family)
    checked = ideal.register
    branches: list[tuple[float, StateVector]] = []
    if model.variant is Variant.MEASURE_RESEND:
        for eb, pe in model.basis_policy.weights().items():
            for outcome in (0, 1):
                po, rest = project(ideal, transit, eb, outcome)
                if rest is not None:
                    branches.append((pe * po, tensor(eigenstate(eb, outcome, transit), rest).reorder(checked)))
    else:
        branches.append((1.0, intercept(model, transit, ideal, None)))
    err = 0.0
    for cb, pc in check_policy.weights().items():
        for pb, st in branches:
            dist = joint_distribution(st, checked, cb)
            for i, p in enumerate(dist):
                if p > 0 and not check_passes(kind, cb, index_ket(i, len(checked))):
                    err += pc * pb * p
    return float(err)


def check_trial(model: EveModel, line: Line, check_policy: BasisPolicy, rng, family: Family = Family.SP) -> bool:
    """One intercepted transmission followed by one check; True when the check fails."""
    ideal, kind, transit = reference_state(line, family)
    state = intercept(model, transit, ideal, rng) if model.attacks(line) else ideal
    basis = check_policy.draw(rng)
    a_out, rest = measure(state, transit, basis, rng)
    partners = tuple(q for q in ideal.register if q != transit)
    if basis is MeasBasis.X:
        for q in partners:
            rest = apply(rest, HADAMARD, (q,))
    b_out, _ = measure_z_all(rest, partners, rng)
    return not check_passes(kind, basis, "ge"[a_out] + b_out)


def count_check_errors(
    model: EveModel, line: Line | str, check_policy: BasisPolicy | str, trials: int, rng, family: Family = Family.SP
) -> int:
    line, check_policy = Line(line), BasisPolicy(check_policy)
    return sum(check_trial(model, line, check_policy, rng, family) for _ in range(trials))


# Post-cavity atoms in pipeline register order.
HIDING_ATOMS = {"A'm+1": 0, "D'm": 1, "B'm+1": 2, "E'm": 3, "C'm+1": 4}


def _hiding_state(payload, stage: str) -> StateVector:
    plan = encode_payload(payload)
    if stage == "post":
        return pipeline(plan.ghz_target, plan.bell_target)
    a, b, c, d, e = (label(r) for r in "ABCDE")
    pre = tensor(make_ghz(plan.ghz_target, (a, b, c)), make_bell(plan.bell_target, (d, e)))
    return pre.reorder(PIPELINE_REGISTER)


def secrecy_probe(
    captured: Sequence[str], trials: int, rng, stage: str = "post"
) -> dict:
    """Best guess of the two behind bits from Eve's captured atoms alone.

    Every assignment of Z/X bases to the captured atoms is tried; for each,
    the exact joint distribution over the 32 equally likely payloads gives a
    maximum a posteriori decoder. The best strategy is then replayed on
    ``trials`` sampled rounds.
    """
    qubits = tuple(PIPELINE_REGISTER[HIDING_ATOMS[name]] for name in captured)
    states = {p: _hiding_state(p, stage) for p in ALL_PAYLOADS}
    prior = 1 / len(ALL_PAYLOADS)
    best = None
    for bases in product((MeasBasis.Z, MeasBasis.X), repeat=len(qubits)):
        joint: dict[tuple[str, str], float] = {}
        for p, st in states.items():
            for q, b in zip(qubits, bases):
                if b is MeasBasis.X:
                    st = apply(st, HADAMARD, (q,))
            probs = joint_distribution(st, qubits, MeasBasis.Z)
            for i, pr in enumerate(probs):
                key = (index_ket(i, len(qubits)), p.behind)
                joint[key] = joint.get(key, 0.0) + prior * pr
        decoder: dict[str, str] = {}
        for o in {k[0] for k in joint}:
            decoder[o] = max(("00", "01", "10", "11"), key=lambda v: (joint.get((o, v), 0.0), v))
        exact = sum(joint.get((o, v), 0.0) for o, v in decoder.items())
        if best is None or exact > best[0] + 1e-12:
            best = (exact, bases, decoder)
    exact, bases, decoder = best
    hits = 0
    for _ in range(trials):
        p = ALL_PAYLOADS[int(rng.integers(len(ALL_PAYLOADS)))]
        st = states[p]
        for q, b in zip(qubits, bases):
            if b is MeasBasis.X:
                st = apply(st, HADAMARD, (q,))
        if qubits:
            o, _ = measure_z_all(st, qubits, rng)
        else:
            o = ""
        hits += decoder[o] == p.behind
    return {
        "captured": list(captured),
        "stage": stage,
        "best_bases": [b.value for b in bases],
        "exact_success": exact,
        "trials": trials,
        "empirical_success": hits / trials if trials else None,
        "chance": 0.25,
    }


def bob_decoder_success(trials: int, rng) -> float:
    """Success of Bob's own collection-map decoder on sampled rounds (sanity baseline)."""
    hits = 0
    for _ in range(trials):
        p = ALL_PAYLOADS[int(rng.integers(len(ALL_PAYLOADS)))]
        ket, _ = measure_z_all(_hiding_state(p, "post"), PIPELINE_REGISTER, rng)
        hits += collection_code(OutcomeTriple.from_ket(ket)) == p.behind
    return hits / trials
