"""One full hide/decode round between Alice and Bob, recorded as a Transcript.

Positions are 1-based. Each position i owns a GHZ triple (A_i, B_i, C_i) and
a Bell pair (D_i, E_i); they are stored as separate state vectors because
they only become entangled at the cavity step (triple m+1 with pair m).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil
from typing import Any

import numpy as np

from .adversary import EveModel, Line, Variant, intercept_with_record
from .cavity import CavityParams, evolution_gate, reference_gate, swap_and_rotate
from .checks import check_passes, render_outcome
from .codec import (
    HidePlan,
    OutcomeTriple,
    Payload,
    choose_m,
    collection_code,
    decode_payload,
    encode_payload,
)
from .errors import Abort, NoValidPosition, ParseError
from .states import (
    BellKind,
    Family,
    GhzKind,
    MeasBasis,
    StateVector,
    Unitary,
    apply,
    label,
    make_bell,
    make_ghz,
    measure,
    measure_bell,
    measure_ghz,
    measure_z_all,
    pauli_gate,
    tensor,
)

TRANSCRIPT_VERSION = "cavity-stego-transcript/1"
D_STAGE = "D-line check"
A_STAGE = "A-line check"
PLAN_STAGE = "hide plan"


@dataclass(frozen=True)
class RoundConfig:
    n: int
    secret: str
    info_bits: str = "random"
    seed: int = 0
    check_fraction: float = 0.2
    abort_threshold: float = 0.0
    eve: EveModel = field(default_factory=EveModel)
    gate_source: str = "evolution"
    # Redraws allowed when random info has no usable position for m.
    max_info_draws: int = 256

    def __post_init__(self):
        Payload(self.secret)
        if self.n < 2:
            raise ValueError("a round needs at least two positions")
        if not 0 < self.check_fraction < 1:
            raise ValueError("check_fraction must lie in (0, 1)")
        if not 0 <= self.abort_threshold < 1:
            raise ValueError("abort_threshold must lie in [0, 1)")
        if self.info_bits != "random":
            if len(self.info_bits) != 4 * self.n or set(self.info_bits) - {"0", "1"}:
                raise ValueError(f"info_bits must be 'random' or exactly {4 * self.n} bits")
        if self.gate_source not in ("evolution", "reference"):
            raise ValueError("gate_source must be 'evolution' or 'reference'")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def describe(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "secret": self.secret,
            "info_bits": self.info_bits,
            "seed": self.seed,
            "check_fraction": self.check_fraction,
            "abort_threshold": self.abort_threshold,
            "eve": self.eve.describe(),
            "gate_source": self.gate_source,
        }


@lru_cache(maxsize=None)
def _gate(source: str) -> Unitary:
    return evolution_gate(CavityParams()) if source == "evolution" else reference_gate()


@dataclass
class Transcript:
    config: dict[str, Any]
    version: str = TRANSCRIPT_VERSION
    info_bits: str | None = None
    info_draws: int = 0
    prepared: list[dict] = field(default_factory=list)
    eve_events: list[dict] = field(default_factory=list)
    checks: list[dict] = field(default_factory=list)
    m: int | None = None
    side_message: dict | None = None
    applied: list[dict] = field(default_factory=list)
    cavity: list[dict] = field(default_factory=list)
    outcomes: str | None = None
    behind_bits: str | None = None
    ghz_at_m: str | None = None
    decoded_payload: str | None = None
    info_at_m: str | None = None
    decoded_info: list[dict] = field(default_factory=list)
    hiding: dict | None = None
    counters: dict[str, int] = field(default_factory=dict)
    aborted: bool = False
    abort_stage: str | None = None
    abort_reason: str | None = None

    _FIELDS = (
        "version", "config", "info_bits", "info_draws", "prepared", "eve_events",
        "checks", "m", "side_message", "applied", "cavity", "outcomes",
        "behind_bits", "ghz_at_m", "decoded_payload", "info_at_m", "decoded_info",
        "hiding", "counters", "aborted", "abort_stage", "abort_reason",
    )

    @property
    def succeeded(self) -> bool:
        return not self.aborted and self.decoded_payload is not None

    def to_dict(self) -> dict[str, Any]:
        return {k: getattr(self, k) for k in self._FIELDS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Transcript":
        if not isinstance(data, dict) or data.get("version") != TRANSCRIPT_VERSION:
            raise ParseError(f"not a {TRANSCRIPT_VERSION} document")
        missing = [k for k in cls._FIELDS if k not in data]
        if missing:
            raise ParseError(f"transcript is missing fields {missing}")
        return cls(**{k: data[k] for k in cls._FIELDS})

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from None
        return cls.from_dict(data)


def _labels(i: int):
    return tuple(label(r, i) for r in "ABCDE")


class _Round:
    """Mutable working state of one round; discarded once the transcript is built."""

    def __init__(self, config: RoundConfig):
        self.cfg = config
        self.rng = np.random.default_rng(config.seed)
        self.payload = Payload(config.secret)
        self.family = self.payload.family
        self.tr = Transcript(config=config.describe())
        self.triples: dict[int, StateVector] = {}
        self.pairs: dict[int, StateVector] = {}
        self.consumed: set[int] = set()
        self.plan: HidePlan | None = None
        self.groups: list[str] = []
        self.counts = {
            "transit_outbound": 0,
            "transit_return": 0,
            "z_measurements": 0,
            "x_measurements": 0,
            "ghz_measurements": 0,
            "bell_measurements": 0,
            "cavity_passes": 0,
            "hadamards": 0,
        }

    # -- hiding plan, decided by Alice before anything is sent ----------------
    def plan_hiding(self) -> None:
        cfg = self.cfg
        plan = encode_payload(self.payload)
        draws = 0
        while True:
            if cfg.info_bits == "random":
                bits = "".join(map(str, self.rng.integers(0, 2, size=4 * cfg.n)))
                draws += 1
            else:
                bits = cfg.info_bits
            groups = [bits[4 * i: 4 * i + 4] for i in range(cfg.n)]
            try:
                m = choose_m(groups, plan)
                break
            except NoValidPosition:
                if cfg.info_bits != "random" or draws >= cfg.max_info_draws:
                    self.tr.info_bits, self.tr.info_draws = bits, draws
                    raise
        self.tr.info_bits, self.tr.info_draws = bits, draws
        self.groups = groups
        self.plan = plan.with_m(m)
        self.tr.m = m

    # -- resource preparation --------------------------------------------------
    def prepare(self) -> None:
        ref = GhzKind.reference(self.family)
        for i in range(1, self.cfg.n + 1):
            a, b, c, d, e = _labels(i)
            self.triples[i] = make_ghz(ref, (a, b, c))
            self.pairs[i] = make_bell(BellKind.PSI_MINUS, (d, e))
            self.tr.prepared.append({"position": i, "ghz": str(ref), "bell": str(BellKind.PSI_MINUS)})

    def _eve(self, line: Line, state: StateVector, i: int, leg: str) -> StateVector:
        transit = label(line.value, i)
        self.counts["transit_outbound" if leg == "out" else "transit_return"] += 1
        eve = self.cfg.eve
        if not eve.attacks(line) or (leg == "return" and not eve.return_trip):
            return state
        state, record = intercept_with_record(eve, transit, state, self.rng, tag=f"{transit}/{leg}")
        self.tr.eve_events.append({"qubit": str(transit), "leg": leg, **record})
        return state

    def _measure(self, state: StateVector, q, basis: MeasBasis) -> tuple[int, StateVector]:
        self.counts["z_measurements" if basis is MeasBasis.Z else "x_measurements"] += 1
        return measure(state, q, basis, self.rng)

    # -- outbound transmission and eavesdropping check -----------------------
    def transmit_and_check(self, line: Line) -> dict:
        store = self.pairs if line is Line.D else self.triples
        for i in store:
            store[i] = self._eve(line, store[i], i, "out")
        reserved = {self.plan.m, self.plan.m + 1}
        candidates = [i for i in range(1, self.cfg.n + 1) if i not in reserved]
        k = min(ceil(self.cfg.check_fraction * self.cfg.n), len(candidates))
        sample = sorted(int(x) for x in self.rng.choice(candidates, size=k, replace=False)) if k else []
        ref = BellKind.PSI_MINUS if line is Line.D else GhzKind.reference(self.family)
        events, failures = [], 0
        for i in sample:
            basis = MeasBasis.Z if self.rng.random() < 0.5 else MeasBasis.X
            state = store.pop(i)
            transit = label(line.value, i)
            alice, state = self._measure(state, transit, basis)
            partners = [q for q in state.register if q.role.value in ("B", "C", "E")]
            bob = ""
            for q in partners:
                out, state = self._measure(state, q, basis)
                bob += "ge"[out]
            ok = check_passes(ref, basis, "ge"[alice] + bob)
            failures += not ok
            self.consumed.add(i)
            events.append({
                "line": line.value,
                "position": i,
                "basis": basis.value,
                "alice": render_outcome(basis, "ge"[alice]),
                "bob": render_outcome(basis, bob),
                "pass": ok,
            })
        rate = failures / k if k else 0.0
        report = {
            "stage": D_STAGE if line is Line.D else A_STAGE,
            "sampled": k,
            "failures": failures,
            "error_rate": rate,
            "aborted": rate > self.cfg.abort_threshold,
            "events": events,
        }
        self.tr.checks.append(report)
        if report["aborted"]:
            raise Abort(report["stage"], rate)
        return report

    # -- dense coding of info and side message --------------------------------
    def encode_info(self) -> None:
        m = self.plan.m
        self.tr.side_message = {"channel": "authenticated-classical", "m": m}
        for i in range(1, self.cfg.n + 1):
            if i in self.consumed:
                continue
            a, _, _, d, _ = _labels(i)
            group = self.groups[i - 1]
            a_code = self.groups[m - 1][:2] if i == m + 1 else group[:2]
            self.triples[i] = apply(self.triples[i], pauli_gate(a_code), (a,))
            self.pairs[i] = apply(self.pairs[i], pauli_gate(group[2:]), (d,))
            self.tr.applied.append({
                "position": i,
                "a_code": a_code,
                "d_code": group[2:],
                "role": "hidden" if i == m else "auxiliary" if i == m + 1 else "normal",
            })

    # -- return trip -----------------------------------------------------------
    def send_back(self) -> None:
        for i in range(1, self.cfg.n + 1):
            if i in self.consumed:
                continue
            self.triples[i] = self._eve(Line.A, self.triples[i], i, "return")
            self.pairs[i] = self._eve(Line.D, self.pairs[i], i, "return")

    # -- cavity interaction and decoding ----------------------------------------
    def cavity_and_decode(self) -> None:
        m = self.plan.m
        a1, b1, c1, _, _ = _labels(m + 1)
        am, bm, cm, dm, em = _labels(m)
        gate = _gate(self.cfg.gate_source)
        joint = tensor(self.triples.pop(m + 1), self.pairs.pop(m))
        joint = swap_and_rotate(joint, gate, (a1, dm), (b1, em), c1)
        self.counts["cavity_passes"] += 2
        self.counts["hadamards"] += 1
        self.tr.cavity = [
            {"cavity": 1, "atoms": [str(a1), str(dm)]},
            {"cavity": 2, "atoms": [str(b1), str(em)]},
            {"hadamard": str(c1)},
        ]
        order = (a1, dm, b1, em, c1)
        ket, _ = measure_z_all(joint, order, self.rng)
        self.counts["z_measurements"] += 5
        outcome = OutcomeTriple.from_ket(ket)
        behind = collection_code(outcome)
        kind, _ = measure_ghz(self.triples.pop(m), (am, bm, cm), self.rng)
        self.counts["ghz_measurements"] += 1
        payload, info_at_m = decode_payload(kind, behind)
        self.tr.outcomes = str(outcome)
        self.tr.behind_bits = behind
        self.tr.ghz_at_m = str(kind)
        self.tr.decoded_payload = payload.bits
        self.tr.info_at_m = info_at_m
        self.tr.hiding = {
            "communicated": [str(am), str(dm), str(a1)],
            "normal_resource": [str(q) for q in (am, bm, cm, dm, em)],
            "auxiliary_resource": [str(q) for q in (a1, b1, c1)],
            "measurements": [{"type": "Z", "qubits": [str(q)]} for q in order]
            + [{"type": "GHZ", "qubits": [str(am), str(bm), str(cm)]}],
            "secret_bits": len(payload.bits),
            "info_bits": len(info_at_m),
        }
        self._decode_normal_positions(info_at_m)

    def _decode_normal_positions(self, info_at_m: str) -> None:
        m = self.plan.m
        for i in range(1, self.cfg.n + 1):
            if i in self.consumed:
                continue
            a, b, c, d, e = _labels(i)
            entry: dict[str, Any] = {"position": i}
            if i == m:
                entry.update(a_bits=info_at_m[:2], d_bits=info_at_m[2:], source="hidden")
            else:
                if i == m + 1:
                    entry.update(a_bits=None, source="auxiliary")
                else:
                    kind, _ = measure_ghz(self.triples.pop(i), (a, b, c), self.rng)
                    self.counts["ghz_measurements"] += 1
                    entry.update(
                        a_bits=kind.code,
                        ghz=str(kind),
                        family_ok=kind.family is self.family,
                        source="normal",
                    )
                bell, _ = measure_bell(self.pairs.pop(i), (d, e), self.rng)
                self.counts["bell_measurements"] += 1
                entry.update(d_bits=bell.code, bell=str(bell))
            self.tr.decoded_info.append(entry)


def run_round(config: RoundConfig) -> Transcript:
    """Run one full round; aborts and planning failures are recorded, not raised."""
    r = _Round(config)
    try:
        r.plan_hiding()
        r.prepare()
        r.transmit_and_check(Line.D)
        r.transmit_and_check(Line.A)
        r.encode_info()
        r.send_back()
        r.cavity_and_decode()
    except Abort as exc:
        r.tr.aborted, r.tr.abort_stage, r.tr.abort_reason = True, exc.stage, str(exc)
    except NoValidPosition as exc:
        r.tr.aborted, r.tr.abort_stage, r.tr.abort_reason = True, PLAN_STAGE, str(exc)
    r.tr.counters = dict(r.counts)
    return r.tr


def expected_info(transcript: Transcript) -> dict[int, dict[str, str | None]]:
    """What Bob should recover at each live position on an ideal channel."""
    bits = transcript.info_bits
    m = transcript.m
    out = {}
    for entry in transcript.applied:
        i = entry["position"]
        group = bits[4 * (i - 1): 4 * i]
        out[i] = {"a_bits": None if i == m + 1 else group[:2], "d_bits": group[2:]}
    return out
