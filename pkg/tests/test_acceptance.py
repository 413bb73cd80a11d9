"""Acceptance gate: one test per criterion, one PASS/FAIL line each.

Tolerances and seeds are fixed here and are not tuned after the fact.
"""
import time
from math import pi

import numpy as np
import pytest

from cavity_stego import harness, printed
from cavity_stego.adversary import EveModel, count_check_errors
from cavity_stego.cavity import CavityParams, evolution_gate, gate_deviation, reference_gate
from cavity_stego.codec import ALL_PAYLOADS, OutcomeTriple, collection_map, decode_payload, encode_payload, swap_table, swap_value
from cavity_stego.protocol import RoundConfig, run_round
from cavity_stego.states import (
    BellKind,
    GhzKind,
    MeasBasis,
    apply,
    equal_up_to_global_phase,
    label,
    make_bell,
    make_ghz,
    pauli_gate,
    project,
)
from cavity_stego.stats import SIGMAS, binomial_sigma, within_sigmas

from conftest import ACCEPTANCE_LINES

EXACT_TOL = 1e-10
GATE_TOL = 1e-9
MC_TRIALS = 100_000
MC_SEED = 20260301
STATS_TRIALS = 20_000  # x 10 candidate positions = 2e5
STATS_N = 11
ROUND_SEEDS = range(100)
ROUND_N = 8


def _record(number, name, ok, detail, elapsed, budget):
    within = elapsed <= budget
    status = "PASS" if ok and within else "FAIL"
    line = f"[{status}] criterion {number}: {name} ({detail}; {elapsed:.2f}s elapsed, budget {budget:g}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert within, line


def test_criterion_1_evolution_reproduction():
    t0 = time.perf_counter()
    report = harness.verify_evolution(EXACT_TOL)
    states = {s["state"]: s for s in report.results["evolved_states"]}
    singlet = states["S- x psi-"]
    exact = not singlet["phase_free"] and singlet["max_deviation"] <= EXACT_TOL
    others = [states[k] for k in ("S- x psi+", "S- x phi-", "S- x phi+")]
    # each printed state agrees with the derived one on every term it shares
    shared = all(s["common_term_deviation"] <= EXACT_TOL for s in others)
    diffs_ok = all(d["kind"] == "printed-term inconsistency" for d in report.diffs)
    ok = report.status == harness.PASS and exact and shared and diffs_ok
    detail = (
        f"singlet deviation {singlet['max_deviation']:.1e} phase-free={singlet['phase_free']}; "
        f"flagged printed terms in {sorted(d['item'] for d in report.diffs)}"
    )
    _record(1, "evolved states reproduced", ok, detail, time.perf_counter() - t0, 1.0)


def test_criterion_2_gate_from_hamiltonian():
    t0 = time.perf_counter()
    params = CavityParams.for_products(pi, pi / 4)
    dev = gate_deviation(evolution_gate(params, "literal"), reference_gate())
    ok = dev <= GATE_TOL
    _record(2, "gate from effective Hamiltonian", ok, f"literal reading deviation {dev:.1e} <= {GATE_TOL:g}",
            time.perf_counter() - t0, 1.0)


def test_criterion_3_table_derivation():
    t0 = time.perf_counter()
    table = swap_table()
    cells = sum(table[k] == v for k, v in printed.SWAP_TABLE.items())
    mapping = collection_map()
    groups: dict[str, set[str]] = {}
    for triple, code in mapping.items():
        groups.setdefault(code, set()).add(str(triple))
    partition = len(mapping) == 32 and sorted(len(g) for g in groups.values()) == [8, 8, 8, 8]
    exact_sets = all(set(printed.COLLECTIONS[c]) == groups[c] for c in ("00", "11", "10"))
    surplus = set(printed.COLLECTIONS["01"]) - groups["01"]
    missing = groups["01"] - set(printed.COLLECTIONS["01"])
    one_flag = len(surplus) == 1 and not missing
    ok = cells == 32 and partition and exact_sets and one_flag
    detail = f"{cells}/32 cells, partition 4x8={partition}, collection 01 surplus {sorted(surplus)}"
    _record(3, "swap table and collections derived", ok, detail, time.perf_counter() - t0, 1.0)


def test_criterion_4_end_to_end():
    t0 = time.perf_counter()
    rounds = errors = normal = 0
    for payload in ALL_PAYLOADS:
        for seed in ROUND_SEEDS:
            tr = run_round(RoundConfig(n=ROUND_N, secret=payload.bits, seed=seed))
            rounds += 1
            groups = [tr.info_bits[i: i + 4] for i in range(0, len(tr.info_bits), 4)]
            if not tr.succeeded or tr.decoded_payload != payload.bits or tr.info_at_m != groups[tr.m - 1]:
                errors += 1
                continue
            for d in tr.decoded_info:
                g = groups[d["position"] - 1]
                want_a = None if d["position"] == tr.m + 1 else g[:2]
                if (d["a_bits"], d["d_bits"]) != (want_a, g[2:]):
                    errors += 1
                normal += d["source"] == "normal"
    ok = errors == 0 and rounds == 3200
    _record(4, "no-Eve rounds decode", ok, f"{rounds} rounds, {normal} normal positions, {errors} errors",
            time.perf_counter() - t0, 60.0)


_ATTACK_ELAPSED: list[float] = []
ATTACKS = [
    ("measure-resend D-line", EveModel.measure_resend("random", "D"), "D", "random", 0.25),
    ("measure-resend A-line, Eve Z", EveModel.measure_resend("Z", "A"), "A", "random", 0.25),
    ("measure-resend A-line, Eve X", EveModel.measure_resend("X", "A"), "A", "random", 0.375),
    ("probe |beta|^2=0.1, Z checks", EveModel.probe(0.1, "D"), "D", "Z", 0.1),
    ("probe |beta|^2=0.3, Z checks", EveModel.probe(0.3, "D"), "D", "Z", 0.3),
    ("probe |beta|^2=0.5, Z checks", EveModel.probe(0.5, "D"), "D", "Z", 0.5),
    ("probe |beta|^2=0, Z checks", EveModel.probe(0.0, "D"), "D", "Z", 0.0),
]


@pytest.mark.slow
@pytest.mark.parametrize("idx", range(len(ATTACKS)), ids=[a[0] for a in ATTACKS])
def test_criterion_5_attack_rates(idx):
    name, model, line, checks, expected = ATTACKS[idx]
    t0 = time.perf_counter()
    k = count_check_errors(model, line, checks, MC_TRIALS, np.random.default_rng([MC_SEED, idx]))
    ok = within_sigmas(k, MC_TRIALS, expected)
    if expected == 0:
        detail = f"{k} errors in {MC_TRIALS}, exactly zero required"
    else:
        detail = (f"{k / MC_TRIALS:.4f} vs {expected} +/- {SIGMAS:g}x{binomial_sigma(expected, MC_TRIALS):.4f}"
                  f" over {MC_TRIALS}")
    # the five-minute budget covers all seven studies together
    _ATTACK_ELAPSED.append(time.perf_counter() - t0)
    _record(5, name, ok, detail, sum(_ATTACK_ELAPSED), 300.0)


def test_criterion_6_imperceptibility():
    t0 = time.perf_counter()
    r = harness.stats_m(STATS_TRIALS, STATS_N, MC_SEED)
    res = r.results
    freqs = {c: e["estimate"] for c, e in res["pattern_frequency_by_pair_code"].items()}
    ok = r.status == harness.PASS and res["candidate_positions"] >= 100_000
    detail = (f"{res['candidate_positions']} positions, pattern freqs "
              + ", ".join(f"{v:.4f}" for v in freqs.values())
              + f" vs 0.0625, usable {res['usable_fraction']['estimate']:.4f} vs 0.25")
    _record(6, "hiding pattern statistics", ok, detail, time.perf_counter() - t0, 60.0)


def test_criterion_7_resource_accounting():
    t0 = time.perf_counter()
    checked = bad = 0
    for payload in ALL_PAYLOADS:
        for seed in (0, 1):
            tr = run_round(RoundConfig(n=4, secret=payload.bits, seed=seed))
            if not tr.succeeded:
                continue
            checked += 1
            rep = harness.account(tr)
            bad += rep.results["account"] != harness.EXPECTED_ACCOUNT
    ok = checked > 0 and bad == 0
    _record(7, "resource accounting", ok, f"{checked} successful transcripts, {bad} mismatches",
            time.perf_counter() - t0, 1.0)


def test_criterion_8_property_suites():
    t0 = time.perf_counter()
    rng = np.random.default_rng(MC_SEED)
    failures = []
    a, d, e = label("A"), label("D"), label("E")

    # norm preservation and unitarity over random gate parameters and states
    for _ in range(200):
        u = evolution_gate(CavityParams.for_products(rng.uniform(0, 2 * pi), rng.uniform(0.05, 2)))
        if np.abs(u.matrix.conj().T @ u.matrix - np.eye(4)).max() > 1e-12:
            failures.append("unitarity")
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        out = u.matrix @ (v / np.linalg.norm(v))
        if abs(np.linalg.norm(out) - 1) > 1e-12:
            failures.append("norm")

    # singlet anti-correlation in both check bases
    for basis in MeasBasis:
        for first in (0, 1):
            _, rest = project(make_bell(BellKind.PSI_MINUS), d, basis, first)
            q, _ = project(rest, e, basis, first)
            if q > 1e-12:
                failures.append(f"singlet {basis.value}")

    # kind/code consistency under the four dense-coding unitaries
    for kind in GhzKind:
        ref = GhzKind.reference(kind.family)
        if not equal_up_to_global_phase(apply(make_ghz(ref), pauli_gate(kind.code), (a,)), make_ghz(kind)):
            failures.append(f"ghz code {kind}")
    for kind in BellKind:
        if not equal_up_to_global_phase(apply(make_bell(BellKind.PSI_MINUS), pauli_gate(kind.code), (d,)), make_bell(kind)):
            failures.append(f"bell code {kind}")

    # payload round trip
    for p in ALL_PAYLOADS:
        plan = encode_payload(p)
        if decode_payload(plan.ghz_target, swap_value(plan.ghz_target, plan.bell_target))[0] != p:
            failures.append(f"payload {p}")

    # transcript determinism
    for seed in range(10):
        cfg = RoundConfig(n=6, secret=ALL_PAYLOADS[seed].bits, seed=seed,
                          eve=EveModel.measure_resend("random", "A"), abort_threshold=0.99)
        if run_round(cfg).to_json() != run_round(cfg).to_json():
            failures.append(f"determinism {seed}")

    ok = not failures
    _record(8, "property suites", ok, f"failures: {failures[:5] or 'none'}", time.perf_counter() - t0, 60.0)
