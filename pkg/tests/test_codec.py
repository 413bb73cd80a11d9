from itertools import product

import pytest

from cavity_stego.codec import (
    ALL_PAYLOADS,
    ALL_TRIPLES,
    BELL_COLUMNS,
    FAMILY_ROWS,
    HidePlan,
    OutcomeTriple,
    Payload,
    choose_m,
    collection_code,
    collections_by_code,
    consistent_cells,
    decode_payload,
    derive_collections,
    derive_swap_table,
    diff_collections,
    diff_swap_table,
    encode_payload,
    hiding_patterns,
    pair_code,
    swap_value,
    table_rows,
)
from cavity_stego.cavity import pipeline
from cavity_stego.errors import DerivationInconsistent, NotACodeword, NoValidPosition
from cavity_stego.states import BellKind, Family, GhzKind, Unitary

G = GhzKind
Bk = BellKind

# Published table, columns psi+, psi-, phi+, phi-.
PUBLISHED_ROWS = {
    G.S_PLUS: "00 11 01 10",
    G.S_MINUS: "11 00 10 01",
    G.P_PLUS: "10 01 11 00",
    G.P_MINUS: "01 10 00 11",
    G.Q_PLUS: "10 01 11 00",
    G.Q_MINUS: "01 10 00 11",
    G.R_PLUS: "00 11 01 10",
    G.R_MINUS: "11 00 10 01",
}
COLUMNS = (Bk.PSI_PLUS, Bk.PSI_MINUS, Bk.PHI_PLUS, Bk.PHI_MINUS)
PUBLISHED = {(g, b): v for g, row in PUBLISHED_ROWS.items() for b, v in zip(COLUMNS, row.split())}


@pytest.mark.parametrize("cell, value", sorted(PUBLISHED.items(), key=lambda kv: (kv[0][0].name, kv[0][1].name)))
def test_derived_swap_table_matches_published_cell(cell, value):
    assert swap_value(*cell) == value


def test_swap_table_has_no_diffs():
    assert diff_swap_table() == []


@pytest.mark.parametrize(
    "ghz, bell, value",
    [(G.P_PLUS, Bk.PHI_PLUS, "11"), (G.Q_MINUS, Bk.PHI_PLUS, "00"), (G.R_PLUS, Bk.PSI_PLUS, "00")],
)
def test_swap_value_examples(ghz, bell, value):
    assert swap_value(ghz, bell) == value


@pytest.mark.parametrize(
    "ket, code", [("gg gg g", "00"), ("ee gg g", "11"), ("eg gg g", "10"), ("gg ge g", "01")]
)
def test_collection_code_examples(ket, code):
    assert collection_code(OutcomeTriple.from_ket(ket)) == code


def test_collections_partition_the_outcome_space():
    groups = collections_by_code()
    assert sorted(groups) == ["00", "01", "10", "11"]
    assert all(len(v) == 8 for v in groups.values())
    members = [t for v in groups.values() for t in v]
    assert sorted(members) == sorted(ALL_TRIPLES)


def test_singlet_support_is_collection_00():
    support = {OutcomeTriple.from_ket(k) for k in pipeline(G.S_MINUS, Bk.PSI_MINUS).support()}
    assert support == set(collections_by_code()["00"])


def test_exactly_one_printed_collection_discrepancy():
    diffs = diff_collections()
    assert diffs == [
        {"collection": "01", "kind": "surplus", "member": "gg eg g", "derived_code": "10"}
    ]


def test_every_cell_support_is_a_single_collection():
    for g, b in product(GhzKind, BellKind):
        codes = {collection_code(OutcomeTriple.from_ket(k)) for k in pipeline(g, b).support()}
        assert codes == {PUBLISHED[(g, b)]}


def test_broken_gate_is_inconsistent():
    import numpy as np

    with pytest.raises(DerivationInconsistent):
        derive_collections(Unitary(np.eye(4, dtype=complex)))


def test_derive_with_explicit_gate_matches_cache():
    from cavity_stego.cavity import evolution_gate

    assert derive_swap_table(evolution_gate()) == PUBLISHED


@pytest.mark.parametrize("pattern, code", [("1100", "00"), ("0011", "01"), ("1010", "10"), ("0101", "11")])
def test_pair_code(pattern, code):
    assert pair_code(pattern) == code


@pytest.mark.parametrize("pattern", ["0000", "1111", "0110", "110"])
def test_pair_code_rejects_other_patterns(pattern):
    with pytest.raises(NotACodeword):
        pair_code(pattern)


def test_published_hiding_patterns_for_secret_111():
    assert hiding_patterns(Family.SP, "11") == ["1100", "0011", "1010", "0101"]


@pytest.mark.parametrize(
    "bits, ghz, bell, pattern",
    [
        ("11100", G.S_PLUS, Bk.PSI_MINUS, "1100"),
        ("11110", G.P_PLUS, Bk.PHI_PLUS, "1010"),
        ("11101", G.S_MINUS, Bk.PSI_PLUS, "0011"),
        ("11111", G.P_MINUS, Bk.PHI_MINUS, "0101"),
        # inverted from the published QR table: value 11 with GHZ code 11 sits at phi+
        ("01100", G.Q_PLUS, Bk.PHI_PLUS, "1110"),
    ],
)
def test_encode_payload(bits, ghz, bell, pattern):
    plan = encode_payload(Payload(bits))
    assert (plan.ghz_target, plan.bell_target, plan.info_pattern) == (ghz, bell, pattern)
    assert PUBLISHED[(ghz, bell)] == bits[1:3]


@pytest.mark.parametrize("payload", ALL_PAYLOADS, ids=str)
def test_payload_round_trip(payload):
    plan = encode_payload(payload)
    decoded, info = decode_payload(plan.ghz_target, swap_value(plan.ghz_target, plan.bell_target))
    assert decoded == payload
    assert info == plan.info_pattern


def test_encoding_is_a_bijection_onto_cells():
    cells = {(encode_payload(p).ghz_target, encode_payload(p).bell_target) for p in ALL_PAYLOADS}
    assert len(cells) == 32


@pytest.mark.parametrize(
    "ghz, behind, payload, info",
    [
        (G.S_PLUS, "11", "11100", "1100"),
        (G.P_PLUS, "11", "11110", "1010"),
        (G.Q_MINUS, "00", "00001", "0010"),
    ],
)
def test_decode_payload(ghz, behind, payload, info):
    assert decode_payload(ghz, behind) == (Payload(payload), info)


def test_every_family_value_has_four_cells():
    for fam, v in product(Family, ["00", "01", "10", "11"]):
        cells = consistent_cells(fam, v)
        assert len(cells) == 4
        assert len({g for g, _ in cells}) == 4 and len({b for _, b in cells}) == 4


def _plan():
    return HidePlan(Family.SP, G.S_PLUS, Bk.PSI_MINUS)  # pattern 1100


def test_choose_m_worked_example():
    groups = ["0000", "0110", "1100", "0000", "0011", "1100"]
    assert choose_m(groups, _plan()) == 3


def test_choose_m_pattern_absent():
    with pytest.raises(NoValidPosition):
        choose_m(["0000", "0101", "1111"], _plan())


def test_choose_m_pattern_only_at_final_position():
    with pytest.raises(NoValidPosition):
        choose_m(["0000", "0101", "1100"], _plan())


def test_choose_m_single_position():
    with pytest.raises(NoValidPosition):
        choose_m(["1100"], _plan())


@pytest.mark.parametrize("n", range(2, 6))
def test_choose_m_small_cases_by_enumeration(n):
    # brute force over patterns in {match, other}: valid iff a match occurs before the last slot
    for mask in product([True, False], repeat=n):
        groups = ["1100" if hit else "0000" for hit in mask]
        hits = [i + 1 for i, hit in enumerate(mask[:-1]) if hit]
        if hits:
            assert choose_m(groups, _plan()) == hits[0]
        else:
            with pytest.raises(NoValidPosition):
                choose_m(groups, _plan())


def test_table_rows_export():
    rows = table_rows()
    assert len(rows) == 32
    assert rows[0] == {
        "family": "SP", "ghz_kind": str(G.S_PLUS), "ghz_code": "11",
        "bell_kind": str(Bk.PSI_PLUS), "bell_code": "11", "cell_code": "00",
    }
    assert [r["ghz_code"] for r in rows[:16:4]] == [g.code for g in FAMILY_ROWS[Family.SP]]
    assert [r["bell_kind"] for r in rows[:4]] == [str(b) for b in BELL_COLUMNS]


def test_outcome_triple_validation():
    with pytest.raises(ValueError):
        OutcomeTriple("gx", "gg", "g")
    with pytest.raises(ValueError):
        Payload("1010")
