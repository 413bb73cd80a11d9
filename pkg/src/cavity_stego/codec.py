"""Classical code tables: outcome collections, the swap table, pair codes, payloads.

The collection map and swap table are derived by brute force from the
evolution pipeline. Printed tables are consulted only to name the four
collections (via the S- row) and to produce diffs.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

from . import printed
from .cavity import pipeline, reference_gate
from .errors import DerivationInconsistent, NotACodeword, NoValidPosition
from .states import BellKind, Family, GhzKind, Unitary

CODES = ("00", "01", "10", "11")
BELL_COLUMNS = (BellKind.PSI_PLUS, BellKind.PSI_MINUS, BellKind.PHI_PLUS, BellKind.PHI_MINUS)
FAMILY_ROWS = {
    Family.SP: (GhzKind.S_PLUS, GhzKind.S_MINUS, GhzKind.P_PLUS, GhzKind.P_MINUS),
    Family.QR: (GhzKind.Q_PLUS, GhzKind.Q_MINUS, GhzKind.R_PLUS, GhzKind.R_MINUS),
}


@dataclass(frozen=True, order=True)
class OutcomeTriple:
    """Z outcomes as g/e strings: A'D' pair, B'E' pair, C' single."""

    ad: str
    be: str
    c: str

    def __post_init__(self):
        for part, width in ((self.ad, 2), (self.be, 2), (self.c, 1)):
            if len(part) != width or set(part) - {"g", "e"}:
                raise ValueError(f"bad outcome triple {self.ad!r} {self.be!r} {self.c!r}")

    @classmethod
    def from_ket(cls, ket: str) -> "OutcomeTriple":
        ket = ket.replace(" ", "")
        return cls(ket[0:2], ket[2:4], ket[4])

    @property
    def ket(self) -> str:
        return self.ad + self.be + self.c

    def __str__(self) -> str:
        return f"{self.ad} {self.be} {self.c}"


ALL_TRIPLES = tuple(OutcomeTriple.from_ket("".join(k)) for k in product("ge", repeat=5))


def _support(ghz: GhzKind, bell: BellKind, gate: Unitary | None) -> frozenset[OutcomeTriple]:
    return frozenset(OutcomeTriple.from_ket(k) for k in pipeline(ghz, bell, gate).support())


@lru_cache(maxsize=None)
def _derive_collections_cached() -> dict[OutcomeTriple, str]:
    return derive_collections()


def derive_collections(gate: Unitary | None = None) -> dict[OutcomeTriple, str]:
    """Outcome -> code map built from the four S- evolutions."""
    gate = gate or reference_gate()
    mapping: dict[OutcomeTriple, str] = {}
    for bell in BELL_COLUMNS:
        code = printed.SWAP_TABLE[(GhzKind.S_MINUS, bell)]
        support = _support(GhzKind.S_MINUS, bell, gate)
        if len(support) != 8:
            raise DerivationInconsistent(f"S-,{bell} has support of size {len(support)}")
        for t in support:
            if t in mapping:
                raise DerivationInconsistent(f"outcome {t} reached from two initial states")
            mapping[t] = code
    if len(mapping) != len(ALL_TRIPLES):
        raise DerivationInconsistent("collections do not cover all 32 outcomes")
    return mapping


def collection_map() -> dict[OutcomeTriple, str]:
    return dict(_derive_collections_cached())


def collection_code(t: OutcomeTriple) -> str:
    return _derive_collections_cached()[t]


def collections_by_code(mapping: dict[OutcomeTriple, str] | None = None) -> dict[str, list[OutcomeTriple]]:
    mapping = mapping or collection_map()
    out: dict[str, list[OutcomeTriple]] = {c: [] for c in CODES}
    for t in ALL_TRIPLES:
        out[mapping[t]].append(t)
    return out


def diff_collections(mapping: dict[OutcomeTriple, str] | None = None) -> list[dict]:
    """Disagreements between the derived partition and the printed collections."""
    derived = {c: {t.ket for t in ts} for c, ts in collections_by_code(mapping).items()}
    diffs = []
    for code in CODES:
        listed = [printed.compact(k) for k in printed.COLLECTIONS[code]]
        for ket in listed:
            if ket not in derived[code]:
                owner = next(c for c, ks in derived.items() if ket in ks)
                diffs.append({
                    "collection": code,
                    "kind": "surplus",
                    "member": str(OutcomeTriple.from_ket(ket)),
                    "derived_code": owner,
                })
        for ket in sorted(derived[code] - set(listed)):
            diffs.append({
                "collection": code,
                "kind": "missing",
                "member": str(OutcomeTriple.from_ket(ket)),
                "derived_code": code,
            })
    return diffs


@lru_cache(maxsize=None)
def _derive_swap_table_cached() -> dict[tuple[GhzKind, BellKind], str]:
    return derive_swap_table()


def derive_swap_table(gate: Unitary | None = None) -> dict[tuple[GhzKind, BellKind], str]:
    """(initial GHZ, initial Bell) -> collection code for all 32 pairs."""
    mapping = derive_collections(gate) if gate is not None else _derive_collections_cached()
    table = {}
    for ghz in GhzKind:
        for bell in BELL_COLUMNS:
            codes = {mapping[t] for t in _support(ghz, bell, gate)}
            if len(codes) != 1:
                raise DerivationInconsistent(f"({ghz},{bell}) spans collections {sorted(codes)}")
            table[(ghz, bell)] = codes.pop()
    return table


def swap_table() -> dict[tuple[GhzKind, BellKind], str]:
    return dict(_derive_swap_table_cached())


def swap_value(ghz: GhzKind, bell: BellKind) -> str:
    return _derive_swap_table_cached()[(ghz, bell)]


def diff_swap_table(table: dict | None = None) -> list[dict]:
    table = table or swap_table()
    return [
        {"ghz": str(g), "bell": str(b), "printed": printed.SWAP_TABLE[(g, b)], "derived": v}
        for (g, b), v in table.items()
        if printed.SWAP_TABLE[(g, b)] != v
    ]


def pair_code(pattern: str) -> str:
    """Two-bit label of one of the four codeword patterns 1100, 0011, 1010, 0101."""
    try:
        return printed.PAIR_CODE[pattern]
    except KeyError:
        raise NotACodeword(pattern) from None


# The GHZ halves of the four codewords are distinct, so the pair code is a
# function of the GHZ code alone. This extends it to every (family, value).
_PAIR_BY_GHZ_CODE = {p[:2]: c for p, c in printed.PAIR_CODE.items()}
_GHZ_CODE_BY_PAIR = {c: g for g, c in _PAIR_BY_GHZ_CODE.items()}


def pair_code_for(ghz: GhzKind) -> str:
    return _PAIR_BY_GHZ_CODE[ghz.code]


@dataclass(frozen=True)
class Payload:
    bits: str

    def __post_init__(self):
        if len(self.bits) != 5 or set(self.bits) - {"0", "1"}:
            raise ValueError(f"payload must be 5 bits, got {self.bits!r}")

    @property
    def family(self) -> Family:
        return Family.SP if self.bits[0] == "1" else Family.QR

    @property
    def behind(self) -> str:
        return self.bits[1:3]

    @property
    def pair(self) -> str:
        return self.bits[3:5]

    def __str__(self) -> str:
        return self.bits


ALL_PAYLOADS = tuple(Payload("".join(b)) for b in product("01", repeat=5))


@dataclass(frozen=True)
class HidePlan:
    family: Family
    ghz_target: GhzKind
    bell_target: BellKind
    m: int | None = None

    @property
    def info_pattern(self) -> str:
        return self.ghz_target.code + self.bell_target.code

    def with_m(self, m: int) -> "HidePlan":
        return HidePlan(self.family, self.ghz_target, self.bell_target, m)


def consistent_cells(family: Family, value: str) -> list[tuple[GhzKind, BellKind]]:
    """The four initial pairs of ``family`` whose evolution lands in collection ``value``."""
    return [
        (g, b) for g in FAMILY_ROWS[family] for b in BELL_COLUMNS if swap_value(g, b) == value
    ]


def encode_payload(p: Payload) -> HidePlan:
    candidates = [
        (g, b) for g, b in consistent_cells(p.family, p.behind) if pair_code_for(g) == p.pair
    ]
    assert len(candidates) == 1, candidates
    ghz, bell = candidates[0]
    return HidePlan(p.family, ghz, bell)


def hiding_patterns(family: Family, value: str) -> list[str]:
    """Info patterns that can carry the 3-bit secret (family, value), ordered by pair code."""
    cells = sorted(consistent_cells(family, value), key=lambda c: pair_code_for(c[0]))
    return [g.code + b.code for g, b in cells]


def choose_m(info_groups: Sequence[str], plan: HidePlan) -> int:
    """Smallest 1-based m with the plan's pattern at m and a position m+1 available."""
    n = len(info_groups)
    if n < 1:
        raise ValueError("need at least one info group")
    for m in range(1, n):
        if info_groups[m - 1] == plan.info_pattern:
            return m
    raise NoValidPosition(f"pattern {plan.info_pattern} has no position m with m+1 <= {n}")


def bell_in_row(ghz: GhzKind, behind: str) -> BellKind:
    matches = [b for b in BELL_COLUMNS if swap_value(ghz, b) == behind]
    assert len(matches) == 1
    return matches[0]


def decode_payload(ghz_measured: GhzKind, behind: str) -> tuple[Payload, str]:
    """Recover the payload and the 4 info bits at m from Bob's two observations."""
    bell = bell_in_row(ghz_measured, behind)
    b1 = "1" if ghz_measured.family is Family.SP else "0"
    payload = Payload(b1 + behind + pair_code_for(ghz_measured))
    return payload, ghz_measured.code + bell.code


def table_rows(table: dict | None = None) -> list[dict[str, str]]:
    table = table or swap_table()
    return [
        {
            "family": g.family.value,
            "ghz_kind": str(g),
            "ghz_code": g.code,
            "bell_kind": str(b),
            "bell_code": b.code,
            "cell_code": table[(g, b)],
        }
        for fam in (Family.SP, Family.QR)
        for g in FAMILY_ROWS[fam]
        for b in BELL_COLUMNS
    ]


def partition_dump(mapping: dict | None = None) -> dict[str, list[str]]:
    return {c: [str(t) for t in ts] for c, ts in collections_by_code(mapping).items()}
