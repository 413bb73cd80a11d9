"""Simulator and analysis harness for cavity-QED quantum steganography."""

__version__ = "0.1.0"

from .states import (  # noqa: E402
    BellKind,
    Family,
    GhzKind,
    MeasBasis,
    QubitLabel,
    StateVector,
    Unitary,
    apply,
    equal_up_to_global_phase,
    make_bell,
    make_ghz,
    measure,
    measure_in_state_basis,
    pauli_gate,
    tensor,
)
from .cavity import CavityParams, evolution_gate, pipeline, reference_gate  # noqa: E402
from .codec import Payload, decode_payload, encode_payload  # noqa: E402
from .adversary import EveModel  # noqa: E402
from .protocol import RoundConfig, Transcript, run_round  # noqa: E402
