from itertools import product
from math import pi, sqrt

import numpy as np
import pytest
from scipy.linalg import expm

from cavity_stego import printed
from cavity_stego.cavity import (
    PIPELINE_REGISTER,
    CavityParams,
    driving_hamiltonian,
    effective_hamiltonian,
    evolution_gate,
    gate_deviation,
    pipeline,
    reference_gate,
)
from cavity_stego.errors import BadParameter
from cavity_stego.states import BellKind, GhzKind, Unitary, equal_up_to_global_phase, max_phase_deviation

KETS = ["gg", "ge", "eg", "ee"]


def _ladder(ket, atom, raising):
    """Apply S+ (raising) or S- to one atom of a two-atom ket; None if annihilated."""
    want, becomes = ("g", "e") if raising else ("e", "g")
    if ket[atom] != want:
        return None
    return ket[:atom] + becomes + ket[atom + 1:]


def _effective_by_kets(lam):
    """Build the literal effective generator by acting on kets term by term."""
    h = np.zeros((4, 4), dtype=complex)
    for col, ket in enumerate(KETS):
        h[col, col] += lam  # lambda/2 per atom, the per-atom projectors sum to one
        for i, j in ((0, 1), (1, 0)):
            # S_i^+ S_j^-, S_i^+ S_j^+ and their conjugates, as (raise i?, raise j?)
            for raise_i, raise_j in ((True, False), (True, True), (False, True), (False, False)):
                mid = _ladder(ket, j, raise_j)
                out = mid and _ladder(mid, i, raise_i)
                if out is not None:
                    h[KETS.index(out), col] += lam / 2
    return h


def test_effective_hamiltonian_matches_ket_construction():
    lam = 0.7
    np.testing.assert_allclose(effective_hamiltonian(lam), _effective_by_kets(lam), atol=1e-14)


def test_effective_hamiltonian_coupling_is_lambda():
    lam = 0.3
    h = effective_hamiltonian(lam)
    assert np.allclose(h, h.conj().T)
    expected = lam * np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]])
    np.testing.assert_allclose(h, expected, atol=1e-15)


def test_exchange_only_reading_has_no_double_excitation_term():
    h = effective_hamiltonian(1.0, "exchange-only")
    assert h[0, 3] == 0 and h[1, 2] == 1


@pytest.mark.parametrize("lam", [0.0, -1.0])
def test_effective_hamiltonian_rejects_non_positive_lambda(lam):
    with pytest.raises(BadParameter):
        effective_hamiltonian(lam)


def test_lambda_invariant_under_rescaling():
    p = CavityParams(g_coupling=1.3, delta=2.0)
    q = CavityParams(g_coupling=2.6, delta=8.0)
    assert p.lam == pytest.approx(1.3**2 / 4)
    assert q.lam == pytest.approx(p.lam)


def test_defaults_are_protocol_setting():
    p = CavityParams()
    assert p.Omega * p.t == pytest.approx(pi)
    assert p.lam * p.t == pytest.approx(pi / 4)
    assert p.is_protocol_setting


def test_regime_flags_reported_not_enforced():
    flags = CavityParams().regime_flags()
    assert flags == {"large_detuning": False, "strong_driving": False, "protocol_setting": True}


def test_driving_and_atomic_frequencies_must_coincide():
    with pytest.raises(BadParameter):
        evolution_gate(CavityParams(omega0=1.0, omega=1.5))


def test_zero_time_gives_identity():
    u = evolution_gate(CavityParams(t=0.0))
    np.testing.assert_allclose(u.matrix, np.eye(4), atol=1e-15)


@pytest.mark.parametrize("omega_t, lambda_t", [(pi, pi / 4), (0.4, 0.9), (2.0, 0.1)])
def test_gate_matches_scipy_expm(omega_t, lambda_t):
    params = CavityParams.for_products(omega_t, lambda_t)
    oracle = expm(-1j * driving_hamiltonian(params.Omega) * params.t) @ expm(
        -1j * effective_hamiltonian(params.lam) * params.t
    )
    np.testing.assert_allclose(evolution_gate(params).matrix, oracle, atol=1e-12)


def test_for_products_rejects_zero_coupling():
    with pytest.raises(BadParameter):
        CavityParams.for_products(pi, 0.0)


def test_protocol_gate_equals_reference_gate():
    assert gate_deviation(evolution_gate(), reference_gate()) <= 1e-9


def test_exchange_only_reading_does_not_give_reference_gate():
    assert gate_deviation(evolution_gate(reading="exchange-only"), reference_gate()) > 0.5


def test_reference_gate_action():
    g = reference_gate().matrix
    for col, ket in enumerate(KETS):
        flipped = "".join("e" if c == "g" else "g" for c in ket)
        expected = np.zeros(4, dtype=complex)
        expected[col] = 1 / sqrt(2)
        expected[KETS.index(flipped)] = -1j / sqrt(2)
        np.testing.assert_allclose(g[:, col], expected, atol=1e-15)


def test_reference_gate_fourth_power_is_global_phase():
    g4 = np.linalg.matrix_power(reference_gate().matrix, 4)
    assert gate_deviation(g4, np.eye(4)) < 1e-12


def test_pipeline_reproduces_singlet_state_exactly():
    derived = pipeline(GhzKind.S_MINUS, BellKind.PSI_MINUS)
    assert derived.register == PIPELINE_REGISTER
    np.testing.assert_allclose(derived.amplitudes, printed.evolved_amplitudes(BellKind.PSI_MINUS), atol=1e-10)


def test_pipeline_singlet_branch_phases():
    derived = pipeline(GhzKind.S_MINUS, BellKind.PSI_MINUS)
    for ket in derived.support():
        amp = derived.amplitude(ket)
        assert abs(amp) == pytest.approx(sqrt(2) / 4)
        if ket[-1] == "g":
            assert amp.real == pytest.approx(0, abs=1e-15)


def test_pipeline_phi_minus_up_to_phase():
    derived = pipeline(GhzKind.S_MINUS, BellKind.PHI_MINUS)
    assert equal_up_to_global_phase(derived, printed.evolved_state(BellKind.PHI_MINUS), tol=1e-10)


@pytest.mark.parametrize(
    "bell, printed_ket, derived_ket",
    [
        (BellKind.PSI_PLUS, "ge eg e", "ge ge e"),
        (BellKind.PHI_PLUS, "eg eg e", "eg ee e"),
    ],
)
def test_printed_states_with_single_term_misprint(bell, printed_ket, derived_ket):
    # The printed state repeats one ket; replacing the repeat restores agreement.
    assert printed.evolved_state(bell) is None or not equal_up_to_global_phase(
        pipeline(GhzKind.S_MINUS, bell), printed.evolved_state(bell)
    )
    terms = list(printed.EVOLVED_TERMS[bell])
    idx = max(i for i, (_, k) in enumerate(terms) if k == printed_ket)
    terms[idx] = (terms[idx][0], derived_ket)
    amps = np.zeros(32, dtype=complex)
    for coeff, ket in terms:
        amps[int(printed.compact(ket).replace("g", "0").replace("e", "1"), 2)] += coeff * sqrt(2) / 4
    derived = pipeline(GhzKind.S_MINUS, bell)
    c = derived.amplitudes[np.argmax(np.abs(amps))] / amps[np.argmax(np.abs(amps))]
    np.testing.assert_allclose(derived.amplitudes, c * amps, atol=1e-10)


@pytest.mark.parametrize("ghz, bell", list(product(GhzKind, BellKind)))
def test_every_pair_has_eight_equal_weight_outcomes(ghz, bell):
    state = pipeline(ghz, bell)
    support = state.support()
    assert len(support) == 8
    for ket in support:
        assert abs(state.amplitude(ket)) == pytest.approx(sqrt(2) / 4, abs=1e-12)


def test_evolution_gate_drives_pipeline_like_reference():
    a = pipeline(GhzKind.S_MINUS, BellKind.PSI_MINUS, evolution_gate())
    b = pipeline(GhzKind.S_MINUS, BellKind.PSI_MINUS)
    assert max_phase_deviation(a, b) <= 1e-9


def test_perturbed_gate_breaks_reproduction():
    m = reference_gate().matrix @ np.diag([1, 1, 1, np.exp(0.2j)])
    derived = pipeline(GhzKind.S_MINUS, BellKind.PSI_MINUS, Unitary(m))
    assert not equal_up_to_global_phase(derived, printed.evolved_state(BellKind.PSI_MINUS), tol=1e-6)
