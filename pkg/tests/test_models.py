import math

import numpy as np
import pytest

from hyperrad import (
    ModelParams,
    TruncationError,
    build_single_qubit_model,
    build_two_qubit_model,
    coherent_state,
    default_n_max,
    expect,
    fock_annihilation,
    photon_distribution,
    solve_model,
)
from hyperrad.operators import SpaceDescriptor, cavity_annihilator, embed, qubit_lowering


def bare_index(q1: int, q2: int, n: int, n_max: int) -> int:
    return (q1 * 2 + q2) * (n_max + 1) + n


class TestModelParams:
    def test_out_phase_preset(self):
        p = ModelParams.out_phase(delta=1.0, g=10.0, eta=0.5, kappa=0.5)
        assert p.g1 == -p.g2 == 10.0
        assert p.delta_a == p.delta_c == 1.0
        assert p.is_out_phase

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(0, 0, 1, 1, 0, kappa=-0.1)
        with pytest.raises(ValueError):
            ModelParams(0, 0, 1, 1, 0, kappa=0.1, gamma=0.0)
        with pytest.raises(ValueError):
            ModelParams(0, 0, 1, 1, 0, kappa=0.1, n_max=0)

    def test_default_n_max_rule(self):
        assert default_n_max(0.5) == 20
        assert default_n_max(1.5) == 20
        assert default_n_max(2.5) == 30


class TestTwoQubitModel:
    def test_diagonal_without_drive_and_coupling(self):
        p = ModelParams(delta_a=2.0, delta_c=3.0, g1=0.0, g2=0.0, eta=0.0, kappa=0.5, n_max=4)
        h = build_two_qubit_model(p).hamiltonian.data
        assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0.0
        # spot-check one diagonal entry: |ee, 2> -> 2*delta_a + 2*delta_c
        idx = bare_index(1, 1, 2, 4)
        assert h[idx, idx].real == pytest.approx(2 * 2.0 + 2 * 3.0, abs=1e-14)

    def test_out_phase_coupling_signs(self):
        # the two single-excitation paths carry opposite amplitudes g and -g
        p = ModelParams.out_phase(delta=0.0, g=10.0, eta=0.5, kappa=0.5, n_max=3)
        h = build_two_qubit_model(p).hamiltonian.data
        gg1 = bare_index(0, 0, 1, 3)
        eg0 = bare_index(1, 0, 0, 3)
        ge0 = bare_index(0, 1, 0, 3)
        assert h[gg1, eg0] == pytest.approx(10.0, abs=1e-14)
        assert h[gg1, ge0] == pytest.approx(-10.0, abs=1e-14)

    def test_hamiltonian_exactly_hermitian(self):
        p = ModelParams.out_phase(delta=-3.7, g=10.0, eta=1.3, kappa=0.5, n_max=6)
        h = build_two_qubit_model(p).hamiltonian.data
        assert np.max(np.abs(h - h.conj().T)) == 0.0

    def test_channels_annihilate_ground_vacuum(self):
        p = ModelParams.out_phase(delta=1.0, g=10.0, eta=0.7, kappa=0.5, n_max=4)
        m = build_two_qubit_model(p)
        ground = np.zeros(m.space.total_dim)
        ground[bare_index(0, 0, 0, 4)] = 1.0
        for op, _ in m.collapse_channels:
            assert np.max(np.abs(op.data @ ground)) == 0.0

    def test_coupling_sign_flip_is_a_gauge(self):
        base = dict(delta_a=0.4, delta_c=0.4, eta=0.9, kappa=0.5, n_max=5)
        h1 = build_two_qubit_model(ModelParams(g1=10.0, g2=-10.0, **base)).hamiltonian.data
        h2 = build_two_qubit_model(ModelParams(g1=-10.0, g2=10.0, **base)).hamiltonian.data
        e1 = np.sort(np.linalg.eigvalsh(h1))
        e2 = np.sort(np.linalg.eigvalsh(h2))
        assert np.max(np.abs(e1 - e2)) <= 1e-10

    def test_total_excitation_conserved_without_drive(self):
        p = ModelParams.out_phase(delta=2.0, g=10.0, eta=0.0, kappa=0.5, n_max=5)
        m = build_two_qubit_model(p)
        space = m.space
        a = cavity_annihilator(space)
        n_exc = (a.dagger() @ a).data.copy()
        for slot in (0, 1):
            sm = embed(qubit_lowering(), slot, space)
            n_exc = n_exc + (sm.dagger() @ sm).data
        h = m.hamiltonian.data
        assert np.max(np.abs(h @ n_exc - n_exc @ h)) <= 1e-12


class TestSingleQubitModel:
    def test_which_validation(self):
        p = ModelParams.out_phase(delta=0.0, g=10.0, eta=0.5, kappa=0.5, n_max=4)
        with pytest.raises(ValueError):
            build_single_qubit_model(p, 3)

    def test_coupling_sign_is_a_gauge_for_spectra(self):
        p = ModelParams.out_phase(delta=0.3, g=10.0, eta=0.8, kappa=0.5, n_max=8)
        h1 = build_single_qubit_model(p, 1).hamiltonian.data
        h2 = build_single_qubit_model(p, 2).hamiltonian.data
        e1 = np.sort(np.linalg.eigvalsh(h1))
        e2 = np.sort(np.linalg.eigvalsh(h2))
        assert np.max(np.abs(e1 - e2)) <= 1e-10

    def test_hermitian(self):
        p = ModelParams.out_phase(delta=1.1, g=10.0, eta=0.4, kappa=0.5, n_max=4)
        h = build_single_qubit_model(p, 1).hamiltonian.data
        assert np.max(np.abs(h - h.conj().T)) == 0.0

    def test_undriven_steady_state_is_ground_vacuum(self):
        p = ModelParams.out_phase(delta=0.5, g=10.0, eta=0.0, kappa=0.5, n_max=4)
        report = solve_model(build_single_qubit_model(p, 1))
        expected = np.zeros((10, 10))
        expected[0, 0] = 1.0
        assert np.max(np.abs(report.rho.data - expected)) <= 1e-12


class TestCoherentState:
    def test_alpha_zero_is_vacuum(self):
        rho = coherent_state(0.0, 10)
        expected = np.zeros((11, 11))
        expected[0, 0] = 1.0
        assert np.array_equal(rho.data.real, expected)

    def test_mean_photon_number(self):
        rho = coherent_state(0.5, 20)
        a = fock_annihilation(20)
        nbar = expect(a.dagger() @ a, rho).real
        assert nbar == pytest.approx(0.25, abs=1e-10)

    def test_poisson_distribution(self):
        # independent table e^{-1}/n! for alpha = 1
        rho = coherent_state(1.0, 20)
        p = photon_distribution(rho).p
        table = np.array([math.exp(-1.0) / math.factorial(n) for n in range(21)])
        assert np.max(np.abs(p - table)) <= 1e-9

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            coherent_state(3.0, 5)

    def test_phase_carried_by_amplitude(self):
        alpha = 0.4 * np.exp(1j * 0.8)
        rho = coherent_state(alpha, 20)
        val = expect(fock_annihilation(20), rho)
        assert abs(val - alpha) <= 1e-10
