"""Driven two-qubit/cavity models and their dissipation channels.

All rates and frequencies are expressed in units of the qubit decay rate
gamma. The dissipator convention carries the explicit factor two,

    D[c] rho = rate * (2 c rho c^dag - rho c^dag c - c^dag c rho),

so an undriven cavity mode loses photons at rate 2*kappa. Mixing this up
with the 1/2 convention is the classic silent reproduction error; every
output file tags the convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .operators import (
    DensityMatrix,
    DimensionError,
    Operator,
    SpaceDescriptor,
    cavity_annihilator,
    embed,
    qubit_lowering,
)

DISSIPATOR_CONVENTION = "rate*(2 c rho cdag - rho cdag c - cdag c rho)"

HAMILTONIAN_HERMITICITY_ATOL = 1e-12


class TruncationError(ValueError):
    """Requested state carries non-negligible weight beyond the Fock cutoff."""


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of the driven qubit-cavity system, in units of gamma.

    delta_a / delta_c are the qubit / cavity detunings from the pump, g1 and
    g2 the qubit-cavity couplings, eta the pump Rabi frequency, kappa the
    cavity decay rate. gamma is the reference unit and defaults to 1.
    """

    delta_a: float
    delta_c: float
    g1: float
    g2: float
    eta: float
    kappa: float
    gamma: float = 1.0
    n_max: int = 20

    def __post_init__(self) -> None:
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max}")

    @classmethod
    def out_phase(cls, delta: float, g: float, eta: float, kappa: float,
                  n_max: int = 20, gamma: float = 1.0) -> "ModelParams":
        """Opposite couplings g1 = -g2 = g (qubits at crest and trough),
        equal detunings delta_a = delta_c = delta."""
        return cls(delta_a=delta, delta_c=delta, g1=g, g2=-g, eta=eta,
                   kappa=kappa, gamma=gamma, n_max=n_max)

    @classmethod
    def in_phase(cls, delta: float, g: float, eta: float, kappa: float,
                 n_max: int = 20, gamma: float = 1.0) -> "ModelParams":
        """Equal couplings g1 = g2 = g, used as the no-interference control."""
        return cls(delta_a=delta, delta_c=delta, g1=g, g2=g, eta=eta,
                   kappa=kappa, gamma=gamma, n_max=n_max)

    @property
    def is_out_phase(self) -> bool:
        return self.g1 == -self.g2

    def with_n_max(self, n_max: int) -> "ModelParams":
        return replace(self, n_max=n_max)


def default_n_max(eta: float) -> int:
    """Fock cutoff rule of thumb: 20 up to eta = 1.5 gamma, 30 beyond.

    Any solve is still subject to the tail-population check, which flags
    the result when the cutoff turns out too small.
    """
    return 20 if eta <= 1.5 else 30


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus collapse channels (operator, rate) of a master equation."""

    hamiltonian: Operator
    collapse_channels: tuple[tuple[Operator, float], ...]

    def __post_init__(self) -> None:
        h = self.hamiltonian.data
        asym = float(np.max(np.abs(h - h.conj().T)))
        if asym > HAMILTONIAN_HERMITICITY_ATOL:
            raise ValueError(f"Hamiltonian not Hermitian: max asymmetry {asym:.3e}")
        for op, rate in self.collapse_channels:
            if rate < 0:
                raise ValueError(f"collapse rate must be >= 0, got {rate}")
            if op.space != self.hamiltonian.space:
                raise ValueError("collapse operator space differs from Hamiltonian space")

    @property
    def space(self) -> SpaceDescriptor:
        return self.hamiltonian.space


def build_two_qubit_model(p: ModelParams) -> LindbladModel:
    """Two driven qubits coupled to one cavity mode, pump-rotating frame.

    H = delta_c a^dag a + delta_a sum_i sp_i sm_i
        + sum_i g_i (a^dag sm_i + a sp_i) + eta sum_i (sm_i + sp_i)

    on the space [2, 2, n_max+1]; channels (a, kappa), (sm_1, gamma),
    (sm_2, gamma).
    """
    space = SpaceDescriptor.two_qubit_cavity(p.n_max)
    a = cavity_annihilator(space)
    ad = a.dagger()
    sm = [embed(qubit_lowering(), i, space) for i in (0, 1)]
    sp = [s.dagger() for s in sm]

    h = p.delta_c * (ad @ a)
    for i, g in enumerate((p.g1, p.g2)):
        h = h + p.delta_a * (sp[i] @ sm[i])
        h = h + g * (ad @ sm[i] + a @ sp[i])
        h = h + p.eta * (sm[i] + sp[i])

    channels = ((a, p.kappa), (sm[0], p.gamma), (sm[1], p.gamma))
    return LindbladModel(h, channels)


def build_single_qubit_model(p: ModelParams, which: int) -> LindbladModel:
    """Reference system with only qubit `which` (1 or 2) in the cavity."""
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which}")
    g = p.g1 if which == 1 else p.g2
    space = SpaceDescriptor.qubit_cavity(p.n_max)
    a = cavity_annihilator(space)
    ad = a.dagger()
    sm = embed(qubit_lowering(), 0, space)
    sp = sm.dagger()

    h = p.delta_c * (ad @ a) + p.delta_a * (sp @ sm)
    h = h + g * (ad @ sm + a @ sp) + p.eta * (sm + sp)
    return LindbladModel(h, ((a, p.kappa), (sm, p.gamma)))


def coherent_state(alpha: complex, n_max: int) -> DensityMatrix:
    """Truncated coherent state |alpha><alpha|, renormalized.

    Serves as the calibration oracle for the squeezing and Klyshko
    observables: its quadrature variances equal the vacuum level and its
    photon distribution is Poissonian. Raises TruncationError when the
    Fock weight beyond n_max exceeds 1e-10.
    """
    if n_max < 1:
        raise DimensionError(f"n_max must be >= 1, got {n_max}")
    ns = np.arange(n_max + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, n_max + 1, dtype=float)))))
    if alpha == 0:
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
    else:
        log_mag = -abs(alpha) ** 2 / 2 + ns * math.log(abs(alpha)) - 0.5 * log_fact
        amps = np.exp(log_mag) * np.exp(1j * ns * np.angle(complex(alpha)))
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail > 1e-10:
        raise TruncationError(
            f"coherent state alpha={alpha} leaves {tail:.3e} probability beyond n_max={n_max}"
        )
    return DensityMatrix.from_vector(SpaceDescriptor.cavity(n_max), amps)
