"""Dressed-state structure of the undriven out-phase system.

Working in the collective two-qubit basis |gg>, |-> = (|eg> - |ge>)/sqrt(2),
|+> = (|eg> + |ge>)/sqrt(2), |ee>, the opposite-coupling interaction only
moves excitations through the antisymmetric state. Within the manifold of
n total excitations the interaction block over (|gg,n>, |-,n-1>, |ee,n-2>)
is tridiagonal with eigenvalues 0 and +-sqrt(4n-2) g, while |+,n-1> is an
exact zero-eigenvalue spectator. The pump couples only |gg> -> |+> -> |ee>
with strength sqrt(2) eta, so the single-photon route into |gg,1> cancels:
the two bare paths through |eg,0> and |ge,0> carry opposite-sign couplings.

Everything here is extracted numerically from the assembled Hamiltonian;
the closed forms above act as assertions, not as the data source.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .models import ModelParams, build_two_qubit_model
from .operators import Operator, SpaceDescriptor

ZERO_LABEL_DARK = "zero_gg_ee"        # superposition of |gg,n> and |ee,n-2>
ZERO_LABEL_SYMMETRIC = "zero_symmetric"  # the decoupled |+, n-1>


class DressedModelError(ValueError):
    """Raised when a dressed-state routine is used outside its regime."""


@dataclass(frozen=True)
class ManifoldSpectrum:
    """Eigen decomposition of one total-excitation manifold at zero detuning.

    eigenvalues are in units of g, sorted ascending; eigenvector columns are
    coefficients over `basis_labels`. For n >= 2 the basis is
    (|gg,n>, |-,n-1>, |ee,n-2>, |+,n-1>); the one-excitation manifold lacks
    the |ee,.> member.
    """

    n: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis_labels: tuple[str, ...]
    labels: tuple[str, ...]


@dataclass(frozen=True)
class PathwayElement:
    """One matrix element <target|H|source> of the excitation ladder."""

    source: str
    target: str
    amplitude: complex


def _basis_index(space: SpaceDescriptor, q1: int, q2: int, n: int) -> int:
    n_ph = space.dims[2]
    return (q1 * 2 + q2) * n_ph + n


def _collective_components(space: SpaceDescriptor, label: str, photons: int) -> list[tuple[int, float]]:
    if space.n_slots != 3 or space.dims[0] != 2 or space.dims[1] != 2:
        raise DressedModelError(f"need a two-qubit-cavity space, got dims {space.dims}")
    if photons < 0 or photons >= space.dims[2]:
        raise DressedModelError(f"photon index {photons} outside truncation {space.dims[2] - 1}")
    if label == "gg":
        return [(_basis_index(space, 0, 0, photons), 1.0)]
    if label == "ee":
        return [(_basis_index(space, 1, 1, photons), 1.0)]
    if label in ("plus", "minus"):
        sign = 1.0 if label == "plus" else -1.0
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        return [
            (_basis_index(space, 1, 0, photons), inv_sqrt2),
            (_basis_index(space, 0, 1, photons), sign * inv_sqrt2),
        ]
    raise DressedModelError(f"unknown collective label {label!r}")


def collective_state(space: SpaceDescriptor, label: str, photons: int) -> np.ndarray:
    """State vector |label, photons> in the two-qubit-cavity space.

    label is one of 'gg', 'ee', 'plus', 'minus'; 'plus'/'minus' are the
    symmetric/antisymmetric Dicke states (|eg> +- |ge>)/sqrt(2).
    """
    v = np.zeros(space.total_dim, dtype=complex)
    for idx, coeff in _collective_components(space, label, photons):
        v[idx] = coeff
    return v


def _matrix_element(
    h: np.ndarray,
    target: list[tuple[int, float]],
    source: list[tuple[int, float]],
) -> complex:
    """<target|h|source> by explicit component sums.

    Collective states combine bare matrix elements that are exact floating
    point negatives of each other; summing the scaled entries directly (no
    BLAS fused multiply-add) preserves those exact cancellations, which the
    interference checks rely on.
    """
    total = 0.0 + 0.0j
    for i, ci in target:
        row = 0.0 + 0.0j
        for j, cj in source:
            row = row + h[i, j] * cj
        total = total + np.conj(ci) * row
    return complex(total)


def interaction_hamiltonian(p: ModelParams) -> Operator:
    """Coupling part of the Hamiltonian alone (detunings and drive zeroed)."""
    stripped = replace(p, delta_a=0.0, delta_c=0.0, eta=0.0)
    return build_two_qubit_model(stripped).hamiltonian


def manifold_spectrum(n: int, g: float) -> ManifoldSpectrum:
    """Diagonalize the resonant interaction restricted to n total excitations.

    Asserts the closed-form spectrum {+-sqrt(4n-2) g, 0 (double for n >= 2)}
    to 1e-10 relative before returning; eigenvalues come out in units of g.
    """
    if n < 1:
        raise DressedModelError(f"manifold index must be >= 1, got {n}")
    if g <= 0:
        raise DressedModelError(f"coupling must be positive to set the unit, got {g}")
    p = ModelParams.out_phase(delta=0.0, g=g, eta=0.0, kappa=0.0, n_max=n)
    h = build_two_qubit_model(p).hamiltonian
    space = h.space

    if n >= 2:
        basis_labels = (f"gg,{n}", f"minus,{n - 1}", f"ee,{n - 2}", f"plus,{n - 1}")
        members = [("gg", n), ("minus", n - 1), ("ee", n - 2), ("plus", n - 1)]
    else:
        basis_labels = ("gg,1", "minus,0", "plus,0")
        members = [("gg", 1), ("minus", 0), ("plus", 0)]
    comps = [_collective_components(space, lab, ph) for lab, ph in members]
    block = np.array(
        [[_matrix_element(h.data, ti, sj) for sj in comps] for ti in comps]
    )

    sym_idx = len(basis_labels) - 1
    coupling_to_plus = float(np.max(np.abs(np.delete(block[sym_idx, :], sym_idx))))
    if coupling_to_plus != 0.0 or block[sym_idx, sym_idx] != 0.0:
        raise AssertionError(
            f"|+, n-1> failed to decouple exactly (residual {coupling_to_plus:.3e})"
        )

    vals, vecs_out = np.linalg.eigh(block)
    order = np.argsort(vals)
    vals = vals[order] / g
    vecs_out = vecs_out[:, order]

    e_big = np.sqrt(4 * n - 2)
    expected = np.sort(np.array([-e_big, 0.0, e_big] if n == 1 else [-e_big, 0.0, 0.0, e_big]))
    if np.max(np.abs(vals - expected)) > 1e-10 * e_big:
        raise AssertionError(
            f"manifold n={n} spectrum {vals} deviates from the tridiagonal closed form"
        )

    # disentangle the (possibly mixed) zero eigenspace: one member is exactly
    # the symmetric Dicke spectator, the other must stay orthogonal to it
    zero_idx = [i for i, v in enumerate(vals) if abs(v) <= 1e-10 * e_big]
    e_plus = np.zeros(len(basis_labels), dtype=complex)
    e_plus[sym_idx] = 1.0
    # the plus row/column of the block is exactly zero (asserted above), so
    # e_plus is an exact eigenvector with an exactly zero eigenvalue
    if len(zero_idx) == 1:
        vecs_out[:, zero_idx[0]] = e_plus
        vals[zero_idx[0]] = 0.0
        labels = ["lower", ZERO_LABEL_SYMMETRIC, "upper"]
    else:
        dark = None
        for i in zero_idx:
            cand = vecs_out[:, i] - e_plus * (e_plus.conj() @ vecs_out[:, i])
            if np.linalg.norm(cand) > 1e-8:
                dark = cand / np.linalg.norm(cand)
        if dark is None:
            raise AssertionError("zero eigenspace does not contain a gg/ee combination")
        vecs_out[:, zero_idx[0]] = dark
        vecs_out[:, zero_idx[1]] = e_plus
        vals[zero_idx[1]] = 0.0
        labels = ["lower", ZERO_LABEL_DARK, ZERO_LABEL_SYMMETRIC, "upper"]

    # fix eigenvector phases: first significant component real positive
    for i in range(vecs_out.shape[1]):
        col = vecs_out[:, i]
        lead = col[np.argmax(np.abs(col) > 1e-12)]
        if lead != 0:
            vecs_out[:, i] = col * (abs(lead) / lead)

    return ManifoldSpectrum(
        n=n,
        eigenvalues=vals,
        eigenvectors=vecs_out,
        basis_labels=basis_labels,
        labels=tuple(labels),
    )


def pathway_amplitudes(n: int, p: ModelParams) -> list[PathwayElement]:
    """Drive and coupling elements of the two-photon ladder starting at |gg,n>.

    Extracted from the assembled Hamiltonian: the drive steps
    |gg,n> -> |+,n> -> |ee,n> carry sqrt(2) eta each, the coupling steps
    |ee,n> <-> |-,n+1> <-> |gg,n+2> carry sqrt(2(n+1)) g and sqrt(2(n+2)) g.
    """
    if not p.is_out_phase:
        raise DressedModelError("pathway analysis assumes the out-phase coupling preset")
    if n < 0:
        raise DressedModelError(f"photon index must be >= 0, got {n}")
    if n + 2 > p.n_max:
        raise DressedModelError(
            f"photon index {n} needs Fock levels up to {n + 2}, beyond n_max={p.n_max}"
        )
    h = build_two_qubit_model(p).hamiltonian
    space = h.space

    def element(target: tuple[str, int], source: tuple[str, int]) -> PathwayElement:
        amp = _matrix_element(
            h.data,
            _collective_components(space, *target),
            _collective_components(space, *source),
        )
        return PathwayElement(
            source=f"{source[0]},{source[1]}", target=f"{target[0]},{target[1]}", amplitude=amp
        )

    return [
        element(("plus", n), ("gg", n)),
        element(("ee", n), ("plus", n)),
        element(("minus", n + 1), ("ee", n)),
        element(("gg", n + 2), ("minus", n + 1)),
    ]


def interference_amplitude(p: ModelParams) -> float:
    """|<gg,1| H_int |+,0>|: zero iff the two single-photon paths cancel.

    Vanishes identically for opposite couplings; the equal-coupling control
    gives sqrt(2) g instead.
    """
    h_int = interaction_hamiltonian(p)
    space = h_int.space
    amp = _matrix_element(
        h_int.data,
        _collective_components(space, "gg", 1),
        _collective_components(space, "plus", 0),
    )
    return float(abs(amp))


def manifold_table(n_values: list[int], g: float) -> str:
    """Plain-text table of manifold spectra, for the CLI."""
    lines = [f"dressed manifolds at zero detuning, coupling g = {g:g} (energies in units of g)"]
    for n in n_values:
        spec = manifold_spectrum(n, g)
        lines.append(f"\nmanifold n = {n}  basis: " + ", ".join(spec.basis_labels))
        for k, label in enumerate(spec.labels):
            coeffs = ", ".join(
                f"{c.real:+.6f}" for c in spec.eigenvectors[:, k]
            )
            lines.append(f"  E/g = {spec.eigenvalues[k]:+.10f}  [{label:>14s}]  ({coeffs})")
    return "\n".join(lines)


def pathway_table(n_values: list[int], p: ModelParams) -> str:
    """Plain-text listing of ladder matrix elements, for the CLI."""
    lines = [
        f"excitation ladder elements (g = {p.g1:g}, eta = {p.eta:g}); "
        "drive steps go through |+>, coupling steps through |->",
        f"single-photon interference amplitude |<gg,1|H_int|+,0>| = "
        f"{interference_amplitude(p):.3e}",
    ]
    for n in n_values:
        lines.append(f"\nladder from gg,{n}:")
        for el in pathway_amplitudes(n, p):
            lines.append(
                f"  <{el.target}|H|{el.source}> = {el.amplitude.real:+.6f}"
                f"{el.amplitude.imag:+.6f}j  (|.| = {abs(el.amplitude):.6f})"
            )
    return "\n".join(lines)
