"""Figures of merit computed from steady states.

Covers the cavity photon distribution, the radiance witness R, quadrature
squeezing S_theta with its minimizing angle, the Klyshko ratios K_n, and
the cavity Wigner function in the displaced-parity convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, expm

from .models import ModelParams, build_single_qubit_model, build_two_qubit_model
from .operators import (
    DensityMatrix,
    DimensionError,
    SpaceDescriptor,
    cavity_annihilator,
    expect,
    partial_trace,
)
from .steady import SteadyStateReport, solve_model

KLYSHKO_FLOOR = 1e-12
THETA_GRID_POINTS = 720

WIGNER_CONVENTION = (
    "W(alpha)=(2/pi)Tr[rho D(alpha) P D(-alpha)], D(alpha)=expm(alpha*adag-conj(alpha)*a), "
    "P=diag((-1)^n); alpha=(x+1j*y)/sqrt(2); d2alpha=dx*dy/2; integral(W)=1; vacuum peak 2/pi"
)


class UndefinedWitnessError(RuntimeError):
    """Radiance witness is undefined: the single-qubit systems emit no photons."""


@dataclass(frozen=True)
class PhotonDistribution:
    """Cavity photon-number probabilities P_n, n = 0..n_max."""

    p: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.p, dtype=float)
        if np.min(arr) < -1e-10:
            raise ValueError(f"negative probability {np.min(arr):.3e} beyond tolerance")
        total = float(np.sum(arr))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")
        clamped = np.clip(arr, 0.0, None)
        clamped.setflags(write=False)
        object.__setattr__(self, "p", clamped)

    @property
    def n_max(self) -> int:
        return len(self.p) - 1

    def mean(self) -> float:
        return float(np.arange(len(self.p)) @ self.p)


@dataclass(frozen=True)
class SqueezingResult:
    """Minimum of S_theta over quadrature angles plus the sampled curve."""

    s_min: float
    theta_s: float
    thetas: np.ndarray
    s_curve: np.ndarray


@dataclass(frozen=True)
class KlyshkoResult:
    """K_n values; entries are (n, value) with value None where P_n ~ 0."""

    entries: tuple[tuple[int, float | None], ...]

    def defined(self) -> dict[int, float]:
        return {n: v for n, v in self.entries if v is not None}

    def __getitem__(self, n: int) -> float | None:
        for m, v in self.entries:
            if m == n:
                return v
        raise KeyError(n)


@dataclass(frozen=True)
class GridMoments:
    mass: float
    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    cov_xy: float


@dataclass(frozen=True)
class WignerGrid:
    """Sampled W(x, y) with the phase-space convention recorded alongside."""

    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    convention: str
    boundary_warning: bool

    def integral(self) -> float:
        """Riemann integral of W over the declared measure d2alpha = dx dy / 2."""
        dx = float(self.x[1] - self.x[0])
        dy = float(self.y[1] - self.y[0])
        return float(np.sum(self.w) * dx * dy / 2.0)

    def moments(self) -> GridMoments:
        dx = float(self.x[1] - self.x[0])
        dy = float(self.y[1] - self.y[0])
        xx, yy = np.meshgrid(self.x, self.y, indexing="ij")
        mu = dx * dy / 2.0
        mass = float(np.sum(self.w) * mu)
        mx = float(np.sum(self.w * xx) * mu) / mass
        my = float(np.sum(self.w * yy) * mu) / mass
        vx = float(np.sum(self.w * (xx - mx) ** 2) * mu) / mass
        vy = float(np.sum(self.w * (yy - my) ** 2) * mu) / mass
        cxy = float(np.sum(self.w * (xx - mx) * (yy - my)) * mu) / mass
        return GridMoments(mass, mx, my, vx, vy, cxy)


def principal_axes(m: GridMoments) -> tuple[float, float, float]:
    """(minor-axis angle in [0, pi), minor variance, major variance) of the
    second-moment ellipse."""
    cov = np.array([[m.var_x, m.cov_xy], [m.cov_xy, m.var_y]])
    vals, vecs = eigh(cov)
    angle = float(np.arctan2(vecs[1, 0].real, vecs[0, 0].real) % np.pi)
    return angle, float(vals[0]), float(vals[1])


def photon_distribution(rho: DensityMatrix) -> PhotonDistribution:
    """P_n of the cavity (last slot), tracing out any qubits first."""
    space = rho.space
    if space.n_slots > 1:
        rho = partial_trace(rho, {space.n_slots - 1})
    return PhotonDistribution(np.real(np.diag(rho.data)))


def cavity_moments(rho: DensityMatrix) -> tuple[complex, complex, float]:
    """First and second cavity moments (<a>, <a^2>, <a^dag a>)."""
    a = cavity_annihilator(rho.space)
    m1 = expect(a, rho)
    m2 = expect(a @ a, rho)
    nbar = expect(a.dagger() @ a, rho).real
    return m1, m2, float(nbar)


def squeezing_parameter(rho: DensityMatrix, theta: float) -> float:
    """S_theta = Var(X_theta) - 1/2 with X_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt(2).

    Evaluated through the moment identity
    S_theta = <a^dag a> + Re(e^{-2i theta} <a^2>) - 2 Re(e^{-i theta} <a>)^2,
    which follows by normal-ordering the quadrature variance.
    """
    m1, m2, nbar = cavity_moments(rho)
    return float(
        nbar + np.real(np.exp(-2j * theta) * m2) - 2.0 * np.real(np.exp(-1j * theta) * m1) ** 2
    )


def _s_curve(m1: complex, m2: complex, nbar: float, thetas: np.ndarray) -> np.ndarray:
    return (
        nbar
        + np.real(np.exp(-2j * thetas) * m2)
        - 2.0 * np.real(np.exp(-1j * thetas) * m1) ** 2
    )


def min_squeezing(rho: DensityMatrix) -> SqueezingResult:
    """Global minimum of S_theta over theta in [0, pi).

    With a vanishing coherent amplitude the minimum is analytic:
    S_min = <a^dag a> - |<a^2>| at 2 theta_S = arg<a^2> + pi. Otherwise a
    720-point grid is refined by parabolic interpolation down to 1e-12 in S.
    Ties (flat curves) resolve to the smallest angle.
    """
    m1, m2, nbar = cavity_moments(rho)
    thetas = np.arange(THETA_GRID_POINTS) * (np.pi / THETA_GRID_POINTS)
    curve = _s_curve(m1, m2, nbar, thetas)

    if abs(m1) <= 1e-12:
        if abs(m2) <= 1e-13:
            return SqueezingResult(float(nbar), 0.0, thetas, curve)
        s_min = float(nbar - abs(m2))
        theta_s = float(((np.angle(m2) + np.pi) / 2.0) % np.pi)
        return SqueezingResult(s_min, theta_s, thetas, curve)

    step = np.pi / THETA_GRID_POINTS
    idx = int(np.argmin(curve))  # argmin takes the first hit: smallest theta
    theta = float(thetas[idx])
    s_val = float(curve[idx])
    h = step
    for _ in range(80):
        sm = _s_curve(m1, m2, nbar, np.array([theta - h]))[0]
        sp = _s_curve(m1, m2, nbar, np.array([theta + h]))[0]
        denom = sm - 2.0 * s_val + sp
        if denom <= 0:
            h *= 0.5
            continue
        shift = 0.5 * h * (sm - sp) / denom
        shift = float(np.clip(shift, -h, h))
        theta_new = theta + shift
        s_new = _s_curve(m1, m2, nbar, np.array([theta_new]))[0]
        if s_new < s_val:
            improvement = s_val - s_new
            theta, s_val = theta_new, float(s_new)
            if improvement <= 1e-12:
                break
        h *= 0.5
        if h < 1e-14:
            break
    return SqueezingResult(s_val, float(theta % np.pi), thetas, curve)


def klyshko(pdist: PhotonDistribution, floor: float = KLYSHKO_FLOOR) -> KlyshkoResult:
    """K_n = (n+1) P_{n-1} P_{n+1} / (n P_n^2) for n = 1..n_max-1.

    Entries where P_n falls below `floor` would divide by ~0 and are
    reported as undefined rather than infinite.
    """
    p = pdist.p
    entries: list[tuple[int, float | None]] = []
    for n in range(1, len(p) - 1):
        if p[n] >= floor:
            entries.append((n, float((n + 1) * p[n - 1] * p[n + 1] / (n * p[n] ** 2))))
        else:
            entries.append((n, None))
    return KlyshkoResult(tuple(entries))


@dataclass(frozen=True)
class RadianceResult:
    """Cavity photon numbers of the two-qubit and single-qubit systems and
    the normalized witness R built from them."""

    nbar_two_qubit: float
    nbar_single: tuple[float, float]
    witness: float


def radiance_components(
    p: ModelParams, two_qubit_report: SteadyStateReport | None = None
) -> tuple[RadianceResult, SteadyStateReport, SteadyStateReport, SteadyStateReport]:
    """Solve the three steady states behind R and assemble the witness.

    The two single-qubit solves are both carried out; for |g1| = |g2| their
    photon numbers must agree (the coupling sign is a gauge), which is
    checked rather than assumed.
    """
    rep2 = two_qubit_report if two_qubit_report is not None else solve_model(build_two_qubit_model(p))
    rep1 = solve_model(build_single_qubit_model(p, 1))
    rep1b = solve_model(build_single_qubit_model(p, 2))

    n2 = photon_distribution(rep2.rho).mean()
    n1a = photon_distribution(rep1.rho).mean()
    n1b = photon_distribution(rep1b.rho).mean()
    if abs(abs(p.g1) - abs(p.g2)) == 0 and abs(n1a - n1b) > 1e-9 * max(1.0, n1a, n1b):
        raise RuntimeError(
            f"single-qubit photon numbers differ ({n1a!r} vs {n1b!r}) although |g1| = |g2|"
        )
    denom = n1a + n1b
    if denom < 1e-14:
        raise UndefinedWitnessError(
            f"single-qubit photon numbers sum to {denom:.3e}; system is effectively unpumped"
        )
    witness = (n2 - denom) / denom
    return RadianceResult(n2, (n1a, n1b), witness), rep2, rep1, rep1b


def radiance_witness(p: ModelParams) -> float:
    """R = (<n>_2 - sum_i <n>_1,i) / sum_i <n>_1,i; R > 1 is hyperradiance."""
    result, _, _, _ = radiance_components(p)
    return result.witness


def _displacement_reference(n_dim: int, alpha: complex) -> np.ndarray:
    """D(alpha) on the truncated space via scipy's dense matrix exponential."""
    a = np.diag(np.sqrt(np.arange(1, n_dim, dtype=float)), k=1).astype(complex)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def _pad_state(rho: np.ndarray, n_dim: int) -> np.ndarray:
    out = np.zeros((n_dim, n_dim), dtype=complex)
    out[: rho.shape[0], : rho.shape[0]] = rho
    return out


def auto_pad_dim(rho_dim: int, alpha_max_sq: float) -> int:
    """Fock dimension large enough that displaced states stay clear of the cutoff.

    A displacement by alpha shifts the mean photon number by |alpha|^2; adding
    several standard deviations of the displaced Poisson weight keeps the
    parity sum free of reflection artifacts.
    """
    need = int(math.ceil(alpha_max_sq + 6.0 * math.sqrt(max(alpha_max_sq, 1.0)) + 10))
    return max(rho_dim, need + 1)


def wigner(
    rho_cavity: DensityMatrix,
    x: np.ndarray,
    y: np.ndarray,
    pad_dim: int | None = None,
) -> WignerGrid:
    """Displaced-parity Wigner function W(x, y) of a cavity-only state.

    W(alpha) = (2/pi) Tr[rho D(alpha) P D(-alpha)] with alpha = (x + iy)/sqrt(2).
    The state is zero-padded to `pad_dim` Fock levels (chosen automatically
    from the grid extent) so that the truncated displacement operator is
    faithful across the whole grid. D(alpha) is the exponential of
    alpha a^dag - conj(alpha) a, evaluated through the eigendecomposition
    of its generator; a dense scipy expm path is kept as cross-check.
    """
    if rho_cavity.space.n_slots != 1:
        raise DimensionError("wigner expects a cavity-only state; partial-trace the qubits first")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or y.size < 2:
        raise ValueError("wigner grid needs at least two points per axis")

    alpha_max_sq = (float(np.max(np.abs(x))) ** 2 + float(np.max(np.abs(y))) ** 2) / 2.0
    n_dim = pad_dim if pad_dim is not None else auto_pad_dim(rho_cavity.space.total_dim, alpha_max_sq)
    rho = _pad_state(rho_cavity.data, n_dim)

    # generator a^dag - a is anti-Hermitian: diagonalize i*(a^dag - a) once,
    # then D(alpha) = R(phi) V exp(-i r lambda) V^dag R(phi)^dag with
    # alpha = r e^{i phi} and R(phi) = diag(e^{i phi n})
    a = np.diag(np.sqrt(np.arange(1, n_dim, dtype=float)), k=1).astype(complex)
    lam, vmat = eigh(1j * (a.conj().T - a))
    parity = (-1.0) ** np.arange(n_dim)
    ns = np.arange(n_dim)

    w = np.zeros((x.size, y.size))
    for i, xv in enumerate(x):
        for j, yv in enumerate(y):
            alpha = (xv + 1j * yv) / np.sqrt(2.0)
            r, phi = abs(alpha), np.angle(alpha)
            rot_v = np.exp(1j * phi * ns)[:, None] * vmat
            disp = (rot_v * np.exp(-1j * r * lam)[None, :]) @ rot_v.conj().T
            shifted = rho @ disp
            w[i, j] = (2.0 / np.pi) * float(
                np.real(np.sum(parity * np.einsum("ij,ji->i", disp.conj().T, shifted)))
            )

    peak = float(np.max(np.abs(w)))
    boundary = float(
        max(
            np.max(np.abs(w[0, :])),
            np.max(np.abs(w[-1, :])),
            np.max(np.abs(w[:, 0])),
            np.max(np.abs(w[:, -1])),
        )
    )
    warning = peak > 0 and boundary > 1e-3 * peak
    return WignerGrid(x=x, y=y, w=w, convention=WIGNER_CONVENTION, boundary_warning=warning)


def wigner_point_reference(rho_cavity: DensityMatrix, x: float, y: float,
                           pad_dim: int | None = None) -> float:
    """Single W(x, y) value through scipy.linalg.expm, for cross-validation."""
    if rho_cavity.space.n_slots != 1:
        raise DimensionError("wigner expects a cavity-only state")
    alpha = (x + 1j * y) / np.sqrt(2.0)
    n_dim = pad_dim if pad_dim is not None else auto_pad_dim(
        rho_cavity.space.total_dim, abs(alpha) ** 2
    )
    rho = _pad_state(rho_cavity.data, n_dim)
    disp = _displacement_reference(n_dim, alpha)
    parity = (-1.0) ** np.arange(n_dim)
    inner = disp.conj().T @ rho @ disp
    return (2.0 / np.pi) * float(np.real(np.sum(parity * np.diag(inner))))
