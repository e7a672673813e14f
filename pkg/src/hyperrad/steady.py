"""Liouvillian construction, steady-state solve, and a time-evolution oracle.

Vectorization is column-stacking throughout: vec(A rho B) = (B^T kron A) vec(rho),
i.e. numpy reshape with order='F'. Under that convention the master equation
becomes d vec(rho)/dt = L vec(rho) with

    L = -i (I kron H - H^T kron I)
        + sum_c rate_c (2 conj(c) kron c - I kron c^dag c - (c^dag c)^T kron I).

The steady state is the trace-one null vector of L. The reference solver
replaces one diagonal row of L with the trace functional and solves the
bordered system by sparse LU, followed by one step of iterative refinement.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .models import LindbladModel
from .operators import DensityMatrix, SpaceDescriptor, StateValidationError, partial_trace

RESIDUAL_TOL = 1e-10
TAIL_TOL = 1e-6
ASYMMETRY_TOL = 1e-8


class SteadyStateError(RuntimeError):
    """Base class for steady-state solver failures."""


class DegenerateSteadyStateError(SteadyStateError):
    """The Liouvillian has more than one independent null vector."""

    def __init__(self, null_dimension: int | None):
        self.null_dimension = null_dimension
        dim = "unknown" if null_dimension is None else str(null_dimension)
        super().__init__(f"steady state is not unique (null-space dimension: {dim})")


class ConvergenceError(SteadyStateError):
    """The solve did not reach the residual contract."""


class StiffnessError(RuntimeError):
    """Adaptive integration kept rejecting steps; reduce dt or rates."""


def vectorize(mat: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(mat).reshape(-1, order="F")


def devectorize(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True)
class Liouvillian:
    """Sparse superoperator generating the master equation."""

    space: SpaceDescriptor
    superop: sp.csr_matrix

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def trace_vector(self) -> np.ndarray:
        """vec(I): the trace functional in the vectorized picture."""
        d = self.dim
        t = np.zeros(d * d)
        t[np.arange(d) * (d + 1)] = 1.0
        return t


@dataclass
class SteadyStateReport:
    rho: DensityMatrix
    residual: float
    tail_population: float
    truncation_suspect: bool
    solver_stats: dict = field(default_factory=dict)


def build_liouvillian(model: LindbladModel) -> Liouvillian:
    space = model.space
    d = space.total_dim
    ident = sp.identity(d, format="csr", dtype=complex)
    h = sp.csr_matrix(model.hamiltonian.data)
    superop = -1j * (sp.kron(ident, h) - sp.kron(h.T, ident))
    for op, rate in model.collapse_channels:
        if rate == 0:
            continue
        c = sp.csr_matrix(op.data)
        cdc = (c.conj().T @ c).tocsr()
        superop = superop + rate * (
            2.0 * sp.kron(c.conj(), c) - sp.kron(ident, cdc) - sp.kron(cdc.T, ident)
        )
    return Liouvillian(space, superop.tocsr())


def _cavity_tail(rho: DensityMatrix) -> float:
    """Population in the top three Fock levels (n > n_max - 3)."""
    space = rho.space
    if space.n_slots == 1:
        diag = np.real(np.diag(rho.data))
    else:
        reduced = partial_trace(rho, {space.n_slots - 1})
        diag = np.real(np.diag(reduced.data))
    return float(np.sum(diag[-3:]))


def _nullspace_dimension(superop: sp.spmatrix, tol: float) -> int | None:
    """Count eigenvalues of L at zero; None when the count is not decidable."""
    n = superop.shape[0]
    if n <= 4096:
        eigs = np.linalg.eigvals(superop.toarray())
        return int(np.sum(np.abs(eigs) <= tol))
    try:
        shift = max(tol, 1e-8)
        vals = spla.eigs(superop.tocsc(), k=6, sigma=shift, return_eigenvectors=False)
        return int(np.sum(np.abs(vals) <= tol))
    except Exception:
        return None


def steady_state(liouv: Liouvillian) -> SteadyStateReport:
    """Solve L vec(rho) = 0 with Tr(rho) = 1 by a bordered direct factorization.

    One diagonal row of L is redundant (the trace functional annihilates L
    from the left), so replacing row 0 with the trace row yields a square
    system whose solution is the trace-one steady state. The result is
    Hermitized, positivity-checked and residual-checked against the full L.
    """
    t_start = time.perf_counter()
    d = liouv.dim
    n = d * d
    lmat = liouv.superop.tocsr()

    # bordered matrix: zero out row 0 (a diagonal row), then add the trace row
    bordered = lmat.copy()
    bordered.data[bordered.indptr[0]:bordered.indptr[1]] = 0.0
    trace_row = sp.coo_matrix(
        (np.ones(d, dtype=complex), (np.zeros(d, dtype=int), np.arange(d) * (d + 1))),
        shape=(n, n),
    )
    bordered = (bordered + trace_row).tocsc()
    bordered.eliminate_zeros()

    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0

    scale = float(np.max(np.abs(lmat.data))) if lmat.nnz else 1.0
    try:
        lu = spla.splu(bordered)
        x = lu.solve(rhs)
        x = x + lu.solve(rhs - bordered @ x)  # one refinement step
    except RuntimeError as exc:  # SuperLU: factor is singular
        null_dim = _nullspace_dimension(lmat, tol=max(1e-12 * scale, 1e-12))
        if null_dim is not None and null_dim >= 2:
            raise DegenerateSteadyStateError(null_dim) from exc
        raise ConvergenceError(f"bordered factorization failed: {exc}") from exc

    residual = float(np.max(np.abs(lmat @ x)))
    if not np.isfinite(residual) or residual > RESIDUAL_TOL:
        null_dim = _nullspace_dimension(lmat, tol=max(1e-12 * scale, 1e-12))
        if null_dim is not None and null_dim >= 2:
            raise DegenerateSteadyStateError(null_dim)
        raise ConvergenceError(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL:.1e} after refinement"
        )

    rho_raw = devectorize(x, d)
    asym = float(np.max(np.abs(rho_raw - rho_raw.conj().T)))
    if asym > ASYMMETRY_TOL:
        raise ConvergenceError(
            f"solution asymmetry {asym:.3e} exceeds {ASYMMETRY_TOL:.1e}; "
            "solver output is not a roundoff-perturbed state"
        )
    rho_h = 0.5 * (rho_raw + rho_raw.conj().T)
    rho_h = rho_h / np.trace(rho_h).real

    try:
        rho = DensityMatrix(liouv.space, rho_h)
    except StateValidationError as exc:
        raise ConvergenceError(f"steady-state candidate failed validation: {exc}") from exc

    tail = _cavity_tail(rho)
    stats = {
        "method": "bordered-splu",
        "refinement_steps": 1,
        "nnz": int(lmat.nnz),
        "asymmetry": asym,
        "wall_time_s": time.perf_counter() - t_start,
    }
    return SteadyStateReport(
        rho=rho,
        residual=residual,
        tail_population=tail,
        truncation_suspect=tail > TAIL_TOL,
        solver_stats=stats,
    )


def solve_model(model: LindbladModel) -> SteadyStateReport:
    """Convenience wrapper: build the Liouvillian and solve it."""
    return steady_state(build_liouvillian(model))


def _rk4_step(lmat: sp.csr_matrix, x: np.ndarray, h: float) -> np.ndarray:
    k1 = lmat @ x
    k2 = lmat @ (x + 0.5 * h * k1)
    k3 = lmat @ (x + 0.5 * h * k2)
    k4 = lmat @ (x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_state_contracts(rho: np.ndarray) -> None:
    asym = float(np.max(np.abs(rho - rho.conj().T)))
    if asym > 1e-10:
        raise StateValidationError(f"hermiticity drift {asym:.3e}")
    tr_err = abs(np.trace(rho) - 1.0)
    if tr_err > 1e-10:
        raise StateValidationError(f"trace drift {tr_err:.3e}")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if min_eig < -1e-8:
        raise StateValidationError(f"negative eigenvalue {min_eig:.3e}")


def time_evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    t_final: float,
    dt: float | None = None,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    max_rejects: int = 40,
) -> DensityMatrix:
    """Integrate d vec(rho)/dt = L vec(rho) with adaptive classical RK4.

    Step control is by step doubling: each step is compared against two
    half steps, the error estimate drives acceptance and the next step
    size, and the state contracts (trace, Hermiticity, positivity) are
    enforced at every accepted step. Serves as the independent oracle for
    the direct steady-state solve.
    """
    if model.space != rho0.space:
        raise ValueError("initial state space differs from model space")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    liouv = build_liouvillian(model)
    lmat = liouv.superop
    d = liouv.dim

    norm_inf = float(np.max(np.abs(lmat).sum(axis=1))) if lmat.nnz else 1.0
    h_stab = 2.5 / max(norm_inf, 1e-300)  # classical RK4 stability margin
    h = min(dt if dt is not None else h_stab, h_stab, t_final if t_final > 0 else h_stab)

    x = vectorize(rho0.data).astype(complex)
    t = 0.0
    rejects = 0
    while t < t_final - 1e-14 * max(t_final, 1.0):
        h = min(h, t_final - t)
        x_full = _rk4_step(lmat, x, h)
        x_half = _rk4_step(lmat, _rk4_step(lmat, x, 0.5 * h), 0.5 * h)
        err = float(np.max(np.abs(x_full - x_half))) / 15.0
        tol = atol + rtol * float(np.max(np.abs(x_half)))
        if np.isfinite(err) and err <= tol:
            # Richardson-extrapolated accept
            x_new = x_half + (x_half - x_full) / 15.0
            rho_step = devectorize(x_new, d)
            try:
                _check_state_contracts(rho_step)
            except StateValidationError:
                rejects += 1
                h *= 0.5
                if rejects > max_rejects:
                    raise StiffnessError(
                        f"state contracts kept failing near t={t:.3g}; use a smaller dt"
                    ) from None
                continue
            x = x_new
            t += h
            rejects = 0
            if err > 0:
                h = min(h * min(2.0, 0.9 * (tol / err) ** 0.2), h_stab)
            else:
                h = min(2.0 * h, h_stab)
        else:
            rejects += 1
            h *= 0.5
            if rejects > max_rejects or h < 1e-15 * max(t_final, 1.0):
                raise StiffnessError(
                    f"step rejection cascade at t={t:.3g} (h={h:.3e}); use a smaller dt"
                )
    return DensityMatrix(liouv.space, devectorize(x, d))
