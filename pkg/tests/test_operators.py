import math

import numpy as np
import pytest

from hyperrad import (
    DensityMatrix,
    DimensionError,
    Operator,
    SpaceDescriptor,
    SpaceMismatchError,
    StateValidationError,
    embed,
    expect,
    fock_annihilation,
    partial_trace,
    qubit_lowering,
    tensor,
    trace_distance,
)
from conftest import random_density


def coherent_vector(alpha: complex, n_max: int) -> np.ndarray:
    """Independent coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!)."""
    return np.array(
        [
            np.exp(-abs(alpha) ** 2 / 2) * alpha**n / math.sqrt(math.factorial(n))
            for n in range(n_max + 1)
        ],
        dtype=complex,
    )


class TestSpaceDescriptor:
    def test_total_dim_is_product(self):
        s = SpaceDescriptor((2, 2, 5))
        assert s.total_dim == 20
        assert s.n_slots == 3
        assert s.cavity_dim == 5

    def test_rejects_bad_dims(self):
        with pytest.raises(DimensionError):
            SpaceDescriptor(())
        with pytest.raises(DimensionError):
            SpaceDescriptor((2, 0))
        with pytest.raises(DimensionError):
            SpaceDescriptor((2, -3))

    def test_composability_is_identity(self):
        a = SpaceDescriptor((2, 3))
        b = SpaceDescriptor((3, 2))
        assert a != b
        assert a == SpaceDescriptor((2, 3))


class TestFockOperators:
    def test_ladder_elements(self):
        a = fock_annihilation(2)
        assert a.data[0, 1] == pytest.approx(1.0)
        assert a.data[1, 2] == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_number_operator_diagonal(self):
        n_max = 6
        a = fock_annihilation(n_max)
        num = (a.dagger() @ a).data
        assert np.allclose(num, np.diag(np.arange(n_max + 1)), atol=1e-14)

    def test_rejects_nonpositive_truncation(self):
        with pytest.raises(DimensionError):
            fock_annihilation(0)

    def test_truncated_commutator(self):
        # [a, a^dag] = I except the top corner, which is -n_max (the
        # truncation artifact); sqrt(n)^2 reproduces n only to one ulp
        n_max = 7
        a = fock_annihilation(n_max)
        comm = (a @ a.dagger() - a.dagger() @ a).data
        expected = np.eye(n_max + 1)
        expected[n_max, n_max] = -n_max
        assert np.max(np.abs(comm - expected)) <= 1e-13
        off_diag = comm - np.diag(np.diag(comm))
        assert np.all(off_diag == 0)


class TestQubitLowering:
    def test_action_on_basis(self):
        sm = qubit_lowering().data
        e = np.array([0.0, 1.0])
        g = np.array([1.0, 0.0])
        assert np.allclose(sm @ e, g)
        assert np.allclose(sm @ g, 0.0)

    def test_excited_projector(self):
        sm = qubit_lowering()
        proj = (sm.dagger() @ sm).data
        assert np.allclose(proj, np.diag([0.0, 1.0]))


class TestTensorEmbed:
    def test_tensor_identities(self):
        i2 = Operator.identity(SpaceDescriptor((2,)))
        out = tensor([i2, i2])
        assert np.allclose(out.data, np.eye(4))
        assert out.space.dims == (2, 2)

    def test_tensor_dimension(self):
        a = Operator(SpaceDescriptor((2,)), np.eye(2))
        b = Operator(SpaceDescriptor((3,)), np.eye(3))
        assert tensor([a, b]).space.total_dim == 6

    def test_tensor_lowering_block(self):
        sm = qubit_lowering()
        i2 = Operator.identity(SpaceDescriptor((2,)))
        out = tensor([sm, i2]).data
        # ((g, j), (e, j)) entries are 1 for both j
        for j in range(2):
            assert out[0 * 2 + j, 1 * 2 + j] == 1.0

    def test_tensor_empty_rejected(self):
        with pytest.raises(DimensionError):
            tensor([])

    def test_tensor_associativity(self, rng):
        mats = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for d in (2, 3, 2)]
        ops = [Operator(SpaceDescriptor((m.shape[0],)), m) for m in mats]
        left = tensor([tensor([ops[0], ops[1]]), ops[2]])
        right = tensor([ops[0], tensor([ops[1], ops[2]])])
        assert np.max(np.abs(left.data - right.data)) <= 1e-14

    def test_embed_matches_manual_kron(self):
        space = SpaceDescriptor((2, 2, 3))
        sm = qubit_lowering()
        manual = np.kron(sm.data, np.kron(np.eye(2), np.eye(3)))
        assert np.array_equal(embed(sm, 0, space).data, manual)

    def test_embed_disjoint_slots_commute(self):
        space = SpaceDescriptor((2, 2, 3))
        a = embed(fock_annihilation(2), 2, space)
        sm = embed(qubit_lowering(), 0, space)
        comm = (a @ sm - sm @ a).data
        assert np.max(np.abs(comm)) <= 1e-12

    def test_embed_identity_is_identity(self):
        space = SpaceDescriptor((2, 2, 3))
        i3 = Operator.identity(SpaceDescriptor((3,)))
        assert np.allclose(embed(i3, 2, space).data, np.eye(12))

    def test_embed_size_mismatch(self):
        with pytest.raises(DimensionError):
            embed(qubit_lowering(), 2, SpaceDescriptor((2, 2, 3)))


class TestDagger:
    def test_involution(self, rng):
        space = SpaceDescriptor((4,))
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        op = Operator(space, m)
        assert np.array_equal(op.dagger().dagger().data, op.data)

    def test_antidistributes_over_product(self, rng):
        space = SpaceDescriptor((5,))
        a = Operator(space, rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
        b = Operator(space, rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
        lhs = (a @ b).dagger().data
        rhs = (b.dagger() @ a.dagger()).data
        assert np.max(np.abs(lhs - rhs)) <= 1e-14


class TestExpect:
    def test_number_on_fock_states(self):
        n_max = 4
        space = SpaceDescriptor.cavity(n_max)
        a = fock_annihilation(n_max)
        num = a.dagger() @ a
        vac = np.zeros(n_max + 1)
        vac[0] = 1.0
        assert expect(num, DensityMatrix.from_vector(space, vac)) == pytest.approx(0.0, abs=1e-14)
        two = np.zeros(n_max + 1)
        two[2] = 1.0
        assert expect(num, DensityMatrix.from_vector(space, two)).real == pytest.approx(2.0, abs=1e-14)

    def test_coherent_amplitude(self):
        # <a> of a truncated coherent state equals alpha
        n_max = 20
        space = SpaceDescriptor.cavity(n_max)
        rho = DensityMatrix.from_vector(space, coherent_vector(0.3, n_max))
        val = expect(fock_annihilation(n_max), rho)
        assert abs(val - 0.3) <= 1e-8

    def test_space_mismatch(self):
        rho = DensityMatrix.from_vector(SpaceDescriptor.cavity(3), np.eye(4)[0])
        with pytest.raises(SpaceMismatchError):
            expect(fock_annihilation(5), rho)


class TestPartialTrace:
    def test_product_state_reduces_to_factor(self, rng):
        sa = SpaceDescriptor((2,))
        sb = SpaceDescriptor((3,))
        rho_a = random_density(sa, rng)
        rho_b = random_density(sb, rng)
        joint = DensityMatrix(SpaceDescriptor((2, 3)), np.kron(rho_a.data, rho_b.data))
        red = partial_trace(joint, {0})
        assert np.max(np.abs(red.data - rho_a.data)) <= 1e-12

    def test_trace_preserved(self, rng):
        rho = random_density(SpaceDescriptor((2, 2, 4)), rng)
        red = partial_trace(rho, {2})
        assert abs(np.trace(red.data) - 1.0) <= 1e-10

    def test_qubits_traced_out_of_pure_product(self):
        space = SpaceDescriptor((2, 2, 3))
        vec = np.zeros(12)
        vec[0 * 6 + 0 * 3 + 1] = 1.0  # |gg, 1>
        rho = DensityMatrix.from_vector(space, vec)
        red = partial_trace(rho, {2})
        assert np.allclose(red.data, np.diag([0.0, 1.0, 0.0]))

    def test_keep_all_slots_is_identity(self, rng):
        rho = random_density(SpaceDescriptor((2, 3)), rng)
        red = partial_trace(rho, {0, 1})
        assert np.max(np.abs(red.data - rho.data)) <= 1e-14

    def test_empty_keep_rejected(self, rng):
        rho = random_density(SpaceDescriptor((2, 2)), rng)
        with pytest.raises(DimensionError):
            partial_trace(rho, set())


class TestDensityMatrixContracts:
    def test_rejects_non_hermitian(self):
        bad = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(StateValidationError):
            DensityMatrix(SpaceDescriptor((2,)), bad)

    def test_rejects_wrong_trace(self):
        with pytest.raises(StateValidationError):
            DensityMatrix(SpaceDescriptor((2,)), 0.7 * np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(StateValidationError):
            DensityMatrix(SpaceDescriptor((2,)), np.diag([1.5, -0.5]))

    def test_trace_distance_of_orthogonal_pure_states(self):
        space = SpaceDescriptor((2,))
        g = DensityMatrix.from_vector(space, np.array([1.0, 0.0]))
        e = DensityMatrix.from_vector(space, np.array([0.0, 1.0]))
        assert trace_distance(g, e) == pytest.approx(1.0, abs=1e-12)
        assert trace_distance(g, g) == pytest.approx(0.0, abs=1e-14)
