import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgames.core import (
    H,
    I2,
    I4,
    SX,
    SZ,
    BlochVector,
    Density,
    Ket,
    KrausSet,
    Operator,
    TwoQubitDensity,
    apply_kraus,
    apply_unitary,
    basis_ket,
    bloch_from_density,
    density_from_bloch,
    expectation,
    max_abs_diff,
    operator_sum,
    partial_trace,
    random_density,
    random_ket,
    random_unitary,
    tensor,
    tensor_ket,
)
from qgames.errors import (
    CompletenessError,
    DimensionError,
    ImaginaryResidueError,
    RangeError,
    UnitarityError,
)
from qgames.scheme import SchemeConfig, initial_density, measurement_projectors

seeds = st.integers(0, 2 ** 32 - 1)


def proj(bits):
    return basis_ket(bits).density()


class TestTensor:
    def test_identity(self):
        assert max_abs_diff(tensor(I2, I2), I4) == 0.0

    def test_flip_first_slot(self):
        out = tensor(SX, I2).apply(basis_ket("00"))
        assert np.array_equal(out.amps, basis_ket("10").amps)

    def test_hadamard_pair(self):
        out = tensor(H, H).apply(basis_ket("00"))
        assert np.allclose(out.amps, 0.5 * np.ones(4), atol=1e-15)

    def test_associative_on_integer_fixtures(self):
        a, b, c = np.array([[1, 2], [3, 4]]), np.array([[0, 1], [1, 0]]), np.array([[2, 0], [1, -1]])
        assert np.array_equal(np.kron(np.kron(a, b), c), np.kron(a, np.kron(b, c)))
        assert np.array_equal(tensor(Operator(a), Operator(b)).mat, np.kron(a, b))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            tensor(I4, I2)
        with pytest.raises(DimensionError):
            tensor_ket(basis_ket("00"), basis_ket("0"))


class TestTypes:
    def test_ket_norm_checked(self):
        with pytest.raises(RangeError):
            Ket([1, 1])
        assert Ket([1, 1], normalized=False).dim == 2

    def test_bad_dimension(self):
        with pytest.raises(DimensionError):
            Ket([1, 0, 0])
        with pytest.raises(DimensionError):
            Operator(np.eye(3))

    def test_non_unitary_flag(self):
        with pytest.raises(UnitarityError):
            Operator([[1, 1], [0, 1]], unitary=True)

    def test_density_rejects_negative_eigenvalue(self):
        with pytest.raises(RangeError):
            Density(np.diag([1.5, -0.5]))

    def test_density_rejects_trace(self):
        with pytest.raises(RangeError):
            Density(np.diag([0.5, 0.4]))

    def test_two_qubit_density_dimension(self):
        with pytest.raises(DimensionError):
            TwoQubitDensity(np.eye(2) / 2)

    def test_bloch_norm(self):
        with pytest.raises(RangeError):
            BlochVector(1.0, 0.1, 0.0)

    def test_arrays_are_read_only(self):
        op = Operator(np.eye(2))
        with pytest.raises(ValueError):
            op.mat[0, 0] = 2

    def test_incomplete_kraus(self):
        with pytest.raises(CompletenessError):
            KrausSet((0.5 * np.eye(2),))

    def test_operator_sum(self):
        assert max_abs_diff(operator_sum([(0.5, I2), (0.5, SZ)]), np.diag([1, 0])) == 0.0


class TestApply:
    def test_identity_unitary(self, rng):
        rho = random_density(rng)
        assert max_abs_diff(apply_unitary(I4, rho).mat, rho.mat) == 0.0

    def test_double_flip(self):
        out = apply_unitary(tensor(SX, SX), proj("00"))
        assert max_abs_diff(out.mat, proj("11").mat) == 0.0

    def test_hadamard_first_slot(self):
        out = apply_unitary(tensor(H, I2), proj("00"))
        expected = np.zeros((4, 4))
        expected[np.ix_([0, 2], [0, 2])] = 0.5
        assert max_abs_diff(out.mat, expected) < 1e-15
        assert abs(np.trace(out.mat) - 1) < 1e-15

    def test_rejects_non_unitary(self):
        with pytest.raises(UnitarityError):
            apply_unitary(Operator(np.diag([1, 1, 1, 2])), proj("00"))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply_unitary(I2, proj("00"))

    @given(seeds)
    def test_spectrum_invariance(self, seed):
        r = np.random.default_rng(seed)
        rho = random_density(r)
        u = tensor(random_unitary(r), random_unitary(r))
        before = rho.eigenvalues()
        after = apply_unitary(u, rho).eigenvalues()
        assert np.max(np.abs(np.sort(before) - np.sort(after))) < 1e-8

    @given(seeds)
    def test_random_unitary_is_unitary(self, seed):
        u = random_unitary(np.random.default_rng(seed), 4).mat
        assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-9


class TestKraus:
    def test_identity_set(self, rng):
        rho = random_density(rng, dim=2)
        assert max_abs_diff(apply_kraus(KrausSet((np.eye(2),)), rho).mat, rho.mat) == 0.0

    def test_full_dephasing_of_plus(self):
        plus = Ket(np.array([1, 1]) / np.sqrt(2)).density()
        ks = KrausSet((np.sqrt(0.5) * np.eye(2), np.sqrt(0.5) * np.diag([1, -1])))
        assert max_abs_diff(apply_kraus(ks, plus).mat, np.eye(2) / 2) < 1e-15

    def test_trace_preserved(self, rng):
        ks = KrausSet((np.sqrt(0.7) * np.eye(4), np.sqrt(0.3) * np.kron(SX.mat, SZ.mat)))
        for _ in range(1000):
            out = apply_kraus(ks, random_density(rng))
            assert abs(np.trace(out.mat) - 1) < 1e-9


class TestExpectation:
    def test_identity(self, rng):
        assert abs(expectation(I4, random_density(rng)) - 1) < 1e-12

    def test_sigma_z(self):
        assert expectation(tensor(SZ, I2), proj("00")) == 1.0

    def test_projector_on_own_ket(self):
        p00 = measurement_projectors(np.pi / 2)["00"]
        rho = initial_density(SchemeConfig(np.pi / 2, np.pi / 2))
        assert abs(expectation(p00, rho) - 1) < 1e-12

    def test_imaginary_residue(self):
        # non-Hermitian matrix smuggled past the Density checks
        bad = Density.__new__(Density)
        object.__setattr__(bad, "mat", np.array([[0.5, 1], [0, 0.5]], dtype=complex))
        with pytest.raises(ImaginaryResidueError):
            expectation(Operator([[0, -1j], [1j, 0]], hermitian=True), bad)


class TestPartialTrace:
    def test_product_state(self, rng):
        a, b = random_density(rng, 2), random_density(rng, 2)
        rho = Density(np.kron(a.mat, b.mat))
        assert max_abs_diff(partial_trace(rho, "first").mat, a.mat) < 1e-12
        assert max_abs_diff(partial_trace(rho, "second").mat, b.mat) < 1e-12

    def test_bell_state(self):
        bell = Ket(np.array([1, 0, 0, 1]) / np.sqrt(2)).density()
        for keep in ("first", "second"):
            assert max_abs_diff(partial_trace(bell, keep).mat, np.eye(2) / 2) < 1e-15

    def test_local_unitary_on_bell(self, rng):
        bell = Ket(np.array([1, 0, 0, 1]) / np.sqrt(2)).density()
        for _ in range(50):
            out = apply_unitary(tensor(random_unitary(rng), I2), bell)
            assert max_abs_diff(partial_trace(out, "second").mat, np.eye(2) / 2) < 1e-12

    def test_needs_two_qubits(self):
        with pytest.raises(DimensionError):
            partial_trace(Density(np.eye(2) / 2))


@given(seeds)
def test_bloch_round_trip(seed):
    r = np.random.default_rng(seed)
    rho = random_density(r, 2, rank=1 + seed % 2)
    back = density_from_bloch(bloch_from_density(rho))
    assert max_abs_diff(back.mat, rho.mat) < 1e-12


def test_random_ket_normalized(rng):
    assert abs(np.linalg.norm(random_ket(rng, 4).amps) - 1) < 1e-12
