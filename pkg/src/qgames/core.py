"""Dense linear algebra for one- and two-qubit systems.

Every object is an immutable wrapper around a small complex ``numpy``
array. Basis order for two qubits is ``|00>, |01>, |10>, |11>`` with
Alice on the left slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CompletenessError,
    DimensionError,
    ImaginaryResidueError,
    RangeError,
    UnitarityError,
)

TAU_MAT = 1e-9
TAU_NORM = 1e-9
TAU_PSD = 1e-8

_DIMS = (2, 4)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite entries are not admitted")
    out.setflags(write=False)
    return out


def is_unitary(m, tol: float = TAU_MAT) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) <= tol)


def complex_scalar(re: float, im: float = 0.0) -> complex:
    """Build a finite complex amplitude."""
    z = complex(re, im)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError("non-finite amplitude")
    return z


@dataclass(frozen=True, eq=False)
class Ket:
    """State vector of dimension 2 or 4.

    Parameters
    ----------
    amps : array_like
        Complex amplitudes.
    normalized : bool
        When true the constructor enforces unit norm within ``TAU_NORM``.
    """

    amps: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        a = _frozen(self.amps).reshape(-1)
        if a.size not in _DIMS:
            raise DimensionError(f"ket dimension {a.size} not in {_DIMS}")
        if self.normalized and abs(np.linalg.norm(a) - 1.0) > TAU_NORM:
            raise RangeError(f"ket norm {np.linalg.norm(a):.3g} differs from 1")
        object.__setattr__(self, "amps", a)

    @property
    def dim(self) -> int:
        return self.amps.size

    def density(self) -> "Density":
        return Density(np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True, eq=False)
class Operator:
    """Square operator of dimension 2 or 4.

    ``unitary`` and ``hermitian`` flags are checked at construction.
    """

    mat: np.ndarray
    unitary: bool = False
    hermitian: bool = False

    def __post_init__(self):
        m = _frozen(self.mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in _DIMS:
            raise DimensionError(f"operator shape {m.shape} not admitted")
        object.__setattr__(self, "mat", m)
        if self.unitary and not is_unitary(m):
            raise UnitarityError("operator flagged unitary fails U U^dagger = I")
        if self.hermitian and np.max(np.abs(m - m.conj().T)) > TAU_MAT:
            raise ValueError("operator flagged Hermitian is not")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def dag(self) -> "Operator":
        return Operator(self.mat.conj().T, unitary=self.unitary, hermitian=self.hermitian)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise DimensionError("operator dimensions differ")
        return Operator(self.mat @ other.mat)

    def apply(self, ket: Ket) -> Ket:
        if self.dim != ket.dim:
            raise DimensionError("operator and ket dimensions differ")
        return Ket(self.mat @ ket.amps, normalized=False)


@dataclass(frozen=True, eq=False)
class Density:
    """Density operator with unit trace that is Hermitian and positive semidefinite.

    The positivity check uses ``numpy.linalg.eigvalsh`` on the Hermitian
    part, with slack ``TAU_PSD`` for eigen-solver noise.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = _frozen(self.mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in _DIMS:
            raise DimensionError(f"density shape {m.shape} not admitted")
        if np.max(np.abs(m - m.conj().T)) > TAU_MAT:
            raise RangeError("density is not Hermitian")
        if abs(np.trace(m) - 1.0) > TAU_NORM:
            raise RangeError(f"density trace {np.trace(m).real:.6g} differs from 1")
        herm = 0.5 * (m + m.conj().T)
        if np.linalg.eigvalsh(herm).min() < -TAU_PSD:
            raise RangeError("density has a negative eigenvalue")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.mat + self.mat.conj().T))


class TwoQubitDensity(Density):
    """4x4 density operator of the two-player system."""

    def __post_init__(self):
        super().__post_init__()
        if self.dim != 4:
            raise DimensionError("two-qubit density must be 4x4")


@dataclass(frozen=True)
class BlochVector:
    rx: float
    ry: float
    rz: float

    def __post_init__(self):
        r = np.array([self.rx, self.ry, self.rz], dtype=float)
        if not np.all(np.isfinite(r)):
            raise ValueError("non-finite Bloch component")
        if r @ r > 1.0 + TAU_NORM:
            raise RangeError(f"Bloch norm {np.sqrt(r @ r):.6g} exceeds 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.rx, self.ry, self.rz], dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Channel in operator-sum form; completeness is checked on build."""

    ops: tuple

    def __post_init__(self):
        mats = tuple(o if isinstance(o, Operator) else Operator(o) for o in self.ops)
        if not mats:
            raise CompletenessError("empty Kraus set")
        d = mats[0].dim
        if any(o.dim != d for o in mats):
            raise DimensionError("Kraus operators of mixed dimension")
        total = sum(o.mat.conj().T @ o.mat for o in mats)
        if np.max(np.abs(total - np.eye(d))) > TAU_MAT:
            raise CompletenessError("sum_k A_k^dagger A_k differs from identity")
        object.__setattr__(self, "ops", mats)

    @property
    def dim(self) -> int:
        return self.ops[0].dim


I2 = Operator(np.eye(2), unitary=True, hermitian=True)
I4 = Operator(np.eye(4), unitary=True, hermitian=True)
SX = Operator([[0, 1], [1, 0]], unitary=True, hermitian=True)
SY = Operator([[0, -1j], [1j, 0]], unitary=True, hermitian=True)
SZ = Operator([[1, 0], [0, -1]], unitary=True, hermitian=True)
H = Operator(np.array([[1, 1], [1, -1]]) / np.sqrt(2), unitary=True, hermitian=True)
PAULIS = (SX, SY, SZ)


def basis_ket(bits: str) -> Ket:
    """Computational basis ket, e.g. ``basis_ket("01")``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return Ket(v)


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product; ``a`` acts on Alice's (left) qubit."""
    if a.dim != 2 or b.dim != 2:
        raise DimensionError("tensor expects two 2x2 operators")
    return Operator(np.kron(a.mat, b.mat), unitary=a.unitary and b.unitary)


def tensor_ket(a: Ket, b: Ket) -> Ket:
    if a.dim != 2 or b.dim != 2:
        raise DimensionError("tensor expects two qubit kets")
    return Ket(np.kron(a.amps, b.amps), normalized=a.normalized and b.normalized)


def _as_density(rho) -> Density:
    return rho if isinstance(rho, Density) else Density(rho)


def _wrap(mat, like: Density) -> Density:
    return TwoQubitDensity(mat) if isinstance(like, TwoQubitDensity) else Density(mat)


def apply_unitary(u: Operator, rho: Density) -> Density:
    """Return ``U rho U^dagger``."""
    rho = _as_density(rho)
    if u.dim != rho.dim:
        raise DimensionError("unitary and density dimensions differ")
    if not is_unitary(u.mat):
        raise UnitarityError("operator is not unitary within tolerance")
    return _wrap(u.mat @ rho.mat @ u.mat.conj().T, rho)


def apply_kraus(k: KrausSet, rho: Density) -> Density:
    """Return ``sum_k A_k rho A_k^dagger``."""
    rho = _as_density(rho)
    if not isinstance(k, KrausSet):
        k = KrausSet(tuple(k))
    if k.dim != rho.dim:
        raise DimensionError("Kraus and density dimensions differ")
    out = sum(a.mat @ rho.mat @ a.mat.conj().T for a in k.ops)
    return _wrap(out, rho)


def expectation(m: Operator, rho: Density) -> float:
    """``Tr(rho M)`` for Hermitian ``M``; rejects imaginary residue above ``TAU_MAT``."""
    rho = _as_density(rho)
    if m.dim != rho.dim:
        raise DimensionError("observable and density dimensions differ")
    if np.max(np.abs(m.mat - m.mat.conj().T)) > TAU_MAT:
        raise ValueError("observable is not Hermitian")
    val = np.trace(rho.mat @ m.mat)
    if abs(val.imag) > TAU_MAT:
        raise ImaginaryResidueError(f"imaginary residue {val.imag:.3g}")
    return float(val.real)


def partial_trace(rho: Density, keep: str = "first") -> Density:
    """Reduce a two-qubit density to one qubit; ``keep`` is ``"first"`` or ``"second"``."""
    rho = _as_density(rho)
    if rho.dim != 4:
        raise DimensionError("partial trace needs a two-qubit density")
    t = rho.mat.reshape(2, 2, 2, 2)
    if keep == "first":
        red = np.einsum("ajbj->ab", t)
    elif keep == "second":
        red = np.einsum("iaib->ab", t)
    else:
        raise ValueError("keep must be 'first' or 'second'")
    return Density(red)


def density_from_bloch(v: BlochVector) -> Density:
    r = v.as_array()
    return Density(0.5 * (np.eye(2) + sum(ri * p.mat for ri, p in zip(r, PAULIS))))


def bloch_from_density(rho: Density) -> BlochVector:
    rho = _as_density(rho)
    if rho.dim != 2:
        raise DimensionError("Bloch vector needs a qubit density")
    r = [expectation(p, rho) for p in PAULIS]
    n = float(np.linalg.norm(r))
    if 1.0 < n <= 1.0 + TAU_NORM:
        r = [x / n for x in r]
    return BlochVector(*r)


def random_unitary(rng: np.random.Generator, dim: int = 2) -> Operator:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Operator(q, unitary=True)


def random_density(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> Density:
    """Random density of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return TwoQubitDensity(m) if dim == 4 else Density(m)


def random_ket(rng: np.random.Generator, dim: int = 2) -> Ket:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return Ket(v / np.linalg.norm(v))


def operator_sum(terms: Iterable[tuple[complex, Operator]]) -> Operator:
    """Linear combination ``sum_k c_k M_k``."""
    terms = list(terms)
    return Operator(sum(c * m.mat for c, m in terms))


def max_abs_diff(a: Operator | np.ndarray, b: Operator | np.ndarray) -> float:
    am = a.mat if hasattr(a, "mat") else np.asarray(a)
    bm = b.mat if hasattr(b, "mat") else np.asarray(b)
    return float(np.max(np.abs(am - bm)))


__all__: Sequence[str] = [
    "TAU_MAT", "TAU_NORM", "TAU_PSD", "Ket", "Operator", "Density", "TwoQubitDensity",
    "BlochVector", "KrausSet", "I2", "I4", "SX", "SY", "SZ", "H", "PAULIS", "complex_scalar",
    "is_unitary", "basis_ket", "tensor", "tensor_ket", "apply_unitary", "apply_kraus",
    "expectation", "partial_trace", "density_from_bloch", "bloch_from_density",
    "random_unitary", "random_density", "random_ket", "operator_sum", "max_abs_diff",
]
