"""Single-qubit state tomography read off game payoffs.

The unknown qubit is appended to ``|0>`` and both slots are rotated. With
the zero-sum coding ``$^A = I x sigma_z``, Alice's payoff equals one Stokes
parameter per setting, and Bob's is its negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import (
    TAU_NORM,
    Density,
    Operator,
    TwoQubitDensity,
    apply_unitary,
    expectation,
    tensor,
)
from .errors import RangeError
from .scheme import PI, PayoffMatrix, PayoffPair, StrategyParams, strategy_unitary

LABELS = ("S1", "S2", "S3")
_LABEL_KEY = {"S1": 1, "S2": 2, "S3": 3}
CODING = PayoffMatrix(1, -1, 1, -1, -1, 1, -1, 1)
_PAULI = (np.array([[0, 1], [1, 0]], complex), np.array([[0, -1j], [1j, 0]]),
          np.diag([1.0 + 0j, -1.0]))


@dataclass(frozen=True)
class StokesVector:
    s0: float
    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        if abs(self.s0 - 1.0) > TAU_NORM:
            raise RangeError("s0 must equal 1")
        if self.s1 ** 2 + self.s2 ** 2 + self.s3 ** 2 > 1 + TAU_NORM:
            raise RangeError("Stokes vector lies outside the Bloch ball")

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3])


@dataclass(frozen=True)
class TomographySetting:
    """Rotation angles for one measurement; ``alphaB`` is Bob's phase."""

    thetaA: float
    thetaB: float
    alphaB: float
    label: str


SETTINGS = {
    "S1": TomographySetting(PI / 2, PI / 2, 0.0, "S1"),
    "S2": TomographySetting(PI / 2, PI / 2, PI / 2, "S2"),
    "S3": TomographySetting(0.0, 0.0, 0.0, "S3"),
}


def _check_setting(setting: TomographySetting) -> TomographySetting:
    ref = SETTINGS.get(setting.label)
    if ref is None or any(abs(x - y) > 1e-12 for x, y in
                          zip((setting.thetaA, setting.thetaB, setting.alphaB),
                              (ref.thetaA, ref.thetaB, ref.alphaB))):
        raise RangeError(f"unrecognized tomography setting {setting!r}")
    return setting


def stokes_from_density(rho: Density) -> StokesVector:
    """``S_i = Tr(sigma_i rho)`` with ``S_0 = 1``."""
    if not isinstance(rho, Density):
        rho = Density(rho)
    if rho.dim != 2:
        raise RangeError("Stokes parameters need a qubit density")
    s = [expectation(Operator(p, hermitian=True), rho) for p in _PAULI]
    return StokesVector(1.0, *s)


def density_from_stokes(s: StokesVector) -> Density:
    """``(I + s1 sigma_x + s2 sigma_y + s3 sigma_z) / 2``."""
    if s.s1 ** 2 + s.s2 ** 2 + s.s3 ** 2 > 1 + TAU_NORM:
        raise RangeError("Stokes vector lies outside the Bloch ball")
    m = 0.5 * (s.s0 * np.eye(2) + s.s1 * _PAULI[0] + s.s2 * _PAULI[1] + s.s3 * _PAULI[2])
    return Density(m)


def pure_state(theta: float, phi: float) -> Density:
    """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
    v = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    return Density(np.outer(v, v.conj()))


def _final_state(setting: TomographySetting, rho: Density) -> TwoQubitDensity:
    rin = TwoQubitDensity(np.kron(np.diag([1.0, 0.0]), rho.mat))
    ua = strategy_unitary(StrategyParams(setting.thetaA, 0.0, 0.0))
    ub = strategy_unitary(StrategyParams(setting.thetaB, setting.alphaB, 0.0))
    return apply_unitary(tensor(ua, ub), rin)


def _probabilities(setting: TomographySetting, rho: Density) -> np.ndarray:
    d = np.real(np.diag(_final_state(setting, rho).mat)).copy()
    d[d < 0] = 0.0
    return d / d.sum()


def tomographic_payoff(setting: TomographySetting, rho: Density) -> PayoffPair:
    """Exact payoffs of one setting; Alice's equals the matching Stokes parameter."""
    _check_setting(setting)
    if not isinstance(rho, Density):
        rho = Density(rho)
    rf = _final_state(setting, rho)
    ops = [Operator(np.diag(np.array(CODING.values(k), dtype=complex)), hermitian=True)
           for k in ("A", "B")]
    return PayoffPair(expectation(ops[0], rf), expectation(ops[1], rf))


@dataclass(frozen=True)
class Reconstruction:
    density: Density
    stokes: StokesVector
    raw: tuple            # estimates before the Bloch-ball projection
    std_error: tuple      # 1/sqrt(m) bound per parameter, 0 in exact mode


def _setting_rng(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), _LABEL_KEY[label]])


def reconstruct(rho_unknown: Density, shots: int | Mapping[str, int] | None = None,
                rng: np.random.Generator | int | None = 0,
                order: tuple[str, ...] = LABELS, pure: bool = False) -> Reconstruction:
    """Estimate a qubit state from the three payoff settings.

    Parameters
    ----------
    rho_unknown : Density
        State being measured.
    shots : int, mapping or None
        Shots per setting; a mapping allows unequal allocation. ``None``
        uses exact probabilities.
    rng : Generator or int
        Randomness source. Each setting draws from its own stream, so the
        order of ``order`` does not change the result.
    order : tuple of str
        Order in which settings are measured.
    pure : bool
        Treat the input as known to be pure and rescale the estimate onto
        the Bloch sphere. By default it is only pulled back when it falls
        outside the ball.
    """
    if sorted(order) != sorted(LABELS):
        raise RangeError("order must be a permutation of S1, S2, S3")
    if not isinstance(rho_unknown, Density):
        rho_unknown = Density(rho_unknown)
    if isinstance(rng, np.random.Generator):
        base = int(rng.integers(2 ** 63))
    else:
        base = 0 if rng is None else int(rng)
    va = np.array(CODING.values("A"), float)
    est, err = {}, {}
    for label in order:
        pr = _probabilities(SETTINGS[label], rho_unknown)
        if shots is None:
            est[label], err[label] = float(pr @ va), 0.0
            continue
        m = shots[label] if isinstance(shots, Mapping) else shots
        if int(m) != m or m < 1:
            raise RangeError("shots per setting must be a positive integer")
        counts = _setting_rng(base, label).multinomial(int(m), pr)
        est[label] = float(counts @ va) / m
        err[label] = 1 / math.sqrt(m)
    raw = np.array([est[k] for k in LABELS])
    r = np.linalg.norm(raw)
    vec = raw / r if (r > 1 or (pure and r > 0)) else raw
    s = StokesVector(1.0, *(float(x) for x in vec))
    return Reconstruction(density_from_stokes(s), s, tuple(float(x) for x in raw),
                          tuple(err[k] for k in LABELS))


def fidelity(rho: Density, sigma: Density) -> float:
    """Uhlmann fidelity of two qubit states, ``Tr(rho sigma) + 2 sqrt(det rho det sigma)``."""
    a, b = rho.mat, sigma.mat
    det = max(np.linalg.det(a).real, 0.0) * max(np.linalg.det(b).real, 0.0)
    return float(min(np.trace(a @ b).real + 2 * math.sqrt(det), 1.0))
