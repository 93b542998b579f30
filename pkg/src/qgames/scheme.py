"""Two-qubit game scheme with entanglement and measurement angles.

The referee prepares ``cos(g/2)|00> + i sin(g/2)|11>`` and each player applies
a local unitary. Payoffs are read out in a basis whose entanglement is set by
``delta``. ``payoff_numeric`` is the brute-force density-matrix path used
as the oracle for every closed form in the package.

Strategy convention
-------------------
``strategy_unitary(theta, phi, psi)`` is::

    [[ e^{i phi} cos(theta/2),   e^{i psi} sin(theta/2)],
     [-e^{-i psi} sin(theta/2),  e^{-i phi} cos(theta/2)]]

At ``psi = 0`` this is the two-parameter set with ``C|0> = -|1>``. The
three-parameter family with ``i`` on the off-diagonal (the "i-form") is
the same set shifted by ``psi -> psi + pi/2``; see ``StrategyParams.from_iform``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Density,
    Ket,
    Operator,
    TwoQubitDensity,
    apply_unitary,
    expectation,
    tensor,
)
from .errors import ModeError, RangeError

PI = math.pi
_OUTCOMES = ("00", "01", "10", "11")
_SLACK = 1e-12


def _check_range(name: str, x: float, lo: float, hi: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x < lo - _SLACK or x > hi + _SLACK:
        raise RangeError(f"{name}={x!r} outside [{lo:.6g}, {hi:.6g}]")
    return x


def wrap_angle(x: float) -> float:
    """Map an angle into ``(-pi, pi]``."""
    y = math.remainder(float(x), 2 * PI)
    return PI if y <= -PI else y


@dataclass(frozen=True)
class SchemeConfig:
    """Entanglement of the initial state (``gamma``) and of the measurement (``delta``)."""

    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        _check_range("gamma", self.gamma, 0.0, PI)
        _check_range("delta", self.delta, 0.0, PI)

    @property
    def classical(self) -> bool:
        return self.gamma == 0.0 and self.delta == 0.0


@dataclass(frozen=True)
class StrategyParams:
    """Player strategy ``(theta, phi, psi)`` in the canonical convention.

    ``theta`` lies in ``[0, pi]``; ``phi`` and ``psi`` in ``[-pi, pi]``.
    """

    theta: float
    phi: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        _check_range("theta", self.theta, 0.0, PI)
        _check_range("phi", self.phi, -PI, PI)
        _check_range("psi", self.psi, -PI, PI)

    @property
    def two_parameter(self) -> bool:
        return self.psi == 0.0

    @classmethod
    def from_iform(cls, theta: float, phi: float, psi: float) -> "StrategyParams":
        """Build from the i-form triple, whose flip part is ``i e^{+-i psi} sin(theta/2)``."""
        return cls(theta, phi, wrap_angle(psi + PI / 2))

    def iform_psi(self) -> float:
        """Third angle of the same unitary written in the i-form."""
        return self.psi - PI / 2

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta, self.phi, self.psi)


@dataclass(frozen=True)
class PayoffMatrix:
    """Rewards ``$_mn`` for both players; ``m`` is Alice's outcome bit."""

    a00: float
    a01: float
    a10: float
    a11: float
    b00: float
    b01: float
    b10: float
    b11: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.values("A") + self.values("B")):
            raise RangeError("payoff entries must be finite")

    def values(self, player: str) -> tuple[float, float, float, float]:
        """Entries in outcome order ``00, 01, 10, 11``."""
        if player == "A":
            return (self.a00, self.a01, self.a10, self.a11)
        if player == "B":
            return (self.b00, self.b01, self.b10, self.b11)
        raise ValueError("player must be 'A' or 'B'")

    def entry(self, player: str, mn: str) -> float:
        return self.values(player)[_OUTCOMES.index(mn)]

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``2x2`` arrays indexed ``[m, n]`` for players A and B."""
        return (np.array(self.values("A"), float).reshape(2, 2),
                np.array(self.values("B"), float).reshape(2, 2))

    def bounds(self, player: str) -> tuple[float, float]:
        v = self.values(player)
        return min(v), max(v)


@dataclass(frozen=True)
class PayoffPair:
    a: float
    b: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.a, self.b)


def initial_ket(gamma: float) -> np.ndarray:
    return np.array([math.cos(gamma / 2), 0, 0, 1j * math.sin(gamma / 2)], dtype=complex)


def initial_state(cfg: SchemeConfig) -> Ket:
    """``cos(gamma/2)|00> + i sin(gamma/2)|11>``."""
    return Ket(initial_ket(cfg.gamma))


def initial_density(cfg: SchemeConfig) -> TwoQubitDensity:
    v = initial_ket(cfg.gamma)
    return TwoQubitDensity(np.outer(v, v.conj()))


def unitary_matrix(theta, phi, psi) -> np.ndarray:
    """Canonical strategy matrix; broadcasts over array arguments (trailing ``2x2``)."""
    theta, phi, psi = np.broadcast_arrays(*(np.asarray(x, float) for x in (theta, phi, psi)))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u = np.empty(theta.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(1j * phi) * c
    u[..., 0, 1] = np.exp(1j * psi) * s
    u[..., 1, 0] = -np.exp(-1j * psi) * s
    u[..., 1, 1] = np.exp(-1j * phi) * c
    return u


def strategy_unitary(s: StrategyParams) -> Operator:
    """Unitary of a player's strategy in the canonical convention."""
    if not isinstance(s, StrategyParams):
        s = StrategyParams(*s)
    return Operator(unitary_matrix(s.theta, s.phi, s.psi), unitary=True)


def marinatto_flip() -> Operator:
    """Flip without a sign, ``C|0> = |1>``, ``C|1> = |0>``."""
    return Operator([[0, 1], [1, 0]], unitary=True, hermitian=True)


def measurement_kets(delta: float) -> dict[str, np.ndarray]:
    """Measurement kets keyed by outcome ``mn``."""
    _check_range("delta", delta, 0.0, PI)
    cd, sd = math.cos(delta / 2), math.sin(delta / 2)
    return {
        "00": np.array([cd, 0, 0, 1j * sd], dtype=complex),
        "01": np.array([0, cd, -1j * sd, 0], dtype=complex),
        "10": np.array([0, -1j * sd, cd, 0], dtype=complex),
        "11": np.array([1j * sd, 0, 0, cd], dtype=complex),
    }


def measurement_projectors(delta: float) -> dict[str, Operator]:
    """Rank-one projectors ``P_mn``; they sum to the identity for every ``delta``."""
    return {k: Operator(np.outer(v, v.conj()), hermitian=True)
            for k, v in measurement_kets(delta).items()}


def payoff_operator(pm: PayoffMatrix, delta: float, player: str) -> Operator:
    """``sum_mn $_mn P_mn`` for the given player."""
    projs = measurement_projectors(delta)
    vals = pm.values(player)
    return Operator(sum(v * projs[k].mat for k, v in zip(_OUTCOMES, vals)), hermitian=True)


def final_density(cfg: SchemeConfig, sA: StrategyParams, sB: StrategyParams) -> TwoQubitDensity:
    u = tensor(strategy_unitary(sA), strategy_unitary(sB))
    return apply_unitary(u, initial_density(cfg))


def payoffs_from_density(rho: Density, pm: PayoffMatrix, delta: float) -> PayoffPair:
    """Trace the payoff operators of both players against ``rho``."""
    return PayoffPair(expectation(payoff_operator(pm, delta, "A"), rho),
                      expectation(payoff_operator(pm, delta, "B"), rho))


def payoff_numeric(cfg: SchemeConfig, sA: StrategyParams, sB: StrategyParams,
                   pm: PayoffMatrix) -> PayoffPair:
    """Oracle payoffs from explicit density evolution."""
    return payoffs_from_density(final_density(cfg, sA, sB), pm, cfg.delta)


def outcome_probabilities(cfg: SchemeConfig, UA: np.ndarray, UB: np.ndarray) -> np.ndarray:
    """Outcome probabilities for stacks of player unitaries.

    Parameters
    ----------
    UA, UB : ndarray, shape (nA, 2, 2) and (nB, 2, 2)

    Returns
    -------
    ndarray, shape (nA, nB, 4)
        Probabilities in outcome order ``00, 01, 10, 11``.
    """
    g = cfg.gamma
    m0 = np.array([[math.cos(g / 2), 0], [0, 1j * math.sin(g / 2)]])
    # (UA x UB) vec(M) = vec(UA M UB^T)
    amp = np.einsum("aij,jk,blk->abil", UA, m0, UB).reshape(len(UA), len(UB), 4)
    kets = measurement_kets(cfg.delta)
    proj = np.stack([kets[k].conj() for k in _OUTCOMES])
    return np.abs(amp @ proj.T) ** 2


def payoff_table(cfg: SchemeConfig, stratsA: Sequence[StrategyParams],
                 stratsB: Sequence[StrategyParams], pm: PayoffMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Payoff arrays ``(A[i, j], B[i, j])`` over all strategy pairs, batched."""
    ua = unitary_matrix(*np.array([s.as_tuple() for s in stratsA]).T)
    ub = unitary_matrix(*np.array([s.as_tuple() for s in stratsB]).T)
    probs = outcome_probabilities(cfg, ua, ub)
    return probs @ np.array(pm.values("A")), probs @ np.array(pm.values("B"))


def payoff_closed_form_2p(cfg: SchemeConfig, sA: StrategyParams, sB: StrategyParams,
                          alpha: float, beta: float, sigma: float) -> PayoffPair:
    """Two-parameter closed form for the Battle-of-Sexes payoff operators.

    Raises
    ------
    ModeError
        If either strategy carries a nonzero third angle.
    """
    if not (sA.two_parameter and sB.two_parameter):
        raise ModeError("two-parameter closed form needs psi = 0 for both players")
    g, d = cfg.gamma, cfg.delta
    cg2, sg2 = math.cos(g / 2) ** 2, math.sin(g / 2) ** 2
    cd2, sd2 = math.cos(d / 2) ** 2, math.sin(d / 2) ** 2
    c1, s1 = math.cos(sA.theta / 2) ** 2, math.sin(sA.theta / 2) ** 2
    c2, s2 = math.cos(sB.theta / 2) ** 2, math.sin(sB.theta / 2) ** 2
    ss = math.sin(sA.theta) * math.sin(sB.theta)
    f = sA.phi + sB.phi
    sg = math.sin(g)
    xi = alpha * cd2 + beta * sd2
    eta = alpha * sd2 + beta * cd2
    chi = (alpha - beta) / 2 * math.sin(d)
    k = alpha + beta - 2 * sigma
    pa = (c1 * c2 * (eta * sg2 + xi * cg2 + chi * math.cos(2 * f) * sg - sigma)
          + s1 * s2 * (eta * cg2 + xi * sg2 - chi * sg - sigma)
          + (k * sg - 2 * chi) / 4 * ss * math.sin(f) + sigma)
    pb = (c1 * c2 * (xi * sg2 + eta * cg2 - chi * math.cos(2 * f) * sg - sigma)
          + s1 * s2 * (xi * cg2 + eta * sg2 + chi * sg - sigma)
          + (k * sg + 2 * chi) / 4 * ss * math.sin(f) + sigma)
    return PayoffPair(pa, pb)


def _general_closed_form(gamma: float, delta: float, sA: StrategyParams, sB: StrategyParams,
                         m: Sequence[float], mu1: float = 1.0, mu2: float = 1.0) -> float:
    # i-form angles; mu1, mu2 are the dephasing factors of the two legs
    m00, m01, m10, m11 = m
    t1, f1, q1 = sA.theta, sA.phi, sA.iform_psi()
    t2, f2, q2 = sB.theta, sB.phi, sB.iform_psi()
    cg2, sg2 = math.cos(gamma / 2) ** 2, math.sin(gamma / 2) ** 2
    cd2, sd2 = math.cos(delta / 2) ** 2, math.sin(delta / 2) ** 2
    eta = cd2 * cg2 + sd2 * sg2
    chi = cd2 * sg2 + sd2 * cg2
    xi = 0.5 * math.sin(delta) * math.sin(gamma)
    u = mu1 * mu2 * xi
    c1, s1 = math.cos(t1 / 2) ** 2, math.sin(t1 / 2) ** 2
    c2, s2 = math.cos(t2 / 2) ** 2, math.sin(t2 / 2) ** 2
    ss = math.sin(t1) * math.sin(t2)
    return (c1 * c2 * (eta * m00 + chi * m11 + (m00 - m11) * u * math.cos(2 * (f1 + f2)))
            + s1 * s2 * (eta * m11 + chi * m00 - (m00 - m11) * u * math.cos(2 * (q1 + q2)))
            + c1 * s2 * (eta * m01 + chi * m10 - (m01 - m10) * u * math.cos(2 * (f1 - q2)))
            + s1 * c2 * (eta * m10 + chi * m01 + (m01 - m10) * u * math.cos(2 * (f2 - q1)))
            + mu2 * (m00 - m11) / 4 * ss * math.sin(delta) * math.sin(f1 + f2 + q1 + q2)
            + mu2 * (m01 - m10) / 4 * ss * math.sin(delta) * math.sin(f1 - f2 + q1 - q2)
            + mu1 * (m01 + m10 - m00 - m11) / 4 * ss * math.sin(gamma) * math.sin(f1 + f2 - q1 - q2))


def payoff_closed_form_3p(cfg: SchemeConfig, sA: StrategyParams, sB: StrategyParams,
                          pm: PayoffMatrix) -> PayoffPair:
    """Three-parameter closed form valid for any payoff matrix."""
    return PayoffPair(_general_closed_form(cfg.gamma, cfg.delta, sA, sB, pm.values("A")),
                      _general_closed_form(cfg.gamma, cfg.delta, sA, sB, pm.values("B")))


def marinatto_reduction(gamma: float, thetaA: float, thetaB: float,
                        alpha: float, beta: float, sigma: float) -> PayoffPair:
    """Payoffs at ``delta = 0``, ``phi = 0`` in Marinatto-Weber form.

    With ``p = cos^2(thetaA/2)`` and ``q = cos^2(thetaB/2)`` the identity
    weights, ``|a|^2 = cos^2(gamma/2)`` and ``|b|^2 = sin^2(gamma/2)``.
    """
    c1, c2 = math.cos(thetaA / 2) ** 2, math.cos(thetaB / 2) ** 2
    a2, b2 = math.cos(gamma / 2) ** 2, math.sin(gamma / 2) ** 2
    k = alpha + beta - 2 * sigma
    pa = (c1 * (c2 * k - alpha * b2 - beta * a2 + sigma)
          + c2 * (-alpha * b2 - beta * a2 + sigma) + alpha * b2 + beta * a2)
    pb = (c2 * (c1 * k - beta * b2 - alpha * a2 + sigma)
          + c1 * (-beta * b2 - alpha * a2 + sigma) + beta * b2 + alpha * a2)
    return PayoffPair(pa, pb)


def maximal_reduction(thetaA: float, phiA: float, thetaB: float, phiB: float,
                      alpha: float, beta: float, sigma: float) -> PayoffPair:
    """Payoffs at ``gamma = delta = pi/2`` for two-parameter strategies."""
    f = phiA + phiB
    c12 = math.cos(thetaA / 2) * math.cos(thetaB / 2)
    s12 = math.sin(thetaA / 2) * math.sin(thetaB / 2)
    first = c12 ** 2 * math.cos(f) ** 2
    second = (c12 * math.sin(f) + s12) ** 2
    return PayoffPair((alpha - sigma) * first + (beta - sigma) * second + sigma,
                      (beta - sigma) * first + (alpha - sigma) * second + sigma)


def penny_flip_quantum(alice_flip_prob: float) -> float:
    """Probability that the Hadamard player wins the penny flip game.

    The coin starts in ``|0>`` and the quantum player applies ``H`` before and
    after the classical player's probabilistic flip. The quantum player wins on
    outcome ``|0>``.
    """
    p = _check_range("alice_flip_prob", alice_flip_prob, 0.0, 1.0)
    # unnormalized Hadamard keeps the arithmetic dyadic and therefore exact
    h = np.array([[1.0, 1.0], [1.0, -1.0]])
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    rho = h @ np.diag([1.0, 0.0]) @ h / 2
    rho = (1 - p) * rho + p * (x @ rho @ x)
    rho = h @ rho @ h / 2
    return float(rho[0, 0].real)
