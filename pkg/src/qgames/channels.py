"""Noise channels and noisy-game payoffs.

Single-qubit Kraus channels come with their Bloch-ball maps. The two-qubit
dephasing channel with memory is applied once before the players act and once
after.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    BlochVector,
    KrausSet,
    apply_kraus,
    apply_unitary,
    bloch_from_density,
    density_from_bloch,
    tensor,
)
from .errors import RangeError
from .scheme import (
    PI,
    PayoffMatrix,
    PayoffPair,
    SchemeConfig,
    StrategyParams,
    _general_closed_form,
    initial_density,
    payoffs_from_density,
    strategy_unitary,
)

KINDS = ("depolarizing", "phase_damping", "amplitude_damping")


def _unit(name: str, x: float) -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise RangeError(f"{name}={x} outside [0, 1]")
    return x


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    p: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RangeError(f"channel kind must be one of {KINDS}")
        _unit("p", self.p)


def kraus_set(c: ChannelSpec) -> KrausSet:
    """Kraus operators of a single-qubit channel."""
    p = c.p
    if c.kind == "depolarizing":
        w = math.sqrt(p / 3)
        return KrausSet((math.sqrt(1 - p) * np.eye(2),
                         w * np.array([[0, 1], [1, 0]]),
                         w * np.array([[0, -1j], [1j, 0]]),
                         w * np.diag([1, -1])))
    if c.kind == "phase_damping":
        return KrausSet((math.sqrt(1 - p / 2) * np.eye(2),
                         math.sqrt(p / 2) * np.diag([1, -1])))
    return KrausSet((np.array([[1, 0], [0, math.sqrt(1 - p)]]),
                     np.array([[0, math.sqrt(p)], [0, 0]])))


def depolarizing_shrink(p):
    """Uniform Bloch contraction ``1 - 4p/3``; exact for ``Fraction`` input."""
    return (3 - 4 * p) / 3


def bloch_transform(c: ChannelSpec, v: BlochVector) -> BlochVector:
    """Closed-form action of the channel on the Bloch vector."""
    p = c.p
    x, y, z = v.rx, v.ry, v.rz
    if c.kind == "depolarizing":
        f = depolarizing_shrink(p)
        return BlochVector(f * x, f * y, f * z)
    if c.kind == "phase_damping":
        return BlochVector((1 - p) * x, (1 - p) * y, z)
    r = math.sqrt(1 - p)
    return BlochVector(r * x, r * y, p + (1 - p) * z)


def bloch_transform_kraus(c: ChannelSpec, v: BlochVector) -> BlochVector:
    """Same map computed through the Kraus operators."""
    return bloch_from_density(apply_kraus(kraus_set(c), density_from_bloch(v)))


@dataclass(frozen=True)
class CorrelatedDephasing:
    """Two-qubit dephasing of strength ``p`` with memory ``mu``."""

    p: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        _unit("p", self.p)
        _unit("mu", self.mu)

    @property
    def coherence_factor(self) -> float:
        """Factor ``(1 - mu)(1 - p)^2 + mu`` on the ``00 <-> 11`` and ``01 <-> 10`` coherences."""
        return (1 - self.mu) * (1 - self.p) ** 2 + self.mu


def correlated_kraus(cd: CorrelatedDephasing) -> KrausSet:
    """Merged Kraus set ``sqrt(w_i[(1 - mu) w_j + mu delta_ij]) B_i x B_j``.

    Weights are ``w = (1 - p/2, p/2)`` and ``B = (I, sigma_z)``.
    """
    w = (1 - cd.p / 2, cd.p / 2)
    base = (np.eye(2), np.diag([1.0, -1.0]))
    ops = []
    for i in range(2):
        for j in range(2):
            weight = w[i] * ((1 - cd.mu) * w[j] + cd.mu * (i == j))
            ops.append(math.sqrt(weight) * np.kron(base[i], base[j]))
    return KrausSet(tuple(ops))


@dataclass(frozen=True)
class NoiseConfig:
    """Channel before the players act (``leg1``) and after (``leg2``)."""

    leg1: CorrelatedDephasing = CorrelatedDephasing()
    leg2: CorrelatedDephasing = CorrelatedDephasing()

    @classmethod
    def symmetric(cls, p: float, mu: float) -> "NoiseConfig":
        return cls(CorrelatedDephasing(p, mu), CorrelatedDephasing(p, mu))

    def mu_p(self, leg: int) -> float:
        """Coherence factor of leg ``1`` or ``2``."""
        if leg not in (1, 2):
            raise RangeError("leg must be 1 or 2")
        return (self.leg1 if leg == 1 else self.leg2).coherence_factor


def noisy_payoff_numeric(cfg: SchemeConfig, sA: StrategyParams, sB: StrategyParams,
                         pm: PayoffMatrix, nc: NoiseConfig) -> PayoffPair:
    """Oracle path that dephases the full density before and after the players act."""
    rho = apply_kraus(correlated_kraus(nc.leg1), initial_density(cfg))
    rho = apply_unitary(tensor(strategy_unitary(sA), strategy_unitary(sB)), rho)
    rho = apply_kraus(correlated_kraus(nc.leg2), rho)
    return payoffs_from_density(rho, pm, cfg.delta)


def noisy_payoff_closed_form(cfg: SchemeConfig, sA: StrategyParams, sB: StrategyParams,
                             pm: PayoffMatrix, nc: NoiseConfig) -> PayoffPair:
    """Closed-form noisy payoffs; reduces to the noiseless three-parameter form at ``p = 0``."""
    u1, u2 = nc.mu_p(1), nc.mu_p(2)
    return PayoffPair(
        _general_closed_form(cfg.gamma, cfg.delta, sA, sB, pm.values("A"), u1, u2),
        _general_closed_form(cfg.gamma, cfg.delta, sA, sB, pm.values("B"), u1, u2))


# ---------------------------------------------------------------- scenario helpers
# Alice is classical (phi = psi = 0 in the i-form); Bob's angles are i-form.


def classical_alice(theta: float) -> StrategyParams:
    return StrategyParams.from_iform(theta, 0.0, 0.0)


def quantum_bob(theta: float, phi: float, psi: float) -> StrategyParams:
    return StrategyParams.from_iform(theta, phi, psi)


def case_ii_pd_payoff(gamma: float, mu_p1: float) -> float:
    """Both players' payoff at the quantum-player optimum with ``delta = 0``."""
    return 9 / 4 + mu_p1 / 4 * math.sin(gamma)


def case_ii_bos_payoff(gamma: float, mu_p1: float) -> float:
    return 3 / 4 + 3 / 4 * mu_p1 * math.sin(gamma)


def case_ii_pd_strategies(phi2: float = PI / 2) -> tuple[StrategyParams, StrategyParams]:
    """Alice ``(pi/2, 0, 0)``, Bob ``(pi/2, phi2, phi2 - pi/2)`` in the i-form."""
    return classical_alice(PI / 2), quantum_bob(PI / 2, phi2, phi2 - PI / 2)


def case_ii_bos_strategies(phi2: float = 0.0) -> tuple[StrategyParams, StrategyParams]:
    """Alice ``(pi/2, 0, 0)``, Bob ``(pi/2, phi2, phi2 + pi/2)`` in the i-form."""
    return classical_alice(PI / 2), quantum_bob(PI / 2, phi2, phi2 + PI / 2)


def case_iv_pd_strategies(theta1: float) -> tuple[StrategyParams, StrategyParams]:
    """Classical Alice ``theta1`` against Bob ``(pi/2, pi/2, 0)`` in the i-form."""
    return classical_alice(theta1), quantum_bob(PI / 2, PI / 2, 0.0)


def case_iv_noise(p: float, mu: float = 0.5) -> NoiseConfig:
    """Binding used for the single-subscript ``mu_p = (1 + (1 - p)^2)/2``: both legs ``(p, mu)``."""
    return NoiseConfig.symmetric(p, mu)


def memory_gap(cfg: SchemeConfig, sA: StrategyParams, sB: StrategyParams, pm: PayoffMatrix,
               p: float, mus: Sequence[float]) -> np.ndarray:
    """``|payoff(p, mu) - payoff(0)|`` for Alice and Bob over a list of memories."""
    base = noisy_payoff_closed_form(cfg, sA, sB, pm, NoiseConfig()).as_tuple()
    out = []
    for mu in mus:
        v = noisy_payoff_closed_form(cfg, sA, sB, pm, NoiseConfig.symmetric(p, mu)).as_tuple()
        out.append([abs(v[0] - base[0]), abs(v[1] - base[1])])
    return np.array(out)
