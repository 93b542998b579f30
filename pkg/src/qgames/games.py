"""Canonical games with grid Nash search, plus the named equilibrium results.

The Battle of Sexes is treated in the Marinatto-Weber setting and for a
general initial state. The Prisoners' Dilemma helpers cover the measurement
categories and the miracle move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import TAU_NORM, Operator, TwoQubitDensity, apply_unitary, expectation, tensor
from .errors import InvariantError, RangeError
from .scheme import (
    PI,
    PayoffMatrix,
    PayoffPair,
    SchemeConfig,
    StrategyParams,
    _general_closed_form,
    marinatto_flip,
    payoff_table,
)

# ---------------------------------------------------------------- fixtures


def prisoners_dilemma() -> PayoffMatrix:
    """Standard Prisoners' Dilemma; outcome ``0`` is cooperation."""
    return PayoffMatrix(3, 0, 5, 1, 3, 5, 0, 1)


def general_prisoners_dilemma(r: float, s: float, t: float, u: float) -> PayoffMatrix:
    """Prisoners' Dilemma with reward ``r``, sucker ``s``, temptation ``t``, punishment ``u``."""
    if not (t > r > u > s):
        raise InvariantError("general Prisoners' Dilemma needs t > r > u > s")
    return PayoffMatrix(r, s, t, u, r, t, s, u)


def chicken() -> PayoffMatrix:
    """Chicken; pure equilibria sit on the off-diagonal cells."""
    return PayoffMatrix(3, 1, 4, 0, 3, 4, 1, 0)


def battle_of_sexes(alpha: float = 2.0, beta: float = 1.0, sigma: float = 0.0) -> PayoffMatrix:
    if not (alpha > beta > sigma):
        raise InvariantError("Battle of Sexes needs alpha > beta > sigma")
    return PayoffMatrix(alpha, sigma, sigma, beta, beta, sigma, sigma, alpha)


def matching_pennies() -> PayoffMatrix:
    return PayoffMatrix(1, -1, -1, 1, -1, 1, 1, -1)


def rock_scissors_paper() -> tuple[np.ndarray, np.ndarray]:
    """Classical 3x3 fixture (rock, scissors, paper); not used in the quantum pipeline."""
    a = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], dtype=float)
    return a, -a


@dataclass(frozen=True)
class CanonicalGame:
    kind: str
    matrix: PayoffMatrix


def canonical_game(kind: str, **params) -> CanonicalGame:
    """Look up a 2x2 canonical game by name."""
    makers: dict[str, Callable[..., PayoffMatrix]] = {
        "pd": prisoners_dilemma,
        "general_pd": general_prisoners_dilemma,
        "chicken": chicken,
        "bos": battle_of_sexes,
        "pennies": matching_pennies,
    }
    if kind not in makers:
        raise RangeError(f"unknown game {kind!r}; choose from {sorted(makers)}")
    return CanonicalGame(kind, makers[kind](**params))


def classical_expectation(a: np.ndarray, p: Sequence[float], q: Sequence[float]) -> float:
    """Expected reward ``p^T A q`` for mixed strategies over any finite matrix."""
    a = np.asarray(a, dtype=float)
    p, q = np.asarray(p, float), np.asarray(q, float)
    for v in (p, q):
        if np.any(v < 0) or abs(v.sum() - 1) > TAU_NORM:
            raise RangeError("mixed strategy must be a probability vector")
    return float(p @ a @ q)


# ---------------------------------------------------------------- Nash search


@dataclass(frozen=True)
class NashPoint:
    sA: object
    sB: object
    payoffs: PayoffPair
    epsilon: float


def strategy_grid(theta_steps: int = 25, phi_steps: int = 1, psi_steps: int = 1,
                  phi_range: tuple[float, float] = (0.0, PI / 2),
                  psi_range: tuple[float, float] = (-PI, PI)) -> list[StrategyParams]:
    """Lexicographic grid over ``(theta, phi, psi)``.

    A step count of one pins the angle at zero.
    """
    def axis(n, lo, hi):
        if n < 1:
            raise RangeError("step counts must be >= 1")
        return np.array([0.0]) if n == 1 else np.linspace(lo, hi, n)

    if theta_steps < 2:
        raise RangeError("theta grid needs at least two points")
    return [StrategyParams(float(t), float(f), float(s))
            for t in axis(theta_steps, 0.0, PI)
            for f in axis(phi_steps, *phi_range)
            for s in axis(psi_steps, *psi_range)]


def nash_from_tables(A: np.ndarray, B: np.ndarray, eps: float = 1e-6) -> list[tuple[int, int]]:
    """Index pairs where neither player gains more than ``eps`` by deviating."""
    if eps <= 0:
        raise RangeError("eps must be positive")
    A, B = np.asarray(A, float), np.asarray(B, float)
    ok = (A >= A.max(axis=0, keepdims=True) - eps) & (B >= B.max(axis=1, keepdims=True) - eps)
    return [tuple(int(x) for x in ij) for ij in np.argwhere(ok)]


def nash_search_grid(payoff_fn: Callable[[object, object], PayoffPair],
                     gridA: Sequence, gridB: Sequence | None = None,
                     eps: float = 1e-6) -> list[NashPoint]:
    """All epsilon-Nash points of a finite strategy grid.

    Parameters
    ----------
    payoff_fn : callable
        Pure function ``(sA, sB) -> PayoffPair``.
    gridA, gridB : sequence
        Strategy grids, at least two points each. ``gridB`` defaults to ``gridA``.
    eps : float
        Deviation tolerance.

    Returns
    -------
    list of NashPoint
        Ordered as the grids are ordered; ties are all reported. An empty
        list means there is no pure equilibrium on the grid.
    """
    gridB = gridA if gridB is None else gridB
    if len(gridA) < 2 or len(gridB) < 2:
        raise RangeError("each grid needs at least two points")
    A = np.empty((len(gridA), len(gridB)))
    B = np.empty_like(A)
    for i, sa in enumerate(gridA):
        for j, sb in enumerate(gridB):
            A[i, j], B[i, j] = payoff_fn(sa, sb).as_tuple()
    return _points(gridA, gridB, A, B, eps)


def nash_search_scheme(cfg: SchemeConfig, pm: PayoffMatrix, gridA: Sequence[StrategyParams],
                       gridB: Sequence[StrategyParams] | None = None,
                       eps: float = 1e-6) -> list[NashPoint]:
    """Batched variant of ``nash_search_grid`` for scheme payoffs."""
    gridB = gridA if gridB is None else gridB
    if len(gridA) < 2 or len(gridB) < 2:
        raise RangeError("each grid needs at least two points")
    A, B = payoff_table(cfg, gridA, gridB, pm)
    return _points(gridA, gridB, A, B, eps)


def _points(gridA, gridB, A, B, eps) -> list[NashPoint]:
    return [NashPoint(gridA[i], gridB[j], PayoffPair(float(A[i, j]), float(B[i, j])), eps)
            for i, j in nash_from_tables(A, B, eps)]


# ---------------------------------------------------------------- Marinatto-Weber


@dataclass(frozen=True)
class GeneralInitialState:
    """``a|00> + b|01> + c|10> + d|11>``; only the moduli enter the payoffs."""

    a: complex
    b: complex = 0.0
    c: complex = 0.0
    d: complex = 0.0

    def __post_init__(self):
        n = sum(abs(complex(x)) ** 2 for x in self.amplitudes())
        if abs(n - 1) > TAU_NORM:
            raise RangeError(f"state norm^2 {n:.6g} differs from 1")

    def amplitudes(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.a), complex(self.b), complex(self.c), complex(self.d))

    def moduli(self) -> tuple[float, float, float, float]:
        return tuple(abs(x) ** 2 for x in self.amplitudes())

    @classmethod
    def from_moduli(cls, a2, b2, c2, d2) -> "GeneralInitialState":
        return cls(*(math.sqrt(x) for x in (a2, b2, c2, d2)))


PARA_STATE_MODULI = (Fraction(5, 16), Fraction(5, 16), Fraction(1, 16), Fraction(5, 16))


def para_state() -> GeneralInitialState:
    """State with moduli ``(5, 5, 1, 5)/16`` used for the dilemma resolution."""
    return GeneralInitialState.from_moduli(*(float(x) for x in PARA_STATE_MODULI))


@dataclass(frozen=True)
class TacticPair:
    """Probabilities of applying the identity, ``p`` for Alice and ``q`` for Bob."""

    p: float
    q: float

    def __post_init__(self):
        for name, v in (("p", self.p), ("q", self.q)):
            if not 0.0 <= v <= 1.0:
                raise RangeError(f"{name}={v} outside [0, 1]")


def marinatto_bos_payoffs(state: GeneralInitialState, t: TacticPair,
                          alpha: float, beta: float, sigma: float) -> PayoffPair:
    """Battle-of-Sexes payoffs for ``a|00> + b|11>`` under identity/flip tactics."""
    m = state.moduli()
    if m[1] > TAU_NORM or m[2] > TAU_NORM:
        raise RangeError("Marinatto-Weber state has zero |01> and |10> amplitudes")
    # |b|^2 here is the weight of |11>
    a2, b2 = m[0], m[3]
    p, q = t.p, t.q
    k = alpha + beta - 2 * sigma
    pa = p * (q * k - alpha * b2 - beta * a2 + sigma) + q * (-alpha * b2 - beta * a2 + sigma) \
        + alpha * b2 + beta * a2
    pb = q * (p * k - beta * b2 - alpha * a2 + sigma) + p * (-beta * b2 - alpha * a2 + sigma) \
        + beta * b2 + alpha * a2
    return PayoffPair(pa, pb)


def marinatto_mixed_nash(a2: float, alpha: float, beta: float, sigma: float) -> tuple[TacticPair, float]:
    """Mixed equilibrium ``(p*, q*)`` and its common payoff for ``|a|^2 = a2``."""
    b2 = 1 - a2
    k = alpha + beta - 2 * sigma
    p = ((beta - sigma) * b2 + (alpha - sigma) * a2) / k
    q = ((alpha - sigma) * b2 + (beta - sigma) * a2) / k
    pay = (alpha * beta + (alpha - beta) ** 2 * a2 * b2 - sigma ** 2) / k
    return TacticPair(p, q), pay


def _bos_operator(alpha, beta, sigma, player) -> Operator:
    if player == "A":
        return Operator(np.diag([alpha, sigma, sigma, beta]).astype(complex), hermitian=True)
    return Operator(np.diag([beta, sigma, sigma, alpha]).astype(complex), hermitian=True)


def bos_payoffs_numeric(state: GeneralInitialState, t: TacticPair,
                        alpha: float, beta: float, sigma: float) -> PayoffPair:
    """Oracle: mix the four identity/flip branches and trace the payoff operators."""
    v = np.array(state.amplitudes())
    rho = TwoQubitDensity(np.outer(v, v.conj()))
    eye = Operator(np.eye(2), unitary=True)
    flip = marinatto_flip()
    out = np.zeros((4, 4), dtype=complex)
    for oa, wa in ((eye, t.p), (flip, 1 - t.p)):
        for ob, wb in ((eye, t.q), (flip, 1 - t.q)):
            out += wa * wb * apply_unitary(tensor(oa, ob), rho).mat
    fin = TwoQubitDensity(out)
    return PayoffPair(expectation(_bos_operator(alpha, beta, sigma, "A"), fin),
                      expectation(_bos_operator(alpha, beta, sigma, "B"), fin))


def bos_general_payoffs(state: GeneralInitialState, t: TacticPair,
                        alpha: float, beta: float, sigma: float) -> PayoffPair:
    """Closed-form payoffs for a general initial state.

    Uses ``Omega = (alpha+beta-2 sigma)(|a|^2-|b|^2-|c|^2+|d|^2)``,
    ``Phi = alpha - sigma`` and ``Lambda = beta - sigma``.
    """
    a2, b2, c2, d2 = state.moduli()
    p, q = t.p, t.q
    om = (alpha + beta - 2 * sigma) * (a2 - b2 - c2 + d2)
    ph, la = alpha - sigma, beta - sigma
    th_a = alpha * d2 + sigma * (b2 + c2) + beta * a2
    th_b = alpha * a2 + beta * d2 + sigma * (b2 + c2)
    pa = p * (q * om + ph * (b2 - d2) + la * (c2 - a2)) + q * (la * (b2 - a2) + ph * (c2 - d2)) + th_a
    pb = q * (p * om + ph * (b2 - a2) + la * (c2 - d2)) + p * (la * (b2 - d2) + ph * (c2 - a2)) + th_b
    return PayoffPair(pa, pb)


_CORNERS = ((0, 0), (1, 1), (0, 1), (1, 0))


@dataclass(frozen=True)
class CornerReport:
    """Sign conditions at one corner; ``strict`` uses the strict forms, ``weak`` allows equality."""

    candidate: tuple[int, int]
    values: tuple[float, float]
    strict: bool
    weak: bool


def _corner_terms(m, alpha, beta, sigma):
    a, b, c, d = m
    al, be = alpha - sigma, beta - sigma
    x1 = -be * a + al * b + be * c - al * d
    x2 = -al * a + al * b + be * c - be * d
    y1 = al * a - be * b - al * c + be * d
    y2 = be * a - be * b - al * c + al * d
    return x1, x2, y1, y2


def bos_nash_report(state, candidate: tuple[int, int], alpha, beta, sigma) -> CornerReport:
    """Evaluate the corner inequality pair with strict and weak satisfaction reported separately.

    ``state`` may be a ``GeneralInitialState`` or a 4-tuple of moduli
    (``Fraction`` values give exact arithmetic).
    """
    cand = tuple(int(x) for x in candidate)
    if cand not in _CORNERS or tuple(candidate) != cand:
        raise RangeError(f"candidate {candidate!r} is not a corner of the unit square")
    m = state.moduli() if isinstance(state, GeneralInitialState) else tuple(state)
    x1, x2, y1, y2 = _corner_terms(m, alpha, beta, sigma)
    # each corner: the pair of quantities and the required sign (-1 negative, +1 positive)
    need = {
        (0, 0): ((x1, -1), (x2, -1)),
        (1, 1): ((y1, +1), (y2, +1)),
        (0, 1): ((y1, -1), (x2, +1)),
        (1, 0): ((x1, +1), (y2, -1)),
    }[cand]
    strict = all(v * sgn > 0 for v, sgn in need)
    weak = all(v * sgn >= 0 for v, sgn in need)
    return CornerReport(cand, (need[0][0], need[1][0]), strict, weak)


def bos_nash_conditions(state, candidate: tuple[int, int], alpha, beta, sigma,
                        strict: bool = False) -> bool:
    """Whether a corner ``(p, q)`` satisfies its equilibrium sign conditions.

    The ``(1, 1)`` corner is stated with non-strict inequalities; the others
    with strict ones. ``strict=True`` demands strict inequality everywhere.
    """
    r = bos_nash_report(state, candidate, alpha, beta, sigma)
    if strict:
        return r.strict
    if r.candidate == (1, 1):
        return r.weak
    return r.strict


def bos_effective_matrix(alpha, beta, sigma, state=None) -> PayoffMatrix:
    """Worst-case effective matrix for the ``(5, 5, 1, 5)/16`` state.

    Strategy index ``0`` is ``p = 0`` (flip) and ``1`` is ``p = 1`` (identity).
    Arguments given as ``Fraction`` stay exact.

    Raises
    ------
    InvariantError
        If the derived entries fail ``alpha' > beta' > sigma'``.
    """
    m = PARA_STATE_MODULI if state is None else (
        state.moduli() if isinstance(state, GeneralInitialState) else tuple(state))
    if any(abs(float(x) - float(y)) > TAU_NORM for x, y in zip(m, PARA_STATE_MODULI)):
        raise RangeError("effective matrix is defined for the (5, 5, 1, 5)/16 state")
    a1 = (5 * alpha + 5 * beta + 6 * sigma) / 16
    b1 = (5 * alpha + beta + 10 * sigma) / 16
    s1 = (alpha + 5 * beta + 10 * sigma) / 16
    if not (a1 > b1 > s1):
        raise InvariantError(f"ordering alpha'>beta'>sigma' fails: {a1}, {b1}, {s1}")
    return PayoffMatrix(a1, s1, b1, a1, a1, b1, s1, a1)


# ---------------------------------------------------------------- measurement categories

CATEGORIES = ("PP", "PE", "EP", "EE")


def _pd_values():
    pd = prisoners_dilemma()
    return pd.values("A"), pd.values("B")


def measurement_category_payoffs(category: str, sA: StrategyParams, sB: StrategyParams,
                                 gamma: float = PI / 2, delta: float = PI / 2) -> PayoffPair:
    """Prisoners' Dilemma payoffs for product/entangled input (first letter) and measurement (second).

    ``PP`` ignores both angles, ``PE`` uses ``delta`` with ``gamma = 0``,
    ``EP`` uses ``gamma`` with ``delta = 0``, ``EE`` uses ``gamma = delta = pi/2``.
    """
    if category not in CATEGORIES:
        raise RangeError(f"category must be one of {CATEGORIES}")
    if category == "PP":
        c1, s1 = math.cos(sA.theta / 2) ** 2, math.sin(sA.theta / 2) ** 2
        c2, s2 = math.cos(sB.theta / 2) ** 2, math.sin(sB.theta / 2) ** 2
        return PayoffPair(3 * c1 * c2 + s1 * s2 + 5 * s1 * c2, 3 * c1 * c2 + s1 * s2 + 5 * c1 * s2)
    if category == "EE":
        return _see(sA, sB)
    g, d = (0.0, delta) if category == "PE" else (gamma, 0.0)
    va, vb = _pd_values()
    return PayoffPair(_general_closed_form(g, d, sA, sB, va), _general_closed_form(g, d, sA, sB, vb))


def _see(sA: StrategyParams, sB: StrategyParams) -> PayoffPair:
    if not (sA.two_parameter and sB.two_parameter):
        raise RangeError("maximally entangled category formula covers two-parameter strategies")

    def one(t1, f1, t2, f2):
        C1, S1 = math.cos(t1 / 2), math.sin(t1 / 2)
        C2, S2 = math.cos(t2 / 2), math.sin(t2 / 2)
        return (3 * (C1 * C2 * math.cos(f1 + f2)) ** 2
                + (S1 * S2 + C1 * C2 * math.sin(f1 + f2)) ** 2
                + 5 * (S1 * C2 * math.cos(f2) - C1 * S2 * math.sin(f1)) ** 2)

    return PayoffPair(one(sA.theta, sA.phi, sB.theta, sB.phi), one(sB.theta, sB.phi, sA.theta, sA.phi))


def category_nash_payoff(category: str, angle: float = PI / 2) -> float | None:
    """Symmetric equilibrium payoff of a category.

    ``angle`` is ``delta`` for ``PE`` and ``gamma`` for ``EP``; it is ignored
    otherwise. Returns ``None`` when the pure equilibrium is not covered
    (``1/3 < sin^2(angle/2) < 2/3``).
    """
    if category == "PP":
        return 1.0
    if category == "EE":
        return 3.0
    if category not in CATEGORIES:
        raise RangeError(f"category must be one of {CATEGORIES}")
    s2 = math.sin(angle / 2) ** 2
    if s2 >= 2 / 3:
        return 3 - 2 * s2
    if s2 <= 1 / 3:
        return 1 + 2 * s2
    return None


def category_nash_strategy(category: str, angle: float = PI / 2) -> tuple[StrategyParams, StrategyParams] | None:
    if category == "PP":
        return StrategyParams(PI), StrategyParams(PI)
    if category == "EE":
        return StrategyParams(0, PI / 2), StrategyParams(0, PI / 2)
    s2 = math.sin(angle / 2) ** 2
    if s2 >= 2 / 3:
        return StrategyParams(0), StrategyParams(0)
    if s2 <= 1 / 3:
        return StrategyParams(PI), StrategyParams(PI)
    return None


# ---------------------------------------------------------------- miracle move

Q_MOVE = StrategyParams(0.0, PI / 2, 0.0)
# phi sign chosen so that the advantage goes to the quantum player
MIRACLE_MOVE = StrategyParams(PI / 2, -PI / 2, 0.0)


def miracle_payoffs(theta: float) -> PayoffPair:
    """Miracle move against a classical ``U(theta, 0)``: ``(3 + 2 sin theta, (1 - sin theta)/2)``."""
    if not 0.0 <= theta <= PI:
        raise RangeError("theta outside [0, pi]")
    s = math.sin(theta)
    return PayoffPair(3 + 2 * s, (1 - s) / 2)
