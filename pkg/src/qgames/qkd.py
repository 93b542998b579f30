"""Key distribution through a quantum game.

Alice encodes one of four symbols with a local unitary on her half of a
maximally entangled pair; Bob applies one of two operators and measures in
the maximally entangled basis (``gamma = delta = pi/2``). The pair of payoff
expectations identifies the symbol. An eavesdropper measuring Alice's qubit
in the computational basis with probability ``p`` moves the pair off the
legitimate cells, which Bob detects from the spread of his estimates.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import KrausSet, Operator, TwoQubitDensity, apply_kraus, apply_unitary, tensor
from .errors import EmptySampleError, OverlapError, RangeError
from .scheme import (
    PI,
    PayoffMatrix,
    SchemeConfig,
    StrategyParams,
    initial_density,
    measurement_projectors,
    strategy_unitary,
)

GAMMA = PI / 2
DELTA = PI / 2
BOB_OPS = (0.0, PI)
OUTCOMES = ("00", "01", "10", "11")
UNDECODED = "⊥"


@dataclass(frozen=True)
class SymbolCodebook:
    """Four symbols and Alice's strategy for each."""

    entries: tuple = (
        ("m1", StrategyParams(0.0, 0.0, 0.0)),
        ("m2", StrategyParams(PI / 3, PI / 2, PI / 2)),
        ("m3", StrategyParams(PI / 2, PI / 2, PI / 2)),
        ("m4", StrategyParams(PI, PI, PI)),
    )

    def __post_init__(self):
        if len(self.entries) != 4:
            raise RangeError("codebook holds exactly four symbols")
        params = [s.as_tuple() for _, s in self.entries]
        if len(set(params)) != 4 or len({k for k, _ in self.entries}) != 4:
            raise RangeError("codebook symbols and strategies must be pairwise distinct")

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.entries)

    def strategy(self, symbol: str) -> StrategyParams:
        for k, s in self.entries:
            if k == symbol:
                return s
        raise RangeError(f"unknown symbol {symbol!r}")


@dataclass(frozen=True)
class CodingMatrix:
    """Reward tables for both expectation values; defaults to the usual coding."""

    table: PayoffMatrix = PayoffMatrix(3, 0, 5, 1, 3, 5, 0, 1)

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.table.values("A"), float), np.array(self.table.values("B"), float)


@dataclass(frozen=True)
class EveModel:
    """Eavesdropper of strength ``p``.

    ``mode="channel"`` samples from the dephased state directly;
    ``mode="intercept"`` decides per copy whether Eve measured it.
    """

    p: float = 0.0
    mode: str = "channel"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise RangeError("eve p outside [0, 1]")
        if self.mode not in ("channel", "intercept"):
            raise RangeError("eve mode must be 'channel' or 'intercept'")


@dataclass(frozen=True)
class SessionConfig:
    n: int = 10
    seed: int = 0
    threshold_sigmas: float = 4.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise RangeError("n must be a positive integer")
        if self.threshold_sigmas <= 0:
            raise RangeError("threshold must be positive")


def bob_unitary(theta: float) -> Operator:
    """Bob's real rotation ``[[c, -s], [s, c]]``, i.e. canonical ``(theta, 0, pi)``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Operator([[c, -s], [s, c]], unitary=True)


def eve_kraus(p: float) -> KrausSet:
    """Eve's operators on Alice's qubit, lifted to the pair."""
    eye = np.eye(2)
    ops = (math.sqrt(p) * np.diag([1.0, 0.0]), math.sqrt(p) * np.diag([0.0, 1.0]),
           math.sqrt(1 - p) * eye)
    return KrausSet(tuple(np.kron(a, eye) for a in ops))


def final_state(alice: StrategyParams, bob_theta: float, eve_p: float) -> TwoQubitDensity:
    cfg = SchemeConfig(GAMMA, DELTA)
    rho = apply_unitary(tensor(strategy_unitary(alice), Operator(np.eye(2), unitary=True)),
                        initial_density(cfg))
    rho = apply_kraus(eve_kraus(eve_p), rho)
    return apply_unitary(tensor(Operator(np.eye(2), unitary=True), bob_unitary(bob_theta)), rho)


def outcome_probabilities(alice: StrategyParams, bob_theta: float, eve_p: float) -> np.ndarray:
    """Exact probabilities of outcomes ``00, 01, 10, 11``."""
    return np.array(_probabilities(alice, float(bob_theta), float(eve_p)))


@lru_cache(maxsize=512)
def _probabilities(alice: StrategyParams, bob_theta: float, eve_p: float) -> tuple:
    rho = final_state(alice, bob_theta, eve_p)
    projs = measurement_projectors(DELTA)
    pr = np.array([np.trace(projs[k].mat @ rho.mat).real for k in OUTCOMES])
    pr[pr < 1e-15] = 0.0
    return tuple(pr / pr.sum())


def cell_closed_form(alice: StrategyParams, bob_theta: float, eve_p: float,
                     m: Sequence[float]) -> float:
    """Expected reward for one coding vector, evaluated in closed form."""
    m00, m01, m10, m11 = m
    g, d = GAMMA, DELTA
    t1, a, b = alice.theta, alice.phi, alice.psi
    t2 = bob_theta
    cg2, sg2 = math.cos(g / 2) ** 2, math.sin(g / 2) ** 2
    cd2, sd2 = math.cos(d / 2) ** 2, math.sin(d / 2) ** 2
    eta = cd2 * cg2 + sd2 * sg2
    chi = cd2 * sg2 + sd2 * cg2
    xi = 0.5 * math.sin(d) * math.sin(g)
    mu = 1 - eve_p
    c1, s1 = math.cos(t1 / 2) ** 2, math.sin(t1 / 2) ** 2
    c2, s2 = math.cos(t2 / 2) ** 2, math.sin(t2 / 2) ** 2
    ss = math.sin(t1) * math.sin(t2)
    return (c1 * c2 * (eta * m00 + chi * m11 + (m00 - m11) * mu * xi * math.cos(2 * a))
            + s1 * s2 * (eta * m11 + chi * m00 - (m00 - m11) * mu * xi * math.cos(2 * b))
            + c1 * s2 * (eta * m01 + chi * m10 + (m01 - m10) * mu * xi * math.cos(2 * a))
            + c2 * s1 * (eta * m10 + chi * m01 - (m01 - m10) * mu * xi * math.cos(2 * b))
            + (m00 - m11 + m10 - m01) / 4 * mu * ss * math.sin(d) * math.sin(a + b)
            + (m01 + m10 - m00 - m11) / 4 * ss * math.sin(g) * math.sin(a - b))


@dataclass(frozen=True)
class DecodeBiMatrix:
    """Expected pairs ``cells[symbol][column]`` with per-shot spreads.

    ``min_gap`` is the smallest Euclidean distance between two cells of the
    same column.
    """

    symbols: tuple
    cells: np.ndarray          # shape (4, 2, 2): symbol, Bob column, player
    stds: np.ndarray           # single-shot standard deviations, same shape
    s_min: float = 0.25
    min_gap: float = field(init=False)

    def __post_init__(self):
        gaps = [np.linalg.norm(self.cells[i, col] - self.cells[j, col])
                for col in range(2) for i in range(4) for j in range(i + 1, 4)]
        object.__setattr__(self, "min_gap", float(min(gaps)))

    def check_separation(self) -> None:
        if self.min_gap < self.s_min:
            raise OverlapError(f"cells {self.min_gap:.4g} apart, below s_min={self.s_min}")

    def cell(self, symbol: str, column: int) -> tuple[float, float]:
        i = self.symbols.index(symbol)
        return float(self.cells[i, column, 0]), float(self.cells[i, column, 1])


def _std(pr: np.ndarray, v: np.ndarray) -> float:
    mean = pr @ v
    var = pr @ v ** 2 - mean ** 2
    # round-off floor so that deterministic cells get an exact zero
    return float(math.sqrt(var)) if var > 1e-20 else 0.0


def decode_matrix(cb: SymbolCodebook = SymbolCodebook(), cm: CodingMatrix = CodingMatrix(),
                  eve_p: float = 0.0, s_min: float = 0.25,
                  check_overlap: bool | None = None) -> DecodeBiMatrix:
    """Bob's decoding table at eavesdropper strength ``eve_p``.

    The separation check runs by default only at ``eve_p = 0``; an active
    eavesdropper pulls cells toward each other by design.
    """
    if not 0.0 <= eve_p <= 1.0:
        raise RangeError("eve_p outside [0, 1]")
    dm = _decode_matrix(cb, cm, float(eve_p), float(s_min))
    if check_overlap or (check_overlap is None and eve_p == 0.0):
        dm.check_separation()
    return dm


@lru_cache(maxsize=64)
def _decode_matrix(cb: SymbolCodebook, cm: CodingMatrix, eve_p: float, s_min: float) -> DecodeBiMatrix:
    va, vb = cm.vectors()
    cells = np.empty((4, 2, 2))
    stds = np.empty((4, 2, 2))
    for i, (_, s) in enumerate(cb.entries):
        for col, tb in enumerate(BOB_OPS):
            cells[i, col] = (cell_closed_form(s, tb, eve_p, va), cell_closed_form(s, tb, eve_p, vb))
            pr = outcome_probabilities(s, tb, eve_p)
            stds[i, col] = (_std(pr, va), _std(pr, vb))
    cells.setflags(write=False)
    stds.setflags(write=False)
    return DecodeBiMatrix(cb.symbols, cells, stds, s_min)


def decode_matrix_numeric(cb: SymbolCodebook = SymbolCodebook(), cm: CodingMatrix = CodingMatrix(),
                          eve_p: float = 0.0) -> np.ndarray:
    """Oracle cells from explicit density evolution, shape ``(4, 2, 2)``."""
    va, vb = cm.vectors()
    out = np.empty((4, 2, 2))
    for i, (_, s) in enumerate(cb.entries):
        for col, tb in enumerate(BOB_OPS):
            pr = outcome_probabilities(s, tb, eve_p)
            out[i, col] = (pr @ va, pr @ vb)
    return out


def transmit_symbol(symbol: str, bob_op: int, eve: EveModel, n: int, rng: np.random.Generator,
                    cb: SymbolCodebook = SymbolCodebook()) -> np.ndarray:
    """Outcome counts over ``00, 01, 10, 11`` for ``n`` copies.

    ``bob_op`` is the column index: ``0`` for ``U_B(0)``, ``1`` for ``U_B(pi)``.
    """
    if n < 1:
        raise RangeError("n must be positive")
    s = cb.strategy(symbol)
    tb = BOB_OPS[bob_op]
    if eve.mode == "channel":
        return rng.multinomial(n, outcome_probabilities(s, tb, eve.p))
    hit = int(rng.binomial(n, eve.p))
    return (rng.multinomial(hit, outcome_probabilities(s, tb, 1.0))
            + rng.multinomial(n - hit, outcome_probabilities(s, tb, 0.0)))


def estimate_cell(counts: Sequence[int], cm: CodingMatrix = CodingMatrix()) -> tuple[float, float]:
    """Plug-in estimate of both expectation values from outcome counts."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise EmptySampleError("no samples to estimate from")
    va, vb = cm.vectors()
    f = counts / total
    return float(f @ va), float(f @ vb)


def intercept_statistics(a: float, b: float, c: float, d: float, n: int):
    """Mean and spread when half the copies land on ``(a, b)`` and half on ``(c, d)``.

    Returns
    -------
    (mean_a, mean_b), (sigma_a, sigma_b)
    """
    if n < 1:
        raise RangeError("n must be positive")
    r = 2 * math.sqrt(n)
    return ((a + c) / 2, (b + d) / 2), (abs(a - c) / r, abs(b - d) / r)


def z_scores(est: tuple[float, float], dm: DecodeBiMatrix, column: int, n: int) -> np.ndarray:
    """Largest per-component deviation from each legitimate cell, in units of its sigma."""
    out = np.empty(len(dm.symbols))
    for i in range(len(dm.symbols)):
        z = 0.0
        for k in range(2):
            dev = abs(est[k] - dm.cells[i, column, k])
            sig = dm.stds[i, column, k] / math.sqrt(n)
            if sig == 0.0:
                z = max(z, 0.0 if dev <= 1e-9 else math.inf)
            else:
                z = max(z, dev / sig)
        out[i] = z
    return out


@dataclass(frozen=True)
class SymbolRecord:
    symbol: str
    bob_op: int
    counts: tuple
    est_a: float
    est_b: float
    decoded: str
    detected: bool

    def to_line(self) -> str:
        c = ",".join(str(int(x)) for x in self.counts)
        return (f"{self.symbol},{self.bob_op},{c},{self.est_a:.12g},{self.est_b:.12g},"
                f"{self.decoded},{int(self.detected)}")


@dataclass(frozen=True)
class SessionTranscript:
    records: tuple

    @property
    def eve_detected(self) -> bool:
        return any(r.detected for r in self.records)

    @property
    def decoded_key(self) -> tuple[str, ...]:
        return tuple(r.decoded for r in self.records)

    def agreement(self) -> float:
        if not self.records:
            return 1.0
        return sum(r.decoded == r.symbol for r in self.records) / len(self.records)

    def to_text(self) -> str:
        head = "symbol,bob_op,c00,c01,c10,c11,est_a,est_b,decoded,detected"
        return "\n".join([head] + [r.to_line() for r in self.records]) + "\n"


def decode_estimate(est, dm: DecodeBiMatrix, column: int, n: int) -> tuple[str, np.ndarray]:
    """Nearest cell in the column, or ``UNDECODED`` when two cells sit within one sigma."""
    z = z_scores(est, dm, column, n)
    if np.sum(z <= 1.0) >= 2:
        return UNDECODED, z
    dist = np.linalg.norm(dm.cells[:, column, :] - np.asarray(est), axis=1)
    return dm.symbols[int(np.argmin(dist))], z


def run_session(key: Sequence[str], cfg: SessionConfig, eve: EveModel = EveModel(),
                cm: CodingMatrix = CodingMatrix(), cb: SymbolCodebook = SymbolCodebook()) -> SessionTranscript:
    """Send every symbol of ``key`` with ``cfg.n`` copies and decode.

    Each symbol uses its own stream seeded by ``(seed, index)``, so the
    transcript is reproducible and symbols are independent.
    """
    dm = decode_matrix(cb, cm, 0.0)
    records = []
    for idx, sym in enumerate(key):
        rng = np.random.default_rng([cfg.seed, idx])
        col = int(rng.integers(2))
        counts = transmit_symbol(sym, col, eve, cfg.n, rng, cb)
        est = estimate_cell(counts, cm)
        decoded, z = decode_estimate(est, dm, col, cfg.n)
        detected = bool(z.min() > cfg.threshold_sigmas)
        records.append(SymbolRecord(sym, col, tuple(int(x) for x in counts), est[0], est[1],
                                    decoded, detected))
    return SessionTranscript(tuple(records))


def random_key(length: int, rng: np.random.Generator, cb: SymbolCodebook = SymbolCodebook()) -> list[str]:
    return [cb.symbols[i] for i in rng.integers(4, size=length)]
