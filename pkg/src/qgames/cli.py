"""Command-line front end: ``qgames sweep|nash|qkd|tomo``.

Angles are given in units of pi unless ``--radians`` is passed. Output
tables are CSV (12 significant digits) or JSON. A ``--config`` file holds
``key=value`` lines; flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import games
from .channels import NoiseConfig, noisy_payoff_closed_form, noisy_payoff_numeric
from .errors import QGamesError, RangeError
from .qkd import EveModel, SessionConfig, random_key, run_session
from .scheme import PI, SchemeConfig, StrategyParams
from .tomography import fidelity, pure_state, reconstruct, stokes_from_density

GAMES = ("pd", "chicken", "bos", "pennies")

# command -> option defaults; None means "not set"
DEFAULTS = {
    "common": {"game": "pd", "gamma": "0", "delta": "0", "grid": "25", "format": "csv",
               "out": "-", "radians": "false"},
    "sweep": {"theta": None, "phi": "0", "psi": "0", "p": "0", "mu": "0"},
    "nash": {"eps": "1e-6", "phi_steps": "1", "phi_range": "0:0.5"},
    "qkd": {"key_length": "16", "n": "10", "p": "0", "seed": "0", "threshold": "4",
            "mode": "channel", "sessions": "1"},
    "tomo": {"theta": "0", "phi": "0", "random_seed": None, "shots": "0", "seed": "0",
             "pure": "false"},
}


class ConfigError(QGamesError, ValueError):
    """Bad configuration line or field value."""


@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.array([self.start]) if self.steps == 1 else np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepPlan:
    game: str
    gamma: Range
    delta: Range
    theta: Range
    phi: Range
    psi: Range
    p: Range
    mu: Range
    out: str
    fmt: str


def parse_range(text: str, field: str, scale: float) -> Range:
    """``"x"`` or ``"start:stop:steps"``, scaled to radians where relevant."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0]) * scale
            return Range(v, v, 1)
        if len(parts) == 3:
            steps = int(parts[2])
            if steps < 1:
                raise ConfigError(f"{field}: steps must be >= 1")
            return Range(float(parts[0]) * scale, float(parts[1]) * scale, steps)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{field}: cannot parse {text!r}") from None
    raise ConfigError(f"{field}: expected 'x' or 'start:stop:steps', got {text!r}")


def read_config(path: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = (v, lineno)
    return out


def resolve(args: argparse.Namespace) -> dict[str, str]:
    """Merge option sources; explicit flags override the config file, which overrides defaults."""
    allowed = {**DEFAULTS["common"], **DEFAULTS[args.command]}
    merged = dict(allowed)
    if args.config:
        for k, (v, lineno) in read_config(args.config).items():
            if k not in allowed:
                raise ConfigError(f"{args.config}:{lineno}: unknown key {k!r} for '{args.command}'")
            merged[k] = v
    for k in allowed:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = str(v)
    return merged


def _bool(v: str | None) -> bool:
    return str(v).lower() in ("1", "true", "yes", "on")


def _game(name: str):
    if name not in GAMES:
        raise ConfigError(f"game: choose one of {GAMES}, got {name!r}")
    return games.canonical_game(name).matrix


def _num(v: str, field: str, kind=float):
    try:
        return kind(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{field}: cannot parse {v!r}") from None


def _fmt(x) -> str:
    return f"{x:.12g}" if isinstance(x, float) else str(x)


def write_table(header: Sequence[str], rows: Sequence[Sequence], out: str, fmt: str) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    else:
        raise ConfigError(f"format: choose csv or json, got {fmt!r}")
    _emit(text, out)


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------- commands


def sweep_plan(opts: dict[str, str]) -> SweepPlan:
    scale = 1.0 if _bool(opts["radians"]) else PI
    grid = _num(opts["grid"], "grid", int)
    theta = opts["theta"] or f"0:{PI / scale!r}:{grid}"
    return SweepPlan(
        game=opts["game"],
        gamma=parse_range(opts["gamma"], "gamma", scale),
        delta=parse_range(opts["delta"], "delta", scale),
        theta=parse_range(theta, "theta", scale),
        phi=parse_range(opts["phi"], "phi", scale),
        psi=parse_range(opts["psi"], "psi", scale),
        p=parse_range(opts["p"], "p", 1.0),
        mu=parse_range(opts["mu"], "mu", 1.0),
        out=opts["out"],
        fmt=opts["format"],
    )


SWEEP_HEADER = ("gamma", "delta", "thetaA", "phiA", "psiA", "thetaB", "phiB", "psiB",
                "p", "mu", "payoff_a", "payoff_b", "residual")


def cmd_sweep(plan: SweepPlan) -> list[tuple]:
    """Closed-form payoffs on a grid, each row carrying its oracle residual."""
    pm = _game(plan.game)
    strats = [StrategyParams(float(t), float(f), float(s)) for t in plan.theta.values()
              for f in plan.phi.values() for s in plan.psi.values()]
    rows = []
    for g in plan.gamma.values():
        for d in plan.delta.values():
            cfg = SchemeConfig(float(g), float(d))
            for p in plan.p.values():
                for mu in plan.mu.values():
                    nc = NoiseConfig.symmetric(float(p), float(mu))
                    for sa in strats:
                        for sb in strats:
                            cf = noisy_payoff_closed_form(cfg, sa, sb, pm, nc)
                            nu = noisy_payoff_numeric(cfg, sa, sb, pm, nc)
                            res = max(abs(cf.a - nu.a), abs(cf.b - nu.b))
                            rows.append((float(g), float(d), *sa.as_tuple(), *sb.as_tuple(),
                                         float(p), float(mu), cf.a, cf.b, res))
    write_table(SWEEP_HEADER, rows, plan.out, plan.fmt)
    return rows


def cmd_nash(opts: dict[str, str]) -> list:
    scale = 1.0 if _bool(opts["radians"]) else PI
    pm = _game(opts["game"])
    g = parse_range(opts["gamma"], "gamma", scale)
    d = parse_range(opts["delta"], "delta", scale)
    if g.steps != 1 or d.steps != 1:
        raise ConfigError("nash: gamma and delta take single values")
    cfg = SchemeConfig(g.start, d.start)
    pr = parse_range(opts["phi_range"] + ":2", "phi_range", scale)
    grid = games.strategy_grid(_num(opts["grid"], "grid", int),
                               _num(opts["phi_steps"], "phi_steps", int),
                               phi_range=(pr.start, pr.stop))
    pts = games.nash_search_scheme(cfg, pm, grid, eps=_num(opts["eps"], "eps"))
    header = ("thetaA", "phiA", "psiA", "thetaB", "phiB", "psiB", "payoff_a", "payoff_b")
    rows = [(*pt.sA.as_tuple(), *pt.sB.as_tuple(), pt.payoffs.a, pt.payoffs.b) for pt in pts]
    if not rows:
        _emit("no pure NE\n", opts["out"])
        return []
    write_table(header, rows, opts["out"], opts["format"])
    return pts


def cmd_qkd(opts: dict[str, str]) -> dict:
    length = _num(opts["key_length"], "key_length", int)
    n = _num(opts["n"], "n", int)
    seed = _num(opts["seed"], "seed", int)
    sessions = _num(opts["sessions"], "sessions", int)
    eve = EveModel(_num(opts["p"], "p"), opts["mode"])
    cfg_thr = _num(opts["threshold"], "threshold")
    transcripts = []
    for k in range(sessions):
        cfg = SessionConfig(n, seed + k, cfg_thr)
        key = random_key(length, np.random.default_rng([cfg.seed, 2 ** 32]))
        transcripts.append(run_session(key, cfg, eve))
    summary = {
        "sessions": sessions,
        "detection_rate": sum(t.eve_detected for t in transcripts) / sessions,
        "key_agreement_rate": float(np.mean([t.agreement() for t in transcripts])),
    }
    text = "".join(t.to_text() for t in transcripts)
    _emit(text, opts["out"])
    sys.stderr.write(json.dumps(summary) + "\n")
    return summary


def cmd_tomography(opts: dict[str, str]) -> dict:
    scale = 1.0 if _bool(opts["radians"]) else PI
    if opts["random_seed"] is not None:
        rng = np.random.default_rng(_num(opts["random_seed"], "random_seed", int))
        theta, phi = math.acos(rng.uniform(-1, 1)), rng.uniform(-PI, PI)
    else:
        theta = _num(opts["theta"], "theta") * scale
        phi = _num(opts["phi"], "phi") * scale
    if not 0 <= theta <= PI + 1e-12:
        raise RangeError("theta outside [0, pi]")
    rho = pure_state(theta, phi)
    shots = _num(opts["shots"], "shots", int)
    rec = reconstruct(rho, None if shots == 0 else shots, _num(opts["seed"], "seed", int),
                      pure=_bool(opts["pure"]))
    truth = stokes_from_density(rho)
    row = (theta, phi, shots, truth.s1, truth.s2, truth.s3,
           rec.stokes.s1, rec.stokes.s2, rec.stokes.s3, fidelity(rec.density, rho))
    header = ("theta", "phi", "shots", "S1", "S2", "S3", "S1_est", "S2_est", "S3_est", "fidelity")
    write_table(header, [row], opts["out"], opts["format"])
    return dict(zip(header, row))


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgames", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--game", choices=GAMES)
        p.add_argument("--gamma", help="value or start:stop:steps (units of pi)")
        p.add_argument("--delta", help="value or start:stop:steps (units of pi)")
        p.add_argument("--grid", type=int, help="theta grid points")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", help="output path, '-' for stdout")
        p.add_argument("--radians", action="store_const", const="true", default=None,
                       help="read angles in radians instead of units of pi")

    sp = sub.add_parser("sweep", help="closed-form payoffs with oracle residuals")
    common(sp)
    sp.add_argument("--theta")
    sp.add_argument("--phi")
    sp.add_argument("--psi")
    sp.add_argument("--p", help="dephasing strength (both legs)")
    sp.add_argument("--mu", help="memory (both legs)")

    np_ = sub.add_parser("nash", help="grid Nash equilibria")
    common(np_)
    np_.add_argument("--eps", type=float)
    np_.add_argument("--phi-steps", dest="phi_steps", type=int)
    np_.add_argument("--phi-range", dest="phi_range", help="lo:hi (units of pi)")

    qp = sub.add_parser("qkd", help="key distribution sessions")
    common(qp)
    qp.add_argument("--key-length", dest="key_length", type=int)
    qp.add_argument("--n", type=int, help="copies per symbol")
    qp.add_argument("--p", type=float, help="eavesdropper strength")
    qp.add_argument("--seed", type=int)
    qp.add_argument("--threshold", type=float, help="detection threshold in sigmas")
    qp.add_argument("--mode", choices=("channel", "intercept"))
    qp.add_argument("--sessions", type=int)

    tp = sub.add_parser("tomo", help="state tomography from payoffs")
    common(tp)
    tp.add_argument("--theta")
    tp.add_argument("--phi")
    tp.add_argument("--random-seed", dest="random_seed", type=int)
    tp.add_argument("--shots", type=int, help="shots per setting, 0 for exact")
    tp.add_argument("--seed", type=int)
    tp.add_argument("--pure", action="store_const", const="true", default=None,
                    help="rescale the estimate onto the Bloch sphere")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        if args.command == "sweep":
            cmd_sweep(sweep_plan(opts))
        elif args.command == "nash":
            cmd_nash(opts)
        elif args.command == "qkd":
            cmd_qkd(opts)
        else:
            cmd_tomography(opts)
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1
    except (QGamesError, ValueError, OSError) as exc:
        sys.stderr.write(f"qgames {args.command}: error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
