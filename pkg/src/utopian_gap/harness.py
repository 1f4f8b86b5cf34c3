"""Experiment configs and the three desk-scale experiments.

A config is a JSON object::

    {"experiment": "gap_curves",
     "distribution": {"kind": "factory", "n": 4, "params": {}},
     "policies": ["random", "offline-greedy", "oracle-greedy"],
     "t": 8, "trials": 200, "kappa": null, "seed": 0, "out_dir": "results"}

Each experiment writes ``<experiment>.csv`` and ``<experiment>.svg`` into
``out_dir``. Trials run sequentially in index order; trial ``j`` draws its
game from ``(seed, j)`` so the output does not depend on scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import GameError, MAX_PLAYERS, sizes, unknown_coalitions
from .generators import KINDS, POLICY_STREAM, Distribution, rng_for
from .policies import (
    POLICY_NAMES, GapEstimator, default_kappa, make_policy, optimal_set, run_trajectory,
    size_limit_for, _check_budget,
)
from . import svg

EXPERIMENTS = ("gap_curves", "selection_histogram", "largest_first_scaling")
OPTIMAL = ("offline-optimal", "oracle-optimal")
_FIELDS = ("experiment", "distribution", "policies", "t", "trials", "kappa", "seed", "out_dir")
_DIST_FIELDS = ("kind", "n", "params")


class ConfigError(GameError):
    """Invalid experiment config; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class DistributionConfig:
    kind: str
    n: int | tuple
    params: dict = field(default_factory=dict)

    def at(self, n: int) -> Distribution:
        return Distribution(self.kind, n, dict(self.params))

    @property
    def ns(self) -> tuple:
        return self.n if isinstance(self.n, tuple) else (self.n,)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    distribution: DistributionConfig
    seed: int
    policies: tuple = ()
    t: int | None = None
    trials: int = 100
    kappa: int | None = None
    out_dir: str = "results"

    def to_json(self) -> dict:
        out = asdict(self)
        out["policies"] = list(self.policies)
        d = out["distribution"]
        d["n"] = list(d["n"]) if isinstance(d["n"], tuple) else d["n"]
        return out

    def digest(self) -> str:
        """sha256 of the canonical JSON form."""
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def kappa_for(self, n: int) -> int:
        return default_kappa(n) if self.kappa is None else self.kappa


# -- loading and validation ---------------------------------------------------

def _int(value, name, low=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if low is not None and value < low:
        raise ConfigError(name, f"must be >= {low}, got {value}")
    return value


def _reject_unknown(obj, allowed, prefix=""):
    for key in obj:
        if key not in allowed:
            raise ConfigError(prefix + key, "unknown field")


def validate_config(raw: dict) -> ExperimentConfig:
    """Check a parsed config and build an :class:`ExperimentConfig`.

    Raises :class:`ConfigError` for schema problems and
    :class:`~utopian_gap.core.SizeLimit` for optimal policies beyond n = 5.
    """
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    _reject_unknown(raw, _FIELDS)
    for name in ("experiment", "distribution", "seed"):
        if name not in raw:
            raise ConfigError(name, "missing required field")

    experiment = raw["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"expected one of {EXPERIMENTS}, got {experiment!r}")
    seed = _int(raw["seed"], "seed", 0)
    trials = _int(raw.get("trials", 100), "trials", 1)
    kappa = raw.get("kappa")
    if kappa is not None:
        kappa = _int(kappa, "kappa", 1)
    out_dir = raw.get("out_dir", "results")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("out_dir", "expected a non-empty string")

    dist = raw["distribution"]
    if not isinstance(dist, dict):
        raise ConfigError("distribution", "expected an object")
    _reject_unknown(dist, _DIST_FIELDS, "distribution.")
    for name in ("kind", "n"):
        if name not in dist:
            raise ConfigError(f"distribution.{name}", "missing required field")
    if dist["kind"] not in KINDS:
        raise ConfigError("distribution.kind", f"expected one of {KINDS}, got {dist['kind']!r}")
    n = dist["n"]
    if isinstance(n, list):
        if experiment != "largest_first_scaling":
            raise ConfigError("distribution.n", "a list of sizes is only valid for scaling")
        if not n:
            raise ConfigError("distribution.n", "empty list")
        n = tuple(_int(x, "distribution.n", 2) for x in n)
        ns = n
    else:
        n = _int(n, "distribution.n", 2)
        ns = (n,)
    for m in ns:
        if m > MAX_PLAYERS:
            raise ConfigError("distribution.n", f"must be <= {MAX_PLAYERS}, got {m}")
    params = dist.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("distribution.params", "expected an object")
    dist_cfg = DistributionConfig(dist["kind"], n, dict(params))
    try:
        for m in ns:
            dist_cfg.at(m)
    except GameError as exc:
        raise ConfigError("distribution.params", str(exc)) from None

    policies = raw.get("policies", [])
    if not isinstance(policies, list):
        raise ConfigError("policies", "expected a list")
    for k, name in enumerate(policies):
        if name not in POLICY_NAMES:
            raise ConfigError(f"policies[{k}]", f"unknown policy {name!r}")
    if len(set(policies)) != len(policies):
        raise ConfigError("policies", "duplicate policy")
    if experiment != "largest_first_scaling" and not policies:
        raise ConfigError("policies", "at least one policy is required")

    t = raw.get("t")
    if t is None and experiment != "largest_first_scaling":
        raise ConfigError("t", "missing required field")
    if t is not None:
        t = _int(t, "t", 0)
        for m in ns:
            try:
                _check_budget(m, t)
            except GameError as exc:
                raise ConfigError("t", str(exc)) from None

    for name in policies:
        for m in ns:
            size_limit_for(name, m)
    return ExperimentConfig(experiment, dist_cfg, seed, tuple(policies), t, trials, kappa, out_dir)


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return validate_config(raw)


# -- per-trial gap curves -----------------------------------------------------

def _games(dist: Distribution, trials: int, seed: int):
    return [dist.sample(seed, j) for j in range(trials)]


def _trajectories(cfg: ExperimentConfig, name: str, dist: Distribution, t: int):
    """Revealed sequences and normalized gaps, one row per trial.

    Optimal policies have no single trajectory: row ``tau`` of their
    selections is the optimal set for budget ``tau`` itself.
    """
    games = _games(dist, cfg.trials, cfg.seed)
    n = dist.n
    gaps = np.empty((cfg.trials, t + 1))
    picks = []
    if name == "offline-optimal":
        score = GapEstimator(dist, cfg.kappa_for(n), cfg.seed)
        sweep = [optimal_set(score, n, tau) for tau in range(t + 1)]
    for j, game in enumerate(games):
        if name in OPTIMAL:
            if name == "oracle-optimal":
                score = GapEstimator(game)
                sweep = [optimal_set(score, n, tau) for tau in range(t + 1)]
            own = GapEstimator(game)
            gaps[j] = [own(s) for s in sweep]
            picks.append(sweep)
            continue
        if j == 0 or name == "random":
            policy = make_policy(name, dist, t, cfg.kappa_for(n), cfg.seed)
        traj = run_trajectory(policy, game, t, rng_for(cfg.seed, j, POLICY_STREAM))
        gaps[j] = traj.gaps
        picks.append([traj.revealed[:tau] for tau in range(t + 1)])
    return gaps, picks


def _summary(gaps: np.ndarray):
    mean = gaps.mean(axis=0)
    m = gaps.shape[0]
    std = gaps.std(axis=0, ddof=1) if m > 1 else np.zeros_like(mean)
    return mean, std, std / np.sqrt(m)


@dataclass
class ExperimentResult:
    header: list
    rows: list
    csv_path: Path | None = None
    svg_path: Path | None = None
    data: dict = field(default_factory=dict)


def _csv_text(cfg: ExperimentConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# config_sha256={cfg.digest()} seed={cfg.seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write(cfg: ExperimentConfig, result: ExperimentResult, chart: str, out_dir=None):
    out = Path(cfg.out_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.csv_path = out / f"{cfg.experiment}.csv"
    result.svg_path = out / f"{cfg.experiment}.svg"
    result.csv_path.write_text(_csv_text(cfg, result.header, result.rows), encoding="utf-8")
    result.svg_path.write_text(chart, encoding="utf-8")
    return result


def experiment_gap_curves(cfg: ExperimentConfig, write: bool = True, out_dir=None) -> ExperimentResult:
    """Mean normalized gap per step for each policy."""
    dist = cfg.distribution.at(cfg.distribution.ns[0])
    header = ["policy", "step", "mean", "std", "stderr", "trials"]
    rows, series, data = [], {}, {}
    for name in cfg.policies:
        gaps, _ = _trajectories(cfg, name, dist, cfg.t)
        mean, std, se = _summary(gaps)
        data[name] = gaps
        series[name] = (np.arange(cfg.t + 1), mean, std)
        rows += [[name, step, repr(float(mean[step])), repr(float(std[step])),
                  repr(float(se[step])), cfg.trials] for step in range(cfg.t + 1)]
    result = ExperimentResult(header, rows, data=data)
    if write:
        title = f"Utopian gap on {dist.kind}({dist.n}), {cfg.trials} trials"
        chart = svg.line_chart(series, title, "revealed coalitions", "normalized gap")
        _write(cfg, result, chart, out_dir)
    return result


def experiment_selection_histogram(cfg: ExperimentConfig, write: bool = True,
                                   out_dir=None) -> ExperimentResult:
    """Cumulative fraction of selections per coalition size, by policy and step."""
    dist = cfg.distribution.at(cfg.distribution.ns[0])
    n = dist.n
    size = sizes(n)
    cats = list(range(2, n))
    header = ["policy", "step", "size", "fraction", "trials"]
    rows, panels, data = [], {}, {}
    for name in cfg.policies:
        _, picks = _trajectories(cfg, name, dist, cfg.t)
        table = np.zeros((cfg.t, len(cats)))
        for step in range(1, cfg.t + 1):
            counts = np.zeros(len(cats))
            for trial in picks:
                for s in trial[step]:
                    counts[size[s] - 2] += 1
            table[step - 1] = counts / counts.sum()
            rows += [[name, step, k, repr(float(table[step - 1, c])), cfg.trials]
                     for c, k in enumerate(cats)]
        data[name] = table
        panels[name] = (list(range(1, cfg.t + 1)), table.tolist())
    result = ExperimentResult(header, rows, data=data)
    if write:
        title = f"Selected coalition sizes on {dist.kind}({n})"
        chart = (svg.stacked_bars(panels, cats, title, "policy, steps 1..t", "cumulative fraction")
                 if cfg.t > 0 else svg.empty_chart(title))
        _write(cfg, result, chart, out_dir)
    return result


def experiment_largest_first_scaling(cfg: ExperimentConfig, write: bool = True,
                                     out_dir=None) -> ExperimentResult:
    """Gap after revealing every size-(n-1) coalition against random picks of the same count.

    The budget is ``n`` unless ``t`` is set in the config.
    """
    header = ["n", "policy", "budget", "mean", "std", "stderr", "trials"]
    rows, data = [], {}
    curves = {"minimal": [], "largest-first": [], "random": []}
    for n in cfg.distribution.ns:
        dist = cfg.distribution.at(n)
        budget = n if cfg.t is None else cfg.t
        games = _games(dist, cfg.trials, cfg.seed)
        pool = unknown_coalitions(n)
        order = sorted(pool, key=lambda s: (-sizes(n)[s], s))[:budget]
        found = {"minimal": [], "largest-first": [], "random": []}
        for j, game in enumerate(games):
            score = GapEstimator(game)
            perm = rng_for(cfg.seed, j, POLICY_STREAM).permutation(len(pool))[:budget]
            found["minimal"].append(score(()))
            found["largest-first"].append(score(order))
            found["random"].append(score([pool[i] for i in perm]))
        for name, values in found.items():
            arr = np.asarray(values)[:, None]
            mean, std, se = (float(x[0]) for x in _summary(arr))
            rows.append([n, name, 0 if name == "minimal" else budget, repr(mean), repr(std),
                         repr(se), cfg.trials])
            curves[name].append((n, mean, std))
            data[(n, name)] = arr[:, 0]
    result = ExperimentResult(header, rows, data=data)
    if write:
        series = {name: tuple(np.array(col) for col in zip(*pts)) for name, pts in curves.items()}
        title = f"Largest-first vs random on {cfg.distribution.kind}"
        chart = svg.line_chart(series, title, "players", "normalized gap")
        _write(cfg, result, chart, out_dir)
    return result


RUNNERS = {
    "gap_curves": experiment_gap_curves,
    "selection_histogram": experiment_selection_histogram,
    "largest_first_scaling": experiment_largest_first_scaling,
}


def run_experiment(cfg: ExperimentConfig, write: bool = True, out_dir=None) -> ExperimentResult:
    return RUNNERS[cfg.experiment](cfg, write=write, out_dir=out_dir)
