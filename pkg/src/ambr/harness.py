"""Dataset ingestion, experiment grids and report output.

Input is JSONL, one instance per line::

    {"id": "a", "candidates": ["x", "y"], "embeddings": [[...], [...]],
     "rewards": [0.1, 0.7], "utility_matrix": [[null, 0.3], [0.2, null]]}

Only ``candidates`` is required. Diagonal matrix entries may be null.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import AmbrError, Instance, SchemaError, make_rng
from .algorithms import (BudgetTooSmall, CbpConfig, ambr, ambr_replace, cbp,
                         coarse_to_fine, doubling_trick, exact_mbr, nbys,
                         reference_aggregation, reward_mbr)
from .metrics import UTILITIES, make_oracle, validate_matrix

log = logging.getLogger(__name__)

DEFAULT_FRACTIONS = [1 / 32, 1 / 16, 1 / 8, 1 / 4, 1 / 2]
DEFAULT_SEEDS = [0, 1, 2, 3, 4]
CSV_COLUMNS = ["algorithm", "fraction", "seed", "error_rate", "mean_regret",
               "mean_evals", "min_evals", "max_evals"]


class ParseError(AmbrError, ValueError):
    pass


class ConfigError(AmbrError, ValueError):
    pass


class LengthMismatch(AmbrError, ValueError):
    pass


class IoError(AmbrError, OSError):
    pass


# ---------------------------------------------------------------------------
# Instances on disk
# ---------------------------------------------------------------------------


def _matrix_from_json(rows, n):
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise SchemaError("utility_matrix: expected a list of rows")
    if len(rows) != n or any(len(r) != n for r in rows):
        raise SchemaError(f"utility_matrix: expected {n} rows of {n} numbers")
    try:
        m = np.array([[np.nan if v is None else v for v in r] for r in rows], dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("utility_matrix: non-numeric entry") from None
    try:
        return validate_matrix(m, n)
    except SchemaError as exc:
        raise SchemaError(f"utility_matrix: {exc}") from None


def instance_from_dict(obj: dict, default_id: str) -> Instance:
    if not isinstance(obj, dict):
        raise SchemaError("instance must be a JSON object")
    cands = obj.get("candidates")
    if not isinstance(cands, list) or not cands or not all(isinstance(c, str) for c in cands):
        raise SchemaError("candidates: expected a nonempty list of strings")
    n = len(cands)
    inst_id = obj.get("id", default_id)
    if not isinstance(inst_id, str):
        raise SchemaError("id: expected a string")
    emb = obj.get("embeddings")
    if emb is not None:
        if (not isinstance(emb, list) or len(emb) != n
                or any(not isinstance(v, list) for v in emb)
                or len({len(v) for v in emb}) != 1):
            raise SchemaError(f"embeddings: expected {n} equal-length numeric lists")
        try:
            emb = np.array(emb, dtype=float)
        except (TypeError, ValueError):
            raise SchemaError("embeddings: non-numeric entry") from None
    rewards = obj.get("rewards")
    if rewards is not None:
        if not isinstance(rewards, list) or len(rewards) != n:
            raise SchemaError(f"rewards: expected {n} numbers")
        try:
            rewards = np.array(rewards, dtype=float)
        except (TypeError, ValueError):
            raise SchemaError("rewards: non-numeric entry") from None
    matrix = obj.get("utility_matrix")
    if matrix is not None:
        matrix = _matrix_from_json(matrix, n)
    meta = obj.get("meta") or {}
    return Instance(id=inst_id, candidates=cands, embeddings=emb, rewards=rewards,
                    utility_matrix=matrix, meta=meta)


def load_instances(path) -> list[Instance]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    out, seen = [], set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
        try:
            inst = instance_from_dict(obj, default_id=str(lineno))
        except SchemaError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}") from None
        if inst.id in seen:
            raise SchemaError(f"{path}:{lineno}: id: duplicate {inst.id!r}")
        seen.add(inst.id)
        out.append(inst)
    return out


def instance_to_dict(inst: Instance) -> dict:
    obj = {"id": inst.id, "candidates": list(inst.candidates)}
    if inst.embeddings is not None:
        obj["embeddings"] = inst.embeddings.tolist()
    if inst.rewards is not None:
        obj["rewards"] = inst.rewards.tolist()
    if inst.utility_matrix is not None:
        m = inst.utility_matrix.astype(object)
        for i in range(inst.n):
            m[i, i] = None
        obj["utility_matrix"] = m.tolist()
    if inst.meta:
        obj["meta"] = inst.meta
    return obj


def dump_instances(instances, path):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for inst in instances:
                fh.write(json.dumps(instance_to_dict(inst)) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Scoring a run
# ---------------------------------------------------------------------------


def error_rate(chosen, exact) -> float:
    chosen, exact = list(chosen), list(exact)
    if len(chosen) != len(exact):
        raise LengthMismatch(f"{len(chosen)} picks vs {len(exact)} exact answers")
    if not chosen:
        raise LengthMismatch("need at least one pick")
    return sum(c != e for c, e in zip(chosen, exact)) / len(chosen)


def regret(instance: Instance, chosen: int, exact_scores) -> float:
    s = np.asarray(exact_scores, dtype=float)
    return float(s.max() - s[chosen])


def budget_for(fraction: float, n: int) -> int:
    return math.floor(fraction * n * (n - 1))


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

ALGORITHMS = ("exact", "nbys", "c2f", "cbp", "ambr", "ambr_replace",
              "reference_aggregation", "reward_mbr", "doubling")
_PARAMS = {
    "cbp": {"r0", "alpha", "B"},
    "doubling": {"t0_fraction"},
}


@dataclass
class AlgoSpec:
    name: str
    label: str
    params: dict = field(default_factory=dict)


def _algo_spec(item) -> AlgoSpec:
    if isinstance(item, str):
        item = {"name": item}
    if not isinstance(item, dict) or "name" not in item:
        raise ConfigError("algorithms: each entry is a name or an object with a 'name'")
    name = item["name"]
    if name not in ALGORITHMS:
        raise ConfigError(f"algorithms: unknown algorithm {name!r} "
                          f"(known: {', '.join(ALGORITHMS)})")
    params = {k: v for k, v in item.items() if k not in ("name", "label")}
    extra = set(params) - _PARAMS.get(name, set())
    if extra:
        raise ConfigError(f"algorithms: {name} does not take {sorted(extra)}")
    if name == "cbp":
        try:
            CbpConfig(**params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"algorithms: cbp settings: {exc}") from None
    if name == "doubling":
        f = params.get("t0_fraction", 0.125)
        if not isinstance(f, (int, float)) or not 0 < f <= 1:
            raise ConfigError("algorithms: doubling t0_fraction must lie in (0, 1]")
    return AlgoSpec(name, str(item.get("label", name)), params)


@dataclass
class ExperimentConfig:
    algorithms: list
    input_path: str
    output_path: str | None = None
    budget_fractions: list = field(default_factory=lambda: list(DEFAULT_FRACTIONS))
    seeds: list = field(default_factory=lambda: list(DEFAULT_SEEDS))
    utility: str = "matrix"
    coarse_utility: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("algorithms: need at least one algorithm")
        self.algorithms = [a if isinstance(a, AlgoSpec) else _algo_spec(a)
                           for a in self.algorithms]
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigError("algorithms: labels must be unique")
        if not self.budget_fractions:
            raise ConfigError("budget_fractions: need at least one fraction")
        for f in self.budget_fractions:
            if isinstance(f, bool) or not isinstance(f, (int, float)) or not 0 < f <= 1:
                raise ConfigError(f"budget_fractions: {f!r} is not in (0, 1]")
        self.budget_fractions = [float(f) for f in self.budget_fractions]
        if not self.seeds:
            raise ConfigError("seeds: need at least one seed")
        if any(isinstance(s, bool) or not isinstance(s, int) for s in self.seeds):
            raise ConfigError("seeds: expected integers")
        if self.utility not in UTILITIES:
            raise ConfigError(f"utility: unknown {self.utility!r} (known: {', '.join(UTILITIES)})")
        if self.coarse_utility is not None and self.coarse_utility not in UTILITIES:
            raise ConfigError(f"coarse_utility: unknown {self.coarse_utility!r}")
        if any(a.name == "c2f" for a in self.algorithms) and self.coarse_utility is None:
            raise ConfigError("coarse_utility: required when c2f is in algorithms")
        for a in self.algorithms:
            if a.name in ("exact", "reward_mbr") and min(self.budget_fractions) < 1:
                raise ConfigError(f"budget_fractions: {a.name} needs the full budget (fraction 1.0)")
        if not self.input_path:
            raise ConfigError("input_path: required")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError("jobs: expected a positive integer")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d = dict(d)
        if "fractions" in d:
            d["budget_fractions"] = d.pop("fractions")
        known = {"algorithms", "input_path", "output_path", "budget_fractions", "seeds",
                 "utility", "coarse_utility", "jobs"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
        if "algorithms" not in d:
            raise ConfigError("algorithms: required")
        if "input_path" not in d:
            raise ConfigError("input_path: required")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc.msg})") from None


# ---------------------------------------------------------------------------
# Running the grid
# ---------------------------------------------------------------------------


def run_algorithm(spec: AlgoSpec, inst: Instance, T: int, rng, utility: str,
                  coarse_utility: str | None = None):
    """One cell on a fresh oracle whose budget is ``T``. Returns a Selection."""
    name = spec.name
    if name == "reference_aggregation":
        return reference_aggregation(inst)
    oracle = make_oracle(inst, utility, budget=T)
    if name == "exact":
        return exact_mbr(inst, oracle)
    if name == "reward_mbr":
        return reward_mbr(inst, oracle, T)
    if name == "nbys":
        return nbys(inst, oracle, T, rng)
    if name == "c2f":
        return coarse_to_fine(inst, make_oracle(inst, coarse_utility), oracle, T)
    if name == "cbp":
        return cbp(inst, oracle, T, CbpConfig(**spec.params), rng)
    if name == "ambr":
        return ambr(inst, oracle, T, rng)
    if name == "ambr_replace":
        return ambr_replace(inst, oracle, T, rng)
    if name == "doubling":
        if T < 1:
            raise BudgetTooSmall("doubling needs a budget of at least 1")
        T0 = max(1, math.floor(spec.params.get("t0_fraction", 0.125) * T))
        return doubling_trick(inst, oracle, T0, T, rng)
    raise ConfigError(f"algorithms: unknown algorithm {name!r}")


def _instance_cells(args):
    inst, cfg = args
    truth = exact_mbr(inst, make_oracle(inst, cfg.utility))
    exact, exact_scores = truth.chosen, truth.trace[0]["estimates"]
    out = []
    for a, spec in enumerate(cfg.algorithms):
        for f, frac in enumerate(cfg.budget_fractions):
            T = budget_for(frac, inst.n)
            for s, seed in enumerate(cfg.seeds):
                rng = make_rng(seed, spec.label, f, inst.id)
                try:
                    sel = run_algorithm(spec, inst, T, rng, cfg.utility, cfg.coarse_utility)
                    chosen, evals = sel.chosen, sel.evals_used
                except BudgetTooSmall as exc:
                    # no usable evaluation fits; fall back to the first candidate
                    log.warning("%s on %s at T=%d: %s", spec.label, inst.id, T, exc)
                    chosen, evals = 0, 0
                out.append((a, f, s, chosen != exact,
                            regret(inst, chosen, exact_scores), evals, T))
    return out


@dataclass
class Report:
    rows: list
    aggregates: list
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"config": self.config, "rows": self.rows, "aggregates": self.aggregates}


def _summarise(cfg: ExperimentConfig, cells) -> Report:
    grid = {}
    for a, f, s, wrong, reg, evals, T in cells:
        grid.setdefault((a, f, s), []).append((wrong, reg, evals, T))
    rows, aggregates = [], []
    for a, spec in enumerate(cfg.algorithms):
        for f, frac in enumerate(cfg.budget_fractions):
            per_seed = []
            for s, seed in enumerate(cfg.seeds):
                got = grid.get((a, f, s), [])
                wrong = [g[0] for g in got]
                evals = [g[2] for g in got]
                row = {
                    "algorithm": spec.label, "fraction": frac, "seed": seed,
                    "error_rate": float(np.mean(wrong)) if got else 0.0,
                    "mean_regret": float(np.mean([g[1] for g in got])) if got else 0.0,
                    "mean_evals": float(np.mean(evals)) if got else 0.0,
                    "min_evals": int(min(evals)) if got else 0,
                    "max_evals": int(max(evals)) if got else 0,
                    "mean_budget": float(np.mean([g[3] for g in got])) if got else 0.0,
                    "n_instances": len(got),
                }
                rows.append(row)
                per_seed.append(row)
            err = [r["error_rate"] for r in per_seed]
            reg = [r["mean_regret"] for r in per_seed]
            aggregates.append({
                "algorithm": spec.label, "fraction": frac, "seed": "all",
                "error_rate": float(np.mean(err)),
                "mean_regret": float(np.mean(reg)),
                "mean_evals": float(np.mean([r["mean_evals"] for r in per_seed])),
                "min_evals": min(r["min_evals"] for r in per_seed),
                "max_evals": max(r["max_evals"] for r in per_seed),
                "error_rate_min": min(err), "error_rate_max": max(err),
                "regret_min": min(reg), "regret_max": max(reg),
            })
    conf = {
        "algorithms": [{"name": a.name, "label": a.label, **a.params} for a in cfg.algorithms],
        "budget_fractions": cfg.budget_fractions, "seeds": cfg.seeds,
        "utility": cfg.utility, "coarse_utility": cfg.coarse_utility,
    }
    return Report(rows, aggregates, conf)


def run_experiment(cfg: ExperimentConfig, instances: list[Instance] | None = None) -> Report:
    """Run every (instance, algorithm, fraction, seed) cell and aggregate.

    Ground truth comes from one exact pass per instance on its own oracle;
    each cell gets a fresh oracle with budget ``floor(f * N * (N - 1))``.
    The report is written to ``cfg.output_path`` when set.
    """
    if instances is None:
        instances = load_instances(cfg.input_path)
    work = [(inst, cfg) for inst in instances]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_instance_cells, work))
    else:
        results = [_instance_cells(w) for w in work]
    report = _summarise(cfg, [c for cells in results for c in cells])
    if cfg.output_path:
        emit_report(report, cfg.output_path)
    return report


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------


def _format(path, fmt):
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    if fmt not in ("json", "csv"):
        raise ConfigError(f"format: expected json or csv, got {fmt!r}")
    return fmt


def emit_report(report: Report, path, format: str | None = None):
    fmt = _format(path, format)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if fmt == "json":
                json.dump(report.to_dict(), fh, indent=2)
                fh.write("\n")
            else:
                w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore",
                                   lineterminator="\r\n")
                w.writeheader()
                for row in report.rows + report.aggregates:
                    w.writerow(row)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _csv_value(col, v):
    if col == "algorithm":
        return v
    if col == "seed":
        return v if v == "all" else int(v)
    if col in ("min_evals", "max_evals"):
        return int(v)
    return float(v)


def read_report(path, format: str | None = None) -> Report:
    """Parse a report written by :func:`emit_report`.

    CSV carries only the eight public columns, so rows read from CSV lack the
    JSON-only fields.
    """
    fmt = _format(path, format)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            if fmt == "json":
                d = json.load(fh)
                return Report(d["rows"], d["aggregates"], d.get("config", {}))
            rows, aggs = [], []
            for rec in csv.DictReader(fh):
                rec = {c: _csv_value(c, rec[c]) for c in CSV_COLUMNS}
                (aggs if rec["seed"] == "all" else rows).append(rec)
            return Report(rows, aggs)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: malformed report ({exc})") from None
