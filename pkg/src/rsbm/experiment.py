"""Batch experiments: many seeded RSBM trials, one CSV row each.

A configuration is a JSON document::

    {
      "n": 500, "d1": 10, "d2": 2,          # or "degrees": [[10, 2], [8, 3]]
      "sampler": "configuration",           # or "permutation"
      "trials": 20, "seed_base": 0,
      "method": "spectral_adjacency",       # spectral_saw, majority_only
      "l": null,                            # walk length for spectral_saw
      "error_injection": null,              # flip fraction for majority_only
      "spectrum_k": 3,                      # eigenpairs reported per trial
      "tangle_l": null,                     # depth of the tangle audit
      "outputs": {"csv": "out.csv", "json": "out.json"}
    }

Trial ``i`` of every degree pair uses seed ``seed_base + i`` for the
sampler and the eigensolver. Rows are ordered by degree pair then trial
index regardless of how many worker processes run, and wall-clock times are
kept out of the CSV, so identical configurations give identical CSV bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import RSBMError, ValidationError
from .graphgen import sample_lift, sample_rsbm
from .model import RsbmParams
from .recovery import METHODS, spectral_recover
from .saw import tangle_audit
from .spectral import top_eigenpairs

__all__ = [
    "SCHEMA_VERSION",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "ExperimentRecord",
    "inject_errors",
    "run_trial",
    "run_experiment",
]

SCHEMA_VERSION = "rsbm-experiment/1"
CSV_COLUMNS = [
    "schema_version",
    "trial",
    "n",
    "d1",
    "d2",
    "sampler",
    "method",
    "seed",
    "agreement",
    "errors",
    "rounds",
    "converged",
    "lambda1",
    "lambda2",
    "lambda3",
    "gamma",
    "tangle_free",
    "error",
]
SAMPLERS = ("configuration", "permutation")


@dataclass
class ExperimentConfig:
    n: int
    degrees: list
    sampler: str = "configuration"
    trials: int = 1
    seed_base: int = 0
    method: str = "spectral_adjacency"
    l: int | None = None
    error_injection: float | None = None
    spectrum_k: int = 3
    tangle_l: int | None = None
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.degrees = [[int(d1), int(d2)] for d1, d2 in self.degrees]
        if not self.degrees:
            raise ValidationError("experiment needs at least one (d1, d2) pair")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.sampler not in SAMPLERS:
            raise ValidationError(f"unknown sampler {self.sampler!r}")
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if self.method == "spectral_saw" and self.l is None:
            raise ValidationError("spectral_saw needs l")
        if self.error_injection is not None and not 0 <= self.error_injection < 0.5:
            raise ValidationError("error_injection must lie in [0, 1/2)")
        if self.method == "majority_only" and self.error_injection is None:
            raise ValidationError("majority_only needs error_injection")
        if not 0 <= self.spectrum_k <= 3:
            raise ValidationError("spectrum_k must be between 0 and 3")
        for d1, d2 in self.degrees:
            RsbmParams(self.n, d1, d2)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data.pop("schema_version", None)
        if "degrees" not in data:
            try:
                data["degrees"] = [[data.pop("d1"), data.pop("d2")]]
            except KeyError:
                raise ValidationError("config needs d1/d2 or degrees") from None
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self):
        out = asdict(self)
        out["schema_version"] = SCHEMA_VERSION
        return out

    def params(self):
        return [RsbmParams(self.n, d1, d2) for d1, d2 in self.degrees]


def inject_errors(labels, fraction, rng):
    """Flip ``round(fraction * side)`` uniformly chosen labels on each side."""
    labels = np.asarray(labels, dtype=np.int8)
    out = labels.copy()
    for side in (1, -1):
        idx = np.flatnonzero(labels == side)
        k = int(round(fraction * idx.size))
        out[rng.choice(idx, size=k, replace=False)] *= -1
    return out


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_trial(config, params, trial):
    """One trial; returns ``(row, wall_time)``. Failures fill the ``error`` column."""
    seed = config.seed_base + trial
    row = {c: None for c in CSV_COLUMNS}
    row.update(
        schema_version=SCHEMA_VERSION,
        trial=trial,
        n=params.n,
        d1=params.d1,
        d2=params.d2,
        sampler=config.sampler,
        method=config.method,
        seed=seed,
    )
    t0 = time.perf_counter()
    try:
        sample = sample_lift if config.sampler == "permutation" else sample_rsbm
        inst = sample(params, seed)
        init = None
        if config.method == "majority_only":
            rng = np.random.default_rng([seed, 1])
            init = inject_errors(inst.labels, config.error_injection, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = spectral_recover(inst, config.method, l=config.l, seed=seed, init_labels=init)
        row.update(
            agreement=result.agreement,
            errors=result.errors,
            rounds=result.rounds_used,
            converged=result.converged,
        )
        if config.spectrum_k:
            k = config.spectrum_k
            tol = [1e-10, 1e-10, 1e-6][:k]
            spec = top_eigenpairs(inst.graph, k, tolerance=tol, seed=seed)
            for i, v in enumerate(spec.eigenvalues):
                row[f"lambda{i + 1}"] = float(v)
            row["gamma"] = spec.gamma
        if config.tangle_l:
            row["tangle_free"] = tangle_audit(inst.graph, config.tangle_l).tangle_free
    except RSBMError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row, time.perf_counter() - t0


def _run_task(args):
    config, params, trial = args
    return run_trial(config, params, trial)


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    rows: list
    timings: list

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def aggregate(self, rows=None):
        rows = self.rows if rows is None else rows
        ok = [r for r in rows if not r["error"]]
        errors = [r["errors"] for r in ok]
        out = {
            "trials": len(rows),
            "failed_trials": len(rows) - len(ok),
            "successes": sum(1 for r in ok if r["errors"] == 0),
        }
        out["success_rate"] = out["successes"] / len(rows)
        out["mean_errors"] = float(np.mean(errors)) if errors else None
        out["max_errors"] = int(max(errors)) if errors else None
        out["mean_agreement"] = float(np.mean([r["agreement"] for r in ok])) if ok else None
        return out

    def summary(self):
        per_pair = []
        for d1, d2 in self.config.degrees:
            rows = [r for r in self.rows if r["d1"] == d1 and r["d2"] == d2]
            per_pair.append({"d1": d1, "d2": d2, **self.aggregate(rows)})
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "aggregate": self.aggregate(),
            "per_degree_pair": per_pair,
            "timings": {"per_trial_seconds": self.timings, "total_seconds": float(sum(self.timings))},
        }

    def write(self, csv_path=None, json_path=None):
        if csv_path:
            with open(csv_path, "w", newline="") as fh:
                fh.write(self.to_csv())
        if json_path:
            with open(json_path, "w") as fh:
                json.dump(self.summary(), fh, indent=2, sort_keys=True)
                fh.write("\n")


def run_experiment(config, jobs=None):
    """Run every trial of ``config``; ``jobs > 1`` uses worker processes."""
    tasks = [(config, p, i) for p in config.params() for i in range(config.trials)]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, math.ceil(len(tasks) / (4 * jobs)))))
    else:
        results = [_run_task(t) for t in tasks]
    rows = [r for r, _ in results]
    timings = [t for _, t in results]
    return ExperimentRecord(config, rows, timings)
