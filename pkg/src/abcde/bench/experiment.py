"""Seeded experiment runner: many instances, repeats and variants, CSV output.

A plan file is a JSON object; every key is optional except ``topology``::

    {"topology": {"kind": "er", "n": 50, "p": 0.3},
     "coefficients": {"lo": -5, "hi": 5},
     "domain": [-10, 10],
     "variants": ["abcd-e", "abcd-c"],
     "S": 100, "M": 10,
     "instances": 20, "repeats": 5,
     "max_iter": 100, "time_limit": null,
     "base_seed": 0, "engine": "replica"}

``S`` and ``M`` may also be lists, in which case every combination is run.
"""

import csv
from dataclasses import asdict, dataclass, field, replace
import io
import json
from pathlib import Path
import zlib

import numpy as np

from ..engines import ENGINES, run_engine
from ..exceptions import ContractViolation
from ..io import header_lines, save_problem, split_header
from ..model import IntervalDomain
from ..solver.config import VARIANTS, SolverConfig
from .generators import CoefficientSpec, TopologyConfig, generate_problem, problem_metadata

AXES = ("iteration-vs-utility", "S-vs-utility", "M-vs-utility")
AGGREGATE_COLUMNS = ("instance", "variant", "S", "M", "runs", "mean_final", "std_final")


def _as_list(value, name):
    values = list(value) if isinstance(value, (list, tuple)) else [value]
    if not values:
        raise ContractViolation(f"{name} must not be empty")
    return tuple(values)


@dataclass(frozen=True)
class ExperimentPlan:
    topology: TopologyConfig
    coefficients: CoefficientSpec = field(default_factory=CoefficientSpec)
    domain: tuple = (-10.0, 10.0)
    variants: tuple = VARIANTS
    S: tuple = (100,)
    M: tuple = (10,)
    instances: int = 1
    repeats: int = 1
    max_iter: int | None = 100
    time_limit: float | None = None
    base_seed: int = 0
    engine: str = "replica"
    root_policy: str = "max-degree"
    output: str | None = None

    def __post_init__(self):
        if isinstance(self.topology, dict):
            object.__setattr__(self, "topology", TopologyConfig(**self.topology))
        if isinstance(self.coefficients, dict):
            object.__setattr__(self, "coefficients", CoefficientSpec(**self.coefficients))
        object.__setattr__(self, "domain", tuple(float(v) for v in self.domain))
        IntervalDomain(*self.domain)
        for name in ("variants", "S", "M"):
            object.__setattr__(self, name, _as_list(getattr(self, name), name))
        for v in self.variants:
            if v not in VARIANTS:
                raise ContractViolation(f"unknown variant {v!r}; use one of {VARIANTS}")
        if len(set(self.variants)) != len(self.variants):
            raise ContractViolation("variants must be distinct")
        if self.instances < 1 or self.repeats < 1:
            raise ContractViolation("instances and repeats must both be >= 1")
        if self.engine not in ENGINES:
            raise ContractViolation(f"unknown engine {self.engine!r}; use one of {ENGINES}")
        for s in self.S:
            for m in self.M:
                self.solver_config(s, m, 0, self.variants[0])

    def solver_config(self, S, M, seed, variant):
        return SolverConfig(
            S=S,
            M=M,
            max_iter=self.max_iter,
            time_limit=self.time_limit,
            seed=seed,
            variant=variant,
            root_policy=self.root_policy,
        )

    def as_dict(self):
        d = asdict(self)
        d["domain"] = list(self.domain)
        for name in ("variants", "S", "M"):
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ContractViolation("plan must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ContractViolation(f"unknown plan fields: {sorted(unknown)}")
        if "topology" not in data:
            raise ContractViolation("plan needs a topology")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ContractViolation(f"bad plan: {exc}") from None


def load_plan(path):
    path = Path(path)
    try:
        _, body = split_header(path.read_text())
        data = json.loads(body)
    except OSError as exc:
        raise ContractViolation(f"cannot read plan {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ContractViolation(f"plan {path} is not valid JSON: {exc}") from None
    return ExperimentPlan.from_dict(data)


def instance_seed(base_seed, instance):
    return int(np.random.SeedSequence([int(base_seed), int(instance)]).generate_state(1)[0])


def run_seed(base_seed, instance, repeat, variant):
    """Seed for one run; depends only on its own coordinates and variant name."""
    tag = zlib.crc32(variant.encode())
    return int(np.random.SeedSequence([int(base_seed), int(instance), int(repeat), tag]).generate_state(1)[0])


@dataclass
class RunResult:
    instance: int
    repeat: int
    variant: str
    S: int
    M: int
    seed: int
    gbest: np.ndarray
    trace_path: Path | None = None

    @property
    def final(self):
        return float(self.gbest[-1])


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    runs: list
    aggregate: list
    out_dir: Path | None = None

    def select(self, variant=None, S=None, M=None):
        return [
            r
            for r in self.runs
            if (variant is None or r.variant == variant)
            and (S is None or r.S == S)
            and (M is None or r.M == M)
        ]

    def finals(self, instance, variant, S=None, M=None):
        return np.array([r.final for r in self.select(variant, S, M) if r.instance == instance])


def aggregate_runs(runs):
    """Mean and (population) standard deviation of final Gbest per group."""
    groups = {}
    for r in runs:
        groups.setdefault((r.instance, r.variant, r.S, r.M), []).append(r.final)
    rows = []
    for (inst, variant, S, M), finals in groups.items():
        vals = np.array(finals)
        rows.append(
            {
                "instance": inst,
                "variant": variant,
                "S": S,
                "M": M,
                "runs": len(vals),
                "mean_final": float(vals.mean()),
                "std_final": float(vals.std()),
            }
        )
    return rows


def dumps_aggregate(rows, header=None):
    buf = io.StringIO()
    buf.write(header_lines(header))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_COLUMNS)
    for row in rows:
        writer.writerow(
            [row[c] if c not in ("mean_final", "std_final") else repr(row[c]) for c in AGGREGATE_COLUMNS]
        )
    return buf.getvalue()


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ContractViolation(f"cannot write {path}: {exc}") from None


def run_experiment(plan, out_dir=None, progress=None):
    """Run every (instance, repeat, variant, S, M) cell of ``plan``.

    With an output directory (``out_dir`` or ``plan.output``) it receives one
    problem file per instance, one trace CSV per run and ``aggregate.csv``.
    """
    out_dir = out_dir if out_dir is not None else plan.output
    if out_dir is not None:
        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ContractViolation(f"cannot create output directory {out_dir}: {exc}") from None
    plan_header = {"plan": plan.as_dict()}
    domain = IntervalDomain(*plan.domain)
    runs = []
    for i in range(plan.instances):
        topo = replace(plan.topology, seed=instance_seed(plan.base_seed, i))
        inst = generate_problem(topo, plan.coefficients, domain)
        meta = problem_metadata(topo, plan.coefficients, domain)
        if out_dir is not None:
            save_problem(inst, out_dir / f"instance_{i:03d}.json", {"instance": i, **meta})
        for rep in range(plan.repeats):
            for variant in plan.variants:
                seed = run_seed(plan.base_seed, i, rep, variant)
                for S in plan.S:
                    for M in plan.M:
                        cfg = plan.solver_config(S, M, seed, variant)
                        trace = run_engine(inst, cfg, plan.engine)
                        path = None
                        if out_dir is not None:
                            path = out_dir / f"trace_i{i:03d}_r{rep:03d}_{variant}_S{S}_M{M}.csv"
                            header = {**plan_header, "instance": i, "repeat": rep, "problem": meta}
                            try:
                                trace.write_csv(path, header)
                            except OSError as exc:
                                raise ContractViolation(f"cannot write {path}: {exc}") from None
                        runs.append(RunResult(i, rep, variant, S, M, seed, trace.gbest, path))
                        if progress is not None:
                            progress(runs[-1])
    rows = aggregate_runs(runs)
    if out_dir is not None:
        _write(out_dir / "aggregate.csv", dumps_aggregate(rows, plan_header))
    return ExperimentResult(plan, runs, rows, out_dir)


def _mean_std(values):
    vals = np.asarray(values, dtype=float)
    return float(vals.mean()), float(vals.std())


def plot_rows(result, axis, variant=None, S=None, M=None):
    """``(x, mean, std)`` rows for one axis; see :func:`emit_plot_data`."""
    if axis not in AXES:
        raise ContractViolation(f"unknown axis {axis!r}; use one of {AXES}")
    if result is None or not result.runs:
        raise ContractViolation("no runs to summarise")
    plan = result.plan
    variant = variant or plan.variants[0]
    S_fix = S if S is not None else plan.S[0]
    M_fix = M if M is not None else plan.M[0]
    rows = []
    if axis == "iteration-vs-utility":
        runs = result.select(variant, S_fix, M_fix)
        if not runs:
            raise ContractViolation(f"no runs for variant={variant}, S={S_fix}, M={M_fix}")
        length = min(len(r.gbest) for r in runs)
        curves = np.array([r.gbest[:length] for r in runs])
        for k in range(length):
            rows.append((k + 1, *_mean_std(curves[:, k])))
    else:
        key = "S" if axis == "S-vs-utility" else "M"
        values = plan.S if key == "S" else plan.M
        for v in values:
            runs = result.select(variant, v, M_fix) if key == "S" else result.select(variant, S_fix, v)
            if runs:
                rows.append((v, *_mean_std([r.final for r in runs])))
        if not rows:
            raise ContractViolation(f"no runs for variant={variant}")
    return rows


def emit_plot_data(result, axis, path, variant=None, S=None, M=None):
    """Write ``x,mean_utility,std_utility`` for plotting.

    ``iteration-vs-utility`` averages the Gbest curves of every run of one
    (variant, S, M) cell; the sweep axes average final Gbest per swept value.
    Unset filters default to the first entry of the plan.
    """
    rows = plot_rows(result, axis, variant, S, M)
    buf = io.StringIO()
    buf.write(header_lines({"axis": axis, "variant": variant or result.plan.variants[0], "plan": result.plan.as_dict()}))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("x", "mean_utility", "std_utility"))
    for x, mean, std in rows:
        writer.writerow((x, repr(mean), repr(std)))
    _write(path, buf.getvalue())
    return Path(path)
