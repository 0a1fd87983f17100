"""Configuration-driven experiments: replicated runs, aggregation, rate fits and bound checks."""
from __future__ import annotations

import copy
import csv
import hashlib
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
import yaml

from . import engine, oracle, theory
from .errors import FuncSGDError, UnsupportedError, ValidationError
from .model import ProcessSpec, SlopeCoefficients, build_slope
from .spectral import EigenDecay, SpectralModel

CSV_HEADER = ["experiment_id", "t", "metric", "mean", "stderr", "n", "theory_exponent",
              "theory_log_factor", "bound_value", "bound_satisfied"]
METRICS = ("prediction", "estimation")

# schema: key -> default (None marks "no default"); nested dicts are sections
_SCHEMA = {
    "experiment_id": "experiment",
    "model": {
        "m": 200,
        "kernel": {"kind": "power", "exponent": None, "scale": 1.0, "gamma1": None, "gamma2": None, "values": None},
        "covariance": {"kind": "power", "exponent": None, "scale": 1.0, "gamma1": None, "gamma2": None,
                       "values": None},
    },
    "slope": {"target": "prediction", "r": None, "source": None, "scale": 1.0},
    "process": {"law": "gaussian", "normalize": False, "noise_std": 0.0, "seed": 0},
    "schedule": {"kind": "online", "eta0": "auto", "theta": "auto", "exponent": "auto"},
    "theory": {"s": None, "c_m": "auto", "tail_corrected": True},
    "horizon": 1024,
    "replications": 100,
    "record": "dyadic",
    "fit_window": None,
    "sweep": {"axes": {}, "budget": 1e12},
}


class ConfigError(ValidationError):
    """Invalid configuration; ``problems`` lists every offending key."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


def _merge(schema, given, path, problems):
    out = {}
    if not isinstance(given, dict):
        problems.append(f"{path or '<root>'}: expected a mapping, got {type(given).__name__}")
        return copy.deepcopy(schema)
    for key in given:
        if key not in schema:
            problems.append(f"{path + '.' if path else ''}{key}: unknown key")
    for key, default in schema.items():
        sub = f"{path}.{key}" if path else key
        if isinstance(default, dict) and key != "axes":
            out[key] = _merge(default, given.get(key, {}), sub, problems)
        else:
            out[key] = copy.deepcopy(given.get(key, default))
    return out


def _decay(d: dict, m: int, where: str) -> EigenDecay:
    kind = d["kind"]
    if kind == "power":
        if d["exponent"] is None:
            raise ValidationError(f"{where}.exponent is required for power decays")
        return EigenDecay.power(float(d["exponent"]), float(d["scale"]), m)
    if kind == "oscillating":
        return EigenDecay.oscillating(float(d["gamma1"]), float(d["gamma2"]), m)
    if kind == "explicit":
        if d["values"] is None or len(d["values"]) != m:
            raise ValidationError(f"{where}.values must list exactly m = {m} eigenvalues")
        return EigenDecay.explicit(d["values"], ordered=False)
    raise ValidationError(f"{where}.kind must be power, oscillating or explicit, got {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; ``data`` is the normalized mapping that is hashed."""

    data: dict = field(repr=False)
    model: SpectralModel = field(repr=False)
    slope: SlopeCoefficients = field(repr=False)
    process: ProcessSpec = field(repr=False)
    horizons: tuple
    theorem: int

    @classmethod
    def from_dict(cls, given: dict) -> "ExperimentConfig":
        problems: list[str] = []
        data = _merge(_SCHEMA, given or {}, "", problems)
        if problems:
            raise ConfigError(problems)
        try:
            return cls._build(data)
        except ConfigError:
            raise
        except (ValidationError, TypeError, ValueError) as exc:
            raise ConfigError([str(exc)]) from None

    @classmethod
    def _build(cls, data):
        m = data["model"]["m"]
        if not isinstance(m, int) or m < 1:
            raise ValidationError("model.m must be a positive integer")
        model = SpectralModel(_decay(data["model"]["kernel"], m, "model.kernel"),
                              _decay(data["model"]["covariance"], m, "model.covariance"))
        sl = data["slope"]
        if sl["r"] is None:
            raise ValidationError("slope.r is required")
        src = None if sl["source"] in (None, "default") else sl["source"]
        slope = build_slope(model, float(sl["r"]), sl["target"], src)
        if float(sl["scale"]) != 1.0:
            slope = slope.scaled(float(sl["scale"]))
        pr = data["process"]
        process = ProcessSpec(pr["law"], bool(pr["normalize"]), float(pr["noise_std"]), int(pr["seed"]))
        sch = data["schedule"]
        theorem = theory.theorem_for(sl["target"], sch["kind"])
        s = data["theory"]["s"]
        if s is None:
            raise ValidationError("theory.s (capacity exponent) is required")
        theory.theorem_rate(theorem, float(sl["r"]), float(s))  # domain check
        hz = data["horizon"]
        horizons = tuple(int(h) for h in (hz if isinstance(hz, list) else [hz]))
        if not horizons or min(horizons) < 0 or len(set(horizons)) != len(horizons):
            raise ValidationError("horizon must be a non-negative integer or a list of distinct ones")
        if len(horizons) > 1 and sch["kind"] != "finite_horizon":
            raise ValidationError("a list of horizons is only meaningful for finite-horizon schedules")
        if not isinstance(data["replications"], int) or data["replications"] < 1:
            raise ValidationError("replications must be a positive integer")
        rec = data["record"]
        if rec != "dyadic" and not (isinstance(rec, list) and all(isinstance(t, int) for t in rec)):
            raise ValidationError("record must be 'dyadic' or a list of integer steps")
        for key in ("eta0", "theta", "exponent"):
            v = sch[key]
            if v != "auto" and not isinstance(v, (int, float)):
                raise ValidationError(f"schedule.{key} must be 'auto' or a number")
        fw = data["fit_window"]
        if fw is not None and not (isinstance(fw, list) and len(fw) == 2):
            raise ValidationError("fit_window must be a pair [lo, hi]")
        cm = data["theory"]["c_m"]
        if cm != "auto" and not (isinstance(cm, (int, float)) and cm > 0):
            raise ValidationError("theory.c_m must be 'auto' or a positive number")
        return cls(data, model, slope, process, horizons, theorem)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text()
        try:
            given = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError([f"{path}: not valid YAML ({exc})"]) from None
        return cls.from_dict(given or {})

    def with_overrides(self, **kv) -> "ExperimentConfig":
        """Copy with dotted-key overrides, e.g. ``{"process.seed": 3}``."""
        data = copy.deepcopy(self.data)
        for dotted, value in kv.items():
            _set_dotted(data, dotted, value)
        return ExperimentConfig.from_dict(data)

    @property
    def experiment_id(self) -> str:
        return str(self.data["experiment_id"])

    @property
    def r(self) -> float:
        return float(self.data["slope"]["r"])

    @property
    def s(self) -> float:
        return float(self.data["theory"]["s"])

    @property
    def target(self) -> str:
        return self.data["slope"]["target"]

    @property
    def schedule_kind(self) -> str:
        return self.data["schedule"]["kind"]

    @property
    def replications(self) -> int:
        return int(self.data["replications"])

    def canonical(self) -> str:
        return json.dumps(self.data, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _set_dotted(data, dotted, value):
    keys = dotted.split(".")
    cur = data
    for k in keys[:-1]:
        if not isinstance(cur, dict) or k not in cur:
            raise ConfigError([f"{dotted}: unknown key"])
        cur = cur[k]
    if not isinstance(cur, dict) or keys[-1] not in cur:
        raise ConfigError([f"{dotted}: unknown key"])
    cur[keys[-1]] = value


# ---------------------------------------------------------------------------
# schedule and theory attachment


class Setup(NamedTuple):
    quantities: theory.ModelQuantities | None
    eta0: float
    eta0_max: float | None
    precondition_holds: bool | None
    theta: float | None
    exponent: float | None


def resolve_setup(cfg: ExperimentConfig) -> Setup:
    """Pick the step scale and decay exponent and collect the bound's ingredients."""
    sch = cfg.data["schedule"]
    c_m = cfg.data["theory"]["c_m"]
    if c_m == "auto":
        c_m = cfg.process.moment_constant
    q = None
    if c_m is not None:
        q = theory.model_quantities(cfg.model, cfg.slope, cfg.process.noise_std, float(c_m), cfg.r, cfg.s,
                                    tail_corrected=bool(cfg.data["theory"]["tail_corrected"]))
    eta0_max = None
    if q is not None:
        eta0_max = min(1.0, 1.0 / q.kappa2, theory.step_constant(cfg.theorem, q))
    if sch["eta0"] == "auto":
        if eta0_max is None:
            raise ValidationError("schedule.eta0 = auto needs theory.c_m for this coefficient law")
        eta0 = 0.99 * eta0_max
    else:
        eta0 = float(sch["eta0"])
    holds = None if eta0_max is None else bool(eta0 <= eta0_max)
    theta = exponent = None
    if cfg.schedule_kind == "online":
        if sch["theta"] == "auto":
            theta = (theory.theta_for_prediction(cfg.r, cfg.s) if cfg.target == "prediction"
                     else theory.theta_for_estimation(cfg.r, cfg.s))
        else:
            theta = float(sch["theta"])
    else:
        exponent = (theory.finite_horizon_exponent(cfg.target, cfg.r, cfg.s) if sch["exponent"] == "auto"
                    else float(sch["exponent"]))
    return Setup(q, eta0, eta0_max, holds, theta, exponent)


def make_schedule(cfg: ExperimentConfig, setup: Setup, horizon: int) -> engine.Schedule:
    if cfg.schedule_kind == "online":
        return engine.Schedule.online(setup.eta0, setup.theta)
    return engine.Schedule.finite_horizon(setup.eta0, horizon, setup.exponent)


# ---------------------------------------------------------------------------
# records


class Row(NamedTuple):
    experiment_id: str
    t: int
    metric: str
    mean: float
    stderr: float
    n: int
    theory_exponent: float | None
    theory_log_factor: bool | None
    bound_value: float | None
    bound_satisfied: bool | None
    min: float = math.nan
    max: float = math.nan


@dataclass
class ExperimentRecord:
    experiment_id: str
    config_hash: str
    rows: list
    fits: dict
    rate: theory.RateSpec | None
    precondition: dict
    config: dict = field(repr=False)

    def series(self, metric: str):
        rows = [r for r in self.rows if r.metric == metric]
        return np.array([r.t for r in rows]), np.array([r.mean for r in rows]), np.array([r.stderr for r in rows])

    def bound_violations(self, metric: str | None = None) -> list:
        return [r for r in self.rows if r.bound_satisfied is False and (metric is None or r.metric == metric)]

    def to_json(self) -> str:
        from . import __version__

        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        payload = {
            "experiment_id": self.experiment_id,
            "config_hash": self.config_hash,
            "version": __version__,
            "config": self.config,
            "precondition": self.precondition,
            "rate": None if self.rate is None else self.rate._asdict(),
            "fits": {k: (None if v is None else v._asdict()) for k, v in self.fits.items()},
            "rows": [{k: clean(v) for k, v in r._asdict().items()} for r in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.experiment_id, r.t, r.metric, repr(r.mean), repr(r.stderr), r.n,
                        _cell(r.theory_exponent), _cell(r.theory_log_factor), _cell(r.bound_value),
                        _cell(r.bound_satisfied)])
        return buf.getvalue()

    def write(self, out_dir, fmt: str = "csv") -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{self.experiment_id}.{fmt}"
        path.write_text(self.to_csv() if fmt == "csv" else self.to_json())
        return path


def _cell(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(float(v))


def _aggregate(values: np.ndarray):
    # values: (n_reps,) in replication order; fsum fixes the reduction order
    n = values.size
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((values - mean) ** 2) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return mean, se, float(values.min()), float(values.max())


def _metric_theorem(cfg: ExperimentConfig, metric: str) -> int | None:
    # the source condition was imposed for the slope's own target only
    if metric != cfg.target:
        return None
    return cfg.theorem


def _rate_or_none(theorem, r, s):
    try:
        return theory.theorem_rate(theorem, r, s)
    except UnsupportedError:
        return None


def _fit(t, mean, window):
    sel = t > 0
    if window is not None:
        sel &= (t >= window[0]) & (t <= window[1])
    if sel.sum() < 4 or np.any(mean[sel] <= 0):
        return None
    return theory.slope_fit(t[sel], mean[sel])


def run_experiment(cfg: ExperimentConfig, threads: int = 1, backend=None) -> ExperimentRecord:
    """Replicated runs, aggregated per recorded step, with theory attached."""
    setup = resolve_setup(cfg)
    reps = range(cfg.replications)
    rate = _rate_or_none(cfg.theorem, cfg.r, cfg.s)
    rows = []
    if len(cfg.horizons) == 1:
        T = cfg.horizons[0]
        rec = cfg.data["record"]
        record_at = engine.dyadic_grid(T) if rec == "dyadic" else rec
        sched = make_schedule(cfg, setup, T)
        t, pred, est = engine.run_replications(cfg.model, cfg.slope, cfg.process, sched, T, reps,
                                               record_at=record_at, threads=threads, backend=backend)
        values = {"prediction": pred, "estimation": est}
        grid = [(int(tt), j, T) for j, tt in enumerate(t)]
    else:
        # finite-horizon sweep: terminal error for each horizon
        values = {m_: [] for m_ in METRICS}
        for T in cfg.horizons:
            sched = make_schedule(cfg, setup, T)
            _, pred, est = engine.run_replications(cfg.model, cfg.slope, cfg.process, sched, T, reps,
                                                   record_at=[T], threads=threads, backend=backend)
            values["prediction"].append(pred[:, 0])
            values["estimation"].append(est[:, 0])
        values = {k: np.stack(v, axis=1) for k, v in values.items()}
        grid = [(T, j, T) for j, T in enumerate(cfg.horizons)]

    fits = {}
    for metric in METRICS:
        thm = _metric_theorem(cfg, metric)
        mrate = rate if thm is not None else None
        vals = values[metric]
        ts, means = [], []
        for tt, j, T in grid:
            mean, se, lo, hi = _aggregate(vals[:, j])
            bound = None
            if mrate is not None and setup.quantities is not None and tt >= 1:
                bv = float(theory.bound_values(thm, setup.quantities, setup.eta0, [tt], horizon=T)[0])
                bound = None if math.isnan(bv) else bv
            rows.append(Row(cfg.experiment_id, tt, metric, mean, se, vals.shape[0],
                            None if mrate is None else mrate.exponent,
                            None if mrate is None else mrate.log_factor,
                            bound, None if bound is None else bool(mean <= bound), lo, hi))
            ts.append(tt)
            means.append(mean)
        window = cfg.data["fit_window"]
        fits[metric] = _fit(np.array(ts, dtype=float), np.array(means), window)

    precondition = {
        "eta0": setup.eta0,
        "eta0_max": setup.eta0_max,
        "holds": setup.precondition_holds,
        "theorem": cfg.theorem,
        "theta": setup.theta,
        "exponent": setup.exponent,
        "truncation_m": cfg.model.m,
        "tail_corrected": None if setup.quantities is None else setup.quantities.tail_corrected,
    }
    return ExperimentRecord(cfg.experiment_id, cfg.config_hash(), rows, fits, rate, precondition, cfg.data)


def run_oracle(cfg: ExperimentConfig) -> ExperimentRecord:
    """Exact expected errors from the moment recursion, in the same record layout (``n = 0``)."""
    if cfg.process.law != "gaussian" or cfg.process.normalize:
        raise UnsupportedError("the exact oracle supports unnormalized Gaussian coefficients only")
    if len(cfg.horizons) != 1:
        raise UnsupportedError("the oracle runs a single horizon")
    setup = resolve_setup(cfg)
    T = cfg.horizons[0]
    rec = cfg.data["record"]
    sched = make_schedule(cfg, setup, T)
    traj = oracle.oracle_trajectory(cfg.model, cfg.slope, cfg.process.noise_std, sched, T,
                                    record_at=engine.dyadic_grid(T) if rec == "dyadic" else rec)
    rate = _rate_or_none(cfg.theorem, cfg.r, cfg.s)
    rows = []
    for metric, vals in (("prediction", traj.prediction), ("estimation", traj.estimation)):
        thm = _metric_theorem(cfg, metric)
        mrate = rate if thm is not None else None
        for tt, v in zip(traj.t, vals):
            bound = None
            if mrate is not None and setup.quantities is not None and tt >= 1:
                bv = float(theory.bound_values(thm, setup.quantities, setup.eta0, [tt], horizon=T)[0])
                bound = None if math.isnan(bv) else bv
            rows.append(Row(cfg.experiment_id, int(tt), metric, float(v), 0.0, 0,
                            None if mrate is None else mrate.exponent,
                            None if mrate is None else mrate.log_factor,
                            bound, None if bound is None else bool(v <= bound), float(v), float(v)))
    precondition = {"eta0": setup.eta0, "eta0_max": setup.eta0_max, "holds": setup.precondition_holds,
                    "theorem": cfg.theorem, "theta": setup.theta, "exponent": setup.exponent,
                    "truncation_m": cfg.model.m}
    return ExperimentRecord(cfg.experiment_id, cfg.config_hash(), rows, {}, rate, precondition, cfg.data)


# ---------------------------------------------------------------------------
# sweeps


class SweepResult(NamedTuple):
    records: list
    summary: list  # one dict per grid point


def sweep_points(cfg: ExperimentConfig) -> list[dict]:
    axes = cfg.data["sweep"]["axes"] or {}
    if not isinstance(axes, dict):
        raise ConfigError(["sweep.axes must map dotted keys to value lists"])
    keys = list(axes)
    for k in keys:
        if not isinstance(axes[k], list) or not axes[k]:
            raise ConfigError([f"sweep.axes.{k}: expected a non-empty list"])
    return [dict(zip(keys, combo)) for combo in itertools.product(*(axes[k] for k in keys))]


def sweep_cost(cfg: ExperimentConfig) -> float:
    """Coordinate updates the whole sweep performs (replications x steps x m)."""
    total = 0.0
    for point in sweep_points(cfg):
        sub = cfg.with_overrides(**point)
        total += sub.replications * sum(sub.horizons) * sub.model.m
    return total


def sweep(cfg: ExperimentConfig, threads: int = 1, backend=None) -> SweepResult:
    budget = float(cfg.data["sweep"]["budget"])
    cost = sweep_cost(cfg)
    if cost > budget:
        raise ValidationError(f"sweep needs about {cost:.3g} coordinate updates, over the budget of {budget:.3g}")
    records, summary = [], []
    for point in sweep_points(cfg):
        tag = "_".join(f"{k.split('.')[-1]}={v}" for k, v in point.items())
        sub = cfg.with_overrides(**point, experiment_id=f"{cfg.experiment_id}[{tag}]" if tag else cfg.experiment_id)
        rec = run_experiment(sub, threads=threads, backend=backend)
        records.append(rec)
        fit = rec.fits.get(sub.target)
        setup_theta = rec.precondition.get("theta")
        summary.append({
            "experiment_id": rec.experiment_id, **point,
            "r": sub.r, "s": sub.s,
            "theta": setup_theta,
            "theory_exponent": None if rec.rate is None else rec.rate.exponent,
            "fitted_exponent": None if fit is None else fit.slope,
        })
    return SweepResult(records, summary)


def summary_csv(summary: list) -> str:
    if not summary:
        return ""
    keys = list(summary[0])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for row in summary:
        w.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# deterministic verification suites


class Check(NamedTuple):
    suite: str
    name: str
    passed: bool
    slack: float
    detail: str = ""


LEMMA6_NU = (0.5, 1.0, 1.5, 2.0)
LEMMA6_THETA = (0.25, 0.5, 0.6, 0.75)
LEMMA6_ETA0 = (0.1, 1.0)
LEMMAA1_POINTS = (  # (nu, theta) covering every case and sub-branch
    (0.5, 0.75), (1.0, 0.75), (2.0, 0.7),
    (2.0, 0.25), (2.0, 0.5), (2.0, 0.6),
    (0.5, 0.25),
    (0.5, 0.5), (1.0, 0.5),
    (1.0, 0.25),
)


def verify_lemma6(t_max: int = 10 ** 4, backend=None) -> list[Check]:
    out = []
    t = np.arange(1, t_max + 1)
    for nu, th, eta0 in itertools.product(LEMMA6_NU, LEMMA6_THETA, LEMMA6_ETA0):
        sums = theory.stepsize_sums(t_max, eta0, th, nu, backend=backend)
        bound = theory.stepsize_sum_bound(t, eta0, th, nu)
        ratio = sums / bound
        bad = int(np.sum(sums > bound))
        out.append(Check("lemma6", f"sum nu={nu} theta={th} eta0={eta0}", bad == 0, float(1 - ratio.max()),
                         f"{bad} violations, max ratio {ratio.max():.4g}"))
        lb = [theory.stepsize_sum_lower_bound(int(tt), eta0, th, nu) for tt in (1, 10, 100, 1000, t_max)]
        ok = all(c.holds for c in lb)
        out.append(Check("lemma6", f"lower nu={nu} theta={th} eta0={eta0}", ok,
                         float(min(1 - c.exact / c.bound for c in lb))))
    return out


def verify_lemma_a1(exponents=range(1, 13)) -> list[Check]:
    out = []
    for nu, th in LEMMAA1_POINTS:
        worst = math.inf
        bad = 0
        for k in exponents:
            b = 2.0 ** k
            val = theory.lemma_a1_integral(b, th, nu)
            bnd = theory.lemma_a1_bound(b, th, nu)
            worst = min(worst, 1 - val / bnd)
            bad += val > bnd
        case = theory.c0_case(nu, th)
        out.append(Check("lemmaA1", f"case {case} nu={nu} theta={th}", bad == 0, float(worst),
                         f"{bad} violations"))
    return out


THEOREM5_SETS = {
    "[1]": np.array([1.0]),
    "[2]": np.array([2.0]),
    "i^-4": np.arange(1, 101, dtype=float) ** -4,
}


def verify_theorem5(tol: float = 1e-6) -> list[Check]:
    out = []
    for name, eigs in THEOREM5_SETS.items():
        for s in (0.25, 0.5, 0.75):
            res = theory.trace_identity_check(eigs, s)
            out.append(Check("theorem5", f"identity {name} s={s}", res.rel_err < tol, tol - res.rel_err,
                             f"rel_err {res.rel_err:.3g}"))
            lams = np.geomspace(1e-8, 1e4, 61)
            ratio = theory.capacity_ratio(eigs, s, lams).max()
            out.append(Check("theorem5", f"capacity {name} s={s}", ratio <= 1, float(1 - ratio)))
    for s in (0.25, 0.5, 0.75):
        val = theory.rational_integral(s)
        exact = math.pi * s / math.sin(math.pi * s)
        err = abs(val - exact) / exact
        out.append(Check("theorem5", f"rational integral s={s}", err < 1e-10, 1e-10 - err))
    return out


def verify_oracle() -> list[Check]:
    out = []
    model = SpectralModel(EigenDecay.power(1.5, m=5), EigenDecay.power(1.2, m=5))
    slope = build_slope(model, 0.5)
    schedules = {
        "online": engine.Schedule.online(0.8, 0.5),
        "finite": engine.Schedule.finite_horizon(0.9, 50, 0.4),
        "constant": engine.Schedule.online(0.3, 0.0),
    }
    for name, sch in schedules.items():
        d = oracle.decomposition_check(model, slope, 0.5, sch, 50)
        out.append(Check("oracle", f"decomposition {name}", d.rel_gap < 1e-10, 1e-10 - d.rel_gap,
                         f"rel gap {d.rel_gap:.3g}"))
        state = oracle.MomentState.initial(slope)
        mu = model.mu
        shrink = np.ones(model.m)
        worst_psd = math.inf
        worst_mean = 0.0
        for k in range(1, 51):
            eta = sch.step(k)
            state = oracle.moment_recursion_step(state, eta, model, slope, 0.5)
            shrink *= 1 - eta * mu
            M = state.second_moment
            worst_psd = min(worst_psd, np.linalg.eigvalsh(M)[0] / np.trace(M))
            worst_mean = max(worst_mean, np.max(np.abs(state.mean_dev + shrink * slope.coeffs)))
        out.append(Check("oracle", f"psd {name}", worst_psd >= -1e-10, worst_psd + 1e-10))
        out.append(Check("oracle", f"mean {name}", worst_mean <= 1e-12, 1e-12 - worst_mean))
        two_ways = abs(state.prediction_error(model) - float(np.trace(np.diag(model.lam_c) @ state.second_moment)))
        out.append(Check("oracle", f"trace {name}", two_ways <= 1e-12, 1e-12 - two_ways))
    lam = np.arange(1, 51, dtype=float) ** -2
    for alpha in (0.0, 0.5, 1.0, 2.0):
        for eta_c, span in ((1.0, 100), (0.5, 10), (0.1, 1000)):
            etas = np.full(span + 5, eta_c)
            c = oracle.spectral_polynomial_bound_check(lam, etas, 3, 2 + span, alpha)
            out.append(Check("oracle", f"polynomial bound alpha={alpha} eta={eta_c} span={span}", c.holds, c.slack))
    return out


SUITES = {
    "lemma6": verify_lemma6,
    "lemmaA1": verify_lemma_a1,
    "theorem5": verify_theorem5,
    "oracle": verify_oracle,
}


def verify_suite(selector: str = "all") -> list[Check]:
    if selector == "all":
        names = list(SUITES)
    elif selector in SUITES:
        names = [selector]
    else:
        raise ValidationError(f"unknown suite {selector!r}; choose from {sorted(SUITES)} or 'all'")
    out = []
    for name in names:
        try:
            out.extend(SUITES[name]())
        except FuncSGDError as exc:
            out.append(Check(name, "suite", False, math.nan, f"{type(exc).__name__}: {exc}"))
    return out
