"""Parameter scans: configuration, per-row execution, output and manifest."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import platform
import re
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

TASKS = ("exterior-dim", "quasicircle-dim", "repeller-dim", "beta", "sigma", "bounds")
COLUMNS = ("index", "task", "c", "epsilon", "value", "lower", "upper", "value2", "lower2", "upper2",
           "status", "detail")
ENV_PREFIX = "JULIADIM_"

EXIT_OK, EXIT_HARD, EXIT_PARTIAL = 0, 1, 2


def parse_grid(text: str) -> list[float]:
    """'logspace(a, b, n)' (endpoints given as values) or a comma list."""
    text = text.strip()
    if not text:
        return []
    m = re.fullmatch(r"logspace\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)", text)
    if m:
        a, b, n = float(m.group(1)), float(m.group(2)), int(m.group(3))
        if a <= 0 or b <= 0 or n < 1:
            raise ValueError(f"bad logspace grid {text!r}")
        return [float(x) for x in np.logspace(math.log10(a), math.log10(b), n)]
    return [float(x) for x in text.split(",") if x.strip()]


@dataclass
class ScanConfig:
    """Scan description. Each task family reads its own grid: the exterior
    rows use c = -2 - eps, the tip rows (repeller, beta, sigma, bounds)
    use c = -2 + eps and the quasicircle rows take c directly."""

    tasks: list[str] = field(default_factory=list)
    exterior_eps: str = "logspace(1e-4, 1e-1, 12)"
    tip_eps: str = "1e-2, 3e-3, 1e-3, 3e-4"
    quasicircle_c: str = "0.05, -0.05, 0.1, -0.1, 0.15, -0.15, 0.2, -0.2"
    seed: int = 0
    workers: int = 1
    tol: float = 1e-10
    exterior_n_lo: int = 8
    exterior_n_hi: int = 16
    quasicircle_depth: int = 14
    repeller_C1: float = 8.0
    beta_count: int = 200_000
    beta_depth: int = 20
    orbit_length: int = 1_000_000
    sigma_r_max: float = 0.1
    R_prime: float = 0.0
    bound_C: float = 1.0
    bound_kappa: float = 1.0
    bound_Z: float = 1.0
    output: str = "results.csv"
    format: str = "csv"

    SECTIONS = {
        "scan": ("tasks", "seed", "workers", "tol"),
        "grid": ("exterior_eps", "tip_eps", "quasicircle_c"),
        "budgets": ("exterior_n_lo", "exterior_n_hi", "quasicircle_depth", "repeller_C1", "beta_count",
                    "beta_depth", "orbit_length", "sigma_r_max", "R_prime"),
        "constants": ("bound_C", "bound_kappa", "bound_Z"),
        "output": ("output", "format"),
    }

    def validate(self) -> None:
        bad = [t for t in self.tasks if t not in TASKS]
        if bad:
            raise ValueError(f"unknown tasks {bad}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        for name in ("workers", "exterior_n_hi", "quasicircle_depth", "beta_count", "beta_depth", "orbit_length"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.exterior_n_lo < self.exterior_n_hi:
            raise ValueError("need 0 <= exterior_n_lo < exterior_n_hi")
        grids = {"exterior-dim": self.exterior_eps, "quasicircle-dim": self.quasicircle_c}
        for t in self.tasks:
            if not parse_grid(grids.get(t, self.tip_eps)):
                raise ValueError(f"empty grid for task {t}")

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str  # keys are case-sensitive field names
        for sec, keys in self.SECTIONS.items():
            cp[sec] = {k: _fmt_value(getattr(self, k)) for k in keys}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str, env: dict | None = None) -> "ScanConfig":
        """Parse the sectioned key = value form. Environment variables named
        JULIADIM_<SECTION>_<KEY> override file values."""
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str  # keys are case-sensitive field names
        cp.read_string(text)
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        known = {k for keys in cls.SECTIONS.values() for k in keys}
        for sec in cp.sections():
            if sec not in cls.SECTIONS:
                raise ValueError(f"unknown section [{sec}]")
            for k in cp[sec]:
                if k not in cls.SECTIONS[sec]:
                    raise ValueError(f"unknown key {k!r} in [{sec}]")
        env = os.environ if env is None else env
        for sec, keys in cls.SECTIONS.items():
            for k in keys:
                raw = env.get(f"{ENV_PREFIX}{sec}_{k}".upper())
                if raw is None and cp.has_option(sec, k):
                    raw = cp.get(sec, k)
                if raw is not None:
                    kw[k] = _parse_value(raw, types[k])
        assert set(kw) <= known
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str, env: dict | None = None) -> "ScanConfig":
        with open(path) as fh:
            return cls.from_text(fh.read(), env)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _fmt_value(v) -> str:
    if isinstance(v, list):
        return ", ".join(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(raw: str, typ):
    typ = typ if isinstance(typ, str) else getattr(typ, "__name__", str(typ))
    raw = raw.strip()
    if typ.startswith("list"):
        return [t.strip() for t in raw.split(",") if t.strip()]
    if typ == "int":
        return int(raw)
    if typ == "float":
        return float(raw)
    return raw


# ---------------------------------------------------------------------------
# Rows


@dataclass(frozen=True)
class Job:
    index: int
    task: str
    x: float
    seed: int


def _row_seed(root: int, task: str, x: float) -> int:
    """Seed owned by one (task, parameter) pair, so adding or removing grid
    points leaves the other rows untouched."""
    bits = int(np.float64(x).view(np.uint64))
    ss = np.random.SeedSequence([int(root), TASKS.index(task), bits & 0xFFFFFFFF, bits >> 32])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def plan(cfg: ScanConfig) -> list[Job]:
    """Rows in a fixed order: tasks in config order, grid values in order."""
    jobs = []
    for task in cfg.tasks:
        grid = {"exterior-dim": cfg.exterior_eps, "quasicircle-dim": cfg.quasicircle_c}.get(task, cfg.tip_eps)
        for x in parse_grid(grid):
            jobs.append(Job(len(jobs), task, x, _row_seed(cfg.seed, task, x)))
    return jobs


def _row(job: Job, **vals) -> dict:
    row = {k: None for k in COLUMNS}
    row.update(index=job.index, task=job.task, status="ok", detail={})
    row.update(vals)
    return row


def _tip_rp(cfg: ScanConfig, c: float) -> float:
    if cfg.R_prime > 0:
        return cfg.R_prime
    from .quadratic import fixed_points

    U = fixed_points(c).U
    return (U[1] - U[0]) / 8.0


def run_job(job: Job, cfg: ScanConfig) -> dict:
    """One row; failures are caught and reported on the row."""
    try:
        return _RUNNERS[job.task](job, cfg)
    except Exception as exc:  # row isolation: report and carry on
        return _row(job, status="error", detail={"error": f"{type(exc).__name__}: {exc}",
                                                 "trace": traceback.format_exc(limit=2)})


def _exterior(job, cfg):
    from .pressure import dimension_exterior

    c = -2.0 - job.x
    d = dimension_exterior(c, tol=cfg.tol, n_lo=cfg.exterior_n_lo, n_hi=cfg.exterior_n_hi)
    return _row(job, c=c, epsilon=job.x, value=d.value, lower=d.bracket[0], upper=d.bracket[1],
                value2=d.extra["harmonic_lower"], detail={"method": d.method, "depth": d.depth})


def _quasicircle(job, cfg):
    from .pressure import dimension_quasicircle

    c = job.x
    d = dimension_quasicircle(c, n=cfg.quasicircle_depth, tol=min(cfg.tol, 1e-12))
    coef = (d.value - 1.0) / (c * c) if c != 0 else None
    return _row(job, c=c, epsilon=abs(c), value=d.value, lower=d.bracket[0], upper=d.bracket[1], value2=coef,
                detail={"method": d.method, "depth": d.depth})


def _repeller(job, cfg):
    from .inducing import build_repeller
    from .pressure import repeller_dimension

    c = -2.0 + job.x
    rep = build_repeller(c, C1=cfg.repeller_C1)
    dr = repeller_dimension(rep, False, cfg.tol)
    df = repeller_dimension(rep, True, cfg.tol)
    diag = {k: rep.diagnostics[k] for k in ("deficit_ratio", "min_inf_deriv", "W_over_sqrt_eps", "return_time",
                                            "n_prefixes", "n_suffixes")}
    diag["depth"] = rep.depth
    return _row(job, c=c, epsilon=job.x, value=dr.value, lower=dr.bracket[0], upper=dr.bracket[1],
                value2=df.value, lower2=df.bracket[0], upper2=df.bracket[1], detail=diag)


def _beta(job, cfg):
    from .beta import beta_profile, good_scale_density, scaling_violations, top_scale_beta
    from .sampler import sample_inverse

    c = -2.0 + job.x
    cloud = sample_inverse(c, cfg.beta_count, seed=job.seed)
    top = top_scale_beta(cloud)
    prof = beta_profile(cloud, 0j, cfg.beta_depth)
    good = good_scale_density(prof, min(1.0, 2.0 * math.sqrt(job.x)))
    return _row(job, c=c, epsilon=job.x, value=top.beta, value2=good,
                detail={"scales": len(prof.scales), "violations": len(scaling_violations(prof))})


def _sigma(job, cfg):
    from .orbit_stats import sigma_ball, sigma_exponent, typical_orbit

    c = -2.0 + job.x
    orb = typical_orbit(c, cfg.orbit_length, seed=job.seed)
    sig = sigma_ball(orb, np.logspace(math.log10(job.x) - 2, math.log10(4.0), 60))
    fit = sigma_exponent(sig, job.x, cfg.sigma_r_max)
    return _row(job, c=c, epsilon=job.x, value=fit.slope, value2=fit.r_squared,
                detail={"n_points": fit.n_points, "restarts": orb.restarts})


def _bounds(job, cfg):
    from .beta import top_scale_beta
    from .orbit_stats import I_integral, O_integral, sigma_ball, typical_orbit, upper_bound_report
    from .sampler import sample_inverse

    eps = job.x
    c = -2.0 + eps
    Rp = _tip_rp(cfg, c)
    orb = typical_orbit(c, cfg.orbit_length, seed=job.seed)
    sig = sigma_ball(orb, np.logspace(math.log10(eps) - 3, math.log10(4.0), 120))
    O = O_integral(sig, eps)
    I = I_integral(sig, eps, Rp)
    bn = top_scale_beta(sample_inverse(c, min(cfg.beta_count, 50_000), seed=job.seed)).beta
    rep = upper_bound_report(eps, I.value, O.value, bn, C=cfg.bound_C, kappa=cfg.bound_kappa, Z=cfg.bound_Z)
    return _row(job, c=c, epsilon=eps, value=rep.bound_formula, value2=rep.bound_hausTop,
                detail={"bound_mis": rep.bound_mis, "I": I.value, "O": O.value, "O_lower_bound_only": O.lower_bound_only,
                        "I_dyadic": I.detail["dyadic"], "beta_norm": bn, "R_prime": Rp})


_RUNNERS = {"exterior-dim": _exterior, "quasicircle-dim": _quasicircle, "repeller-dim": _repeller,
            "beta": _beta, "sigma": _sigma, "bounds": _bounds}


def _run_pair(args):
    return run_job(*args)


def run_scan(cfg: ScanConfig) -> list[dict]:
    """All rows, ordered by grid index whatever the completion order."""
    cfg.validate()
    jobs = plan(cfg)
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            rows = list(ex.map(_run_pair, [(j, cfg) for j in jobs]))
    else:
        rows = [run_job(j, cfg) for j in jobs]
    return sorted(rows, key=lambda r: r["index"])


# ---------------------------------------------------------------------------
# Output


def fmt_float(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(format(float(v), ".17g"))
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(rows: list[dict], fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([_jsonable(r) for r in rows], sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        out = []
        for k in COLUMNS:
            v = r.get(k)
            if k == "detail":
                detail = {dk: dv for dk, dv in (v or {}).items() if dk != "trace"}
                out.append(json.dumps(_jsonable(detail), sort_keys=True))
            elif k in ("task", "status"):
                out.append(v)
            else:
                out.append(fmt_float(v))
        w.writerow(out)
    return buf.getvalue()


def emit(rows: list[dict], path: str, fmt: str = "csv") -> None:
    text = render(rows, fmt)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise SystemExit(f"cannot write {path}: {exc}") from exc


def read_rows(path: str) -> list[dict]:
    """Parse an emitted CSV or JSON table back into rows with float columns."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        return json.loads(text)
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in r.items():
            if k in ("task", "status"):
                row[k] = v
            elif k == "detail":
                row[k] = json.loads(v) if v else {}
            elif k == "index":
                row[k] = int(v)
            else:
                row[k] = float(v) if v != "" else None
        rows.append(row)
    return rows


def manifest(cfg: ScanConfig, rows: list[dict], path: str) -> dict:
    from . import __version__

    failed = [r["index"] for r in rows if r["status"] != "ok"]
    return {
        "results": os.path.basename(path),
        "config": cfg.as_dict(),
        "config_text": cfg.to_text(),
        "rows": len(rows),
        "failed_rows": failed,
        "exit_code": exit_code(rows),
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def exit_code(rows: list[dict]) -> int:
    return EXIT_PARTIAL if any(r["status"] != "ok" for r in rows) else EXIT_OK


def write_outputs(cfg: ScanConfig, rows: list[dict]) -> int:
    """Results file plus <results>.manifest.json beside it; returns the exit code.

    If the results file cannot be written, the rows go to a partial file in
    the working directory and the manifest records the failure."""
    man = manifest(cfg, rows, cfg.output)
    try:
        emit(rows, cfg.output, cfg.format)
        target = cfg.output
    except SystemExit as exc:
        target = "partial-" + os.path.basename(cfg.output or "results")
        man.update(results=os.path.basename(target), exit_code=EXIT_HARD, io_error=str(exc))
        with open(target, "w") as fh:
            fh.write(render(rows, cfg.format))
        with open(target + ".manifest.json", "w") as fh:
            json.dump(_jsonable(man), fh, sort_keys=True, indent=1)
        raise
    with open(target + ".manifest.json", "w") as fh:
        json.dump(_jsonable(man), fh, sort_keys=True, indent=1)
    return man["exit_code"]
