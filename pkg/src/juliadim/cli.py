"""Command-line entry point `juliadim`."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .experiments import EXIT_HARD, ScanConfig, _jsonable, fmt_float, read_rows, run_scan, write_outputs


def _print_json(obj) -> None:
    print(json.dumps(_jsonable(obj), sort_keys=True))


def _write_csv(header, rows, path=None) -> None:
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt_float(v) if not isinstance(v, str) else v for v in r])
    finally:
        if path:
            fh.close()


def _complex(text: str) -> complex:
    parts = [float(t) for t in text.split(",")]
    return complex(parts[0], parts[1] if len(parts) > 1 else 0.0)


# ---------------------------------------------------------------------------


def cmd_fixed_points(a):
    from .quadratic import fixed_points

    fp = fixed_points(a.c)
    _print_json({"c": a.c, "p": [fp.p.real, fp.p.imag], "q": [fp.q.real, fp.q.imag]})


def cmd_green(a):
    from .quadratic import green_value

    g = green_value(a.c)
    _print_json({"c": a.c, "green": g.value, "steps": g.steps, "bounded": g.bounded})


def cmd_ce_check(a):
    from .quadratic import ce_margin, critical_orbit

    orb = critical_orbit(a.c, a.depth)
    m = ce_margin(orb, a.omega_prime)
    _print_json({"c": a.c, "depth": a.depth, "omega_prime": a.omega_prime, "margin": m,
                 "passes": bool(m > a.threshold), "threshold": a.threshold})


def cmd_julia_sample(a):
    from .sampler import sample_inverse

    cl = sample_inverse(a.c, a.count, seed=a.seed, burn_in=a.burn_in)
    _write_csv(("re", "im"), zip(cl.points.real, cl.points.imag), a.out)


def cmd_julia_intervals(a):
    from .sampler import interval_cover

    cov = interval_cover(a.c, a.depth)
    _write_csv(("left", "right"), cov.components.tolist(), a.out)


def cmd_beta_profile(a):
    from .beta import beta_profile

    data = np.loadtxt(a.cloud, delimiter=",", skiprows=1, ndmin=2)
    pts = data[:, 0] + 1j * data[:, 1]
    prof = beta_profile(pts, _complex(a.x), a.depth, floor=a.floor)
    _write_csv(("n", "r", "beta", "count"), zip(prof.n, prof.scales, prof.betas, prof.counts), a.out)


def cmd_repeller_build(a):
    from .inducing import build_repeller, to_inventory

    rep = build_repeller(a.c, C1=a.C1)
    inv = to_inventory(rep)
    with open(a.emit, "w") as fh:
        json.dump(_jsonable(inv), fh)
    summary = {k: inv[k] for k in ("c", "V", "U", "K", "depth")}
    summary.update(branches=len(inv["branches"]), complex_branch=inv["complex_branch"] is not None,
                   path=a.emit)
    _print_json(summary)


def cmd_repeller_check(a):
    from .inducing import check_inventory

    with open(a.path) as fh:
        inv = json.load(fh)
    res = check_inventory(inv)
    _print_json({"checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in res],
                 "passed": all(r.passed for r in res)})
    return 0 if all(r.passed for r in res) else 2


def cmd_dim_exterior(a):
    from .pressure import dimension_exterior

    _print_json(dimension_exterior(a.c, tol=a.tol).to_dict())


def cmd_dim_quasicircle(a):
    from .pressure import dimension_quasicircle

    _print_json(dimension_quasicircle(a.c, n=a.depth, tol=a.tol).to_dict())


def cmd_dim_repeller(a):
    from .inducing import build_repeller
    from .pressure import repeller_dimension

    rep = build_repeller(a.c, C1=a.C1, with_complex=not a.real_only)
    _print_json(repeller_dimension(rep, not a.real_only, a.tol).to_dict())


def cmd_dim_moran(a):
    from .pressure import LinearSystem, dimension, moran_oracle

    ratios = [float(r) for r in a.ratios.split(",")]
    out = dimension(LinearSystem(ratios), tol=a.tol).to_dict()
    out["oracle"] = moran_oracle(ratios)
    _print_json(out)


def cmd_stats_sigma(a):
    from .orbit_stats import sigma_ball, typical_orbit

    orb = typical_orbit(a.c, a.orbit_length, seed=a.seed)
    if a.radii:
        radii = [float(r) for r in a.radii.split(",")]
    else:
        radii = np.logspace(-6, math.log10(4.0), 40)
    sig = sigma_ball(orb, radii)
    _write_csv(("r", "mass", "confident"),
               [(r, m, "true" if ok else "false") for r, m, ok in zip(sig.radii, sig.mass, sig.confident)], a.out)


def cmd_stats_bounds(a):
    from .experiments import Job, _bounds

    cfg = ScanConfig(orbit_length=a.orbit_length, bound_C=a.C, bound_kappa=a.kappa, bound_Z=a.Z)
    row = _bounds(Job(0, "bounds", a.c + 2.0, a.seed), cfg)
    d = row["detail"]
    _print_json({"epsilon": row["epsilon"], "beta_norm": d["beta_norm"], "I_val": d["I"], "O_val": d["O"],
                 "bound_formula": row["value"], "bound_hausTop": row["value2"], "bound_mis": d["bound_mis"],
                 "O_lower_bound_only": d["O_lower_bound_only"], "constants": {"C": a.C, "kappa": a.kappa, "Z": a.Z}})


def cmd_scan(a):
    cfg = ScanConfig.load(a.config)
    for k in ("seed", "workers", "format", "output"):
        v = getattr(a, k)
        if v is not None:
            setattr(cfg, k, v)
    cfg.validate()
    rows = run_scan(cfg)
    code = write_outputs(cfg, rows)
    failed = sum(r["status"] != "ok" for r in rows)
    print(f"{len(rows)} rows, {failed} failed -> {cfg.output}", file=sys.stderr)
    return code


def cmd_fit(a):
    from .fitting import fit_loglog

    rows = [r for r in read_rows(a.input) if r["task"] == a.task and r["status"] == "ok"]
    tf = {"identity": lambda v: v, "one-minus": lambda v: 1.0 - v, "minus-one": lambda v: v - 1.0,
          "abs": abs}[a.transform]
    xs = [r[a.x] for r in rows]
    ys = [tf(r[a.y]) for r in rows]
    _print_json(fit_loglog(xs, ys).to_dict())


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="juliadim", description="Hausdorff dimension of quadratic Julia sets.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("fixed-points")
    s.add_argument("--c", type=float, required=True)
    s.set_defaults(func=cmd_fixed_points)

    s = sub.add_parser("green")
    s.add_argument("--c", type=float, required=True)
    s.set_defaults(func=cmd_green)

    s = sub.add_parser("ce-check")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--depth", type=int, default=10_000)
    s.add_argument("--omega-prime", type=float, default=1.0)
    s.add_argument("--threshold", type=float, default=0.3)
    s.set_defaults(func=cmd_ce_check)

    j = sub.add_parser("julia").add_subparsers(dest="sub", required=True)
    s = j.add_parser("sample")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--count", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--burn-in", type=int, default=100)
    s.add_argument("--out")
    s.set_defaults(func=cmd_julia_sample)
    s = j.add_parser("intervals")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_julia_intervals)

    b = sub.add_parser("beta").add_subparsers(dest="sub", required=True)
    s = b.add_parser("profile")
    s.add_argument("--cloud", required=True)
    s.add_argument("--x", required=True, help="base point as re,im")
    s.add_argument("--depth", type=int, default=20)
    s.add_argument("--floor", type=int, default=50)
    s.add_argument("--out")
    s.set_defaults(func=cmd_beta_profile)

    r = sub.add_parser("repeller").add_subparsers(dest="sub", required=True)
    s = r.add_parser("build")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--emit", required=True)
    s.add_argument("--C1", type=float, default=8.0)
    s.set_defaults(func=cmd_repeller_build)
    s = r.add_parser("check")
    s.add_argument("--path", required=True)
    s.set_defaults(func=cmd_repeller_check)

    d = sub.add_parser("dim").add_subparsers(dest="sub", required=True)
    s = d.add_parser("exterior")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_dim_exterior)
    s = d.add_parser("quasicircle")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--depth", type=int, default=14)
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_dim_quasicircle)
    s = d.add_parser("repeller")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--C1", type=float, default=8.0)
    s.add_argument("--real-only", action="store_true")
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_dim_repeller)
    s = d.add_parser("moran")
    s.add_argument("--ratios", required=True)
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_dim_moran)

    st = sub.add_parser("stats").add_subparsers(dest="sub", required=True)
    s = st.add_parser("sigma")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--orbit-length", type=int, default=1_000_000)
    s.add_argument("--radii", default="")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats_sigma)
    s = st.add_parser("bounds")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--orbit-length", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--Z", type=float, default=1.0)
    s.set_defaults(func=cmd_stats_bounds)

    s = sub.add_parser("scan")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--output")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("fit")
    s.add_argument("--input", required=True)
    s.add_argument("--task", required=True)
    s.add_argument("--x", default="epsilon")
    s.add_argument("--y", default="value")
    s.add_argument("--transform", choices=("identity", "one-minus", "minus-one", "abs"), default="identity")
    s.set_defaults(func=cmd_fit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except SystemExit:
        raise
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HARD
    return int(code or 0)


if __name__ == "__main__":
    sys.exit(main())
