"""Command-line interface.

Subcommands: evolve, ensemble, fidelity, classical, rmt, check, reproduce.
Exit codes: 0 success, 1 validation error, 2 numerical-invariant failure.
"""

import argparse
import json
import os
import sys as _sys

import numpy as np

from . import __version__
from .classical import (classify, correspondence_check, label_from_lyapunov,
                        lyapunov_estimate_batch)
from .dynamics import build_floquet, evolve, fidelity_series
from .errors import NumericalInvariantError, ValidationError
from .experiments import (ENSEMBLE_COLUMNS, RunConfig, TimeSeries, config_from_dict,
                          fibonacci_sphere, fit_gaussian, run_ensemble,
                          run_recurrence_analysis, run_timeseries, summary_json,
                          write_csv_atomic)
from .measures import (ge_extent_identity_residual, haar_baseline,
                       haar_random_state, rmt_average_ge)
from .spin import GcsParams, build_gcs, build_spin_system, expectation

# canned reproduction scenarios; time ranges are repository choices
FIG1_STATES = {
    "chaotic": (3 * np.pi / 5, -np.pi / 10),
    "edge": (np.pi / 2, -np.pi / 10),
    "regular": (np.pi / 2, 0.0),
}
FIG2_PHIS = (-2 * np.pi / 5, -3 * np.pi / 10, -np.pi / 5, -np.pi / 10, 0.0)
FIG2_THETA = 3 * np.pi / 5


def _load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"config file {path} is not valid JSON: {e}")
    return config_from_dict(raw)


def _emit(args, payload: dict):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for key, val in payload.items():
            print(f"{key}: {val}")


def cmd_evolve(args) -> int:
    cfg = _load_config(args.config)
    if args.out:
        cfg = RunConfig(**{**cfg.__dict__, "output_path": args.out})
    series = run_timeseries(cfg, seed=args.seed, include_timestamp=not args.json)
    _emit(args, summary_json(series, cfg.J))
    return 0


def cmd_ensemble(args) -> int:
    cfg = _load_config(args.config)
    if args.out:
        cfg = RunConfig(**{**cfg.__dict__, "output_path": args.out})
    series = run_ensemble(cfg, seed=args.seed, threads=args.threads,
                          include_timestamp=not args.json)
    fit = fit_gaussian(series)
    _emit(args, summary_json(series, cfg.J, fit))
    return 0


def cmd_fidelity(args) -> int:
    cfg = _load_config(args.config)
    if cfg.delta is None:
        raise ValidationError("fidelity subcommand requires config field delta")
    sys_ = build_spin_system(cfg.J)
    from .experiments import initial_state
    psi0 = initial_state(sys_, cfg, args.seed)
    F = fidelity_series(sys_, cfg.k, cfg.delta, psi0, cfg.steps)
    out = args.out or cfg.output_path
    series = TimeSeries(columns=("t", "fidelity"),
                        data={"t": np.arange(cfg.steps + 1), "fidelity": F},
                        metadata={"version": __version__, "seed": args.seed})
    if out:
        write_csv_atomic(out, series, include_timestamp=not args.json)
    _emit(args, {"final_fidelity": float(F[-1]), "min_fidelity": float(F.min())})
    return 0


def cmd_classical(args) -> int:
    points = fibonacci_sphere(args.points)
    S = np.stack([p.n for p in points])
    lams = lyapunov_estimate_batch(S, args.k, args.steps)
    labels = [label_from_lyapunov(l) for l in lams]
    if args.out:
        lines = [f"# version={__version__}", f"# k={args.k}",
                 "x,y,z,lyapunov,label"]
        for s, lam, lab in zip(S, lams, labels):
            lines.append(f"{s[0]:.17g},{s[1]:.17g},{s[2]:.17g},{lam:.17g},{lab}")
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    frac = {lab: labels.count(lab) / len(labels)
            for lab in ("regular", "edge", "chaotic")}
    _emit(args, {"k": args.k, "points": args.points, **{f"fraction_{k}": v
                                                        for k, v in frac.items()}})
    return 0


def cmd_rmt(args) -> int:
    sys_ = build_spin_system(args.j)
    base = haar_baseline(sys_, args.samples, args.seed if args.seed is not None else 0)
    _emit(args, {"J": base.J, "predicted_mean_ge": base.mean_ge,
                 "sample_mean": base.sample_mean,
                 "sample_stderr": base.sample_stderr,
                 "samples": args.samples})
    return 0


def cmd_check(args) -> int:
    """Algebraic-invariant self-test; exits 2 on any failure."""
    failures = []

    def expect(name, ok):
        print(f"[{'ok' if ok else 'FAIL'}] {name}")
        if not ok:
            failures.append(name)

    for J in (0.5, 1, 5, 50):
        s = build_spin_system(J)
        comm = s.Jx @ s.Jy - s.Jy @ s.Jx - 1j * s.Jz
        expect(f"J={J} commutator [Jx,Jy]=iJz",
               np.abs(comm).max() < 1e-10)
        cas = s.Jx @ s.Jx + s.Jy @ s.Jy + s.Jz @ s.Jz - s.casimir * np.eye(s.N)
        expect(f"J={J} Casimir J.J = J(J+1)I", np.abs(cas).max() < 1e-10)
        for A in (s.Jx, s.Jy, s.Jz):
            if np.abs(A - A.conj().T).max() >= 1e-12:
                failures.append(f"J={J} hermiticity")
    s = build_spin_system(50)
    U = build_floquet(s, 3.0)
    expect("J=50 Floquet unitarity",
           np.abs(U.rotation @ U.rotation.conj().T - np.eye(s.N)).max() < 1e-10)
    expect("J=50 rotation maps z-axis onto x-axis",
           np.abs(U.rotation @ s.Jz @ U.rotation.conj().T - s.Jx).max() < 1e-8)
    rng = np.random.default_rng(0)
    for trial in range(5):
        theta, phi = rng.uniform(0.05, np.pi - 0.05), rng.uniform(-np.pi, np.pi)
        p = GcsParams(theta, phi)
        psi = build_gcs(s, p)
        nJ = p.n[0] * s.Jx + p.n[1] * s.Jy + p.n[2] * s.Jz
        expect(f"GCS eigen-equation trial {trial}",
               np.linalg.norm(nJ @ psi - s.J * psi) < 1e-8 * s.J)
        expect(f"GE-extent identity trial {trial}",
               ge_extent_identity_residual(s, psi) < 1e-10)
        expect(f"GE-extent identity haar trial {trial}",
               ge_extent_identity_residual(s, haar_random_state(s.N, trial)) < 1e-10)
    if failures:
        raise NumericalInvariantError(f"self-test failures: {failures}")
    print("all invariants hold")
    return 0


def _reproduce_out(args, name: str) -> str:
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def cmd_reproduce(args) -> int:
    scenario = args.scenario
    seed = args.seed if args.seed is not None else 0
    steps = 300
    if scenario == "fig1":
        summaries = {}
        for name, (theta, phi) in FIG1_STATES.items():
            cfg = RunConfig(J=500, k=3.0, steps=steps,
                            initial={"gcs": {"theta": theta, "phi": phi}},
                            output_path=_reproduce_out(args, f"fig1_{name}.csv"))
            series = run_timeseries(cfg, seed=seed, include_timestamp=not args.json)
            summaries[name] = summary_json(series, cfg.J)
        _emit(args, {name: s["saturation_mean"] for name, s in summaries.items()})
        return 0
    if scenario == "fig1-inset":
        from .experiments import EnsembleConfig
        cfg = RunConfig(J=500, k=12.0, steps=steps,
                        ensemble=EnsembleConfig(count=90, placement="fibonacci-sphere",
                                                seed=seed),
                        output_path=_reproduce_out(args, "fig1_inset_ensemble.csv"))
        series = run_ensemble(cfg, seed=seed, threads=args.threads,
                              include_timestamp=not args.json)
        fit = fit_gaussian(series)
        _emit(args, summary_json(series, cfg.J, fit))
        return 0
    if scenario == "fig2":
        payload = {}
        for i, phi in enumerate(FIG2_PHIS):
            cfg = RunConfig(J=500, k=1.1, steps=steps,
                            initial={"gcs": {"theta": FIG2_THETA, "phi": phi}},
                            output_path=_reproduce_out(args, f"fig2_phi{i}.csv"))
            series = run_timeseries(cfg, seed=seed, include_timestamp=not args.json)
            rep = run_recurrence_analysis(series)
            payload[f"phi{i}"] = {"phi": phi, "max_ge": rep.max_ge,
                                  "matched_fraction": rep.matched_fraction,
                                  "periodic": rep.periodic}
        _emit(args, payload)
        return 0
    raise ValidationError(f"unknown scenario: {scenario!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kickedtop",
                                 description="Quantum kicked top simulator")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output CSV path (or directory for reproduce)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--json", action="store_true",
                       help="machine-readable summary on stdout")

    p = sub.add_parser("evolve", help="single-state time series")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("ensemble", help="ensemble-averaged purity + Gaussian fit")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("fidelity", help="Loschmidt echo series")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("classical", help="sphere-sampled Lyapunov labels")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--steps", type=int, default=1000)
    common(p)
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("rmt", help="Haar baseline report")
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--samples", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_rmt)

    p = sub.add_parser("check", help="algebraic-invariant self-test")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reproduce", help="canned figure-reproduction runs")
    p.add_argument("scenario", choices=["fig1", "fig1-inset", "fig2"])
    common(p)
    p.set_defaults(func=cmd_reproduce)
    return ap


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=_sys.stderr)
        return 1
    except NumericalInvariantError as e:
        print(f"numerical invariant failure: {e}", file=_sys.stderr)
        return 2


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
