"""Command-line entry point: ``kickrec {evolve,reconstruct,fidelity-sweep,oracle-check}``."""
from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import checks
from .config import ConfigError, ExperimentConfig, parse_config
from .dynamics import ReferenceKind, evolve_pair, evolve_rotor
from .grid import AlignmentError, LeakageError
from .output import (RECON_HEADER, STATE_HEADER, Manifest, reconstruction_rows,
                     state_rows, write_csv, write_json)
from .pipeline import (NoiseModel, aligned_normalized, run_reconstruction, setup,
                       sweep_statistics, sweep_task)
from .reconstruct import DivisionFloor, OriginVanishes

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_RECONSTRUCTION = 0, 1, 2, 3

DEFAULT_KICKS = {"evolve": [1, 2, 5], "reconstruct": [1, 2, 5], "fidelity-sweep": [9],
                 "oracle-check": [5]}


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kickrec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("evolve", "reconstruct", "fidelity-sweep", "oracle-check"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML/JSON file with configuration keys")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--method", choices=["self", "holo"])
        p.add_argument("--kicks", type=_int_list, help="comma-separated kick numbers")
        p.add_argument("--events", type=int, help="atoms per measured distribution")
        p.add_argument("--noise", choices=["exact", "events", "delta_w"])
        p.add_argument("--delta-w", type=float, dest="delta_w")
        p.add_argument("--accuracy", type=_float_list, help="comma-separated accuracies a = 1/dW")
        p.add_argument("--realizations", type=int)
        p.add_argument("--jobs", type=int, default=1)
        if name == "reconstruct":
            p.add_argument("--save-histograms", action="store_true",
                           help="write every sampled histogram as CSV")
    return parser


def load_config(args) -> ExperimentConfig:
    cfg = parse_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        "master_seed": args.seed, "output_dir": args.out, "method": args.method,
        "kicks": args.kicks, "events": args.events, "noise": args.noise,
        "delta_w": args.delta_w, "accuracy": args.accuracy, "realizations": args.realizations,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    cfg = replace(cfg, **overrides)
    if cfg.kicks is None:
        cfg = replace(cfg, kicks=list(DEFAULT_KICKS[args.command]))
    return cfg


def cmd_evolve(cfg: ExperimentConfig, args) -> int:
    man = Manifest(cfg.output_dir, "evolve", cfg)
    t = time.perf_counter()
    grid, params, phi0 = setup(cfg)
    n_max = max(cfg.kicks, default=0)
    states = [phi0] + evolve_rotor(phi0, params, n_max)
    man.time("evolve", time.perf_counter() - t)
    for n in cfg.kicks:
        write_csv(man.path(f"state_N{n}.csv"), STATE_HEADER, state_rows(states[n]))
    write_csv(man.path("distribution.csv"), ["rho"] + [f"N{n}" for n in cfg.kicks],
              ([repr(float(r))] + [repr(float(states[n].density[j])) for n in cfg.kicks]
               for j, r in enumerate(grid.rho)))
    man.write()
    print(f"wrote {len(man.data['files'])} files to {cfg.output_dir}")
    return EXIT_OK


def cmd_reconstruct(cfg: ExperimentConfig, args) -> int:
    man = Manifest(cfg.output_dir, "reconstruct", cfg)
    noise = NoiseModel.from_config(cfg)
    method = ReferenceKind(cfg.method)
    status = EXIT_OK
    for n in cfg.kicks:
        t = time.perf_counter()
        try:
            res = run_reconstruction(cfg, method, n, noise,
                                     keep_histograms=getattr(args, "save_histograms", False))
        except (OriginVanishes, DivisionFloor) as exc:
            print(f"N={n}: reconstruction failed: {exc}", file=sys.stderr)
            status = EXIT_RECONSTRUCTION
            continue
        man.time(f"N{n}", time.perf_counter() - t)
        man.data["seeds"].append({"N": n, "seed_prefix": res.rec.meta["seed_prefix"]})
        stem = f"{method.value}_N{n}"
        rec_amps = aligned_normalized(res.rec, res.exact)
        write_csv(man.path(f"reconstruction_{stem}.csv"), RECON_HEADER,
                  reconstruction_rows(res.rec.grid, rec_amps, res.exact.amps, res.rec.valid_mask))
        meta = {k: v for k, v in res.rec.meta.items() if k != "chosen_shift_bins"}
        write_json(man.path(f"report_{stem}.json"), {
            **res.report.to_dict(), "method": method.value, "num_kicks": n,
            "noise": noise.kind, "events": noise.events if noise.kind == "events" else None,
            "delta_w": noise.delta_w if noise.kind == "delta_w" else None,
            "budgets": res.budget, "shifts_p0": res.shifts,
            "seeds": {"master_seed": cfg.master_seed, "seed_prefix": res.rec.meta["seed_prefix"]},
            "params": {"K": cfg.K, "kbar": cfg.kbar, "sigma": cfg.sigma},
            "metadata": meta,
        })
        for k, h in enumerate(res.histograms):
            name = f"hist_{stem}_{k:03d}_{h.meta['distribution']}.csv"
            man.path(name).write_text(h.to_csv())
        if not res.rec.valid_mask.any():
            status = EXIT_RECONSTRUCTION
        print(f"N={n} {method.value} fidelity={res.report.fidelity:.12f}")
    man.write("ok" if status == EXIT_OK else "reconstruction-failure")
    return status


def sweep_checks(table) -> list[tuple[str, bool, str]]:
    """Trend checks over rows (method, a, dW, mean, std, sem, n)."""
    out = []
    by_method = {}
    for row in table:
        by_method.setdefault(row[0], []).append(row)
    for method, rows in by_method.items():
        exact = [r for r in rows if r[2] == 0]
        if exact:
            out.append((f"{method}: exact limit >= 1-1e-10", exact[0][3] >= 1 - 1e-10,
                        f"mean={exact[0][3]:.12f}"))
        noisy = sorted([r for r in rows if r[2] > 0], key=lambda r: r[1])
        mono = all(b[3] >= a[3] - np.hypot(a[5], b[5]) for a, b in zip(noisy, noisy[1:]))
        out.append((f"{method}: nondecreasing in a", mono,
                     " ".join(f"{r[3]:.6f}" for r in noisy)))
    if {"holo", "self"} <= set(by_method):
        holo = {r[1]: r for r in by_method["holo"]}
        worst = np.inf
        ok = True
        for r in by_method["self"]:
            h = holo.get(r[1])
            if h is None or r[2] == 0:
                continue
            margin = h[3] - r[3] + np.hypot(h[5], r[5])
            worst = min(worst, margin)
            ok &= margin >= 0
        out.append(("holo >= self - pooled SE", bool(ok), f"min margin={worst:.3e}"))
    return out


def cmd_fidelity_sweep(cfg: ExperimentConfig, args) -> int:
    man = Manifest(cfg.output_dir, "fidelity-sweep", cfg)
    methods = [cfg.method] if args.method else ["holo", "self"]
    grid, params, phi0 = setup(cfg)
    settings = [(np.inf, 0.0)] + [(a, 1.0 / a) for a in sorted(cfg.accuracy)]
    results = {}
    for n in cfg.kicks:
        tasks, keys = [], []
        for m in methods:
            state = evolve_pair(phi0, params, ReferenceKind(m), n)
            prepared = (grid, params, phi0, state)
            for a, dw in settings:
                reps = 1 if dw == 0 else cfg.realizations
                for r in range(reps):
                    tasks.append((cfg, m, n, dw, r, prepared))
                    keys.append((n, m, a, dw))
        t = time.perf_counter()
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                fids = list(pool.map(sweep_task, tasks, chunksize=4))
        else:
            fids = [sweep_task(task) for task in tasks]
        man.time(f"N{n}", time.perf_counter() - t)
        for key, f in zip(keys, fids):
            results.setdefault(key, []).append(f)
    man.data["seeds"] = {"master_seed": cfg.master_seed,
                         "scheme": "(master_seed, realization, method_code, setting)"}
    rows = []
    for (n, m, a, dw), fids in results.items():
        mean, std, sem = sweep_statistics(fids)
        rows.append((n, m, a, dw, mean, std, sem, len(fids)))
    write_csv(man.path("sweep.csv"),
              ["num_kicks", "method", "accuracy", "delta_w", "mean_fidelity", "std_fidelity",
               "sem_fidelity", "n_realizations"],
              ([n, m, repr(float(a)), repr(float(dw)), repr(mean), repr(std), repr(sem), k]
               for n, m, a, dw, mean, std, sem, k in rows))
    all_ok = True
    summary = []
    for n in cfg.kicks:
        table = [r[1:] for r in rows if r[0] == n]
        for name, ok, detail in sweep_checks(table):
            all_ok &= ok
            summary.append({"num_kicks": n, "check": name, "passed": bool(ok), "detail": detail})
            print(f"{'PASS' if ok else 'FAIL'}  N={n} {name}  {detail}")
    write_json(man.path("sweep_checks.json"), summary)
    man.write("ok" if all_ok else "check-failure")
    return EXIT_OK if all_ok else EXIT_INVARIANT


def cmd_oracle_check(cfg: ExperimentConfig, args) -> int:
    man = Manifest(cfg.output_dir, "oracle-check", cfg)
    results = checks.run_all(cfg)
    for r in results:
        print(r.line())
    write_json(man.path("oracle_report.json"), [
        {"check": r.name, "error": r.error if np.isfinite(r.error) else None,
         "tolerance": r.tolerance, "passed": r.passed, "detail": r.detail} for r in results])
    ok = all(r.passed for r in results)
    man.write("ok" if ok else "check-failure")
    return EXIT_OK if ok else EXIT_INVARIANT


COMMANDS = {"evolve": cmd_evolve, "reconstruct": cmd_reconstruct,
            "fidelity-sweep": cmd_fidelity_sweep, "oracle-check": cmd_oracle_check}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](cfg, args)
    except AlignmentError as exc:
        print(f"grid error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LeakageError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
