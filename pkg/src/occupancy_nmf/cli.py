"""Command-line pipeline: ``nmf synth | ingest | fit | sweep | analyze``.

Each subcommand can run on its own from intermediate files. Every run that
writes to an output directory also writes ``run_manifest.json``; passing it
back with ``--manifest`` replays the run (explicit flags still win).

Exit codes: 0 ok, 2 input or configuration error, 3 numerical failure.
Failures print a JSON document to stderr.
"""

from __future__ import annotations

import argparse
import io as _io
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from .analysis import (
    normalize_components,
    reconstruction_report,
    summarize_components,
    weight_activations,
)
from .exceptions import InputError, NumericalError, OccupancyNMFError
from .ingest import DEDUPE_POLICIES, IngestOptions, dedupe, parse_csv, write_csv
from .nmf import INITS, SOLVERS, NmfConfig, check_data, fit
from .rank import sweep
from .resample import DayPolicy, GapPolicy, embed_days, interpolate

logger = logging.getLogger("occupancy_nmf")

MANIFEST = "run_manifest.json"
# arguments that say where to write or how loudly, not what to compute
_NOT_RECORDED = {"command", "manifest", "out", "verbose", "func"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _add_ingest(p):
    g = p.add_argument_group("ingest")
    g.add_argument("--input", default="-", help="CSV with timestamp,count columns ('-' for stdin)")
    g.add_argument("--timezone", default="UTC", help="IANA zone that defines day boundaries")
    g.add_argument("--dedupe", choices=DEDUPE_POLICIES, default="mean")
    g.add_argument("--assume-utc", action="store_true", help="read timestamps without offset as UTC")
    g.add_argument("--zeros-as-gaps", action="store_true", help="treat zero counts as missing")
    g.add_argument("--site-id", default="site")
    g.add_argument("--step-minutes", type=int, default=10)
    g.add_argument("--min-coverage", type=float, default=0.0)
    g.add_argument("--max-gap-minutes", type=float, default=None)


def _add_nmf(p, with_k=True):
    d = NmfConfig()
    g = p.add_argument_group("factorization")
    if with_k:
        g.add_argument("--k", type=int, default=d.k)
    g.add_argument("--beta", type=int, choices=(0, 1, 2), default=d.beta)
    g.add_argument("--alpha", type=float, default=d.alpha)
    g.add_argument("--rho", type=float, default=d.rho)
    g.add_argument("--solver", choices=SOLVERS, default=d.solver)
    g.add_argument("--init", choices=INITS, default=d.init)
    g.add_argument("--tol", type=float, default=d.tol)
    g.add_argument("--max-iter", type=int, default=d.max_iter)
    g.add_argument("--seed", type=int, default=d.seed)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="nmf", description="Days-as-columns NMF for occupancy counts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    subs = {}

    p = subs["synth"] = sub.add_parser("synth", help="generate a synthetic series")
    p.add_argument("--scenario", default="norlin-like", help="built-in name or scenario JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-fraction", type=float, default=None,
                   help="noise sd as a fraction of peak (built-in scenarios, default 0.02)")
    p.add_argument("--sampling", choices=("jittered", "anchored"), default=None)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=run_synth)

    p = subs["ingest"] = sub.add_parser("ingest", help="resample a series into matrix.csv")
    _add_ingest(p)
    p.set_defaults(func=run_ingest)

    p = subs["fit"] = sub.add_parser("fit", help="factorize and analyze")
    _add_ingest(p)
    p.add_argument("--matrix", default=None, help="start from a matrix.csv instead of --input")
    _add_nmf(p)
    p.add_argument("--plots", action="store_true", help="also write SVG figures")
    p.add_argument("--plot-kmax", type=int, default=8, help="largest k in the MSE-vs-k figure")
    p.set_defaults(func=run_fit)

    p = subs["sweep"] = sub.add_parser("sweep", help="refit over a range of k")
    _add_ingest(p)
    p.add_argument("--matrix", default=None)
    _add_nmf(p, with_k=False)
    p.add_argument("--kmin", type=int, default=1)
    p.add_argument("--kmax", type=int, default=12)
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=run_sweep)

    p = subs["analyze"] = sub.add_parser("analyze", help="analyze a saved factorization")
    p.add_argument("--factorization", default=None, help="directory with W.csv, H.csv, fit.json")
    p.add_argument("--matrix", default=None, help="default: <factorization>/matrix.csv")
    p.set_defaults(func=run_analyze)

    for name, p in subs.items():
        if name != "synth":
            p.add_argument("--out", default="nmf-out", help="output directory")
        p.add_argument("--manifest", default=None, help="replay the arguments of a run_manifest.json")
    return parser, subs


def parse_args(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        doc = fio.read_json(args.manifest)
        if doc.get("command") != args.command:
            raise InputError(
                f"manifest is for {doc.get('command')!r}, not {args.command!r}", path=args.manifest
            )
        subs[args.command].set_defaults(**doc["args"])
        args = parser.parse_args(argv)
    return args


def _record(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_RECORDED}


def _write_manifest(path, args) -> None:
    fio.write_json(path, {"tool": "occupancy-nmf", "version": __version__,
                          "command": args.command, "args": _record(args)})


def _existing(path, what="file") -> Path:
    p = Path(path)
    if not p.exists():
        raise InputError(f"{what} not found: {path}", path=str(path))
    return p.resolve()


# ---------------------------------------------------------------- stages


def _nmf_config(args, k=None) -> NmfConfig:
    return NmfConfig(
        k=args.k if k is None else k, beta=args.beta, alpha=args.alpha, rho=args.rho,
        solver=args.solver, init=args.init, tol=args.tol, max_iter=args.max_iter, seed=args.seed,
    )


def _load_series(args, out: Path):
    if args.input == "-":
        data = sys.stdin.buffer.read()
        # keep a copy so the manifest can point at a replayable file
        copy = out / "input.csv"
        fio.atomic_write(copy, data)
        args.input = str(copy.resolve())
    else:
        args.input = str(_existing(args.input, "input file"))
        data = Path(args.input).read_bytes()
    options = IngestOptions(site_id=args.site_id, timezone=args.timezone,
                            assume_utc=args.assume_utc, zeros_as_gaps=args.zeros_as_gaps)
    try:
        series = parse_csv(_io.BytesIO(data), options)
    except InputError as exc:
        raise InputError(str(exc), path=args.input) from None
    return dedupe(series, args.dedupe)


def _ingest(args, out: Path):
    """Input CSV -> (DataMatrix, flattened grid values). Writes matrix.csv and dropped_days.json."""
    if not args.step_minutes > 0:
        raise InputError(f"--step-minutes must be positive, got {args.step_minutes}")
    if args.max_gap_minutes is not None and not args.max_gap_minutes > 0:
        raise InputError(f"--max-gap-minutes must be positive, got {args.max_gap_minutes}")
    series = _load_series(args, out)
    gap = GapPolicy() if args.max_gap_minutes is None else GapPolicy(max_gap=60.0 * args.max_gap_minutes)
    grid = interpolate(series, step=60 * args.step_minutes, policy=gap)
    dm = embed_days(grid, DayPolicy(min_coverage=args.min_coverage))
    fio.write_matrix(out / "matrix.csv", dm.X, dm.day_labels)
    fio.write_json(out / "dropped_days.json", {
        "dropped_days": list(dm.dropped),
        "rejected_rows": [{"line": r.line, "reason": r.reason} for r in series.rejections],
        "n_days_kept": dm.m,
        "slots_per_day": dm.n,
    })
    print(f"ingest: {len(series)} samples, {dm.m} days kept, {len(dm.dropped)} dropped, "
          f"{series.n_rejected} rows rejected")
    return dm.X, list(dm.day_labels), grid.values.ravel()


def _matrix_source(args, out: Path):
    """(X, day_labels, step_minutes, raw values for plotting)."""
    if args.matrix:
        args.matrix = str(_existing(args.matrix, "matrix file"))
        labels, X = fio.read_matrix(args.matrix)
        X = check_data(X) if X.size else X
        if X.size == 0:
            raise InputError("matrix file has no rows", path=args.matrix)
        if 1440 % X.shape[0]:
            raise InputError(f"{X.shape[0]} rows do not divide a day evenly", path=args.matrix)
        return X, labels, 1440 // X.shape[0], X.T.ravel()
    X, labels, raw = _ingest(args, out)
    return X, labels, args.step_minutes, raw


def _write_analysis(out: Path, X, fact, labels, step_minutes) -> dict:
    fact = normalize_components(fact)
    weighted = weight_activations(fact, step_minutes)
    fio.write_matrix(out / "H_weighted.csv", weighted.Hw, labels)
    report = reconstruction_report(X, fact, labels)
    fio.atomic_write(out / "residuals.csv", fio.csv_text(
        ["day", "residual_l2", "relative_error", "rank"],
        ([d.day, fio.fmt(d.residual_l2), fio.fmt(d.relative_error), d.rank] for d in report.days),
    ))
    summaries = summarize_components(fact, step_minutes)
    components = []
    for s in summaries:
        minute = s.peak_slot * step_minutes
        components.append({
            "index": s.component_index,
            "peak_slot": s.peak_slot,
            "peak_time": f"{minute // 60:02d}:{minute % 60:02d}",
            "active_slots": list(s.active_slots),
            "mean_device_minutes": s.mean_device_minutes,
            "mean_device_hours": s.mean_device_minutes / 60.0,
            "implied_constant_devices": s.implied_constant_devices,
            "flagged_zero": s.component_index in fact.flagged_components,
        })
    fio.write_json(out / "components.json", {
        "step_minutes": step_minutes,
        "mse": report.mse,
        "components": components,
        "top_residual_days": [d.day for d in report.ranked()[:5]],
    })
    for c in components:
        print(f"  component {c['index'] + 1}: peak {c['peak_time']}, "
              f"{c['mean_device_hours']:.1f} device-hours/day "
              f"(~{c['implied_constant_devices']:.1f} constant devices)")
    print("  largest residual days: " + ", ".join(d.day for d in report.ranked()[:3]))
    return {"fact": fact, "weighted": weighted}


def _print_sweep(result) -> None:
    print(f"{'k':>3} {'mse':>14} {'rel_error':>10} {'iters':>6} conv")
    for k, mse, rel, meta in zip(result.ks, result.mse, result.rel_error, result.per_k_fit_meta):
        print(f"{k:>3} {mse:>14.6g} {rel:>10.4g} {str(meta['iterations']):>6} {meta['converged']}")
    if result.suggested_k is None:
        print("suggested k: none (advisory; no clear elbow)")
    else:
        print(f"suggested k: {result.suggested_k} (advisory; choose k yourself)")


def _write_sweep(out: Path, result) -> None:
    rows = [
        [k, fio.fmt(mse), fio.fmt(rel), "" if meta["iterations"] is None else meta["iterations"],
         str(meta["converged"]).lower()]
        for k, mse, rel, meta in zip(result.ks, result.mse, result.rel_error, result.per_k_fit_meta)
    ]
    fio.atomic_write(out / "sweep.csv", fio.csv_text(["k", "mse", "rel_error", "iterations", "converged"], rows))
    fio.write_json(out / "sweep.json", {
        "ks": list(result.ks),
        "mse": list(result.mse),
        "rel_error": list(result.rel_error),
        "per_k": list(result.per_k_fit_meta),
        "suggested_k": result.suggested_k,
        "suggested_k_is_advisory": True,
    })


def run_synth(args) -> int:
    from .synth import SCENARIOS, generate, load_scenario, norlin_like

    if args.scenario in SCENARIOS:
        kwargs = {"noise_fraction": 0.02 if args.noise_fraction is None else args.noise_fraction}
        if args.sampling:
            kwargs["sampling"] = args.sampling
        scenario = norlin_like(**kwargs)
    else:
        if args.noise_fraction is not None:
            raise InputError("--noise-fraction applies to built-in scenarios; set noise_sd in the file")
        args.scenario = str(_existing(args.scenario, "scenario file"))
        scenario = load_scenario(args.scenario)
        if args.sampling:
            scenario = replace(scenario, sampling=args.sampling)
    series = generate(scenario, seed=args.seed)
    if args.out is None:
        write_csv(series, sys.stdout)
        return 0
    buf = _io.StringIO()
    write_csv(series, buf)
    out = Path(args.out)
    fio.atomic_write(out, buf.getvalue())
    # named after the output so it never collides with a stage manifest
    _write_manifest(out.with_name(out.name + "." + MANIFEST), args)
    return 0


def run_ingest(args) -> int:
    out = Path(args.out)
    _ingest(args, out)
    _write_manifest(out / MANIFEST, args)
    return 0


def run_fit(args) -> int:
    config = _nmf_config(args)
    out = Path(args.out)
    X, labels, step_minutes, raw = _matrix_source(args, out)
    if args.matrix:
        fio.write_matrix(out / "matrix.csv", X, labels)
    fact = fit(X, config)
    fio.save_factorization(out, fact, labels, step_minutes)
    print(f"fit: k={fact.k}, {fact.iterations} iterations, converged={fact.converged}, "
          f"objective={fact.objective:.6g}")
    done = _write_analysis(out, X, fact, labels, step_minutes)
    if args.plots:
        from .plots import write_fit_plots

        kmax = min(args.plot_kmax, min(X.shape) - 1)
        result = sweep(X, 1, kmax, config) if kmax >= 1 else None
        write_fit_plots(out, series_values=raw, step_minutes=step_minutes, X=X, day_labels=labels,
                        W=done["fact"].W, Hw=done["weighted"].Hw, sweep=result)
    _write_manifest(out / MANIFEST, args)
    return 0


def run_sweep(args) -> int:
    config = _nmf_config(args, k=1)
    out = Path(args.out)
    X, labels, _, _ = _matrix_source(args, out)
    result = sweep(X, args.kmin, args.kmax, config)
    _write_sweep(out, result)
    _print_sweep(result)
    if args.plots:
        from .plots import plot_sweep

        plot_sweep(out / "mse_vs_k.svg", result.ks, result.mse, result.suggested_k)
    _write_manifest(out / MANIFEST, args)
    return 0


def run_analyze(args) -> int:
    if not args.factorization:
        raise InputError("nmf analyze: --factorization is required")
    args.factorization = str(_existing(args.factorization, "factorization directory"))
    fact, meta = fio.load_factorization(args.factorization)
    matrix = args.matrix or str(Path(args.factorization) / "matrix.csv")
    args.matrix = str(_existing(matrix, "matrix file"))
    labels, X = fio.read_matrix(args.matrix)
    if X.shape != (fact.W.shape[0], fact.H.shape[1]):
        raise InputError(f"matrix is {X.shape}, factorization implies "
                         f"{(fact.W.shape[0], fact.H.shape[1])}", path=args.matrix)
    step_minutes = meta.get("step_minutes") or 1440 // X.shape[0]
    out = Path(args.out)
    _write_analysis(out, X, fact, labels, step_minutes)
    _write_manifest(out / MANIFEST, args)
    return 0


# ---------------------------------------------------------------- entry


def _fail(exc, code: int) -> int:
    err = {"code": code, "type": type(exc).__name__, "message": str(exc)}
    path = getattr(exc, "path", None) or getattr(exc, "filename", None)
    if path is not None:
        err["path"] = str(path)
    iteration = getattr(exc, "iteration", None)
    if iteration is not None:
        err["iteration"] = iteration
    sys.stderr.write(json.dumps({"schema": fio.SCHEMA, "error": err}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        if getattr(args, "input", None) == "-" and not getattr(args, "matrix", None) and sys.stdin.isatty():
            raise InputError("no --input given and stdin is a terminal")
        with np.errstate(all="ignore"):
            return args.func(args)
    except NumericalError as exc:
        return _fail(exc, 3)
    except (OccupancyNMFError, OSError) as exc:
        return _fail(exc, 2)
    except Exception as exc:  # pragma: no cover - last-resort report
        logger.debug("unexpected failure", exc_info=True)
        return _fail(exc, 1)


if __name__ == "__main__":
    sys.exit(main())
