"""Command-line interface: reproducible searches, constructions, and reports.

Primary outputs (graph6, report JSON, CSV) are byte-identical across runs
with the same flags and seed; wall-clock metadata goes to a sidecar file.
Exit codes: 0 success, 1 usage error, 2 input format error, 3 numerical
failure.

Tolerance defaults can be overridden with environment variables (all
optional): KURAMOTO_PATTERNS_RESIDUAL_TOL, _EIG_ZERO, _EIG_TOL,
_CRITICAL_BAND, _SYNC_TOL, _DEDUP_ENERGY_TOL, _T_MAX.
"""

from __future__ import annotations

import csv
import json
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import analytic, dynamics
from .continuation import CorrectorError, Homotopy, trace_branch
from .dynamics import (
    FixedPointReport,
    RefinementDivergedError,
    SingularJacobianError,
    classify,
)
from .graphs import (
    CubicGraph,
    Graph6Error,
    NotCubicError,
    double_ring,
    encode_graph6,
    high_energy_e,
    high_energy_f,
    moebius_ladder,
    parse_graph6,
    patternless_chain,
    read_graph6_file,
    twisted_ring,
    validate_cubic,
)
from .search import (
    GraphReport,
    SearchConfig,
    aggregate,
    cluster_and_fit,
    load_report,
    save_report,
    search_graph,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_ENV_PREFIX = "KURAMOTO_PATTERNS_"


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(_ENV_PREFIX + name)
    return float(raw) if raw else default


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _classify_kwargs() -> dict:
    return {
        "residual_tol": _env_float("RESIDUAL_TOL", dynamics.RESIDUAL_TOL),
        "eig_zero": _env_float("EIG_ZERO", dynamics.EIG_ZERO),
        "eig_tol": _env_float("EIG_TOL", dynamics.EIG_TOL),
        "critical_band": _env_float("CRITICAL_BAND", dynamics.CRITICAL_BAND),
        "sync_tol": _env_float("SYNC_TOL", dynamics.SYNC_TOL),
    }


@click.group()
@click.option("--seed", type=int, default=20260809, show_default=True,
              help="Master seed for all randomized subcommands.")
@click.option("--threads", type=int, default=0, show_default=True,
              help="Compute threads; 0 keeps the runtime default.")
@click.pass_context
def cli(ctx: click.Context, seed: int, threads: int) -> None:
    """Phase-locked pattern toolkit for cubic graphs."""
    if threads > 0:
        import numba

        numba.set_num_threads(threads)
    ctx.obj = {"seed": seed, "threads": threads}


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ksamp", type=int, default=None, help="Trials per graph (default: by size).")
@click.option("--seed", type=int, default=None, help="Override the global master seed.")
@click.option("--limit", type=int, default=None, help="Only search the first M records.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_context
def search(ctx, input_path, ksamp, seed, limit, out_dir):
    """Monte Carlo pattern search over a graph6 file."""
    master_seed = seed if seed is not None else ctx.obj["seed"]
    cfg = SearchConfig(
        k_samp=ksamp,
        master_seed=master_seed,
        residual_tol=_env_float("RESIDUAL_TOL", 1e-5),
        dedup_energy_tol=_env_float("DEDUP_ENERGY_TOL", 1e-6),
        t_max=_env_float("T_MAX", 2000.0),
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    reports: list[GraphReport] = []
    skipped_non_cubic = 0
    for idx, g in enumerate(read_graph6_file(input_path), start=1):
        if limit is not None and idx > limit:
            break
        check = validate_cubic(g)
        if not check.ok:
            click.echo(f"warning: skipping non-cubic record {g.id}: {check.describe()}",
                       err=True)
            skipped_non_cubic += 1
            continue
        report = search_graph(CubicGraph.from_graph(g), cfg)
        reports.append(report)
        save_report(report, out / f"report_{idx:05d}.json")
    fit = cluster_and_fit(reports)
    _write_csv(
        out / "aggregate.csv",
        ["graph_id", "pattern_idx", "energy", "basin_fraction", "basin_stderr",
         "spectral_gap", "n_long_links", "max_winding", "cluster_id", "fit"],
        [[r["graph_id"], r["pattern_idx"], r["energy"], r["basin_fraction"],
          r["basin_stderr"], r["spectral_gap"], r["n_long_links"],
          r["max_winding"], r["cluster_id"], r["fit"]] for r in fit.rows],
    )
    meta = {
        "input": str(input_path),
        "graphs_searched": len(reports),
        "skipped_non_cubic": skipped_non_cubic,
        "k_samp": ksamp,
        "master_seed": master_seed,
        "threads": ctx.obj["threads"],
        "duration_s": time.time() - t0,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=1))
    click.echo(f"searched {len(reports)} graphs -> {out}")


_FAMILIES = {
    "double-ring": lambda n: (double_ring(n), analytic.double_ring_phases(n)),
    "moebius": lambda n: (moebius_ladder(n), analytic.moebius_phases(n)),
    "twisted": lambda n: (twisted_ring(n), analytic.twisted_phases(n // 2)),
    "high-e": lambda n: high_energy_e(n),
    "high-f": lambda n: _high_f_by_size(n),
    "chain": lambda n: (patternless_chain(n), None),
}


def _high_f_by_size(n: int):
    if n % 10:
        raise ValueError(f"high-f needs n = 10m, got {n}")
    return high_energy_f(n // 10)


@cli.command()
@click.option("--family", required=True, type=click.Choice(sorted(_FAMILIES)))
@click.option("--n", "size", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--pattern", "pattern_path", type=click.Path(dir_okay=False),
              help="Also write the family's exact equilibrium as Pattern JSON.")
def construct(family, size, out_path, pattern_path):
    """Build a named graph family (and optionally its analytic equilibrium)."""
    g, theta = _FAMILIES[family](size)
    Path(out_path).write_bytes(encode_graph6(g) + b"\n")
    click.echo(f"wrote {family} n={size} -> {out_path}")
    if pattern_path:
        if theta is None:
            raise click.UsageError(f"family {family!r} carries no analytic equilibrium")
        report = classify(g, theta, **_classify_kwargs())
        if report.residual > 1e-12:
            raise CorrectorError(
                f"analytic equilibrium residual {report.residual:.3g} above 1e-12"
            )
        Path(pattern_path).write_text(json.dumps(report.to_dict(), indent=1))
        click.echo(f"wrote equilibrium (E={report.energy:.6f}) -> {pattern_path}")


def _load_single_graph(path: str) -> CubicGraph:
    graphs = list(read_graph6_file(path))
    if not graphs:
        raise Graph6Error(f"{path}: no graph6 records")
    g = graphs[0]
    check = validate_cubic(g)
    if not check.ok:
        raise NotCubicError(f"{path}: {check.describe()}")
    return CubicGraph.from_graph(g)


@cli.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pattern", "pattern_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def verify(graph_path, pattern_path, out_path):
    """Recompute a Pattern JSON's claims on a graph and report pass/fail."""
    g = _load_single_graph(graph_path)
    claimed = FixedPointReport.from_dict(json.loads(Path(pattern_path).read_text()))
    if claimed.theta.size != g.n:
        raise Graph6Error(
            f"dimension mismatch: pattern has {claimed.theta.size} phases, graph has {g.n}"
        )
    kwargs = _classify_kwargs()
    residual = float(np.linalg.norm(dynamics.field(g, claimed.theta)))
    checks = {"residual_below_tol": residual <= kwargs["residual_tol"]}
    if checks["residual_below_tol"]:
        actual = classify(g, claimed.theta, **kwargs)
        checks.update(
            {
                "energy_matches": abs(actual.energy - claimed.energy) <= 1e-8,
                "classification_matches": actual.classification == claimed.classification,
                "spectral_gap_matches": abs(actual.spectral_gap - claimed.spectral_gap) <= 1e-6,
                "links_match": tuple((l.u, l.v, l.kind) for l in actual.links)
                == tuple((l.u, l.v, l.kind) for l in claimed.links),
                "windings_match": actual.windings == claimed.windings,
            }
        )
    verdict = {
        "pass": all(checks.values()),
        "residual": residual,
        "checks": checks,
    }
    text = json.dumps(verdict, indent=1)
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text)
    if not verdict["pass"]:
        sys.exit(EXIT_NUMERICAL)


@cli.command()
@click.option("--reports", "reports_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None,
              help="Also render the count curves to this image file.")
def stats(reports_dir, out_path, plot_path):
    """Pattern-count histogram table from a directory of report JSONs."""
    reports = [load_report(p) for p in sorted(Path(reports_dir).glob("report_*.json"))]
    rows = aggregate(reports)
    kmax = max((len(r.counts) - 1 for r in rows), default=0)
    header = (
        ["n", "total"]
        + [f"count_{k}" for k in range(kmax + 1)]
        + [f"fraction_{k}" for k in range(kmax + 1)]
        + ["fraction_with_patterns"]
    )
    table = []
    for r in rows:
        counts = list(r.counts) + [0] * (kmax + 1 - len(r.counts))
        fracs = [c / r.total for c in counts]
        table.append([r.n, r.total] + counts + fracs + [r.fraction_with_patterns])
    _write_csv(Path(out_path), header, table)
    click.echo(f"wrote {len(table)} rows -> {out_path}")
    if plot_path:
        from .plotting import render_count_curves

        render_count_curves(rows, plot_path)
        click.echo(f"rendered -> {plot_path}")


@cli.command()
@click.option("--reports", "reports_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--gap-threshold", type=float, default=2.5, show_default=True)
@click.option("--plot/--no-plot", "do_plot", default=True,
              help="Render the scatter alongside the CSV (default on).")
def figure(reports_dir, out_path, gap_threshold, do_plot):
    """Per-pattern scatter data (energy, basin, gap, clusters) plus decay fit."""
    reports = [load_report(p) for p in sorted(Path(reports_dir).glob("report_*.json"))]
    fit = cluster_and_fit(reports, gap_threshold)
    _write_csv(
        Path(out_path),
        ["graph_id", "pattern_idx", "energy", "basin_fraction", "basin_stderr",
         "spectral_gap", "n_long_links", "max_winding", "cluster_id", "fit"],
        [[r["graph_id"], r["pattern_idx"], r["energy"], r["basin_fraction"],
          r["basin_stderr"], r["spectral_gap"], r["n_long_links"],
          r["max_winding"], r["cluster_id"], r["fit"]] for r in fit.rows],
    )
    click.echo(f"wrote {len(fit.rows)} patterns ({fit.n_clusters} clusters) -> {out_path}")
    if do_plot:
        from .plotting import render_pattern_scatter

        png = Path(out_path).with_suffix(".png")
        render_pattern_scatter(fit, png)
        click.echo(f"rendered -> {png}")


@cli.command("continue")
@click.option("--graph-a", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--graph-b", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--start", "start_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Pattern JSON holding the equilibrium on graph A (p=1).")
@click.option("--p-to", type=float, default=-0.1, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--path-json", type=click.Path(dir_okay=False), default=None,
              help="Also dump the full phase path as JSON.")
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None)
def continue_cmd(graph_a, graph_b, start_path, p_to, out_path, path_json, plot_path):
    """Trace the equilibrium branch from graph A (p=1) toward graph B (p=0)."""
    ga = _load_single_graph(graph_a)
    gb = _load_single_graph(graph_b)
    start = FixedPointReport.from_dict(json.loads(Path(start_path).read_text()))
    h = Homotopy.between(ga, gb)
    try:
        points = trace_branch(h, start.theta, p_start=1.0, p_target=p_to)
    except ValueError as exc:
        raise CorrectorError(str(exc)) from exc
    energies = [h.energy(b.p, b.theta) for b in points]
    _write_csv(
        Path(out_path),
        ["p", "energy", "min_eig", "stable", "is_fold"],
        [[b.p, e, b.min_eig, int(b.stable), int(b.is_fold)]
         for b, e in zip(points, energies)],
    )
    folds = [b.p for b in points if b.is_fold]
    click.echo(
        f"traced {len(points)} points to p={points[-1].p:.5f}"
        + (f" (fold at p={folds[0]:.5f})" if folds else "")
    )
    if path_json:
        Path(path_json).write_text(
            json.dumps(
                [{"p": b.p, "theta": [float(x) for x in b.theta],
                  "min_eig": b.min_eig, "is_fold": b.is_fold, "stable": b.stable}
                 for b in points],
                indent=1,
            )
        )
    if plot_path:
        from .plotting import render_branch

        render_branch(points, plot_path, energies)
        click.echo(f"rendered -> {plot_path}")


@cli.command("verify-analytic")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def verify_analytic(out_path):
    """Evaluate every closed form and report values with residuals as JSON."""
    from .dynamics import field as flow_field

    rows: list[dict] = []

    def add(name, value, residual):
        rows.append({"name": name, "value": value, "residual": residual})

    for m in range(5, 13):
        r = analytic.twisted_root(m)
        add(f"twisted_root({m})", r.value, r.residual)
    bs = analytic.beta_star()
    add("beta_star", bs.value, bs.residual)
    a, b = analytic.g50_angles()
    add("g50_a", a, abs(np.sin(b - a) - 2 * np.sin(a)))
    add("g50_b", b, abs(np.sin(b - a) - np.sin(b)))
    for m in (3, 4, 5, 6):
        add(f"loop_energy({m})", analytic.loop_energy(m), 0.0)
    for n in (20, 30):
        add(f"e_energy({n})", analytic.e_energy(n), 0.0)
    add("f_energy(10)", analytic.f_energy(10), 0.0)
    tp = analytic.two_pattern_angles()
    add("two_pattern_low", tp.low, 0.0)
    add("two_pattern_alpha", tp.high_stable[0], tp.residual)
    add("two_pattern_beta", tp.high_stable[1], tp.residual)
    for n in (10, 14, 18):
        g = double_ring(n)
        th = analytic.double_ring_phases(n)
        add(f"double_ring_pattern({n})", dynamics.energy(g, th),
            float(np.linalg.norm(flow_field(g, th))))
        gm = moebius_ladder(n)
        thm = analytic.moebius_phases(n)
        add(f"moebius_pattern({n})", dynamics.energy(gm, thm),
            float(np.linalg.norm(flow_field(gm, thm))))
        gt = twisted_ring(n)
        tht = analytic.twisted_phases(n // 2)
        add(f"twisted_pattern({n})", dynamics.energy(gt, tht),
            float(np.linalg.norm(flow_field(gt, tht))))
    text = json.dumps(rows, indent=1)
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except (Graph6Error, NotCubicError, json.JSONDecodeError) as exc:
        click.echo(f"input error: {exc}", err=True)
        return EXIT_INPUT
    except (CorrectorError, SingularJacobianError, RefinementDivergedError, ValueError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
