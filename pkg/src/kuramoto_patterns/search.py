"""Monte Carlo discovery of stable non-sync states and basin statistics.

Trials draw uniform initial phases, flow to an equilibrium, polish it with
Newton, and bucket outcomes by energy.  Seeding is counter-based: trial t of
a graph always consumes words [t*n, (t+1)*n) of a Philox stream keyed by
(master seed, graph6 bytes), so results are independent of execution order
and extending the trial count preserves every earlier trial.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .dynamics import FixedPointReport, classify, gauge_normalize
from .graphs import CubicGraph, Graph, encode_graph6

__all__ = [
    "SearchConfig",
    "BasinEstimate",
    "PatternRecord",
    "GraphReport",
    "philox_key",
    "sample_initial",
    "sample_batch",
    "search_graph",
    "dedup_by_energy",
    "PatternCountRow",
    "aggregate",
    "cluster_energies",
    "ClusterFit",
    "cluster_and_fit",
    "save_report",
    "load_report",
]


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for one search run.

    ``k_samp=None`` picks 5000 trials for n <= 12 and 10000 beyond.  With
    ``refine`` on, trials integrate to ``flow_tol`` and are then polished to
    ``refine_tol`` so energies deduplicate reliably; with it off, trials
    integrate all the way to ``residual_tol``.
    """

    k_samp: int | None = None
    master_seed: int = 20260809
    residual_tol: float = 1e-5
    flow_tol: float = 1e-3
    refine: bool = True
    refine_tol: float = 1e-12
    t_max: float = 2000.0
    dedup_energy_tol: float = 1e-6
    dt0: float = 0.1

    def __post_init__(self) -> None:
        if self.k_samp is not None and self.k_samp < 1:
            raise ValueError("k_samp must be >= 1")
        for name in ("residual_tol", "flow_tol", "refine_tol", "dedup_energy_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def trials_for(self, n: int) -> int:
        if self.k_samp is not None:
            return self.k_samp
        return 5000 if n <= 12 else 10000


@dataclass(frozen=True)
class BasinEstimate:
    """Binomial estimate of a basin's share of the sampled torus."""

    hits: int
    trials: int

    @property
    def fraction(self) -> float:
        return self.hits / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        if not self.trials:
            return 0.0
        f = self.fraction
        return math.sqrt(f * (1.0 - f) / self.trials)


@dataclass(frozen=True)
class PatternRecord:
    report: FixedPointReport
    basin: BasinEstimate


@dataclass(frozen=True)
class GraphReport:
    """Search outcome for one graph: deduplicated patterns plus tallies."""

    graph_id: str
    n: int
    k_samp: int
    master_seed: int
    patterns: tuple[PatternRecord, ...]  # sorted by increasing energy
    sync: BasinEstimate
    degenerate_trials: int
    timeout_trials: int

    @property
    def n_patterns(self) -> int:
        return len(self.patterns)

    def to_dict(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "n": self.n,
            "k_samp": self.k_samp,
            "master_seed": self.master_seed,
            "sync": {"hits": self.sync.hits, "trials": self.sync.trials},
            "patterns": [
                {
                    **p.report.to_dict(),
                    "basin": {
                        "hits": p.basin.hits,
                        "trials": p.basin.trials,
                        "fraction": p.basin.fraction,
                        "stderr": p.basin.stderr,
                    },
                }
                for p in self.patterns
            ],
            "degenerate_trials": self.degenerate_trials,
            "timeout_trials": self.timeout_trials,
        }

    @staticmethod
    def from_dict(d: dict) -> "GraphReport":
        patterns = tuple(
            PatternRecord(
                report=FixedPointReport.from_dict(p),
                basin=BasinEstimate(
                    hits=int(p["basin"]["hits"]), trials=int(p["basin"]["trials"])
                ),
            )
            for p in d["patterns"]
        )
        return GraphReport(
            graph_id=str(d["graph_id"]),
            n=int(d["n"]),
            k_samp=int(d["k_samp"]),
            master_seed=int(d["master_seed"]),
            patterns=patterns,
            sync=BasinEstimate(int(d["sync"]["hits"]), int(d["sync"]["trials"])),
            degenerate_trials=int(d["degenerate_trials"]),
            timeout_trials=int(d["timeout_trials"]),
        )


def save_report(report: GraphReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=1))


def load_report(path: str | Path) -> GraphReport:
    return GraphReport.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Seeding
# ---------------------------------------------------------------------------

def philox_key(master_seed: int, g: Graph) -> int:
    """128-bit stream key derived from the master seed and the graph bytes.

    Keying on the graph6 encoding (not the id label) makes the stream a
    function of the graph itself, stable across files and runs.
    """
    digest = hashlib.sha256(
        struct.pack("<Q", master_seed & 0xFFFFFFFFFFFFFFFF) + encode_graph6(g)
    ).digest()
    return int.from_bytes(digest[:16], "little")


def sample_initial(g: Graph, master_seed: int, trial: int) -> np.ndarray:
    """Initial phases of one trial: n i.i.d. uniforms on [0, 2pi)."""
    bg = np.random.Philox(key=philox_key(master_seed, g))
    bg.advance(trial * g.n)
    return np.random.Generator(bg).uniform(0.0, 2.0 * math.pi, g.n)


def sample_batch(g: Graph, master_seed: int, k: int) -> np.ndarray:
    """Rows 0..k-1 of the trial stream; row t equals sample_initial(g, seed, t)."""
    bg = np.random.Philox(key=philox_key(master_seed, g))
    return np.random.Generator(bg).uniform(0.0, 2.0 * math.pi, (k, g.n))


# ---------------------------------------------------------------------------
# Per-graph search
# ---------------------------------------------------------------------------

def _energy_buckets(order: np.ndarray, energies: np.ndarray, tol: float) -> list[np.ndarray]:
    """Split energy-sorted trial indices where consecutive gaps exceed tol."""
    if order.size == 0:
        return []
    sorted_e = energies[order]
    cut = np.nonzero(np.diff(sorted_e) > tol)[0] + 1
    return np.split(order, cut)


def search_graph(g: CubicGraph, cfg: SearchConfig = SearchConfig()) -> GraphReport:
    """Run every trial for one graph and assemble its report.

    Stable outcomes are bucketed by refined energy within the dedup
    tolerance; buckets whose representative classifies as degenerate or
    unstable (slow-saddle captures) are tallied separately and never
    reported as patterns.
    """
    n = g.n
    k = cfg.trials_for(n)
    eu, ev = g.edge_arrays
    thetas = sample_batch(g, cfg.master_seed, k)

    flow_status = np.empty(k, dtype=np.int64)
    flow_t = np.empty(k)
    flow_steps = np.empty(k, dtype=np.int64)
    flow_target = cfg.flow_tol if cfg.refine else cfg.residual_tol
    _kernels.flow_batch(
        thetas, eu, ev, cfg.dt0, cfg.t_max, flow_target, 1e-9, 1e-10, 0.5,
        flow_status, flow_t, flow_steps,
    )
    settled = flow_status == _kernels.FLOW_CONVERGED

    refine_status = np.zeros(k, dtype=np.int64)
    residuals = np.full(k, np.inf)
    if cfg.refine:
        _kernels.newton_batch(
            thetas, eu, ev, cfg.refine_tol, 60, 0.5,
            settled.astype(np.int64), refine_status, residuals,
        )
        ok = settled & (refine_status == _kernels.NEWTON_OK)
    else:
        ok = settled
        for i in np.nonzero(settled)[0]:
            f = np.empty(n)
            residuals[i] = _kernels.field_into(thetas[i], eu, ev, f)

    timeout_trials = int(np.sum(~settled))
    degenerate_trials = int(np.sum(settled & ~ok))

    energies = np.full(k, np.nan)
    idx_ok = np.nonzero(ok)[0]
    if idx_ok.size:
        e_ok = np.empty(idx_ok.size)
        _kernels.energy_batch(thetas[idx_ok], eu, ev, e_ok)
        energies[idx_ok] = e_ok

    order = idx_ok[np.argsort(energies[idx_ok], kind="stable")]
    sync = BasinEstimate(0, k)
    patterns: list[PatternRecord] = []
    for bucket in _energy_buckets(order, energies, cfg.dedup_energy_tol):
        rep_local = np.lexsort((bucket, residuals[bucket]))[0]
        rep = bucket[rep_local]
        report = classify(
            g, gauge_normalize(thetas[rep]), residual_tol=cfg.residual_tol
        )
        if report.classification == "sync":
            sync = BasinEstimate(sync.hits + bucket.size, k)
        elif report.classification == "stable-pattern":
            patterns.append(
                PatternRecord(report=report, basin=BasinEstimate(bucket.size, k))
            )
        else:
            degenerate_trials += bucket.size
    patterns.sort(key=lambda p: p.report.energy)
    return GraphReport(
        graph_id=g.id or encode_graph6(g).decode("ascii"),
        n=n,
        k_samp=k,
        master_seed=cfg.master_seed,
        patterns=tuple(patterns),
        sync=sync,
        degenerate_trials=degenerate_trials,
        timeout_trials=timeout_trials,
    )


def dedup_by_energy(
    reports: Sequence[FixedPointReport], tol: float = 1e-6
) -> list[FixedPointReport]:
    """One representative per energy cluster (union of gaps <= tol).

    The representative is the lowest-residual member of its cluster.
    """
    if not reports:
        return []
    by_energy = sorted(reports, key=lambda r: r.energy)
    out: list[FixedPointReport] = []
    cluster: list[FixedPointReport] = [by_energy[0]]
    for r in by_energy[1:]:
        if r.energy - cluster[-1].energy <= tol:
            cluster.append(r)
        else:
            out.append(min(cluster, key=lambda c: c.residual))
            cluster = [r]
    out.append(min(cluster, key=lambda c: c.residual))
    return out


# ---------------------------------------------------------------------------
# Dataset-level aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PatternCountRow:
    """How many graphs of one size support k = 0, 1, 2, ... patterns."""

    n: int
    total: int
    counts: tuple[int, ...]  # counts[k] = number of graphs with k patterns

    def fraction(self, k: int) -> float:
        return (self.counts[k] if k < len(self.counts) else 0) / self.total

    @property
    def fraction_with_patterns(self) -> float:
        return sum(self.counts[1:]) / self.total


def aggregate(reports: Iterable[GraphReport]) -> list[PatternCountRow]:
    """Histogram pattern counts per graph size; one row per n present."""
    seen: set[str] = set()
    by_n: dict[int, list[int]] = {}
    for r in reports:
        if r.graph_id in seen:
            raise ValueError(f"duplicate graph id {r.graph_id!r}")
        seen.add(r.graph_id)
        by_n.setdefault(r.n, []).append(r.n_patterns)
    rows = []
    for n in sorted(by_n):
        ks = by_n[n]
        counts = [0] * (max(ks) + 1)
        for k in ks:
            counts[k] += 1
        rows.append(PatternCountRow(n=n, total=len(ks), counts=tuple(counts)))
    return rows


def cluster_energies(energies: Sequence[float], gap_threshold: float = 2.5) -> np.ndarray:
    """1-D cluster labels: split the sorted energies at gaps above threshold."""
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        return np.zeros(0, dtype=int)
    order = np.argsort(e, kind="stable")
    labels = np.zeros(e.size, dtype=int)
    current = 0
    labels[order[0]] = 0
    for prev, cur in zip(order[:-1], order[1:]):
        if e[cur] - e[prev] > gap_threshold:
            current += 1
        labels[cur] = current
    return labels


@dataclass(frozen=True)
class ClusterFit:
    """Scatter rows for all patterns of a run plus the empirical decay fit."""

    rows: tuple[dict, ...]
    n_clusters: int

    @staticmethod
    def fit_value(energy: float) -> float:
        return math.exp(-1.5 * energy)


def cluster_and_fit(
    reports: Iterable[GraphReport], gap_threshold: float = 2.5
) -> ClusterFit:
    """Label every pattern with an energy cluster and attach fit samples."""
    flat: list[tuple[str, int, PatternRecord]] = []
    for rep in reports:
        for idx, p in enumerate(rep.patterns):
            flat.append((rep.graph_id, idx, p))
    labels = cluster_energies([p.report.energy for _, _, p in flat], gap_threshold)
    rows = []
    for (gid, idx, p), cluster in zip(flat, labels):
        rows.append(
            {
                "graph_id": gid,
                "pattern_idx": idx,
                "energy": p.report.energy,
                "basin_fraction": p.basin.fraction,
                "basin_stderr": p.basin.stderr,
                "spectral_gap": p.report.spectral_gap,
                "n_long_links": p.report.n_long_links,
                "max_winding": p.report.max_winding,
                "cluster_id": int(cluster),
                "fit": ClusterFit.fit_value(p.report.energy),
            }
        )
    n_clusters = int(labels.max()) + 1 if len(rows) else 0
    return ClusterFit(rows=tuple(rows), n_clusters=n_clusters)
