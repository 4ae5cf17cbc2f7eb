"""Batch runs over random automata and the statistics reported on them."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .dfa import AutomatonError, Dfa
from .generators import RngSpec, random_dfa
from .search import NotSynchronizingError, SearchConfig, SearchResourceError, shortest_reset_word

RECORD_COLUMNS = ("n", "k", "seed_index", "synchronizing", "length", "sink_size", "wall_ms", "peak_sets")
STATS_KEYS = (
    "n", "k", "samples", "sync_fraction", "mean_length", "variance",
    "max_length", "mean_sink_fraction", "histogram",
)


@dataclass
class ExperimentRecord:
    n: int
    k: int
    seed_index: int
    synchronizing: bool
    length: int | None = None
    sink_size: int | None = None
    wall_ms: float | None = None
    peak_sets: int | None = None
    error: str | None = None

    def __post_init__(self):
        if self.synchronizing != (self.length is not None) and self.error is None:
            raise ValueError("length must be present exactly for synchronizing automata")


@dataclass
class ExperimentStats:
    n: int
    k: int
    samples: int
    sync_fraction: float
    mean_length: float
    variance: float
    max_length: int | None
    mean_sink_fraction: float
    histogram: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Sequence[ExperimentRecord]) -> "ExperimentStats":
        """Aggregate; lengths and sink sizes only count synchronizing samples.

        The variance is the unbiased sample variance (NaN below two lengths).
        """
        if not records:
            raise ValueError("no records to aggregate")
        n, k = records[0].n, records[0].k
        lengths = [r.length for r in records if r.length is not None]
        sinks = [r.sink_size / r.n for r in records if r.synchronizing and r.sink_size is not None]
        synced = sum(r.synchronizing for r in records)
        hist = dict(sorted(Counter(lengths).items()))
        arr = np.asarray(lengths, dtype=float)
        return cls(
            n=n,
            k=k,
            samples=len(records),
            sync_fraction=synced / len(records),
            mean_length=float(arr.mean()) if lengths else math.nan,
            variance=float(arr.var(ddof=1)) if len(lengths) > 1 else math.nan,
            max_length=max(lengths) if lengths else None,
            mean_sink_fraction=float(np.mean(sinks)) if sinks else math.nan,
            histogram=hist,
        )


def sink_components(d: Dfa) -> list[list[int]]:
    """Strongly connected components of the transition digraph with no exit."""
    rows = np.repeat(np.arange(d.n), d.k)
    cols = np.asarray(d.delta, dtype=np.int64).ravel()
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(d.n, d.n))
    count, labels = connected_components(graph, directed=True, connection="strong")
    leaves = np.ones(count, dtype=bool)
    leaves[labels[rows][labels[rows] != labels[cols]]] = False
    return [np.flatnonzero(labels == c).tolist() for c in np.flatnonzero(leaves)]


def sink_component_size(d: Dfa) -> int:
    """Size of the unique sink component of a synchronizing automaton."""
    sinks = sink_components(d)
    if len(sinks) != 1:
        raise AutomatonError(f"expected one sink component, found {len(sinks)}; automaton is not synchronizing")
    return len(sinks[0])


def solve_sample(n: int, k: int, rng: RngSpec, index: int, cfg: SearchConfig | None = None) -> ExperimentRecord:
    d = random_dfa(n, k, rng.offset(index))
    start = time.perf_counter()
    try:
        res = shortest_reset_word(d, cfg)
    except NotSynchronizingError:
        return ExperimentRecord(n, k, index, False, wall_ms=(time.perf_counter() - start) * 1e3)
    except (SearchResourceError, MemoryError) as exc:
        return ExperimentRecord(n, k, index, True, error=f"resource: {exc}")
    return ExperimentRecord(
        n, k, index, True,
        length=res.length,
        sink_size=sink_component_size(d),
        wall_ms=res.stats.wall_time * 1e3,
        peak_sets=res.stats.peak_sets,
    )


def _solve_range(args):
    n, k, rng, lo, hi, cfg = args
    return [solve_sample(n, k, rng, i, cfg) for i in range(lo, hi)]


def run_batch(
    n: int,
    k: int,
    m: int,
    rng: RngSpec,
    parallelism: int = 1,
    cfg: SearchConfig | None = None,
) -> tuple[list[ExperimentRecord], ExperimentStats]:
    """Sample ``m`` automata (sample ``i`` seeded with ``seed + i``) and solve them.

    Records come back sorted by sample index whatever ``parallelism`` is.
    """
    if m < 1:
        raise ValueError("sample count must be >= 1")
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    cfg = cfg or SearchConfig(reconstruct_word=False)
    if parallelism == 1:
        records = _solve_range((n, k, rng, 0, m, cfg))
    else:
        step = max(1, min(256, -(-m // (4 * parallelism))))
        tasks = [(n, k, rng, lo, min(m, lo + step), cfg) for lo in range(0, m, step)]
        with ProcessPoolExecutor(parallelism) as pool:
            records = [r for part in pool.map(_solve_range, tasks) for r in part]
    records.sort(key=lambda r: r.seed_index)
    return records, ExperimentStats.from_records(records)


def sqrt_model(n, a: float, b: float):
    return a * np.sqrt(np.asarray(n, dtype=float) - b)


def power_model(n, c: float = 1.95, e: float = 0.55):
    return c * np.asarray(n, dtype=float) ** e


def rss(y, fitted) -> float:
    return float(np.sum((np.asarray(y, dtype=float) - fitted) ** 2))


def fit_sqrt_model(stats: Sequence[ExperimentStats] | Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares ``(a, b)`` for ``mean_length ≈ a * sqrt(n - b)``.

    Accepts stats objects or plain ``(n, mean_length)`` pairs.
    """
    from .estimators import SqrtLengthModel

    pairs = [(s.n, s.mean_length) if isinstance(s, ExperimentStats) else tuple(s) for s in stats]
    ns = np.array([p[0] for p in pairs], dtype=float)
    ys = np.array([p[1] for p in pairs], dtype=float)
    model = SqrtLengthModel().fit(ns.reshape(-1, 1), ys)
    return model.a_, model.b_


def hoeffding_bound(
    M_n: float,
    split_k: float,
    p: float,
    m: int,
    n: int,
    cerny_assumed: bool = False,
) -> float:
    """Bound on ``|ML(n) - E[l(n)]|`` holding with probability ``1 - p``.

    ``split_k`` is the tail split: fewer than ``1/split_k`` of the automata
    may have a shortest reset word longer than ``M_n``.  The tail term is
    ``n**3 / (6 split_k)``, or ``(n - 1)**2 / split_k`` when every automaton
    is assumed to meet the quadratic bound.
    """
    if split_k < 1:
        raise ValueError("split_k must be >= 1")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if m < 1:
        raise ValueError("m must be >= 1")
    if M_n < 0 or n < 1:
        raise ValueError("M_n must be >= 0 and n >= 1")
    sampling = M_n * (split_k - 1) / split_k * math.sqrt(math.log(2 / p) / (2 * m))
    tail = (n - 1) ** 2 if cerny_assumed else n**3 / 6
    return sampling + tail / split_k


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return "" if math.isnan(x) else format(x, ".6g")
    return str(x)


def records_to_csv(records: Iterable[ExperimentRecord], timings: bool = True) -> str:
    """Record table; with ``timings=False`` the wall-clock column stays empty
    so reruns are byte-identical."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow([
            _fmt(r.n), _fmt(r.k), _fmt(r.seed_index), _fmt(r.synchronizing), _fmt(r.length),
            _fmt(r.sink_size), _fmt(r.wall_ms) if timings else "", _fmt(r.peak_sets),
        ])
    return buf.getvalue()


def records_from_csv(text: str) -> list[ExperimentRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != RECORD_COLUMNS:
        raise ValueError(f"unexpected columns {reader.fieldnames}")

    def opt(v, conv):
        return conv(v) if v != "" else None

    return [
        ExperimentRecord(
            n=int(row["n"]),
            k=int(row["k"]),
            seed_index=int(row["seed_index"]),
            synchronizing=row["synchronizing"] == "1",
            length=opt(row["length"], int),
            sink_size=opt(row["sink_size"], int),
            wall_ms=opt(row["wall_ms"], float),
            peak_sets=opt(row["peak_sets"], int),
        )
        for row in reader
    ]


def stats_to_json(stats: ExperimentStats) -> str:
    def num(x):
        if x is None or (isinstance(x, float) and math.isnan(x)):
            return None
        if isinstance(x, float):
            return float(format(x, ".6g"))
        return x

    payload = {
        "n": stats.n,
        "k": stats.k,
        "samples": stats.samples,
        "sync_fraction": num(stats.sync_fraction),
        "mean_length": num(stats.mean_length),
        "variance": num(stats.variance),
        "max_length": stats.max_length,
        "mean_sink_fraction": num(stats.mean_sink_fraction),
        "histogram": {str(length): count for length, count in stats.histogram.items()},
    }
    return json.dumps(payload, indent=2) + "\n"


def stats_from_json(text: str) -> ExperimentStats:
    raw = json.loads(text)
    missing = set(STATS_KEYS) - raw.keys()
    if missing:
        raise ValueError(f"stats JSON lacks keys {sorted(missing)}")

    def f(x):
        return math.nan if x is None else float(x)

    return ExperimentStats(
        n=raw["n"],
        k=raw["k"],
        samples=raw["samples"],
        sync_fraction=f(raw["sync_fraction"]),
        mean_length=f(raw["mean_length"]),
        variance=f(raw["variance"]),
        max_length=raw["max_length"],
        mean_sink_fraction=f(raw["mean_sink_fraction"]),
        histogram={int(length): c for length, c in raw["histogram"].items()},
    )


def emit_report(
    records: Sequence[ExperimentRecord],
    stats: ExperimentStats | None,
    format: str = "csv",
    timings: bool = True,
) -> str:
    """Serialize records as CSV or stats as JSON."""
    if format == "csv":
        return records_to_csv(records, timings)
    if format == "json":
        if stats is None:
            stats = ExperimentStats.from_records(records)
        return stats_to_json(stats)
    raise ValueError(f"unknown report format {format!r}")
