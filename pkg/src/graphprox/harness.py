"""Parameter-sweep experiments: LFR topologies x measures x methods.

A sweep varies one benchmark parameter across a list of values.  Every
(value, measure, method) cell generates the same replicate graph
sequence (seeds derive from the master seed and replicate index only,
never from the measure or method), searches an alpha grid for the best
replicate-mean ARI against ground truth, and reports that optimum.

Spectral results for Communicability duplicate Walk's, and Heat's
duplicate Forest's, because each pair shares kernel eigenvectors; the
sweep therefore copies the already-computed row and marks it (e.g.
measure "Comm=Walk") instead of recomputing.  A verification mode
recomputes everything independently so the equality is testable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .clustering import spectral_cluster, ward_cluster
from .errors import (
    ConfigError,
    GenerationFailed,
    GraphProxError,
    MixedSweep,
    NotPSD,
    SkipLimitExceeded,
    SweepError,
)
from .graphs import degrees
from .kernels import KernelWorkspace, Measure, interior_grid, kernel_to_distance
from .lfr import LfrParams, generate_lfr
from .metrics import adjusted_rand_index

logger = logging.getLogger(__name__)

WARD = "Ward"
SPECTRAL = "Spectral"
VARY_FIELDS = ("n", "m", "tau1", "tau2", "size_limits", "mu")
CSV_HEADER = (
    "measure,method,vary,value,best_alpha,ari_mean,ari_std,"
    "replicates_used,skipped,avg_clusters"
)

# what fraction of replicates may be skipped before a cell errors out
_SKIP_CEILING = 0.2

# spectral-equivalence pairs: the second member copies the first's row
_EQUIVALENT = {Measure.COMM: Measure.WALK, Measure.HEAT: Measure.FOREST}

_MEASURE_ORDER = (
    Measure.WALK,
    Measure.COMM,
    Measure.FOREST,
    Measure.HEAT,
    Measure.PAGERANK,
)


@dataclass
class ExperimentConfig:
    """One sweep: base parameters plus what varies and how to score it."""

    base: LfrParams = field(default_factory=LfrParams)
    vary: str = "mu"
    values: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
    measures: tuple = _MEASURE_ORDER
    methods: tuple = (WARD, SPECTRAL)
    replicates: int = 10
    alpha_points: int = 20
    alpha_max: float = 10.0
    kmeans_seed: int = 0
    master_seed: int = 0
    ward_max: int = 1000

    def validate(self) -> None:
        if self.vary not in VARY_FIELDS:
            raise ConfigError(f"vary must be one of {VARY_FIELDS}, got {self.vary!r}")
        if not self.values:
            raise ConfigError("values must be nonempty")
        if not self.measures:
            raise ConfigError("measures must be nonempty")
        if not self.methods:
            raise ConfigError("methods must be nonempty")
        for method in self.methods:
            if method not in (WARD, SPECTRAL):
                raise ConfigError(f"unknown method {method!r}")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.alpha_points < 1:
            raise ConfigError(f"alpha_points must be >= 1, got {self.alpha_points}")
        if self.master_seed < 0 or self.kmeans_seed < 0:
            raise ConfigError("seeds must be nonnegative")


@dataclass
class ResultRow:
    """One aggregated cell of a sweep."""

    measure: str
    method: str
    vary: str
    value: object
    best_alpha: float
    ari_mean: float
    ari_std: float
    replicates_used: int
    skipped: int
    avg_clusters: float


_BASE_INT_KEYS = ("n", "cmin", "cmax", "seed", "max_retries")
_BASE_FLOAT_KEYS = ("m", "tau1", "tau2", "mu")
_CFG_INT_KEYS = (
    "replicates",
    "alpha_points",
    "kmeans_seed",
    "master_seed",
    "ward_max",
)


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat `key = value` sweep-config format.

    Lines are `key = value`, one per line; `#` starts a comment; keys
    are the base benchmark parameters (n, m, tau1, tau2, cmin, cmax,
    mu, seed, max_retries), the sweep controls (vary, values, measures,
    methods, replicates, alpha_points, alpha_max, kmeans_seed,
    master_seed, ward_max).  Unknown keys are errors.  `values` is a
    comma list, parsed according to `vary` (size_limits entries look
    like `80-140`).
    """
    base_kwargs: dict = {}
    cfg_kwargs: dict = {}
    raw_values: str | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _BASE_INT_KEYS:
            base_kwargs[key] = int(val)
        elif key in _BASE_FLOAT_KEYS:
            base_kwargs[key] = float(val)
        elif key in _CFG_INT_KEYS:
            cfg_kwargs[key] = int(val)
        elif key == "alpha_max":
            cfg_kwargs[key] = float(val)
        elif key == "vary":
            if val not in VARY_FIELDS:
                raise ConfigError(f"line {lineno}: vary must be one of {VARY_FIELDS}")
            cfg_kwargs["vary"] = val
        elif key == "values":
            raw_values = val
        elif key == "measures":
            try:
                cfg_kwargs["measures"] = tuple(
                    Measure.parse(tok) for tok in val.split(",") if tok.strip()
                )
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from exc
        elif key == "methods":
            methods = []
            for tok in val.split(","):
                tok = tok.strip().lower()
                if not tok:
                    continue
                if tok == "ward":
                    methods.append(WARD)
                elif tok == "spectral":
                    methods.append(SPECTRAL)
                else:
                    raise ConfigError(f"line {lineno}: unknown method {tok!r}")
            cfg_kwargs["methods"] = tuple(methods)
        else:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")

    config = ExperimentConfig(base=LfrParams(**base_kwargs), **cfg_kwargs)
    if raw_values is not None:
        config.values = tuple(
            _parse_sweep_value(config.vary, tok)
            for tok in raw_values.split(",")
            if tok.strip()
        )
    config.validate()
    return config


def _parse_sweep_value(vary: str, token: str):
    token = token.strip()
    if vary == "size_limits":
        lo, sep, hi = token.partition("-")
        if not sep:
            raise ConfigError(f"size_limits value must look like 80-140, got {token!r}")
        return (int(lo), int(hi))
    if vary in ("n", "m"):
        return int(token)
    return float(token)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def replicate_seeds(master_seed: int, count: int) -> list[int]:
    """Per-replicate generator seeds derived from (master, index) only."""
    return [
        int(np.random.SeedSequence([master_seed, r]).generate_state(1)[0])
        for r in range(count)
    ]


class GraphCache:
    """Memoizes generated replicates so every cell sees the same graphs."""

    def __init__(self):
        self._store: dict[LfrParams, tuple] = {}

    def get(self, params: LfrParams):
        """Returns (LfrOutput | None, KernelWorkspace | None, isolated: bool)."""
        if params not in self._store:
            try:
                out = generate_lfr(params)
            except GenerationFailed as exc:
                logger.warning("generation failed for seed %d: %s", params.seed, exc)
                self._store[params] = (None, None, False)
            else:
                isolated = bool(np.any(degrees(out.graph) == 0))
                self._store[params] = (out, KernelWorkspace(out.graph), isolated)
        return self._store[params]

    def clear(self) -> None:
        self._store.clear()


def run_cell(
    params: LfrParams,
    measure: Measure,
    method: str,
    seeds,
    *,
    alphas=None,
    alpha_points: int = 20,
    alpha_max: float = 10.0,
    kmeans_seed: int = 0,
    vary: str = "",
    value=None,
    cache: GraphCache | None = None,
) -> ResultRow:
    """Score one (params, measure, method) cell over replicate seeds.

    Generates (or fetches from cache) one graph per seed, evaluates
    every alpha on every usable replicate, and reports mean/std ARI at
    the alpha with the best replicate-mean (ties -> smallest alpha).
    Replicates are skipped when generation fails or when the measure is
    PageRank and the graph has isolated nodes; past a 20% skip fraction
    the whole cell raises.

    The Walk alpha grid depends on each graph's spectral radius, so
    when no explicit grid is given the cell uses the most restrictive
    upper bound across its replicates - one shared grid, valid for all.
    """
    cache = cache or GraphCache()
    total = len(seeds)
    usable = []
    skipped = 0
    for seed in seeds:
        out, workspace, isolated = cache.get(replace(params, seed=int(seed)))
        if out is None:
            skipped += 1
        elif measure is Measure.PAGERANK and isolated:
            skipped += 1
        else:
            usable.append((out, workspace))
    if skipped > _SKIP_CEILING * total or not usable:
        raise SkipLimitExceeded(
            f"{skipped}/{total} replicates skipped in cell "
            f"{measure.value}/{method}/{vary}={value}"
        )

    if alphas is None:
        upper = min(ws.alpha_upper_bound(measure) for _, ws in usable)
        if not math.isfinite(upper):
            upper = alpha_max
        alphas = interior_grid(upper, alpha_points)

    columns = []
    cluster_counts = []
    for out, workspace in usable:
        k = out.ground_truth.k
        try:
            column = []
            for alpha in alphas:
                kern = workspace.kernel(measure, alpha)
                if method == SPECTRAL:
                    part = spectral_cluster(kern, k, kmeans_seed)
                else:
                    part, _ = ward_cluster(kernel_to_distance(kern), k)
                column.append(adjusted_rand_index(part, out.ground_truth))
        except NotPSD as exc:
            skipped += 1
            logger.warning("replicate skipped (%s): %s", measure.value, exc)
            continue
        columns.append(column)
        cluster_counts.append(k)
    if skipped > _SKIP_CEILING * total or not columns:
        raise SkipLimitExceeded(
            f"{skipped}/{total} replicates skipped in cell "
            f"{measure.value}/{method}/{vary}={value}"
        )

    scores = np.array(columns, dtype=float).T  # alphas x replicates
    means = scores.mean(axis=1)
    best = int(means.argmax())  # ties: first max = smallest alpha
    return ResultRow(
        measure=measure.value,
        method=method,
        vary=vary,
        value=value,
        best_alpha=float(alphas[best]),
        ari_mean=float(means[best]),
        ari_std=float(scores[best].std()),
        replicates_used=len(columns),
        skipped=skipped,
        avg_clusters=float(np.mean(cluster_counts)),
    )


def apply_vary(base: LfrParams, vary: str, value) -> LfrParams:
    """The base parameters with one field swapped to the sweep value.

    Varying n also rescales the community-size limits proportionally,
    so larger networks keep the same relative community structure.
    """
    if vary == "size_limits":
        cmin, cmax = value
        return replace(base, cmin=int(cmin), cmax=int(cmax))
    if vary == "n":
        scale = value / base.n
        return replace(
            base,
            n=int(value),
            cmin=max(1, int(round(base.cmin * scale))),
            cmax=max(1, int(round(base.cmax * scale))),
        )
    if vary == "m":
        return replace(base, m=float(value))
    if vary in ("tau1", "tau2", "mu"):
        return replace(base, **{vary: float(value)})
    raise ConfigError(f"unknown vary field {vary!r}")


def sweep(config: ExperimentConfig, verify_equivalence: bool = False) -> list[ResultRow]:
    """Run the full cross product values x methods x measures.

    Cell failures are logged and collected; the sweep only raises if
    every cell failed.  With verify_equivalence=True the spectral
    Comm/Heat rows are recomputed from scratch instead of copied, which
    lets tests check the claimed equality.
    """
    config.validate()
    seeds = replicate_seeds(config.master_seed, config.replicates)
    rows: list[ResultRow] = []
    failures: list[str] = []
    attempted = 0

    for value in config.values:
        params = apply_vary(config.base, config.vary, value)
        cache = GraphCache()
        for method in (WARD, SPECTRAL):
            if method not in config.methods:
                continue
            if method == WARD and params.n > config.ward_max:
                continue  # agglomeration at this size is out of budget
            produced: dict[Measure, ResultRow] = {}
            for measure in _MEASURE_ORDER:
                if measure not in config.measures:
                    continue
                attempted += 1
                source = _EQUIVALENT.get(measure)
                if (
                    method == SPECTRAL
                    and not verify_equivalence
                    and source is not None
                    and source in produced
                ):
                    marker = f"{measure.value}={source.value}"
                    rows.append(replace(produced[source], measure=marker))
                    continue
                try:
                    row = run_cell(
                        params,
                        measure,
                        method,
                        seeds,
                        alpha_points=config.alpha_points,
                        alpha_max=config.alpha_max,
                        kmeans_seed=config.kmeans_seed,
                        vary=config.vary,
                        value=value,
                        cache=cache,
                    )
                except GraphProxError as exc:
                    failures.append(f"{config.vary}={value}/{method}/{measure.value}: {exc}")
                    continue
                produced[measure] = row
                rows.append(row)
        cache.clear()

    for failure in failures:
        logger.warning("cell failed: %s", failure)
    if attempted and not rows:
        raise SweepError("all cells failed: " + "; ".join(failures))
    return rows


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def format_value(value) -> str:
    """Render a sweep value for the CSV value column."""
    if isinstance(value, tuple):
        return f"{value[0]}-{value[1]}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _value_sort_key(value):
    if isinstance(value, tuple):
        return tuple(float(v) for v in value)
    try:
        return (float(value),)
    except (TypeError, ValueError):
        return (math.inf, str(value))


def emit_csv(rows, path) -> None:
    """Write rows sorted by (value, method, measure), floats to 6 places.

    The output is byte-identical across runs for the same inputs.
    """
    ordered = sorted(rows, key=lambda r: (_value_sort_key(r.value), r.method, r.measure))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in ordered:
            fh.write(
                f"{r.measure},{r.method},{r.vary},{format_value(r.value)},"
                f"{r.best_alpha:.6f},{r.ari_mean:.6f},{r.ari_std:.6f},"
                f"{r.replicates_used},{r.skipped},{r.avg_clusters:.6f}\n"
            )


def parse_value(text: str):
    """Inverse of format_value: int, float or 'lo-hi' size pair."""
    text = text.strip()
    if "-" in text and not text.lstrip().startswith("-"):
        lo, _, hi = text.partition("-")
        try:
            return (int(lo), int(hi))
        except ValueError:
            pass
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_result_csv(path) -> list[ResultRow]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 10:
                raise ValueError(f"expected 10 columns, got {len(parts)}: {line!r}")
            rows.append(
                ResultRow(
                    measure=parts[0],
                    method=parts[1],
                    vary=parts[2],
                    value=parse_value(parts[3]),
                    best_alpha=float(parts[4]),
                    ari_mean=float(parts[5]),
                    ari_std=float(parts[6]),
                    replicates_used=int(parts[7]),
                    skipped=int(parts[8]),
                    avg_clusters=float(parts[9]),
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Plot emission
# ---------------------------------------------------------------------------


def emit_plot(rows, path, base_value=None) -> None:
    """SVG line chart: one series per (measure, method), y = mean ARI.

    x is the varied value, except for size-limit sweeps where the
    average cluster count is the natural axis.  If base_value is given,
    matching points are highlighted with a star marker.

    Raises:
        MixedSweep: if the rows vary different parameters.
    """
    rows = list(rows)
    if not rows:
        raise MixedSweep("no rows to plot")
    varies = {r.vary for r in rows}
    if len(varies) != 1:
        raise MixedSweep(f"rows mix sweep axes: {sorted(varies)}")
    vary = varies.pop()

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    def x_of(row):
        if vary == "size_limits":
            return row.avg_clusters
        value = row.value
        return float(value if not isinstance(value, tuple) else value[0])

    series: dict[tuple[str, str], list] = {}
    for row in rows:
        series.setdefault((row.measure, row.method), []).append(row)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    base_text = None if base_value is None else format_value(base_value)
    for (measure, method) in sorted(series):
        pts = sorted(series[(measure, method)], key=x_of)
        xs = [x_of(r) for r in pts]
        ys = [r.ari_mean for r in pts]
        ax.plot(xs, ys, marker="o", label=f"{measure} ({method})")
        if base_text is not None:
            bx = [x_of(r) for r in pts if format_value(r.value) == base_text]
            by = [r.ari_mean for r in pts if format_value(r.value) == base_text]
            if bx:
                ax.scatter(bx, by, marker="*", s=200, zorder=5, color="black")
    ax.set_ylim(-0.1, 1.05)
    ax.set_xlabel("average cluster count" if vary == "size_limits" else vary)
    ax.set_ylabel("mean ARI")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
