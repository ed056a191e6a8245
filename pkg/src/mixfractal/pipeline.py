"""Replica ensembles and the end-to-end synthesize/analyze pipeline."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import json
import logging
import os
import platform
from typing import Optional

import numpy as np

from . import __version__
from .aggregation import DEFAULT_MIN_BLOCKS
from .crossover import (
    MIN_GAIN,
    SIGNIFICANCE_RATIO,
    SegmentedFit,
    crossover_report,
    predict_crossover_cumulant,
    predict_crossover_wavelet,
)
from .cumulants import ORDERS, cumulant_scan, fractal_fit_report
from .diagram import ScalingDiagram
from .errors import ConfigError, InsufficientDataError, MixfractalError
from .rng import derive_seed
from .synthesis import FlowSpec, compose_mixture
from .traces import emit_plot_data, ingest_trace, write_diagram, write_trace
from .wavelet import FILTERS, MIN_COEFFICIENTS, detail_variance_prefactor, dwt_detail_variances, logscale_diagram

log = logging.getLogger("mixfractal")

MODES = ("synthesize", "analyze", "pipeline")
# 3 usable wavelet octaves with MIN_COEFFICIENTS coefficients each
MIN_ANALYSIS_LENGTH = MIN_COEFFICIENTS * 2 ** 3
AVERAGING = "pointwise mean of log2 statistics across replicas (geometric mean of raw statistics)"


@dataclass
class RunConfig:
    mode: str = "pipeline"
    flow: Optional[FlowSpec] = None
    input_path: Optional[str] = None
    orders: tuple = ORDERS
    wavelet: str = "haar"
    replicas: int = 1
    min_blocks: int = DEFAULT_MIN_BLOCKS
    output_dir: str = "mixfractal_out"
    seed: Optional[int] = None
    threshold: float = SIGNIFICANCE_RATIO
    min_gain: float = MIN_GAIN
    jobs: int = 1

    def __post_init__(self):
        if isinstance(self.flow, dict):
            self.flow = FlowSpec.from_dict(self.flow)
        self.orders = tuple(int(m) for m in self.orders)
        if self.seed is None and self.flow is not None:
            self.seed = self.flow.seed
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if (self.flow is None) == (self.input_path is None):
            raise ConfigError("exactly one of flow and input_path must be given")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.replicas > 1 and self.flow is None:
            raise ConfigError("external traces cannot be replicated; replicas must be 1")
        if self.mode == "synthesize" and self.flow is None:
            raise ConfigError("synthesize needs a flow")
        if self.wavelet not in FILTERS:
            raise ConfigError(f"wavelet must be one of {sorted(FILTERS)}")
        if any(m not in ORDERS for m in self.orders) or 2 not in self.orders:
            raise ConfigError(f"orders must be drawn from {ORDERS} and include 2")
        if self.min_blocks < 1 or self.jobs < 1:
            raise ConfigError("min_blocks and jobs must be positive")

    def to_dict(self):
        return {
            "mode": self.mode,
            "flow": None if self.flow is None else self.flow.to_dict(),
            "input_path": self.input_path,
            "orders": list(self.orders),
            "wavelet": self.wavelet,
            "replicas": self.replicas,
            "min_blocks": self.min_blocks,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "threshold": self.threshold,
            "min_gain": self.min_gain,
        }

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "orders" in d:
            d["orders"] = tuple(d["orders"])
        try:
            return cls(**d)
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"invalid config: {exc}") from None

    def replica_seeds(self):
        return [derive_seed(self.seed, r) for r in range(self.replicas)]


@dataclass(frozen=True, eq=False)
class EnsembleDiagram:
    """Replica-averaged diagram with per-point standard error of the mean."""

    diagram: ScalingDiagram
    stderr: np.ndarray = field(default=None)

    def noise_scale(self):
        """Per-unit-weight variance of one point, estimated across replicas."""
        if self.diagram.replicas < 2 or len(self.diagram) == 0:
            return None
        return float(np.median(self.stderr ** 2 * self.diagram.weight))


def ensemble_diagram(diagrams):
    """Average replica diagrams over the scales every replica admitted."""
    if not diagrams:
        raise InsufficientDataError("no replica diagrams to average")
    common = set(diagrams[0].log2_scale.tolist())
    for d in diagrams[1:]:
        common &= set(d.log2_scale.tolist())
    xs = sorted(common)
    ys, ws = [], None
    for d in diagrams:
        idx = np.searchsorted(d.log2_scale, xs)
        ys.append(d.log2_statistic[idx])
        if ws is None:
            ws = d.weight[idx]
    ys = np.array(ys).reshape(len(diagrams), len(xs))
    r = len(diagrams)
    stderr = ys.std(axis=0, ddof=1) / np.sqrt(r) if r > 1 else np.zeros(len(xs))
    first = diagrams[0]
    mean = ScalingDiagram(
        xs, ys.mean(axis=0), ws, first.statistic, first.order, first.series_kind, r
    )
    return EnsembleDiagram(mean, stderr)


def analyze_series(series, orders=ORDERS, wavelet="haar", min_blocks=DEFAULT_MIN_BLOCKS):
    """Cumulant table, per-order cumulant diagrams and the logscale diagram of one series."""
    if len(series) < max(MIN_ANALYSIS_LENGTH, 2 * min_blocks):
        raise InsufficientDataError(
            f"series of {len(series)} samples is too short to analyse "
            f"(need at least {max(MIN_ANALYSIS_LENGTH, 2 * min_blocks)})"
        )
    table = cumulant_scan(series, orders=orders, min_blocks=min_blocks)
    diagrams = {m: table.diagram(m) for m in orders}
    variances = dwt_detail_variances(series, wavelet)
    return table, diagrams, variances, logscale_diagram(variances, series.kind)


def _replica(args):
    flow, orders, wavelet, min_blocks = args
    series = compose_mixture(flow)
    return analyze_series(series, orders, wavelet, min_blocks)


def predictions(flow, wavelet="haar"):
    """Analytic crossovers for a two-component Gaussian flow, else reasons why not."""
    out = {"cumulant_m2": None, "wavelet": None, "notes": []}
    if len(flow.components) != 2:
        out["notes"].append(f"prediction needs 2 components, flow has {len(flow.components)}")
        return out
    if flow.marginal != "gaussian":
        out["notes"].append("prefactors are only known for the gaussian marginal")
        return out
    a, b = flow.components
    try:
        out["cumulant_m2"] = predict_crossover_cumulant(
            a.weight ** 2, b.weight ** 2, a.hurst, b.hurst, 2
        )
    except MixfractalError as exc:
        out["notes"].append(f"cumulant: {exc}")
    try:
        out["wavelet"] = predict_crossover_wavelet(
            a.weight ** 2 * detail_variance_prefactor(a.hurst, wavelet),
            b.weight ** 2 * detail_variance_prefactor(b.hurst, wavelet),
            a.hurst,
            b.hurst,
        )
    except MixfractalError as exc:
        out["notes"].append(f"wavelet: {exc}")
    return out


def _crossover(ens, prediction, config):
    try:
        return crossover_report(
            ens.diagram,
            prediction,
            threshold=config.threshold,
            min_gain=config.min_gain,
            noise_scale=ens.noise_scale(),
        ).to_dict()
    except InsufficientDataError as exc:
        return {"error": exc.code, "message": str(exc)}


@dataclass
class RunResult:
    config: RunConfig
    cumulant: dict
    wavelet: EnsembleDiagram
    report: dict
    meta: dict
    table: object = None


def run_analysis(config):
    """Compute every artifact of ``config`` in memory; nothing is written."""
    if config.flow is not None:
        seeds = config.replica_seeds()
        jobs = [
            (config.flow.with_seed(s), config.orders, config.wavelet, config.min_blocks)
            for s in seeds
        ]
        log.info("analysing %d replica(s) of %s", len(jobs), config.flow.digest())
        if config.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                results = list(pool.map(_replica, jobs))
        else:
            results = [_replica(j) for j in jobs]
    else:
        seeds = []
        series = ingest_trace(config.input_path)
        log.info("analysing %d samples from %s", len(series), config.input_path)
        results = [analyze_series(series, config.orders, config.wavelet, config.min_blocks)]

    cumulant = {
        m: ensemble_diagram([r[1][m] for r in results]) for m in config.orders
    }
    wavelet = ensemble_diagram([r[3] for r in results])
    pred = predictions(config.flow, config.wavelet) if config.flow is not None else None

    report = {
        "replicas": config.replicas,
        "fractal_fit": fractal_fit_report({m: e.diagram for m, e in cumulant.items()}).to_dict(),
        "cumulant_crossover": {},
        "wavelet_crossover": _crossover(
            wavelet, pred["wavelet"] if pred else None, config
        ),
        "prediction": None,
        "cumulant_table_replica0": results[0][0].to_records(),
    }
    for m, ens in cumulant.items():
        p = pred["cumulant_m2"] if pred and m == 2 else None
        report["cumulant_crossover"][f"m{m}"] = _crossover(ens, p, config)
    if pred is not None:
        report["prediction"] = {
            "cumulant_m2": None if pred["cumulant_m2"] is None else pred["cumulant_m2"].to_dict(),
            "wavelet": None if pred["wavelet"] is None else pred["wavelet"].to_dict(),
            "notes": pred["notes"],
        }
    meta = {
        "config": config.to_dict(),
        "replica_seeds": seeds,
        "averaging": AVERAGING,
        "versions": {
            "mixfractal": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    return RunResult(config, cumulant, wavelet, report, meta, results[0][0])


def _dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _clean(obj):
    """Replace non-finite floats by None so the JSON stays strict."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def write_artifacts(result):
    out = result.config.output_dir
    os.makedirs(out, exist_ok=True)
    for m, ens in result.cumulant.items():
        write_diagram(ens.diagram, ens.stderr, os.path.join(out, f"cumulant_diagram_m{m}.csv"))
    write_diagram(result.wavelet.diagram, result.wavelet.stderr, os.path.join(out, "wavelet_diagram.csv"))
    for name, ens, rep in [
        (f"cumulant_m{m}", e, result.report["cumulant_crossover"][f"m{m}"])
        for m, e in result.cumulant.items()
    ] + [("wavelet", result.wavelet, result.report["wavelet_crossover"])]:
        if "segmented_fit" in rep:
            fields = {k: v for k, v in rep["segmented_fit"].items() if k != "sse_ratio"}
            emit_plot_data(ens.diagram, SegmentedFit(**fields), os.path.join(out, f"plot_{name}.csv"), ens.stderr)
    _dump(_clean(result.report), os.path.join(out, "fit_report.json"))
    _dump(_clean(result.meta), os.path.join(out, "run_meta.json"))


def run_pipeline(config):
    """Run ``config`` end to end and write its artifacts; returns the exit status.

    Every artifact is computed before the first file is written, so a failed
    run leaves no partial output behind. Errors propagate to the caller.
    """
    if config.mode == "synthesize":
        series = compose_mixture(config.flow.with_seed(config.seed))
        os.makedirs(config.output_dir, exist_ok=True)
        write_trace(series, os.path.join(config.output_dir, "trace.csv"))
        _dump(
            _clean({"config": config.to_dict(), "meta": series.meta, "versions": {"mixfractal": __version__}}),
            os.path.join(config.output_dir, "run_meta.json"),
        )
        return 0
    result = run_analysis(config)
    write_artifacts(result)
    return 0
