"""Exit criteria: figure reproductions, analytic consistency, null behaviour, oracles."""

import time

import numpy as np
import pytest

from mixfractal import (
    FlowSpec,
    HurstComponent,
    ScalingDiagram,
    TraceSeries,
    compose_mixture,
    crossover_report,
    cumulant_scan,
    dwt,
    dwt_detail_variances,
    fgn_autocovariance,
    fit_segmented,
    fit_unifractal,
    hurst_from_slope,
    logscale_diagram,
    mixture_curve,
    predict_crossover_cumulant,
    sample_cumulant,
    synthesize_fgn,
)
from mixfractal.diagram import weighted_line
from mixfractal.pipeline import RunConfig, run_analysis
from mixfractal.rng import derive_seed

from oracles import kstat_power_sums, sample_autocovariance

LENGTH = 2 ** 18
REPLICAS = 10
FIG_FLOW = {
    "components": [{"hurst": 0.5, "weight": 2.0}, {"hurst": 0.7, "weight": 1.0}],
    "length": LENGTH,
    "seed": 42,
}
RUNTIME_LIMIT = 30.0


@pytest.fixture(scope="module")
def figure_run():
    start = time.perf_counter()
    result = run_analysis(RunConfig(flow=FIG_FLOW, replicas=REPLICAS, seed=42, orders=(2,), output_dir="unused"))
    return result, time.perf_counter() - start


def test_c1_cumulant_crossover(figure_run, record):
    result, elapsed = figure_run
    rep = result.report["cumulant_crossover"]["m2"]
    fit = rep["segmented_fit"]
    checks = [
        (f"SSE ratio {rep['sse_ratio']:.3f} < 0.5", rep["sse_ratio"] < 0.5 and rep["significant"]),
        (f"low slope {fit['slope_low']:.3f} within 0.1 of 1.0", abs(fit["slope_low"] - 1.0) <= 0.1),
        (f"high slope {fit['slope_high']:.3f} within 0.1 of 1.4", abs(fit["slope_high"] - 1.4) <= 0.1),
        (f"runtime {elapsed:.1f}s < {RUNTIME_LIMIT:.0f}s", elapsed < RUNTIME_LIMIT),
    ]
    assert record("C1 cumulant-domain crossover", checks)


def test_c2_wavelet_crossover(record):
    start = time.perf_counter()
    lows, highs, sig = [], [], 0
    for r in range(REPLICAS):
        spec = FlowSpec.from_dict(FIG_FLOW).with_seed(derive_seed(42, r))
        rep = crossover_report(logscale_diagram(dwt_detail_variances(compose_mixture(spec), "haar")))
        lows.append(rep.hurst_low)
        highs.append(rep.hurst_high)
        sig += rep.significant
    elapsed = time.perf_counter() - start
    h_low, h_high = np.mean(lows), np.mean(highs)
    checks = [
        (f"significant in {sig}/{REPLICAS} replicas", sig == REPLICAS),
        (f"mean H low {h_low:.3f} within 0.07 of 0.5", abs(h_low - 0.5) <= 0.07),
        (f"mean H high {h_high:.3f} within 0.07 of 0.7", abs(h_high - 0.7) <= 0.07),
        (f"runtime {elapsed:.1f}s < {RUNTIME_LIMIT:.0f}s", elapsed < RUNTIME_LIMIT),
    ]
    assert record("C2 wavelet-domain crossover", checks)


def test_c3_analytic_crossover(record):
    c1, c2, h1, h2, m = 2.0, 1.0, 0.5, 0.7, 2
    pred = predict_crossover_cumulant(c1, c2, h1, h2, m)
    n = 2.0 ** pred.log2_break
    lhs, rhs = c1 * n ** (m + 2 * (h1 - 1)), c2 * n ** (m + 2 * (h2 - 1))
    rel = abs(lhs - rhs) / abs(rhs)
    # noiseless curve at the scales and weights of a 2**18 cumulant scan
    j = np.arange(15, dtype=float)
    diagram = ScalingDiagram(j, mixture_curve([c1, c2], [1.0, 1.4], j), LENGTH / 2.0 ** j)
    fit = fit_segmented(diagram)
    dev = abs(fit.log2_break - pred.log2_break)
    checks = [
        (f"equality residual {rel:.1e} <= 1e-10", rel <= 1e-10),
        (f"detected break {fit.log2_break:.3f} vs analytic {pred.log2_break:.3f} (|d|={dev:.3f} <= 1)", dev <= 1.0),
    ]
    assert record("C3 analytic crossover consistency", checks)


@pytest.mark.parametrize("hurst", [0.5, 0.6, 0.8])
def test_c4_pure_flow_null(hurst, record):
    flagged_c = flagged_w = 0
    h_c, h_w = [], []
    for k in range(10):
        s = synthesize_fgn(hurst, LENGTH, derive_seed(2024, k))
        cd = cumulant_scan(s, orders=(2,)).diagram(2)
        wd = logscale_diagram(dwt_detail_variances(s, "haar"))
        flagged_c += crossover_report(cd).significant
        flagged_w += crossover_report(wd).significant
        h_c.append(fit_unifractal(cd).hurst)
        h_w.append(hurst_from_slope(weighted_line(wd.log2_scale, wd.log2_statistic, wd.weight).slope))
    checks = [
        (f"cumulant crossovers in {flagged_c}/10 seeds", flagged_c <= 1),
        (f"wavelet crossovers in {flagged_w}/10 seeds", flagged_w <= 1),
        (f"cumulant mean H {np.mean(h_c):.3f}", abs(np.mean(h_c) - hurst) <= 0.05),
        (f"wavelet mean H {np.mean(h_w):.3f}", abs(np.mean(h_w) - hurst) <= 0.05),
    ]
    assert record(f"C4 pure-flow null H={hurst}", checks)


def test_c5_oracles(record):
    rng = np.random.default_rng(5)
    worst = 0.0
    for n in range(4, 65):
        for _ in range(5):
            x = rng.normal(size=n) * rng.uniform(0.1, 100) + rng.uniform(-50, 50)
            for m in (2, 3, 4):
                exact = float(kstat_power_sums(x.tolist(), m))
                worst = max(worst, abs(sample_cumulant(x, m) - exact) / abs(exact))
    length = 2 ** 14
    acov = np.mean([sample_autocovariance(synthesize_fgn(0.7, length, s).values, 10) for s in range(10)], axis=0)
    acov_err = np.max(np.abs(acov - fgn_autocovariance(0.7, np.arange(11))))
    energy_err = 0.0
    for wavelet in ("haar", "d4"):
        x = synthesize_fgn(0.6, 2 ** 12, 1).values + 1.5
        details, approx = dwt(x, wavelet, 9)
        energy = sum(np.sum(d * d) for d in details) + np.sum(approx * approx)
        energy_err = max(energy_err, abs(energy / np.sum(x * x) - 1))
    checks = [
        (f"k-statistic max rel err {worst:.1e} <= 1e-10", worst <= 1e-10),
        (f"fGn autocov max err {acov_err:.4f} <= {4 / np.sqrt(length):.4f}", acov_err <= 4 / np.sqrt(length)),
        (f"DWT energy rel err {energy_err:.1e} <= 1e-8", energy_err <= 1e-8),
    ]
    assert record("C5 oracle suites", checks)


def test_c6_gaussian_degeneracy(record):
    gauss = compose_mixture(FlowSpec.from_dict(FIG_FLOW))
    rows3 = cumulant_scan(gauss).rows_for(3)
    flagged = sum(r.excluded for r in rows3)

    def m3_slope(hursts, weights):
        diagrams = []
        for r in range(5):
            spec = FlowSpec(
                [HurstComponent(h, w) for h, w in zip(hursts, weights)], LENGTH, derive_seed(8, r), "chi-squared"
            )
            diagrams.append(cumulant_scan(compose_mixture(spec), orders=(3,)).diagram(3))
        return diagrams

    slope1 = np.mean([fit_unifractal(d).slope for d in m3_slope([0.6], [1.0])])
    slope2 = np.mean([fit_unifractal(d).slope for d in m3_slope([0.9], [1.0])])
    mixed = [fit_segmented(d) for d in m3_slope([0.6, 0.9], [2.0, 1.0])]
    ordered = sum(f.slope_low < f.slope_high for f in mixed)
    checks = [
        (f"gaussian m=3 rows flagged {flagged}/{len(rows3)}", flagged == len(rows3)),
        (f"chi-squared m=3 slopes {slope1:.2f} (H=0.6) < {slope2:.2f} (H=0.9)", slope1 < slope2),
        (f"chi-squared mixture low<high slope in {ordered}/{len(mixed)}", ordered == len(mixed)),
    ]
    assert record("C6 gaussian degeneracy / chi-squared ordering", checks)
