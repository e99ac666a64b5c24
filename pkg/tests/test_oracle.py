"""Analytic click-pattern oracle against independent closed forms."""

import dataclasses
import math

import numpy as np
import pytest

from pairsim import (ExperimentConfig, SourceModel, TruncationError, compare,
                     oracle_report, predicted_correlations, required_n_max,
                     truncated_joint)
from pairsim.config import NO_DECAY, reference_preset

Q = SourceModel.QUANTUM_TMS
C = SourceModel.CLASSICAL_CORRELATED


def make_config(model=Q, p=0.1, **overrides):
    base = dict(source_model=model, p_excitation=p, delay_dt=2e-6,
                retrieval_eff=1.0, transmission=1.0, detector_eff=1.0,
                memory_lifetime=NO_DECAY)
    base.update(overrides)
    return ExperimentConfig(**base)


def geometric_expect(p, x):
    """E[x**n] for the geometric law of mean p (closed form)."""
    return 1.0 / (1.0 + p * (1.0 - x))


def classical_expect(p, x, y):
    """E[x**n_s * y**n_m] for the exponential-mixture law (closed form)."""
    return 1.0 / (1.0 + p * (2.0 - x - y))


def closed_form_lossless_quantum(p):
    """Independent derivation of the lossless click correlations.

    With every efficiency 1, a photon reaching detector X of its pair
    survives the splitter with factor 1/2 in the no-click expectation, so
        Q(A)    = E[(1/2)**n]
        Q(A,B)  = E[0**n]          (both Stokes detectors dark)
        Q(A,C)  = E[(1/4)**n]      (one detector of each pair dark)
    and inclusion-exclusion gives the click joints.
    """
    q_a = geometric_expect(p, 0.5)
    q_ab = geometric_expect(p, 0.0)
    q_ac = geometric_expect(p, 0.25)
    p_a = 1.0 - q_a
    p_ab = 1.0 - 2.0 * q_a + q_ab
    p_ac = 1.0 - 2.0 * q_a + q_ac
    return p_a, p_ab / p_a ** 2, p_ac / p_a ** 2


def test_vacuum_source_never_clicks():
    dist = truncated_joint(make_config(p=0.0))
    assert dist.probs[0] == pytest.approx(1.0, abs=1e-12)
    assert dist.probs[1:].sum() == pytest.approx(0.0, abs=1e-12)


def test_lossless_quantum_matches_closed_form():
    p = 0.1
    p_a, g11_cf, g12_cf = closed_form_lossless_quantum(p)
    assert g11_cf == pytest.approx(21 / 11, rel=1e-12)
    assert g12_cf == pytest.approx(483 / 43, rel=1e-12)
    pred = oracle_report(make_config(p=p))
    assert pred.p_click["A"] == pytest.approx(p_a, rel=1e-9)
    assert pred.g11 == pytest.approx(g11_cf, rel=1e-9)
    assert pred.g22 == pytest.approx(g11_cf, rel=1e-9)
    assert pred.g12 == pytest.approx(g12_cf, rel=1e-9)
    assert pred.report.violated


def test_lossless_classical_sits_on_boundary():
    pred = oracle_report(make_config(model=C, p=0.1))
    assert pred.g11 == pytest.approx(pred.g12, rel=1e-9)
    assert pred.g22 == pytest.approx(pred.g12, rel=1e-9)
    # Exact equality case: the ratio is 1 up to enumeration round-off, so
    # the strict-inequality verdict bit is not meaningful here.
    assert pred.report.ratio == pytest.approx(1.0, abs=1e-9)
    assert abs(pred.report.lhs - pred.report.rhs) < 1e-9


def test_single_detector_click_probability_geometric_series():
    # Geometric mean 0.2 through per-photon detection probability 1/2:
    # click probability mu*eta/(1 + mu*eta) = 0.1/1.1.
    pred = oracle_report(make_config(p=0.2))
    assert pred.p_click["A"] == pytest.approx(0.1 / 1.1, rel=1e-9)


def test_classical_no_click_family():
    # P(no Stokes click) = 1/(1 + p*t*d); both channels dark:
    # 1/(1 + 2p) when lossless (exponential-mixture closed forms).
    p = 0.2
    dist = truncated_joint(make_config(model=C, p=p))
    masks = np.arange(16)
    assert dist.probs[0] == pytest.approx(1.0 / (1.0 + 2 * p), rel=1e-9)
    no_stokes = dist.probs[(masks & 0b0011) == 0].sum()
    assert no_stokes == pytest.approx(classical_expect(p, 0.0, 1.0), rel=1e-9)
    lossy = truncated_joint(make_config(model=C, p=p, transmission=0.8,
                                        detector_eff=0.5))
    no_stokes_lossy = lossy.probs[(masks & 0b0011) == 0].sum()
    assert no_stokes_lossy == pytest.approx(1.0 / (1.0 + p * 0.8 * 0.5), rel=1e-9)


def test_pattern_distribution_sums_with_bound():
    for cfg in (make_config(p=0.4), make_config(model=C, p=0.4),
                reference_preset()):
        dist = truncated_joint(cfg, n_max=60)
        total = dist.probs.sum()
        assert total <= 1.0 + 1e-12
        assert total + dist.truncation_error_bound >= 1.0 - 1e-12
        assert np.all(dist.probs >= 0.0)


def test_pattern_symmetry_under_detector_relabeling():
    dist = truncated_joint(reference_preset())
    for mask in range(16):
        a, b = mask & 1, (mask >> 1) & 1
        c, d = (mask >> 2) & 1, (mask >> 3) & 1
        swapped = b | (a << 1) | (d << 2) | (c << 3)
        assert dist.probs[mask] == pytest.approx(dist.probs[swapped], rel=1e-12)


def test_background_dilutes_cross_correlation_monotonically():
    last = math.inf
    for bg in (0.0, 0.002, 0.01, 0.05, 0.2):
        cfg = dataclasses.replace(reference_preset(), bg_antistokes_mean=bg)
        g12 = predicted_correlations(cfg)[2]
        assert g12 < last
        last = g12


def test_truncation_bound_decreases_with_n_max():
    cfg = make_config(p=2.0)
    bounds = [truncated_joint(cfg, n_max=n).truncation_error_bound
              for n in (5, 10, 20, 40)]
    assert all(b1 > b2 for b1, b2 in zip(bounds, bounds[1:]))


def test_truncation_warning_flag():
    dist = truncated_joint(make_config(p=2.0), n_max=5)
    assert dist.truncation_warning
    assert dist.truncation_error_bound > 1e-6


def test_prediction_refuses_insufficient_truncation():
    cfg = make_config(p=5.0)
    with pytest.raises(TruncationError) as err:
        predicted_correlations(cfg, n_max=8)
    needed = err.value.required_n_max
    assert needed > 8
    assert truncated_joint(cfg, n_max=needed).truncation_error_bound <= 1e-8


def test_required_n_max_bound_holds():
    cfg = make_config(p=0.5)
    n = required_n_max(cfg)
    assert truncated_joint(cfg, n_max=n).truncation_error_bound <= 1e-8


def test_compare_exact_agreement_is_all_zero():
    pred = oracle_report(reference_preset())
    trials = 10 ** 6
    counts = pred.pattern.probs * trials  # float counts for an exact match
    mc_g = {"g11": (pred.g11, 0.01), "g22": (pred.g22, 0.01),
            "g12": (pred.g12, 0.01)}
    rows = compare(counts, mc_g, pred, trials)
    assert all(row.z == 0.0 for row in rows)
    assert not any(row.flagged for row in rows)


def test_compare_flags_injected_offset():
    pred = oracle_report(reference_preset())
    trials = 10 ** 6
    counts = pred.pattern.probs * trials
    p0 = pred.pattern.probs[1]
    counts[1] += 5.0 * math.sqrt(trials * p0 * (1 - p0))
    mc_g = {"g11": (pred.g11, 0.01), "g22": (pred.g22, 0.01),
            "g12": (pred.g12 + 0.06, 0.01)}
    rows = {row.quantity: row for row in compare(counts, mc_g, pred, trials)}
    assert rows["pattern_A"].flagged
    assert rows["g12"].flagged
    assert not rows["g11"].flagged


def test_preset_oracle_reproduces_calibration_targets(preset):
    pred = oracle_report(preset)
    assert pred.singles.stokes == pytest.approx(220.0, rel=1e-9)
    assert pred.singles.antistokes == pytest.approx(70.0, rel=1e-9)
    assert pred.g12 == pytest.approx(2.4, rel=1e-9)
    assert pred.report.violated
