import math

import numpy as np
import pytest

from invivolink.capacity import LinkBudget
from invivolink.channel import (InVivoPathModel, front_layout,
                                geometry_for_case, pairwise_distances,
                                synthesize_channel)


def budgets():
    return (LinkBudget(n_streams=2), LinkBudget(n_streams=1))


def test_path_loss_doubling_distance():
    model = InVivoPathModel(exponent=4.0)
    for d in (70.0, 123.0, 250.0):
        drop = model.path_loss_db(2 * d) - model.path_loss_db(d)
        assert drop == pytest.approx(40.0 * math.log10(2.0), abs=1e-12)  # ~12.04 dB


def test_path_loss_reference_point():
    model = InVivoPathModel(ref_loss_db=60.0, ref_distance_mm=70.0)
    assert model.path_loss_db(70.0) == pytest.approx(60.0, abs=1e-12)


def test_wavelength_scale():
    model = InVivoPathModel(wavelength_scale=6.0, carrier_hz=2.45e9)
    free_space_mm = 299792458.0 / 2.45e9 * 1e3
    assert model.wavelength_mm == pytest.approx(free_space_mm / 6.0, rel=1e-12)


def test_invalid_model_fields():
    for kwargs in (dict(exponent=0.0), dict(n_taps=0), dict(ref_distance_mm=-1.0),
                   dict(correlation=1.0), dict(correlation=-0.1)):
        with pytest.raises(ValueError):
            InVivoPathModel(**kwargs)


def test_determinism_bit_identical():
    model = InVivoPathModel()
    layout = geometry_for_case(3)
    for budget in budgets():
        a = synthesize_channel(layout, model, budget, seed=1234)
        b = synthesize_channel(layout, model, budget, seed=1234)
        assert np.array_equal(a.matrices, b.matrices)
        c = synthesize_channel(layout, model, budget, seed=1235)
        assert not np.array_equal(a.matrices, c.matrices)


def test_realization_shape_and_finite():
    model = InVivoPathModel()
    ch = synthesize_channel(geometry_for_case(1), model, LinkBudget(n_streams=2), seed=0)
    assert ch.matrices.shape == (52, 2, 2)
    assert np.all(np.isfinite(ch.matrices.view(float)))
    ch1 = synthesize_channel(geometry_for_case(1), model, LinkBudget(n_streams=1), seed=0)
    assert ch1.matrices.shape == (52, 1, 1)


def test_mean_gain_matches_path_loss():
    # Monte Carlo estimate of E|h|^2 against the closed-form path loss.
    model = InVivoPathModel()
    layout = geometry_for_case(1)
    budget = LinkBudget(n_streams=1)
    want_db = -model.path_loss_db(pairwise_distances(layout)[1])
    acc = 0.0
    n_seeds = 10_000
    for seed in range(n_seeds):
        ch = synthesize_channel(layout, model, budget, seed=seed)
        acc += float(np.mean(np.abs(ch.matrices) ** 2))
    got_db = 10.0 * math.log10(acc / n_seeds)
    assert got_db == pytest.approx(want_db, abs=0.2)


def test_mean_attenuation_monotone_in_distance():
    # Front-of-body cases 8,7,6,5,1 at 70/100/130/200/300 mm.
    model = InVivoPathModel()
    budget = LinkBudget(n_streams=2)
    means = []
    for case_id in (8, 7, 6, 5, 1):
        layout = geometry_for_case(case_id)
        acc = 0.0
        for seed in range(300):
            ch = synthesize_channel(layout, model, budget, seed=seed)
            acc += float(np.mean(np.abs(ch.matrices) ** 2))
        means.append(acc / 300)
    assert all(a > b for a, b in zip(means, means[1:]))


def test_frequency_selectivity_present_but_bounded():
    model = InVivoPathModel(rms_delay_ns=50.0)  # exaggerate the delay spread
    ch = synthesize_channel(geometry_for_case(8), model, LinkBudget(n_streams=1), seed=4)
    mags = np.abs(ch.matrices[:, 0, 0])
    assert mags.std() > 0.0
    flat = synthesize_channel(geometry_for_case(8), InVivoPathModel(n_taps=1),
                              LinkBudget(n_streams=1), seed=4)
    flat_mags = np.abs(flat.matrices[:, 0, 0])
    assert flat_mags.std() == pytest.approx(0.0, abs=1e-12)  # single tap -> flat


def test_correlation_option_preserves_mean_gain():
    layout = front_layout(120.0)
    budget = LinkBudget(n_streams=2)
    base = InVivoPathModel()
    corr = InVivoPathModel(correlation=0.6)
    acc_base = np.zeros((2, 2))
    acc_corr = np.zeros((2, 2))
    for seed in range(4000):
        acc_base += np.mean(np.abs(synthesize_channel(layout, base, budget, seed).matrices) ** 2, axis=0)
        acc_corr += np.mean(np.abs(synthesize_channel(layout, corr, budget, seed).matrices) ** 2, axis=0)
    ratio_db = 10 * np.log10(acc_corr / acc_base)
    assert np.all(np.abs(ratio_db) < 0.35)
