import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mh_oracle, random_network, random_passive
from spsim.geometry import RifPointCloud, to_rif
from spsim.metrics import (
    ComparisonConfig,
    ComparisonError,
    Direction,
    EmptyBandError,
    GridMismatchError,
    NNMode,
    Sweep,
    Tier,
    TierThresholds,
    classify_tier,
    compare,
    d_abs,
    d_mh,
    d_mh_directed,
    d_rms,
    effective_band,
    element_sweep,
    sps_from_distance,
)
from spsim.synth import frequency_grid
from spsim.touchstone import NetworkData


def sweep(values, freqs=None):
    values = np.asarray(values, dtype=complex)
    freqs = np.arange(1, values.size + 1) * 1e9 if freqs is None else np.asarray(freqs)
    return Sweep(freqs, values)


def cloud(points, f_norm=1.0):
    return RifPointCloud.from_points(points, f_norm)


# --- norm-based distances -------------------------------------------------


def test_d_abs_examples():
    a = sweep([0.3 + 0.1j, -0.2j, 0.5])
    assert d_abs(a, a) == 0.0
    assert d_abs(sweep(np.ones(7)), sweep(np.zeros(7))) == 1.0
    assert d_abs(sweep([1, 1j]), sweep([0, 0])) == 1.0  # (1 + 1) / 2


def test_d_rms_examples():
    a = sweep([0.3 + 0.1j, -0.2j])
    assert d_rms(a, a) == 0.0
    assert d_rms(sweep([0.5, 0.5j, -0.5]), sweep([0, 0, 0])) == 0.5
    assert d_rms(sweep([1, 0]), sweep([0, 0])) == pytest.approx(np.sqrt(0.5), abs=1e-15)


def test_norm_distances_reject_grid_mismatch():
    with pytest.raises(GridMismatchError):
        d_abs(sweep([1, 2]), sweep([1, 2, 3]))
    with pytest.raises(GridMismatchError):
        d_rms(sweep([1, 2], [1e9, 2e9]), sweep([1, 2], [1e9, 2.1e9]))
    # sub-ppm differences count as collocated
    assert d_abs(sweep([1, 2], [1e9, 2e9]), sweep([1, 2], [1e9, 2e9 + 1])) == 0.0


# --- modified Hausdorff ---------------------------------------------------


def test_d_mh_directed_examples():
    pts = [[0.1, 0.2, 1], [0.3, -0.1, 2]]
    d, trace = d_mh_directed(cloud(pts), cloud(pts))
    assert d == 0.0 and trace[:, 1].tolist() == [0.0, 0.0]
    d, _ = d_mh_directed(cloud([[0.8, 0, 2]]), cloud([[0.7, 0, 2], [0.8, 0, 3]]))
    assert d == pytest.approx(0.1, abs=1e-15)


def test_d_mh_directed_mean_over_source_points():
    sa = cloud([[0, 0, 1], [1, 0, 1]])
    sb = cloud([[0, 0, 1]])
    d, trace = d_mh_directed(sa, sb)
    assert d == 0.5  # (0 + 1) / 2
    assert trace.shape == (2, 2)


def test_d_mh_directed_errors():
    with pytest.raises(ComparisonError, match="f_norm"):
        d_mh_directed(cloud([[0, 0, 1]], 1.0), cloud([[0, 0, 1]], 2.0))
    empty = RifPointCloud((1, 1), np.empty((0, 3)), 1.0, [])
    with pytest.raises(ComparisonError):
        d_mh_directed(empty, cloud([[0, 0, 1]]))


def test_d_mh_against_all_pairs_oracle(rng):
    for _ in range(50):
        ka, kb = rng.integers(1, 300, 2)
        pa = np.column_stack([random_passive(rng, ka).view(float).reshape(-1, 2),
                              np.sort(rng.uniform(0, 10, ka))])
        pb = np.column_stack([random_passive(rng, kb).view(float).reshape(-1, 2),
                              np.sort(rng.uniform(0, 10, kb))])
        d, _ = d_mh_directed(cloud(pa), cloud(pb))
        assert d == pytest.approx(mh_oracle(pa, pb), abs=1e-12)


def test_direction_semantics(rng):
    for _ in range(30):
        pa = np.column_stack([rng.uniform(-1, 1, (20, 2)), np.sort(rng.uniform(0, 5, 20))])
        pb = np.column_stack([rng.uniform(-1, 1, (35, 2)), np.sort(rng.uniform(0, 5, 35))])
        ca, cb = cloud(pa), cloud(pb)
        ab = d_mh(ca, cb, Direction.AtoB)
        ba = d_mh(ca, cb, Direction.BtoA)
        assert ab == d_mh_directed(ca, cb)[0]
        assert ba == d_mh_directed(cb, ca)[0]
        assert d_mh(ca, cb, Direction.Symmetric) == max(ab, ba)
        assert d_mh(ca, cb, "sym") == d_mh(cb, ca, "sym")


def test_subset_has_zero_directed_distance():
    z = np.linspace(0, 5, 101)
    fine = cloud(np.column_stack([np.cos(z), np.sin(z), z]))
    coarse = cloud(fine.points[::10])
    assert d_mh(coarse, fine, "atob") == 0.0
    ba = d_mh(coarse, fine, "btoa")
    assert ba > 0
    assert d_mh(coarse, fine, "sym") == ba


def test_polyline_mode_not_larger(rng):
    pa = np.column_stack([rng.uniform(-1, 1, (40, 2)), np.sort(rng.uniform(0, 5, 40))])
    pb = np.column_stack([rng.uniform(-1, 1, (40, 2)), np.sort(rng.uniform(0, 5, 40))])
    pts = d_mh(cloud(pa), cloud(pb), nn_mode=NNMode.PointSet)
    poly = d_mh(cloud(pa), cloud(pb), nn_mode=NNMode.Polyline)
    assert poly <= pts


# --- tiers ----------------------------------------------------------------


@pytest.mark.parametrize(
    "sps, tier",
    [
        (100, Tier.Good),
        (99.0, Tier.Good),
        (98.9999, Tier.Acceptable),
        (92.5639, Tier.Acceptable),
        (90.0, Tier.Acceptable),
        (89.99, Tier.Inconclusive),
        (84.677, Tier.Inconclusive),
        (80.0, Tier.Inconclusive),
        (79.9, Tier.Bad),
        (0, Tier.Bad),
    ],
)
def test_classify_tier(sps, tier):
    assert classify_tier(sps) is tier


def test_custom_thresholds():
    t = TierThresholds(good=95, acceptable=85, inconclusive=70)
    assert classify_tier(96, t) is Tier.Good
    assert classify_tier(75, t) is Tier.Inconclusive
    with pytest.raises(ValueError):
        TierThresholds(good=80, acceptable=90, inconclusive=70)


def test_sps_from_distance():
    assert sps_from_distance(0.0) == 100.0
    assert sps_from_distance(0.05) == pytest.approx(95.0, abs=1e-12)
    assert sps_from_distance(1.7) == 0.0


# --- effective band -------------------------------------------------------


def _flat(freqs, n=2):
    freqs = np.asarray(freqs, dtype=float)
    return NetworkData(n, freqs, np.zeros((freqs.size, n, n)))


def test_effective_band_examples():
    a = _flat(frequency_grid(10e6, 50e9, 10e6))
    b = _flat(frequency_grid(50e6, 40e9, 50e6))
    assert effective_band(a, b, ComparisonConfig(band_max=35e9)) == (50e6, 35e9)
    assert effective_band(a, a, ComparisonConfig()) == (10e6, 50e9)
    with pytest.raises(EmptyBandError):
        effective_band(_flat([1e9, 2e9]), _flat([3e9, 4e9]), ComparisonConfig())


def test_effective_band_lower_cap_and_polyline_needs_two():
    a = _flat([1e9, 2e9, 3e9])
    assert effective_band(a, a, ComparisonConfig(band_min=1.5e9)) == (1.5e9, 3e9)
    cfg = ComparisonConfig(band_min=2.5e9, nn_mode="polyline")
    with pytest.raises(EmptyBandError):
        effective_band(a, a, cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        ComparisonConfig(f_norm=0)
    with pytest.raises(ValueError):
        ComparisonConfig(band_min=5e9, band_max=1e9)
    assert ComparisonConfig(direction="btoa").direction is Direction.BtoA


# --- compare --------------------------------------------------------------


def test_compare_identity(rng):
    net = random_network(rng, 2, frequency_grid(1e8, 1e10, 1e8), "x")
    r = compare(net, net)
    assert r.sps_matrix == 100.0 and r.d_mh_matrix == 0.0
    assert r.tier is Tier.Good
    assert all(e.tier is Tier.Good for e in r.elements())


def test_compare_uniform_offset():
    rng = np.random.default_rng(3)
    f = frequency_grid(1e9, 20e9, 1e9)
    b = random_network(rng, 3, f, "meas", max_mag=0.9)
    a = NetworkData(3, f, b.matrices + 0.05, source_label="model")
    # step / f_norm = 3 > 2 forces same-frequency matches
    r = compare(a, b, ComparisonConfig(f_norm=1e9 / 3))
    for e in r.elements():
        assert e.d_mh == pytest.approx(0.05, abs=1e-12)
        assert e.sps == pytest.approx(95.0, abs=1e-10)
    assert r.sps_matrix == pytest.approx(95.0, abs=1e-10)


def test_compare_errors(rng):
    f = [1e9, 2e9]
    two = random_network(rng, 2, f)
    four = random_network(rng, 4, f)
    with pytest.raises(ComparisonError, match="port count mismatch"):
        compare(two, four)
    z = NetworkData(2, f, two.matrices, parameter="Z")
    with pytest.raises(ComparisonError, match="S-parameters"):
        compare(z, two)
    with pytest.raises(EmptyBandError):
        compare(two, random_network(rng, 2, [3e9, 4e9]))


def test_compare_report_structure(rng):
    fa = frequency_grid(1e8, 5e9, 1e8)
    fb = frequency_grid(5e7, 6e9, 5e7)
    a = random_network(rng, 2, fa, "a")
    b = random_network(rng, 2, fb, "b")
    cfg = ComparisonConfig(band_max=4e9)
    r = compare(a, b, cfg)
    assert r.effective_band == (1e8, 4e9)
    assert r.labels == ("a", "b") and r.config_echo is cfg
    assert len(r.per_element) == 2 and all(len(row) == 2 for row in r.per_element)
    n_in_band = int(np.sum((fa >= 1e8) & (fa <= 4e9)))
    for e in r.elements():
        assert e.trace.shape == (n_in_band, 2)
        assert e.sps == 100.0 * max(1.0 - e.d_mh, 0.0)
        assert e.effective_band == r.effective_band
        # element distance equals the brute-force oracle on the same clouds
        ca = to_rif(a, e.element, cfg.f_norm, r.effective_band)
        cb = to_rif(b, e.element, cfg.f_norm, r.effective_band)
        assert e.d_mh == pytest.approx(mh_oracle(ca.points, cb.points), abs=1e-12)
    assert r.d_mh_matrix == max(e.d_mh for e in r.elements())
    assert r.sps_matrix == min(e.sps for e in r.elements())
    assert r.tier is r.worst_element().tier


def test_compare_symmetric_is_symmetric(rng):
    a = random_network(rng, 2, frequency_grid(1e8, 5e9, 1e8))
    b = random_network(rng, 2, frequency_grid(1e8, 5e9, 7e7))
    cfg = ComparisonConfig(direction="sym")
    assert compare(a, b, cfg).d_mh_matrix == compare(b, a, cfg).d_mh_matrix


def test_compare_sps_bounds(rng):
    for _ in range(10):
        a = random_network(rng, 1, np.sort(rng.uniform(1e8, 1e10, 50)))
        b = random_network(rng, 1, np.sort(rng.uniform(1e8, 1e10, 50)))
        r = compare(a, b, ComparisonConfig(f_norm=rng.uniform(1e7, 1e11)))
        assert 0.0 <= r.sps_matrix <= 100.0


def test_element_sweep_band():
    net = _flat([1e9, 2e9, 3e9])
    s = element_sweep(net, (1, 2), band=(1.5e9, 3e9))
    assert s.freqs.tolist() == [2e9, 3e9]


# --- collocated properties --------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 200), f_norm=st.floats(1e6, 1e12))
def test_collocated_upper_bound(seed, k, f_norm):
    rng = np.random.default_rng(seed)
    f = np.sort(rng.choice(np.arange(1, 10 * k + 1), k, replace=False)) * 1e7
    a = random_network(rng, 1, f)
    b = random_network(rng, 1, f)
    d, _ = d_mh_directed(to_rif(a, (1, 1), f_norm), to_rif(b, (1, 1), f_norm))
    assert d <= d_abs(element_sweep(a, (1, 1)), element_sweep(b, (1, 1)))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 200), ratio=st.floats(2.0001, 1e3))
def test_collocated_equality(seed, k, ratio):
    rng = np.random.default_rng(seed)
    step = 1e7
    f = step * np.arange(1, k + 1)
    a = random_network(rng, 1, f)
    b = random_network(rng, 1, f)
    d, _ = d_mh_directed(to_rif(a, (1, 1), step / ratio), to_rif(b, (1, 1), step / ratio))
    assert abs(d - d_abs(element_sweep(a, (1, 1)), element_sweep(b, (1, 1)))) <= 1e-12


def test_degeneracy_with_unit_fnorm():
    # 1 Hz normalization with a 10 Hz grid: z steps of 10 dominate the
    # in-plane gaps, so point matching reduces to same-frequency pairs.
    rng = np.random.default_rng(9)
    f = 10.0 * np.arange(1, 101)
    a, b = random_network(rng, 1, f), random_network(rng, 1, f)
    d, _ = d_mh_directed(to_rif(a, (1, 1), 1.0), to_rif(b, (1, 1), 1.0))
    assert d == pytest.approx(d_abs(element_sweep(a, (1, 1)), element_sweep(b, (1, 1))), abs=1e-12)
