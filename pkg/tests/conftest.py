import numpy as np
import pytest

from spsim.touchstone import NetworkData


def random_passive(rng, shape, max_mag=1.0):
    mag = max_mag * np.sqrt(rng.uniform(0, 1, shape))
    return mag * np.exp(1j * rng.uniform(-np.pi, np.pi, shape))


def random_network(rng, n_ports, freqs, label="", max_mag=1.0):
    freqs = np.asarray(freqs, dtype=float)
    s = random_passive(rng, (freqs.size, n_ports, n_ports), max_mag)
    return NetworkData(n_ports, freqs, s, source_label=label)


def random_grid(rng, k):
    f = np.unique(rng.uniform(1e6, 50e9, k))
    while f.size < k:
        f = np.unique(np.concatenate([f, rng.uniform(1e6, 50e9, k - f.size)]))
    return f


def mh_oracle(pa, pb):
    """Directed modified Hausdorff distance from the full distance matrix."""
    diff = pa[:, None, :] - pb[None, :, :]
    return float(np.mean(np.min(np.sqrt(np.sum(diff**2, axis=2)), axis=1)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


BATCH_GRID = (10e6, 50e9, 10e6)
BATCH_BANDS = [10e9, 35e9, 50e9]


def build_batch_fixture(root):
    """Write three synthetic model/measurement pairs and a manifest."""
    from spsim.synth import LineSpec, ideal_line, shifted_resonator_pair
    from spsim.touchstone import save_touchstone

    pairs = [
        ("SL_2inch", 0.0508, 20.0),
        ("SL_8inch", 0.2032, 8.0),
    ]
    rows = []
    for name, length, loss in pairs:
        model = ideal_line(LineSpec(length, 7e-9, loss, 10e9, BATCH_GRID), f"{name}_model")
        meas = ideal_line(LineSpec(length, 7e-9, 0.0, 10e9, BATCH_GRID), f"{name}_meas")
        save_touchstone(model, root / f"{name}_model.s2p")
        save_touchstone(meas, root / f"{name}_meas.s2p", "MA", "MHz")
        rows.append((name, f"{name}_model.s2p", f"{name}_meas", f"{name}_meas.s2p"))
    a, b = shifted_resonator_pair(5e9, 0.1e9, 20.0, BATCH_GRID)
    save_touchstone(a, root / "Resonator_model.s2p")
    save_touchstone(b, root / "Resonator_meas.s2p", "DB")
    rows.append(("Resonator", "Resonator_model.s2p", "Resonator_meas", "Resonator_meas.s2p"))

    manifest = root / "manifest.csv"
    lines = ["label_model,path_model,label_meas,path_meas"]
    lines += [",".join(r) for r in rows]
    manifest.write_text("\n".join(lines) + "\n")
    return manifest, rows


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
