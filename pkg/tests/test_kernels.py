import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracspec.kernels import (
    PROCESS_KINDS,
    ProcessSpec,
    cov_matrix,
    fbm_cov,
    integration_matrix,
    read_cov_matrix,
    write_cov_matrix,
)

unit = st.floats(0.0, 1.0)
hursts = st.floats(0.05, 0.95)


@given(unit, hursts)
def test_fbm_cov_zero_at_origin(y, H):
    assert fbm_cov(0.0, y, H) == 0.0


@given(unit, unit)
def test_fbm_cov_wiener_is_min(x, y):
    assert fbm_cov(x, y, 0.5) == pytest.approx(min(x, y), abs=1e-15)


@given(unit, hursts)
def test_fbm_cov_diagonal(x, H):
    assert fbm_cov(x, x, H) == pytest.approx(x ** (2 * H), abs=1e-15)
    assert fbm_cov(1.0, 1.0, H) == 1.0


def _all_specs(H):
    return [
        ProcessSpec("fbm", H),
        ProcessSpec("bridge", H),
        ProcessSpec("centered_fbm", H),
        ProcessSpec("centered_bridge", H),
        ProcessSpec("slepian", H),
        ProcessSpec("slepian_gamma", H, gamma=0.3),
        ProcessSpec("slepian_gamma", H, gamma=0.5),
        ProcessSpec("ou", H, beta=1.3, sigma=0.6),
    ]


@pytest.mark.parametrize("H", [0.3, 0.5, 0.7])
def test_symmetric_and_psd(H):
    for spec in _all_specs(H):
        G = cov_matrix(spec, 120).values
        assert np.array_equal(G, G.T), spec.kind
        w = np.linalg.eigvalsh(G)
        assert w[0] >= -1e-10 * w[-1], spec.kind


def test_bridge_vanishes_at_ends():
    N = 400
    cov = cov_matrix(ProcessSpec("bridge", 0.7), N)
    G = cov.values
    assert np.max(np.abs(G[0])) < 5.0 / N
    assert np.max(np.abs(G[-1])) < 5.0 / N


@pytest.mark.parametrize("kind", ["centered_fbm", "centered_bridge"])
def test_centered_rows_integrate_to_zero(kind):
    cov = cov_matrix(ProcessSpec(kind, 0.4), 300)
    assert np.max(np.abs(cov.values.sum(axis=1) * cov.weight)) < 1e-12


def test_slepian_end_sum_is_one():
    # G(0, y) + G(1, y) = 1 evaluated at the grid ends up to grid resolution
    N = 500
    G = cov_matrix(ProcessSpec("slepian", 0.6), N).values
    assert np.max(np.abs(G[0] + G[-1] - 1.0)) < 5.0 / N


def test_ou_without_drift_is_fbm():
    a = cov_matrix(ProcessSpec("ou", 0.35), 200).values
    b = cov_matrix(ProcessSpec("fbm", 0.35), 200).values
    assert np.max(np.abs(a - b)) <= 1e-14


@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_slepian_gamma_trivial_perturbation(gamma):
    a = cov_matrix(ProcessSpec("slepian_gamma", 0.6, gamma=gamma), 64).values
    b = cov_matrix(ProcessSpec("slepian", 0.6), 64).values
    assert np.array_equal(a, b)


def test_ou_stationary_wiener_case():
    beta = 2.0
    N = 400
    cov = cov_matrix(ProcessSpec("ou", 0.5, beta=beta, sigma=math.sqrt(1 / (2 * beta))), N)
    rng = np.random.default_rng(3)
    i, j = rng.integers(0, N, size=(2, 10))
    x = cov.grid
    exact = np.exp(-beta * np.abs(x[i] - x[j])) / (2 * beta)
    assert np.max(np.abs(cov.values[i, j] - exact)) < 2.0 / N


def test_integration_matrix_is_trapezoid_like():
    J = integration_matrix(8)
    u = np.ones(8)
    assert np.allclose(J @ u, (np.arange(8) + 0.5) / 8)


def test_immutable_output():
    cov = cov_matrix(ProcessSpec("fbm", 0.5), 16)
    with pytest.raises(ValueError):
        cov.values[0, 0] = 1.0


def test_spec_validation():
    assert ProcessSpec("W", 0.5).kind == "fbm"
    assert ProcessSpec("slepian_gamma", 0.5, gamma=0.5).critical
    assert not ProcessSpec("slepian_gamma", 0.5, gamma=0.5000001).critical
    with pytest.raises(ValueError):
        ProcessSpec("levy", 0.5)
    with pytest.raises(ValueError):
        ProcessSpec("fbm", 1.0)
    with pytest.raises(ValueError):
        ProcessSpec("ou", 0.5, sigma=-1.0)
    with pytest.raises(ValueError):
        cov_matrix(ProcessSpec("fbm", 0.5), 1)
    assert len(PROCESS_KINDS) == 7


def test_binary_round_trip(tmp_path):
    cov = cov_matrix(ProcessSpec("ou", 0.3, beta=0.5, sigma=0.2), 33)
    path = tmp_path / "cov.bin"
    write_cov_matrix(path, cov)
    header, values = read_cov_matrix(path)
    assert header == {"kind": "ou", "hurst": 0.3, "n": 33,
                      "params": {"gamma": 0.5, "beta": 0.5, "sigma": 0.2}}
    assert np.array_equal(values, cov.values)
    raw = path.read_bytes()
    assert raw.startswith(b"FSCOV01\n")
    assert len(raw) == 8 + 4 + int.from_bytes(raw[8:12], "little") + 8 * 33 * 33


def test_binary_rejects_bad_files(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"nope")
    with pytest.raises(ValueError):
        read_cov_matrix(bad)
    cov = cov_matrix(ProcessSpec("fbm", 0.5), 4)
    path = tmp_path / "cut.bin"
    write_cov_matrix(path, cov)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError):
        read_cov_matrix(path)
