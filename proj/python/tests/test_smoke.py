import json

import numpy as np
import pytest

import eiginf

M2 = np.array([[0.8, 0.5], [0.0, 0.4]])


def test_worked_example_projectors():
    s = eiginf.split(M2, "largest:1")
    np.testing.assert_allclose(s["P_I"], [[1, 1.25], [0, 0]], atol=1e-12)
    np.testing.assert_allclose(s["P_J"], [[0, -1.25], [0, 1]], atol=1e-12)
    np.testing.assert_allclose(s["Lambda_I"], [[0.8]], atol=1e-12)


def test_eig_matches_numpy():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(5, 5))
    values, right, left = eiginf.eig(m)
    np.testing.assert_allclose(np.sort_complex(values), np.sort_complex(np.linalg.eigvals(m)),
                               atol=1e-10)
    assert np.all(np.diff(np.abs(values)) <= 1e-12)
    np.testing.assert_allclose(left.T @ right, np.eye(5), atol=1e-10)
    np.testing.assert_allclose(m @ right, right * values, atol=1e-10)


def test_decompose_document_round_trip():
    doc = eiginf.decompose(M2)
    assert doc["schema_version"] == 1
    assert doc["selected"] == [1]
    np.testing.assert_allclose(doc["P_I"], [[1, 1.25], [0, 0]], atol=1e-12)


def test_wald_exact_null_and_alternative():
    rng = np.random.default_rng(1)
    m = np.diag([1.0, 0.5, 0.3, 0.1]) + 0.05 * rng.normal(size=(4, 4))
    values, vectors = np.linalg.eig(m)
    top = np.real(vectors[:, np.argmax(np.abs(values))])
    a = rng.normal(size=(16, 16))
    omega = a @ a.T

    null = eiginf.wald(top, mean=m, omega=omega, n=500)
    assert null["statistic"] == 0.0
    assert null["p_value"] == 1.0
    assert null["df"] == 3

    alt = eiginf.wald(top + 0.2 * rng.normal(size=4), mean=m, omega=omega, n=500)
    assert alt["statistic"] > 0.0
    assert 0.0 <= alt["p_value"] < 1.0


def test_ttest_from_observations():
    rng = np.random.default_rng(2)
    m = np.array([[0.9, 0.2], [0.1, 0.3]])
    obs = [m + 0.1 * rng.normal(size=(2, 2)) for _ in range(400)]
    out = eiginf.ttest(0, 0, observations=obs)
    assert out["test"]["test"] == "t"
    assert out["test"]["diagnostics"]["route"] == "coefficient"
    # D for the dominant root of m: first component over second.
    values, vectors = np.linalg.eig(m)
    v = vectors[:, np.argmax(np.abs(values))]
    assert abs(out["D_hat"][0, 0] - v[0] / v[1]) < 5 * out["std_error"][0, 0]


def test_katz_on_directed_cycle_is_uniform():
    a = np.roll(np.eye(4), 1, axis=1)
    a[0, 2] = 1.0  # chord breaks the +-rho rotation symmetry
    r = eiginf.katz(a)
    values = np.linalg.eigvals(a)
    assert r["dominant_root"] == pytest.approx(np.max(np.abs(values)), abs=1e-10)
    assert np.all(r["scores"] > 0)
    assert np.linalg.norm(r["scores"]) == pytest.approx(1.0)


def test_quasi_symmetry_certificate():
    m1 = np.array([[1.0, 3.0], [1.0, 1.0]])
    ok, gamma = eiginf.quasi_symmetry(m1)
    assert ok
    np.testing.assert_allclose(gamma @ m1, (gamma @ m1).T, atol=1e-10)
    assert np.all(np.linalg.eigvalsh(gamma) > 0)
    ok, gamma = eiginf.quasi_symmetry(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert not ok and gamma is None


def test_simulate_is_deterministic():
    cfg = {
        "m_true": [[0.9, 0.2], [0.1, 0.3]],
        "omega_m": [[1, 0], [0, 1]],
        "n_grid": [100],
        "reps": 100,
        "seed": 5,
    }
    # Compare the raw text: NaN entries would defeat dict equality.
    text = json.dumps(cfg)
    a = eiginf._eiginf.simulate_json(text, None, None, 1)
    assert a == eiginf._eiginf.simulate_json(text, None, None, 2)
    assert a != eiginf._eiginf.simulate_json(text, 6, None, 1)
    out = eiginf.simulate(cfg)
    assert np.asarray(out["wald"]["rejection_rates"]).shape == (1, 3)


def test_errors_map_to_exceptions():
    with pytest.raises(eiginf.DefectiveMatrixError):
        eiginf.eig(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(eiginf.Error):
        eiginf.split(M2, "largest:0")
    with pytest.raises(eiginf.Error):
        eiginf.wald([1.0, 0.0], mean=M2)


def test_cli_entry_point():
    code, out, err = eiginf.run_cli(["check-symmetry", "--help"])
    assert code == 0 and "check-symmetry" in out
    code, _, err = eiginf.run_cli(["decompose", "--input", "/nonexistent.csv"])
    assert code == 1 and "error:" in err
