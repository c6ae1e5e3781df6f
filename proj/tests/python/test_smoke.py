import json
import math

import numpy as np
import pytest

import polyakernels as pk


def test_specfun_values():
    assert pk.specfun.gamma(5.0) == pytest.approx(24.0, rel=1e-14)
    assert pk.specfun.e1(1.0) == pytest.approx(0.21938393439552027, rel=1e-13)
    assert pk.specfun.erf(1.0) == pytest.approx(math.erf(1.0), rel=1e-14)
    assert pk.specfun.upper_inc_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-13)


def test_kernel_evaluation():
    r = np.array([0.0, 1.0, 2.0])
    k = pk.eval_kernel("gamma:s=2,theta=1", r)
    assert k.shape == (3,)
    assert k[0] == 1.0
    assert k[1] == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert np.all(np.diff(k) < 0)
    ft = pk.eval_ft("gamma:s=1,theta=1", np.array([1.0]))
    assert ft[0] == pytest.approx(math.log(2.0), rel=1e-10)
    assert pk.area_under_curve("gamma:s=2,theta=1") == pytest.approx(2.0, rel=1e-8)


def test_errors_are_python_exceptions():
    with pytest.raises(pk.ParseError):
        pk.eval_kernel("gamma:s=x", np.array([1.0]))
    with pytest.raises(ValueError):
        pk.FeatureMap("rb", "gaussian:sigma=1", copies=4, dim=2)


def test_feature_maps_match_the_kernel_on_average():
    rng = np.random.default_rng(0)
    X = 2.0 * rng.random((10, 2))
    K = pk.exact_gram("gamma:s=2,theta=1", X)
    fm = pk.FeatureMap("rb", "gamma:s=2,theta=1", copies=4000, dim=2, seed=1)
    Z = fm.featurize(X)
    assert Z.shape[0] == 10
    G = fm.gram(X)
    assert np.allclose(G, Z @ Z.T)
    assert np.allclose(np.diag(G), 1.0)
    assert np.max(np.abs(G - K)) < 0.05

    fc = pk.FeatureMap("rf-complex", "laplace:sigma=1", copies=16, dim=2, seed=2)
    Zc = fc.featurize(X)
    assert np.iscomplexobj(Zc)
    assert Zc.shape == (10, 16)


def test_build_is_deterministic():
    X = np.linspace(0, 1, 12).reshape(6, 2)
    a = pk.FeatureMap("rf", "laplace:sigma=0.5", copies=8, dim=2, seed=3).featurize(X)
    b = pk.FeatureMap("rf", "laplace:sigma=0.5", copies=8, dim=2, seed=3).featurize(X)
    assert np.array_equal(a, b)


def test_variance_theory_and_expected_error():
    assert pk.variance_theory("rb", 0.5) == pytest.approx(0.25)
    assert pk.variance_theory("rf-complex", 0.5) == pytest.approx(0.75)
    K = np.array([[1.0, 0.5], [0.5, 1.0]])
    assert pk.expected_sq_frobenius("rf-complex", K) == pytest.approx(1.5)
    assert pk.expected_sq_frobenius("rb", K, copies=2) == pytest.approx(0.25)


def test_ridge_fit_predict():
    rng = np.random.default_rng(4)
    X = rng.random((120, 2))
    y = np.sin(3 * X[:, 0]) + X[:, 1]
    fm = pk.FeatureMap("rb", "gamma:s=2,theta=0.5", copies=64, dim=2, seed=5)
    model = pk.RidgeModel(fm, X, y, lam=1e-3)
    pred = model.predict(X)
    assert pred.shape == (120,)
    assert np.mean((pred - y) ** 2) < 0.05
    assert model.weights.shape[1] == 1


def test_cli_in_process():
    code, out, err = pk.run_cli(["kernel", "eval", "--kernel", "gamma:s=2,theta=1", "0", "1"])
    assert code == 0
    assert out == "r,k\n0,1\n1,0.36787944117144245\n"
    assert err == ""
    code, out, err = pk.run_cli(["kernel", "eval", "--kernel", "gamma:s=x", "1"])
    assert code == 3
    assert json.loads(err)["error"] == "parse_error"
