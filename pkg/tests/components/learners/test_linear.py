import numpy as np
import pytest

from efold_cv.components.learners.linear import (
    Lasso,
    LinearRegression,
    Ridge,
    soft_threshold,
)


@pytest.fixture()
def noiseless() -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.PCG64(0))
    X = rng.standard_normal((50, 3))
    y = X @ np.array([2.0, -1.0, 0.5]) + 3.0
    return X, y


def test_least_squares_recovers_the_weights(noiseless) -> None:
    X, y = noiseless
    model = LinearRegression().fit(X, y)
    assert model.coef_ == pytest.approx([2.0, -1.0, 0.5], abs=1e-9)
    assert model.intercept_ == pytest.approx(3.0, abs=1e-9)


def test_rank_deficient_design_still_predicts(noiseless) -> None:
    X, y = noiseless
    duplicated = np.column_stack([X, X[:, 0]])
    model = LinearRegression().fit(duplicated, y)
    assert model.predict(duplicated) == pytest.approx(y, abs=1e-8)
    # minimum-norm solution splits the weight between the two copies
    assert model.coef_[0] == pytest.approx(model.coef_[3], abs=1e-8)


def test_ridge_shrinks_towards_zero(noiseless) -> None:
    X, y = noiseless
    ols = LinearRegression().fit(X, y).coef_
    ridge = Ridge(alpha=50.0).fit(X, y).coef_
    assert np.linalg.norm(ridge) < np.linalg.norm(ols)
    assert Ridge(alpha=1e-10).fit(X, y).coef_ == pytest.approx(ols, abs=1e-6)


def test_ridge_does_not_penalize_the_intercept() -> None:
    X = np.zeros((10, 1))
    y = np.full(10, 7.0)
    model = Ridge(alpha=1e6).fit(X, y)
    assert model.predict(np.zeros((1, 1)))[0] == pytest.approx(7.0)


def test_soft_threshold() -> None:
    assert soft_threshold(3.0, 1.0) == 2.0
    assert soft_threshold(-3.0, 1.0) == -2.0
    assert soft_threshold(0.5, 1.0) == 0.0


def test_strong_lasso_predicts_the_mean(noiseless) -> None:
    X, y = noiseless
    model = Lasso(alpha=1e3).fit(X, y)
    assert model.coef_.tolist() == [0.0, 0.0, 0.0]
    assert model.predict(X[:3]) == pytest.approx([y.mean()] * 3)


def test_weak_lasso_is_close_to_least_squares(noiseless) -> None:
    X, y = noiseless
    model = Lasso(alpha=1e-6, tol=1e-10, max_sweeps=10_000).fit(X, y)
    assert model.coef_ == pytest.approx([2.0, -1.0, 0.5], abs=1e-3)


def test_lasso_zeroes_an_irrelevant_feature() -> None:
    rng = np.random.Generator(np.random.PCG64(1))
    X = rng.standard_normal((200, 2))
    y = 3.0 * X[:, 0] + 0.01 * rng.standard_normal(200)
    model = Lasso(alpha=0.1).fit(X, y)
    assert model.coef_[1] == 0.0
    assert 2.5 < model.coef_[0] < 3.0


def test_lasso_respects_max_sweeps(noiseless) -> None:
    X, y = noiseless
    model = Lasso(alpha=1e-6, tol=0.0, max_sweeps=3).fit(X, y)
    assert model.n_sweeps_ == 3
