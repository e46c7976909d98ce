"""Tests for the PAM solver and its block updates."""

from itertools import combinations

import numpy as np
import pandas as pd
import pytest
from scipy import sparse

from app.core.exceptions import ContractViolation, InvalidArgumentError, NumericalError
from app.models.solver import AdaptiveGraph, ProjectionMatrix, PseudoLabels, SolverState
from app.schemas.solver import AblationCaseEnum, BlufsConfig
from app.services.dataset_ops import gen_synthetic, standardize
from app.services.eval_ops import acc, kmeans
from app.services.graph_ops import build_similarity, normalize_affinity
from app.services.selection_ops import feature_ranking, reduce
from app.services.solver_ops import (
    ablation_variant,
    convergence_frame,
    hard_threshold_rows,
    initial_state,
    label_loss,
    label_loss_grad,
    objective,
    objective_value,
    project_rows_to_simplex,
    project_to_ball,
    run_pam,
    spectral_embedding,
    trace_frame,
    update_p,
    update_w,
    update_y,
    write_frame,
)


def random_graph(rng, n, k):
    """Случайная P: строки на симплексе, k ненулей, нулевая диагональ."""
    P = np.zeros((n, n))
    for i in range(n):
        cols = rng.choice([j for j in range(n) if j != i], size=k, replace=False)
        P[i, cols] = rng.dirichlet(np.ones(k))
    return P


def make_state(P, W, Y, k, rho=None):
    """Собрать SolverState из плотных массивов."""
    rho = rho if rho is not None else max(float(np.linalg.norm(Y)), 1.0)
    return SolverState(
        P=AdaptiveGraph(P=sparse.csr_matrix(P), k=k),
        W=ProjectionMatrix(W=W, budget=W.shape[0]),
        Y=PseudoLabels(Y=Y, rho=rho),
    )


def simplex_by_bisection(a, iterations=200):
    """Проекция на симплекс бисекцией по сдвигу eta (независимый метод)."""
    lo, hi = -a.max(), 1.0 - a.min()
    for _ in range(iterations):
        eta = (lo + hi) / 2.0
        if np.maximum(a + eta, 0.0).sum() > 1.0:
            hi = eta
        else:
            lo = eta
    return np.maximum(a + (lo + hi) / 2.0, 0.0)


def p_row_oracle(V_row, pk_row, i, k, beta, mu, tau1):
    """Перебор носителей размера k и точный QP на симплексе для каждого."""
    n = V_row.size
    candidates = [j for j in range(n) if j != i]
    best_value, best_row = np.inf, None
    for subset in combinations(candidates, k):
        subset = list(subset)
        a = (2 * tau1 * pk_row[subset] - beta * V_row[subset]) / (2 * (mu + tau1))
        row = np.zeros(n)
        row[subset] = simplex_by_bisection(a)
        value = np.sum(beta * V_row * row + mu * row**2 + tau1 * (row - pk_row) ** 2)
        if value < best_value:
            best_value, best_row = value, row
    return best_row


# Simplex projection tests
def test_project_rows_to_simplex_matches_bisection(rng):
    """Тест: сортировочная проекция совпадает с бисекцией."""
    A = rng.normal(scale=2.0, size=(30, 6))

    projected = project_rows_to_simplex(A)

    for row, a in zip(projected, A):
        np.testing.assert_allclose(row, simplex_by_bisection(a), atol=1e-12)
    assert np.all(projected >= 0)
    np.testing.assert_allclose(projected.sum(axis=1), 1.0, atol=1e-12)


def test_project_rows_to_simplex_keeps_feasible_point():
    """Тест: точка симплекса не меняется."""
    A = np.array([[0.2, 0.3, 0.5]])
    np.testing.assert_allclose(project_rows_to_simplex(A), A, atol=1e-15)


# update_p tests
def test_update_p_matches_oracle(rng):
    """Тест: P-обновление совпадает с переборным QP-оракулом (50 случаев)."""
    for _ in range(50):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(1, min(4, n - 1) + 1))
        d, c = 3, 2
        X = rng.normal(size=(d, n))
        W = rng.normal(size=(d, c))
        Y = rng.normal(size=(n, c))
        Pk = random_graph(rng, n, k)
        cfg = BlufsConfig(
            s=d,
            k=k,
            beta=float(rng.uniform(0.1, 2.0)),
            mu=float(rng.uniform(0.1, 2.0)),
            tau1=float(rng.uniform(0.01, 1.0)),
        )

        P_new = update_p(make_state(Pk, W, Y, k), X, cfg).P.toarray()

        Z = X.T @ W
        V = np.sum((Z[:, None, :] - Z[None, :, :]) ** 2, axis=2)
        for i in range(n):
            expected = p_row_oracle(V[i], Pk[i], i, k, cfg.beta, cfg.mu, cfg.tau1)
            np.testing.assert_allclose(P_new[i], expected, atol=1e-6)


def test_update_p_constraints(rng):
    """Тест: строки P на симплексе, не более k ненулей, нулевая диагональ."""
    n, k = 20, 5
    X = rng.normal(size=(4, n))
    W, Y = rng.normal(size=(4, 2)), rng.normal(size=(n, 2))
    state = make_state(random_graph(rng, n, k), W, Y, k)

    P = update_p(state, X, BlufsConfig(s=2, k=k)).P

    assert np.all(np.diff(P.indptr) <= k)
    assert np.all(P.diagonal() == 0)
    assert P.data.min() >= 0
    np.testing.assert_allclose(np.asarray(P.sum(axis=1)).ravel(), 1.0, atol=1e-9)


def test_update_p_invalid_k(rng):
    """Тест: k >= n отклоняется."""
    n = 4
    state = make_state(random_graph(rng, n, 2), np.zeros((2, 1)), np.zeros((n, 1)), 2)

    with pytest.raises(InvalidArgumentError):
        update_p(state, rng.normal(size=(2, n)), BlufsConfig(s=1, k=4))


# update_w tests
def _w_problem(rng, d=4, n=12, c=2):
    X = rng.normal(size=(d, n))
    Y = rng.normal(size=(n, c))
    Wk = rng.normal(size=(d, c))
    Pk = random_graph(rng, n, 3)
    s_hat = normalize_affinity(build_similarity(X, k=3))
    return X, Y, Wk, Pk, s_hat


def test_update_w_stationarity(rng):
    """Тест: при s = d решение - стационарная точка W-подзадачи (50 случаев)."""
    for _ in range(50):
        d = int(rng.integers(2, 6))
        X, Y, Wk, Pk, s_hat = _w_problem(rng, d=d)
        cfg = BlufsConfig(
            s=d,
            lambda_=float(rng.uniform(0.1, 2.0)),
            beta=float(rng.uniform(0.0, 2.0)),
            tau2=float(rng.uniform(0.01, 1.0)),
        )
        state = make_state(Pk, Wk, Y, 3)

        W = update_w(state, X, Y, cfg).W

        def subproblem(Wv):
            return objective_value(state.P.P, Wv, Y, X, s_hat, cfg) + cfg.tau2 * np.sum(
                (Wv - Wk) ** 2
            )

        h = 1e-5
        grad = np.zeros_like(W)
        for idx in np.ndindex(W.shape):
            step = np.zeros_like(W)
            step[idx] = h
            grad[idx] = (subproblem(W + step) - subproblem(W - step)) / (2 * h)
        rhs = X @ Y + cfg.tau2 * Wk
        assert np.max(np.abs(grad)) <= 1e-6 * (1.0 + np.linalg.norm(rhs))


def test_update_w_row_budget(rng):
    """Тест: после проекции не более s ненулевых строк."""
    X, Y, Wk, Pk, _ = _w_problem(rng, d=6)
    state = make_state(Pk, hard_threshold_rows(Wk, 2), Y, 3)

    W = update_w(state, X, Y, BlufsConfig(s=2))

    assert W.support.size <= 2
    assert W.budget == 2


def test_update_w_sufficient_decrease(rng):
    """Тест: значение W-подзадачи не больше, чем в W^k."""
    for _ in range(20):
        X, Y, Wk, Pk, s_hat = _w_problem(rng, d=6)
        Wk = hard_threshold_rows(Wk, 3)
        cfg = BlufsConfig(s=3, tau2=0.05)
        state = make_state(Pk, Wk, Y, 3)

        W = update_w(state, X, Y, cfg).W

        before = objective_value(state.P.P, Wk, Y, X, s_hat, cfg)
        after = objective_value(state.P.P, W, Y, X, s_hat, cfg)
        assert after + cfg.tau2 * np.sum((W - Wk) ** 2) <= before + 1e-8 * (1 + abs(before))


def test_update_w_indefinite_system(rng):
    """Тест: не положительно определенная система -> NumericalError с числом обусловленности."""
    X, Y, Wk, Pk, _ = _w_problem(rng)
    cfg = BlufsConfig(s=4).model_copy(update={"lambda_": -1e6})

    with pytest.raises(NumericalError) as exc_info:
        update_w(make_state(Pk, Wk, Y, 3), X, Y, cfg)

    assert "condition_number" in exc_info.value.context


def test_hard_threshold_rows_ties():
    """Тест: при равных нормах сохраняется меньший индекс."""
    W = np.array([[1.0, 0.0], [0.0, 2.0], [2.0, 0.0], [0.0, 0.0]])

    projected = hard_threshold_rows(W, 2)

    np.testing.assert_array_equal(projected, [[0, 0], [0, 2], [2, 0], [0, 0]])
    tied = hard_threshold_rows(np.ones((3, 2)), 2)
    assert np.flatnonzero(np.any(tied != 0, axis=1)).tolist() == [0, 1]


# update_y tests
def test_label_loss_gradient_finite_differences(rng):
    """Тест: градиент l(Y) совпадает с центральными разностями (50 случаев)."""
    for _ in range(50):
        n, c = int(rng.integers(5, 12)), int(rng.integers(1, 4))
        X = rng.normal(size=(3, n))
        s_hat = normalize_affinity(build_similarity(X, k=2))
        B = rng.normal(size=(n, c))
        Y = rng.normal(size=(n, c))
        Yk = rng.normal(size=(n, c))
        alpha, tau3 = float(rng.uniform(0, 2)), float(rng.uniform(0, 1))

        grad = label_loss_grad(Y, B, s_hat, Yk, alpha, tau3)

        h = 1e-6
        fd = np.zeros_like(Y)
        for idx in np.ndindex(Y.shape):
            step = np.zeros_like(Y)
            step[idx] = h
            fd[idx] = (
                label_loss(Y + step, B, s_hat, Yk, alpha, tau3)
                - label_loss(Y - step, B, s_hat, Yk, alpha, tau3)
            ) / (2 * h)
        assert np.linalg.norm(fd - grad) <= 1e-5 * max(1.0, np.linalg.norm(grad))


def test_update_y_recovers_regression_target():
    """Тест: при alpha = tau3 = theta = 0 итерации сходятся к Y = X^T W."""
    n, c = 10, 2
    Q, _ = np.linalg.qr(np.random.default_rng(5).normal(size=(n, c)))
    X = np.eye(n)
    W = 0.5 * Q
    s_hat = normalize_affinity(build_similarity(np.random.default_rng(6).normal(size=(2, n)), k=3))
    cfg = BlufsConfig(s=n, inner_max_iter=2000, inner_tol=1e-10).model_copy(
        update={"alpha": 0.0, "tau3": 0.0, "theta": 0.0}
    )
    state = make_state(random_graph(np.random.default_rng(7), n, 3), W, np.zeros((n, c)), 3)

    Y = update_y(state, X, W, s_hat, cfg)

    np.testing.assert_allclose(Y.Y, X.T @ W, atol=1e-6)
    assert Y.rho == pytest.approx(np.sqrt(c))


def test_update_y_stays_in_ball(blobs_dataset, blobs_affinity, solver_config):
    """Тест: псевдометки остаются в шаре ||Y||_F <= rho."""
    _, s_hat = blobs_affinity
    X = blobs_dataset.features
    state = initial_state(X, s_hat, solver_config, 2)
    W = update_w(state, X, state.Y, solver_config)

    Y = update_y(state, X, W, s_hat, solver_config)

    assert np.linalg.norm(Y.Y) <= Y.rho + 1e-9
    assert 0 < Y.inner_iterations <= solver_config.inner_max_iter


def test_project_to_ball():
    """Тест проекции на шар Фробениуса."""
    Y = np.full((2, 2), 3.0)

    projected = project_to_ball(Y, 1.5)

    assert np.linalg.norm(projected) == pytest.approx(1.5)
    np.testing.assert_array_equal(project_to_ball(Y * 0.1, 1.5), Y * 0.1)


# Initialization tests
def test_initial_state(blobs_dataset, blobs_affinity, solver_config):
    """Тест начальной точки: P^0 допустима, W^0 = 0, ||Y^0|| = min(sqrt(c), rho)."""
    _, s_hat = blobs_affinity

    state = initial_state(blobs_dataset.features, s_hat, solver_config, 2)

    assert np.all(state.W.W == 0)
    assert np.linalg.norm(state.Y.Y) == pytest.approx(np.sqrt(2))
    assert state.Y.orthogonality_residual < 1e-10
    assert np.all(np.diff(state.P.P.indptr) <= solver_config.k)

    shrunk = initial_state(
        blobs_dataset.features, s_hat, solver_config.model_copy(update={"rho": 0.5}), 2
    )
    assert np.linalg.norm(shrunk.Y.Y) == pytest.approx(0.5)


def test_spectral_embedding_sign_convention(blobs_affinity):
    """Тест: наибольший по модулю элемент каждого столбца положителен."""
    _, s_hat = blobs_affinity

    Y = spectral_embedding(s_hat, 3)

    pivots = np.argmax(np.abs(Y), axis=0)
    assert np.all(Y[pivots, np.arange(3)] > 0)


# run_pam tests
def test_run_pam_feasibility(blobs_dataset, blobs_affinity, solver_config):
    """Тест: ограничения выполняются, трасса согласована с историей."""
    _, s_hat = blobs_affinity

    state = run_pam(blobs_dataset.features, s_hat, solver_config)

    assert 1 <= state.iter <= solver_config.outer_max_iter
    assert len(state.trace) == state.iter
    assert len(state.objective_history) == state.iter + 1
    assert all(row.support_size <= solver_config.s for row in state.trace)
    assert state.W.support.size <= solver_config.s
    assert np.linalg.norm(state.Y.Y) <= state.Y.rho + 1e-9
    assert all(np.isfinite(row.orthogonality) for row in state.trace)
    assert state.objective_history[-1] == pytest.approx(
        objective(state, blobs_dataset.features, s_hat, solver_config)
    )


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_run_pam_recovers_informative_pair(blobs_spec, seed, solver_config):
    """Тест: на двух облаках с шумом выбираются признаки 0 и 1."""
    ds = standardize(gen_synthetic(blobs_spec.model_copy(update={"seed": seed})))
    s_hat = normalize_affinity(build_similarity(ds.features, k=8))

    state = run_pam(ds.features, s_hat, solver_config)

    assert sorted(feature_ranking(state.W).selected) == [0, 1]


def test_run_pam_deterministic(blobs_dataset, blobs_affinity, solver_config):
    """Тест: повторный запуск дает идентичный результат."""
    _, s_hat = blobs_affinity

    first = run_pam(blobs_dataset.features, s_hat, solver_config)
    second = run_pam(blobs_dataset.features, s_hat, solver_config)

    np.testing.assert_array_equal(first.W.W, second.W.W)
    assert first.objective_history == second.objective_history


def test_run_pam_permutation_equivariant(blobs_dataset, solver_config):
    """Тест: перестановка объектов переставляет Y и не меняет W и f."""
    X = blobs_dataset.features
    perm = np.random.default_rng(3).permutation(X.shape[1])
    s_hat = normalize_affinity(build_similarity(X, k=solver_config.k))
    s_hat_perm = normalize_affinity(build_similarity(X[:, perm], k=solver_config.k))

    state = run_pam(X, s_hat, solver_config)
    permuted = run_pam(X[:, perm], s_hat_perm, solver_config)

    assert permuted.iter == state.iter
    np.testing.assert_array_equal(permuted.W.support, state.W.support)
    np.testing.assert_allclose(permuted.W.W, state.W.W, rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(permuted.Y.Y, state.Y.Y[perm], rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(permuted.objective_history, state.objective_history, rtol=1e-8)


def test_run_pam_block_decrease(blobs_dataset, blobs_affinity, solver_config):
    """Тест: P- и W-блоки дают достаточное убывание на первой итерации."""
    _, s_hat = blobs_affinity
    X = blobs_dataset.features
    cfg = solver_config
    state = initial_state(X, s_hat, cfg, 2)
    f0 = objective(state, X, s_hat, cfg)

    P = update_p(state, X, cfg)
    f_p = objective_value(P.P, state.W.W, state.Y.Y, X, s_hat, cfg)
    d_p = float(np.sum((P.P - state.P.P).toarray() ** 2))
    assert f_p + cfg.tau1 * d_p <= f0 + 1e-8 * (1 + abs(f0))

    W = update_w(state.model_copy(update={"P": P}), X, state.Y, cfg)
    f_w = objective_value(P.P, W.W, state.Y.Y, X, s_hat, cfg)
    assert f_w + cfg.tau2 * np.sum((W.W - state.W.W) ** 2) <= f_p + 1e-8 * (1 + abs(f_p))


def test_run_pam_budget_exceeds_features(blobs_dataset, blobs_affinity):
    """Тест: s > d отклоняется."""
    _, s_hat = blobs_affinity

    with pytest.raises(InvalidArgumentError):
        run_pam(blobs_dataset.features, s_hat, BlufsConfig(s=50, n_clusters=2))


def test_run_pam_requires_clusters(blobs_dataset, blobs_affinity):
    """Тест: без n_clusters решатель не запускается."""
    _, s_hat = blobs_affinity

    with pytest.raises(InvalidArgumentError):
        run_pam(blobs_dataset.features, s_hat, BlufsConfig(s=2))


def test_objective_dimension_mismatch(blobs_dataset, blobs_affinity, solver_config):
    """Тест: несогласованные размеры -> ContractViolation."""
    _, s_hat = blobs_affinity
    state = initial_state(blobs_dataset.features, s_hat, solver_config, 2)

    with pytest.raises(ContractViolation):
        objective(state, blobs_dataset.features[:3], s_hat, solver_config)


# objective tests
def test_objective_matches_double_sums(rng):
    """Тест: f совпадает с поэлементными суммами по объектам (n=6, d=4, c=2)."""
    n, d, c, k = 6, 4, 2, 2
    for _ in range(10):
        X = rng.normal(size=(d, n))
        W = rng.normal(size=(d, c))
        Y = rng.normal(size=(n, c))
        P = random_graph(rng, n, k)
        s_hat = normalize_affinity(build_similarity(X, k=k))
        S = s_hat.s_hat.toarray()
        cfg = BlufsConfig(
            s=d,
            k=k,
            lambda_=float(rng.uniform(0.1, 2.0)),
            alpha=float(rng.uniform(0.1, 2.0)),
            beta=float(rng.uniform(0.1, 2.0)),
            mu=float(rng.uniform(0.1, 2.0)),
        )

        Z = [[sum(X[f, i] * W[f, j] for f in range(d)) for j in range(c)] for i in range(n)]
        fit = sum((Z[i][j] - Y[i, j]) ** 2 for i in range(n) for j in range(c))
        ridge = sum(W[f, j] ** 2 for f in range(d) for j in range(c))
        spectral = sum(
            S[i, m] * Y[i, j] * Y[m, j] for i in range(n) for m in range(n) for j in range(c)
        )
        graph = sum(
            P[i, m] * (Z[i][j] - Z[m][j]) ** 2
            for i in range(n)
            for m in range(n)
            for j in range(c)
        )
        p_sq = sum(P[i, m] ** 2 for i in range(n) for m in range(n))
        expected = (
            fit + cfg.lambda_ * ridge - cfg.alpha * spectral + cfg.beta * graph + cfg.mu * p_sq
        )

        value = objective(make_state(P, W, Y, k), X, s_hat, cfg)

        assert value == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_objective_at_zero_labels_is_graph_penalty(rng):
    """Тест: W = 0, Y = 0, равномерная P с k соседями -> f = mu * n / k."""
    n, d, c, k = 12, 3, 2, 4
    X = rng.normal(size=(d, n))
    s_hat = normalize_affinity(build_similarity(X, k=k))
    P = np.zeros((n, n))
    for i in range(n):
        P[i, [(i + step) % n for step in range(1, k + 1)]] = 1.0 / k
    cfg = BlufsConfig(s=d, k=k, mu=0.7)

    value = objective(make_state(P, np.zeros((d, c)), np.zeros((n, c)), k), X, s_hat, cfg)

    assert value == pytest.approx(cfg.mu * n / k, rel=1e-12)


def test_objective_reduces_to_regression_loss(rng):
    """Тест: при lambda = alpha = beta = mu = 0 остается ||X^T W - Y||^2."""
    n, d, c, k = 15, 5, 3, 3
    X = rng.normal(size=(d, n))
    W = rng.normal(size=(d, c))
    Y = rng.normal(size=(n, c))
    s_hat = normalize_affinity(build_similarity(X, k=k))
    cfg = BlufsConfig(s=d, k=k).model_copy(
        update={"lambda_": 0.0, "alpha": 0.0, "beta": 0.0, "mu": 0.0}
    )

    value = objective(make_state(random_graph(rng, n, k), W, Y, k), X, s_hat, cfg)

    assert value == pytest.approx(np.linalg.norm(X.T @ W - Y) ** 2, rel=1e-12)


# Ablation tests
def test_ablation_variants(solver_config):
    """Тест конфигураций абляции."""
    feature_only = ablation_variant(solver_config, AblationCaseEnum.FEATURE_ONLY)
    clustering_only = ablation_variant(solver_config, "clustering_only")
    no_graph = ablation_variant(solver_config, AblationCaseEnum.NO_GRAPH)

    assert feature_only.alpha == 0 and feature_only.update_labels is False
    assert clustering_only.beta == 0 and clustering_only.project_in_loop is False
    assert no_graph.beta == 0 and no_graph.alpha == solver_config.alpha
    assert ablation_variant(solver_config, AblationCaseEnum.FULL) == solver_config


def test_deferred_projection(blobs_dataset, blobs_affinity, solver_config):
    """Тест: без проекции в цикле бюджет соблюдается в итоговом W."""
    _, s_hat = blobs_affinity
    cfg = ablation_variant(solver_config, AblationCaseEnum.CLUSTERING_ONLY)

    state = run_pam(blobs_dataset.features, s_hat, cfg)

    assert state.W.support.size <= cfg.s
    assert state.W.budget == cfg.s


def test_feature_only_keeps_labels(blobs_dataset, blobs_affinity, solver_config):
    """Тест: вариант feature_only не меняет Y."""
    _, s_hat = blobs_affinity
    X = blobs_dataset.features
    cfg = ablation_variant(solver_config, AblationCaseEnum.FEATURE_ONLY)

    state = run_pam(X, s_hat, cfg)

    np.testing.assert_array_equal(state.Y.Y, initial_state(X, s_hat, cfg, 2).Y.Y)


def test_full_model_not_worse_than_feature_only(blobs_spec, solver_config):
    """Тест: полная модель дает ACC не ниже feature_only - 0.02 (среднее по seed-ам)."""
    scores = {AblationCaseEnum.FULL: [], AblationCaseEnum.FEATURE_ONLY: []}
    for seed in range(3):
        ds = standardize(gen_synthetic(blobs_spec.model_copy(update={"seed": seed})))
        s_hat = normalize_affinity(build_similarity(ds.features, k=solver_config.k))
        for case, values in scores.items():
            state = run_pam(ds.features, s_hat, ablation_variant(solver_config, case))
            reduced = reduce(ds, feature_ranking(state.W), solver_config.s)
            values.append(acc(kmeans(reduced.features, 2, seed), ds.labels))

    full = np.mean(scores[AblationCaseEnum.FULL])
    feature_only = np.mean(scores[AblationCaseEnum.FEATURE_ONLY])
    assert full >= feature_only - 0.02
    assert full > 0.9


# Trace export tests
def test_trace_and_convergence_frames(tmp_path, blobs_dataset, blobs_affinity, solver_config):
    """Тест выгрузки трассы и кривой сходимости."""
    _, s_hat = blobs_affinity
    state = run_pam(blobs_dataset.features, s_hat, solver_config)

    trace = trace_frame(state)
    curve = convergence_frame(state)
    path = write_frame(trace, tmp_path / "trace.csv")

    assert list(trace.columns)[:5] == ["iter", "f", "orthogonality", "delta_q", "support_size"]
    assert len(trace) == state.iter
    assert len(curve) == state.iter + 1
    assert np.isnan(curve["relative_change"].iloc[0])
    assert len(pd.read_csv(path)) == state.iter
