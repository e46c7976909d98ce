"""PAM solver for the bi-level feature selection objective.

f(P, W, Y) = ||X^T W - Y||_F^2 + lambda ||W||_F^2 - alpha Tr(Y^T S_hat Y)
             + beta sum_ij ||W^T x_i - W^T x_j||^2 P_ij + mu ||P||_F^2

subject to ||W||_{2,0} <= s, P >= 0 with unit row sums, and Y^T Y = I
(relaxed to an exact penalty over the ball ||Y||_F <= rho).
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg, sparse
from scipy.sparse.linalg import eigsh
from scipy.spatial.distance import cdist

from app.core.exceptions import (
    ContractViolation,
    DataIOError,
    InvalidArgumentError,
    NumericalError,
)
from app.models.graph import NormalizedAffinity
from app.models.solver import (
    AdaptiveGraph,
    ProjectionMatrix,
    PseudoLabels,
    SolverState,
    TraceRow,
)
from app.schemas.solver import AblationCaseEnum, BlufsConfig
from app.services.graph_ops import laplacian_of_p

logger = logging.getLogger(__name__)

# Шаг Барзилая–Борвейна
BB_STEP_INIT = 1e-3
BB_STEP_MIN = 1e-10
BB_STEP_MAX = 1e2

DESCENT_TOL = 1e-8
DENSE_EIGEN_LIMIT = 2000
ROW_BLOCK = 1024


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------


def _check_dims(X: np.ndarray, P, W: np.ndarray, Y: np.ndarray, s_hat=None):
    d, n = X.shape
    if P.shape != (n, n):
        raise ContractViolation(f"P has shape {P.shape}, expected ({n}, {n})")
    if W.shape[0] != d:
        raise ContractViolation(f"W has {W.shape[0]} rows, X has d={d}")
    if Y.shape[0] != n:
        raise ContractViolation(f"Y has {Y.shape[0]} rows, X has n={n}")
    if W.shape[1] != Y.shape[1]:
        raise ContractViolation(f"W has {W.shape[1]} columns, Y has {Y.shape[1]}")
    if s_hat is not None and s_hat.n != n:
        raise ContractViolation(f"S_hat is {s_hat.n} x {s_hat.n}, X has n={n}")


def objective_value(
    P, W: np.ndarray, Y: np.ndarray, X: np.ndarray, s_hat: NormalizedAffinity, cfg: BlufsConfig
) -> float:
    """Значение f(P, W, Y) на сырых массивах (член с beta через след L_P)."""
    _check_dims(X, P, W, Y, s_hat)
    Z = X.T @ W
    fit = float(np.sum((Z - Y) ** 2))
    ridge = cfg.lambda_ * float(np.sum(W**2))
    spectral = cfg.alpha * float(np.sum(Y * (s_hat.s_hat @ Y)))
    graph = 0.0
    if cfg.beta:
        L = laplacian_of_p(P)
        graph = 2.0 * cfg.beta * float(np.sum(Z * (L @ Z)))
    p_sq = P.multiply(P).sum() if sparse.issparse(P) else np.sum(P**2)
    return fit + ridge - spectral + graph + cfg.mu * float(p_sq)


def objective(
    state: SolverState, X: np.ndarray, s_hat: NormalizedAffinity, cfg: BlufsConfig
) -> float:
    """
    Целевая функция модели в точке состояния.

    Raises:
        ContractViolation: Несогласованные размерности
    """
    return objective_value(state.P.P, state.W.W, state.Y.Y, X, s_hat, cfg)


# ---------------------------------------------------------------------------
# P-update
# ---------------------------------------------------------------------------


def project_rows_to_simplex(A: np.ndarray) -> np.ndarray:
    """
    Евклидова проекция каждой строки на вероятностный симплекс.

    Решение имеет вид max(a_j + eta, 0), eta подбирается по активному множеству.
    """
    m = A.shape[1]
    U = -np.sort(-A, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, m + 1)
    active = U - css / ind > 0
    # Последний индекс активного множества в каждой строке
    last = m - 1 - np.argmax(active[:, ::-1], axis=1)
    eta = css[np.arange(A.shape[0]), last] / (last + 1.0)
    return np.maximum(A - eta[:, None], 0.0)


def update_p(state: SolverState, X: np.ndarray, cfg: BlufsConfig) -> AdaptiveGraph:
    """
    Обновление адаптивного графа P в замкнутой форме, построчно.

    Для строки i минимизируется sum_j beta V_ij P_ij + (mu + tau1) P_ij^2
    - 2 tau1 P_ij P^k_ij на симплексе с не более чем k ненулями и P_ii = 0.
    Кандидаты упорядочиваются по beta V_ij - 2 tau1 P^k_ij, оставляются k
    лучших, значения - проекция a_j = (2 tau1 P^k_ij - beta V_ij) / (2 (mu + tau1))
    на симплекс: P_ij = max(a_j + eta, 0).
    """
    n = state.P.n
    k = cfg.k
    if k >= n:
        raise InvalidArgumentError(f"k must be < n, got k={k}, n={n}")

    Z = X.T @ state.W.W
    P_prev = state.P.P
    quad = 2.0 * (cfg.mu + cfg.tau1)

    rows, cols, vals = [], [], []
    for start in range(0, n, ROW_BLOCK):
        stop = min(start + ROW_BLOCK, n)
        V = cdist(Z[start:stop], Z, metric="sqeuclidean")
        cost = cfg.beta * V - 2.0 * cfg.tau1 * P_prev[start:stop].toarray()
        local = np.arange(stop - start)
        cost[local, local + start] = np.inf

        chosen = np.argsort(cost, axis=1, kind="stable")[:, :k]
        a = -np.take_along_axis(cost, chosen, axis=1) / quad
        values = project_rows_to_simplex(a)

        rows.append(np.repeat(np.arange(start, stop), k))
        cols.append(chosen.ravel())
        vals.append(values.ravel())

    P = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    P.eliminate_zeros()
    P.sort_indices()
    return AdaptiveGraph(P=P, k=k)


# ---------------------------------------------------------------------------
# W-update
# ---------------------------------------------------------------------------


def w_system(P, X: np.ndarray, cfg: BlufsConfig) -> np.ndarray:
    """Матрица системы XX^T + (lambda + tau2) I + 2 beta X L_P X^T."""
    d = X.shape[0]
    A = X @ X.T + (cfg.lambda_ + cfg.tau2) * np.eye(d)
    if cfg.beta:
        L = laplacian_of_p(P)
        A += 2.0 * cfg.beta * (X @ (L @ X.T))
    # Симметризация против ошибок округления
    return (A + A.T) / 2.0


def _cholesky_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=True)
        W = linalg.cho_solve(factor, B)
    except (linalg.LinAlgError, ValueError) as e:
        cond = float(np.linalg.cond(A)) if np.all(np.isfinite(A)) else float("inf")
        raise NumericalError(
            f"W system is not positive definite (cond={cond:.3e}): {e}",
            context={"condition_number": cond},
        )
    if not np.all(np.isfinite(W)):
        cond = float(np.linalg.cond(A))
        raise NumericalError(
            f"W solve produced non-finite values (cond={cond:.3e})",
            context={"condition_number": cond},
        )
    return W


def top_rows(W: np.ndarray, s: int) -> np.ndarray:
    """Индексы s строк с наибольшей нормой (при равенстве - меньший индекс)."""
    norms = np.linalg.norm(W, axis=1)
    order = np.argsort(-norms, kind="stable")[:s]
    return np.sort(order[norms[order] > 0])


def hard_threshold_rows(W: np.ndarray, s: int) -> np.ndarray:
    """Проекция на {||W||_{2,0} <= s}: обнуляет все строки, кроме s наибольших."""
    keep = top_rows(W, s)
    projected = np.zeros_like(W)
    projected[keep] = W[keep]
    return projected


def _restricted_solve(A: np.ndarray, B: np.ndarray, support: np.ndarray) -> np.ndarray:
    W = np.zeros_like(B)
    if support.size:
        W[support] = _cholesky_solve(A[np.ix_(support, support)], B[support])
    return W


def _quadratic_value(A: np.ndarray, B: np.ndarray, W: np.ndarray) -> float:
    return float(np.sum(W * (A @ W)) - 2.0 * np.sum(W * B))


def update_w(
    state: SolverState, X: np.ndarray, Y: PseudoLabels | np.ndarray, cfg: BlufsConfig
) -> ProjectionMatrix:
    """
    Обновление W: решение системы
    (XX^T + (lambda + tau2) I + 2 beta X L_P X^T) W = XY + tau2 W^k
    и проекция на ||W||_{2,0} <= s.

    После отбора s строк с наибольшей нормой система решается заново на
    выбранном носителе; если решение на носителе W^k дает меньшее значение
    подзадачи, берется оно.

    Raises:
        NumericalError: Система не положительно определена или решение нефинитно
    """
    Y = Y.Y if isinstance(Y, PseudoLabels) else Y
    d = X.shape[0]
    W_prev = state.W.W
    s = min(cfg.s, d)

    A = w_system(state.P.P, X, cfg)
    B = X @ Y + cfg.tau2 * W_prev
    W_full = _cholesky_solve(A, B)

    if not cfg.project_in_loop:
        return ProjectionMatrix(W=W_full, budget=d)
    if s >= d:
        return ProjectionMatrix(W=W_full, budget=s)

    support = top_rows(W_full, s)
    W_new = _restricted_solve(A, B, support)

    prev_support = state.W.support
    if prev_support.size and not np.array_equal(prev_support, support):
        W_kept = _restricted_solve(A, B, prev_support)
        if _quadratic_value(A, B, W_kept) < _quadratic_value(A, B, W_new):
            logger.debug("W-update kept the previous support")
            W_new = W_kept

    return ProjectionMatrix(W=W_new, budget=s)


# ---------------------------------------------------------------------------
# Y-update
# ---------------------------------------------------------------------------


def label_loss(
    Y: np.ndarray, B: np.ndarray, s_hat: NormalizedAffinity, Y_prev: np.ndarray,
    alpha: float, tau3: float,
) -> float:
    """l(Y) = ||B - Y||^2 - alpha Tr(Y^T S_hat Y) + tau3 ||Y - Y^k||^2, B = X^T W."""
    return float(
        np.sum((B - Y) ** 2)
        - alpha * np.sum(Y * (s_hat.s_hat @ Y))
        + tau3 * np.sum((Y - Y_prev) ** 2)
    )


def label_loss_grad(
    Y: np.ndarray, B: np.ndarray, s_hat: NormalizedAffinity, Y_prev: np.ndarray,
    alpha: float, tau3: float,
) -> np.ndarray:
    """Градиент l(Y): -2(B - Y) - 2 alpha S_hat Y + 2 tau3 (Y - Y^k)."""
    return -2.0 * (B - Y) - 2.0 * alpha * (s_hat.s_hat @ Y) + 2.0 * tau3 * (Y - Y_prev)


def penalty_direction(Y: np.ndarray, G: np.ndarray, theta: float):
    """
    Направление точного штрафа D(Y) = G - Y Lambda(Y) + theta Y (Y^T Y - I).

    Returns:
        (D, Lambda, R): направление, множители и невязка R = Y^T Y - I
    """
    c = Y.shape[1]
    Lam = (Y.T @ G + G.T @ Y) / 2.0
    R = Y.T @ Y - np.eye(c)
    return G - Y @ Lam + theta * (Y @ R), Lam, R


def project_to_ball(Y: np.ndarray, rho: float) -> np.ndarray:
    """Проекция на шар ||Y||_F <= rho (масштабирование на границу)."""
    norm = np.linalg.norm(Y)
    if norm > rho:
        return Y * (rho / norm)
    return Y


def update_y(
    state: SolverState,
    X: np.ndarray,
    W: ProjectionMatrix | np.ndarray,
    s_hat: NormalizedAffinity,
    cfg: BlufsConfig,
) -> PseudoLabels:
    """
    Обновление псевдометок методом точного штрафа с шагом Барзилая–Борвейна
    и проекцией на шар Фробениуса.

    Возвращает последний итерат при выполнении критерия остановки и итерат
    с наименьшим h(Y) иначе.

    Raises:
        NumericalError: Нефинитный итерат
    """
    W = W.W if isinstance(W, ProjectionMatrix) else W
    Y_prev = state.Y.Y
    c = Y_prev.shape[1]
    rho = cfg.resolved_rho(c)
    B = X.T @ W

    def evaluate(Y):
        G = label_loss_grad(Y, B, s_hat, Y_prev, cfg.alpha, cfg.tau3)
        D, Lam, R = penalty_direction(Y, G, cfg.theta)
        h = (
            label_loss(Y, B, s_hat, Y_prev, cfg.alpha, cfg.tau3)
            - 0.5 * float(np.sum(Lam * R))
            + cfg.theta / 4.0 * float(np.sum(R**2))
        )
        return D, h

    Y = project_to_ball(Y_prev.copy(), rho)
    D, h = evaluate(Y)
    best_Y, best_h = Y, h
    step = BB_STEP_INIT
    converged = False
    t = 0

    while True:
        if np.linalg.norm(D) / max(1.0, np.linalg.norm(Y)) < cfg.inner_tol:
            converged = True
            break
        if t >= cfg.inner_max_iter:
            break

        Y_next = project_to_ball(Y - step * D, rho)
        if not np.all(np.isfinite(Y_next)):
            raise NumericalError(
                f"Y-update produced non-finite values at inner step {t}",
                context={"inner_iteration": t},
            )
        D_next, h_next = evaluate(Y_next)
        t += 1

        dY = Y_next - Y
        dD = D_next - D
        denom = float(np.sum(dD * dD))
        if denom > 0:
            step = float(np.clip(abs(np.sum(dY * dD)) / denom, BB_STEP_MIN, BB_STEP_MAX))

        Y, D = Y_next, D_next
        if h_next < best_h:
            best_Y, best_h = Y, h_next

    result = Y if converged else best_Y
    return PseudoLabels(Y=result, rho=rho, inner_iterations=t)


# ---------------------------------------------------------------------------
# Initialization and outer loop
# ---------------------------------------------------------------------------


def _initial_graph(s_hat: NormalizedAffinity, k: int) -> AdaptiveGraph:
    """P^0: k наибольших весов каждой строки S, нормированные по строке."""
    S = s_hat.similarity()
    n = S.shape[0]
    rows, cols, vals = [], [], []
    for i in range(n):
        start, stop = S.indptr[i], S.indptr[i + 1]
        idx, data = S.indices[start:stop], S.data[start:stop]
        keep = np.lexsort((idx, -data))[:k]
        rows.append(np.full(keep.size, i))
        cols.append(idx[keep])
        vals.append(data[keep] / data[keep].sum())
    P = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    P.sort_indices()
    return AdaptiveGraph(P=P, k=k)


def spectral_embedding(s_hat: NormalizedAffinity, c: int, seed: int = 0) -> np.ndarray:
    """
    c собственных векторов S_hat с наибольшими собственными значениями.

    Знак каждого столбца фиксирован: наибольший по модулю элемент положителен.
    """
    n = s_hat.n
    if c > n:
        raise InvalidArgumentError(f"n_clusters={c} exceeds n={n}")
    if n <= DENSE_EIGEN_LIMIT or c >= n - 1:
        _, vectors = np.linalg.eigh(s_hat.s_hat.toarray())
        vectors = vectors[:, ::-1][:, :c]
    else:
        rng = np.random.default_rng(seed)
        values, vectors = eigsh(s_hat.s_hat, k=c, which="LA", v0=rng.uniform(size=n))
        vectors = vectors[:, np.argsort(-values, kind="stable")]

    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(c)])
    signs[signs == 0] = 1.0
    return vectors * signs


def initial_state(
    X: np.ndarray, s_hat: NormalizedAffinity, cfg: BlufsConfig, n_clusters: int
) -> SolverState:
    """
    Начальная точка: P^0 из k-NN сходства, Y^0 - спектральное вложение
    с ||Y^0||_F = min(sqrt(c), rho), W^0 = 0.
    """
    c = n_clusters
    rho = cfg.resolved_rho(c)
    Y0 = spectral_embedding(s_hat, c, cfg.seed)
    Y0 = Y0 * (min(np.sqrt(c), rho) / np.sqrt(c))
    return SolverState(
        P=_initial_graph(s_hat, cfg.k),
        W=ProjectionMatrix(W=np.zeros((X.shape[0], c)), budget=min(cfg.s, X.shape[0])),
        Y=PseudoLabels(Y=Y0, rho=rho),
    )


def _sq_diff(a, b) -> float:
    diff = a - b
    if sparse.issparse(diff):
        return float(diff.multiply(diff).sum())
    return float(np.sum(diff**2))


def run_pam(
    X: np.ndarray,
    s_hat: NormalizedAffinity,
    cfg: BlufsConfig,
    n_clusters: int | None = None,
) -> SolverState:
    """
    Проксимальная попеременная минимизация: P -> W -> Y до сходимости.

    Критерий остановки |f^{k+1} - f^k| / max(|f^k|, 1) < outer_tol или
    outer_max_iter итераций. На каждой итерации проверяется неравенство
    достаточного убывания; нарушения пишутся в лог и трассу.

    Args:
        X: Матрица признаков d x n
        s_hat: Нормированный граф сходства
        cfg: Гиперпараметры
        n_clusters: Число кластеров c (по умолчанию cfg.n_clusters)

    Raises:
        InvalidArgumentError: s > d, k >= n или не задано число кластеров
        NumericalError: Численный сбой подзадачи (с номером итерации в context)
    """
    d, n = X.shape
    c = n_clusters or cfg.n_clusters
    if c is None:
        raise InvalidArgumentError("n_clusters is required (dataset has no labels)")
    if cfg.s > d:
        raise InvalidArgumentError(f"s={cfg.s} exceeds the number of features d={d}")
    if cfg.k >= n:
        raise InvalidArgumentError(f"k={cfg.k} must be smaller than n={n}")
    if s_hat.n != n:
        raise ContractViolation(f"S_hat is {s_hat.n} x {s_hat.n}, X has n={n}")

    state = initial_state(X, s_hat, cfg, c)
    f = objective(state, X, s_hat, cfg)
    history = [f]
    trace: list[TraceRow] = []
    converged = False

    logger.debug(f"PAM start: d={d}, n={n}, c={c}, s={cfg.s}, f0={f:.6g}")

    for it in range(1, cfg.outer_max_iter + 1):
        try:
            P_new = update_p(state, X, cfg)
            f_p = objective_value(P_new.P, state.W.W, state.Y.Y, X, s_hat, cfg)

            state_p = state.model_copy(update={"P": P_new})
            W_new = update_w(state_p, X, state.Y, cfg)
            f_w = objective_value(P_new.P, W_new.W, state.Y.Y, X, s_hat, cfg)

            if cfg.update_labels:
                state_w = state_p.model_copy(update={"W": W_new})
                Y_new = update_y(state_w, X, W_new, s_hat, cfg)
            else:
                Y_new = state.Y
            f_y = objective_value(P_new.P, W_new.W, Y_new.Y, X, s_hat, cfg)
        except NumericalError as e:
            e.context.setdefault("iteration", it)
            raise

        d_p = _sq_diff(P_new.P, state.P.P)
        d_w = _sq_diff(W_new.W, state.W.W)
        d_y = _sq_diff(Y_new.Y, state.Y.Y)

        violating = None
        for block, before, after, step in (
            ("P", f, f_p, cfg.tau1 * d_p),
            ("W", f_p, f_w, cfg.tau2 * d_w),
            ("Y", f_w, f_y, cfg.tau3 * d_y),
            ("aggregate", f, f_y, cfg.tau_min * (d_p + d_w + d_y)),
        ):
            if after + step > before + DESCENT_TOL * (1.0 + abs(before)):
                violating = block
                break
        if violating is not None:
            logger.warning(
                f"Sufficient decrease violated at iteration {it} in block {violating}: "
                f"f={f:.10g} -> {f_y:.10g}"
            )

        trace.append(
            TraceRow(
                iter=it,
                f=f_y,
                orthogonality=Y_new.orthogonality_residual,
                delta_q=float(np.sqrt(d_p + d_w + d_y)),
                support_size=int(W_new.support.size),
                inner_iterations=Y_new.inner_iterations,
                descent_ok=violating is None,
                violating_block=violating,
            )
        )
        rel_change = abs(f_y - f) / max(abs(f), 1.0)
        history.append(f_y)
        state = SolverState(
            P=P_new, W=W_new, Y=Y_new, iter=it, objective_history=list(history), trace=list(trace)
        )
        logger.debug(f"PAM iter {it}: f={f_y:.8g}, rel_change={rel_change:.3e}")
        f = f_y

        if rel_change < cfg.outer_tol:
            converged = True
            break

    W_final = state.W
    if not cfg.project_in_loop:
        # Отложенная проекция: отбор s признаков по нормам строк после решения
        s = min(cfg.s, d)
        W_final = ProjectionMatrix(W=hard_threshold_rows(state.W.W, s), budget=s)

    state = state.model_copy(update={"W": W_final, "converged": converged})
    logger.info(
        f"PAM finished: iterations={state.iter}, converged={converged}, "
        f"f={f:.6g}, support={W_final.support.size}, violations={len(state.violations)}"
    )
    return state


def ablation_variant(cfg: BlufsConfig, case: AblationCaseEnum | str) -> BlufsConfig:
    """
    Конфигурация вырожденной версии модели.

    feature_only: alpha = 0, Y фиксирован спектральной инициализацией;
    clustering_only: beta = 0, проекция l2,0 только по итогу решения;
    no_graph: beta = 0; full: без изменений.
    """
    case = AblationCaseEnum(case)
    if case == AblationCaseEnum.FEATURE_ONLY:
        return cfg.model_copy(update={"alpha": 0.0, "update_labels": False})
    if case == AblationCaseEnum.CLUSTERING_ONLY:
        return cfg.model_copy(update={"beta": 0.0, "project_in_loop": False})
    if case == AblationCaseEnum.NO_GRAPH:
        return cfg.model_copy(update={"beta": 0.0})
    return cfg


# ---------------------------------------------------------------------------
# Trace export
# ---------------------------------------------------------------------------


def trace_frame(state: SolverState) -> pd.DataFrame:
    """Трасса решателя как таблица (одна строка на внешнюю итерацию)."""
    columns = list(TraceRow.model_fields)
    return pd.DataFrame([row.model_dump() for row in state.trace], columns=columns)


def convergence_frame(state: SolverState) -> pd.DataFrame:
    """Кривая сходимости: iter, f, относительное изменение."""
    history = np.asarray(state.objective_history)
    previous = history[:-1]
    rel = np.abs(history[1:] - previous) / np.maximum(np.abs(previous), 1.0)
    return pd.DataFrame(
        {
            "iter": np.arange(history.size),
            "f": history,
            "relative_change": np.concatenate([[np.nan], rel]),
        }
    )


def write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    """Записать таблицу в CSV с фиксированным форматом чисел."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise DataIOError(f"Cannot write {path}: {e}")
    return path
