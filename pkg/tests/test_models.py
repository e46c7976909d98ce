"""Tests for data, graph, solver and ranking models."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import sparse

from app.models.dataset import Dataset
from app.models.graph import NormalizedAffinity, SimilarityGraph
from app.models.ranking import FeatureRanking
from app.models.solver import (
    AdaptiveGraph,
    ProjectionMatrix,
    PseudoLabels,
    SolverState,
    TraceRow,
)


# Dataset tests
def test_create_dataset():
    """Тест создания датасета: размеры, число классов, имена по умолчанию."""
    ds = Dataset(features=[[1, 2, 3], [4, 5, 6]], labels=[0, 1, 1], name="toy")

    assert ds.d == 2
    assert ds.n == 3
    assert ds.class_count == 2
    assert ds.features.dtype == np.float64
    assert ds.names == ["f0", "f1"]
    assert repr(ds) == "<Dataset(name=toy, d=2, n=3, c=2)>"


def test_dataset_arrays_are_readonly():
    """Тест: массивы датасета нельзя изменить."""
    ds = Dataset(features=np.zeros((2, 3)), labels=[0, 0, 1])

    with pytest.raises(ValueError):
        ds.features[0, 0] = 1.0
    with pytest.raises(ValueError):
        ds.labels[0] = 1


def test_dataset_single_row_vector():
    """Тест: одномерный вектор трактуется как один признак."""
    ds = Dataset(features=[0.0, 1.0, 2.0])

    assert ds.features.shape == (1, 3)
    assert ds.labels is None
    assert ds.class_count is None


@pytest.mark.parametrize(
    "kwargs",
    [
        {"features": [[1.0, np.nan]]},
        {"features": [[1.0]]},
        {"features": [[1.0, 2.0]], "labels": [0, 1, 1]},
        {"features": [[1.0, 2.0]], "labels": [0.5, 1]},
        {"features": [[1.0, 2.0]], "labels": [0, 2]},
        {"features": [[1.0, 2.0]], "labels": [0, 3], "class_count": 2},
        {"features": [[1.0, 2.0]], "feature_names": ["a", "b"]},
    ],
)
def test_dataset_invalid(kwargs):
    """Тест: нарушение инвариантов датасета отклоняется."""
    with pytest.raises(ValidationError):
        Dataset(**kwargs)


def test_dataset_explicit_class_count_allows_gaps():
    """Тест: явное class_count допускает отсутствующий класс."""
    ds = Dataset(features=[[1.0, 2.0, 3.0]], labels=[0, 2, 2], class_count=3)

    assert ds.class_count == 3


# Graph model tests
def test_similarity_graph_rejects_asymmetric():
    """Тест: несимметричная матрица сходства отклоняется."""
    weights = sparse.csr_matrix(np.array([[0.0, 0.5], [0.4, 0.0]]))

    with pytest.raises(ValidationError):
        SimilarityGraph(weights=weights, k=1, sigma=1.0)


def test_similarity_graph_rejects_diagonal():
    """Тест: ненулевая диагональ отклоняется."""
    weights = sparse.csr_matrix(np.array([[1.0, 0.5], [0.5, 0.0]]))

    with pytest.raises(ValidationError):
        SimilarityGraph(weights=weights, k=1, sigma=1.0)


def test_similarity_graph_rejects_weight_range():
    """Тест: вес больше 1 отклоняется."""
    weights = sparse.csr_matrix(np.array([[0.0, 1.5], [1.5, 0.0]]))

    with pytest.raises(ValidationError):
        SimilarityGraph(weights=weights, k=1, sigma=1.0)


def test_similarity_graph_degrees():
    """Тест: степени равны суммам строк."""
    weights = sparse.csr_matrix(
        np.array([[0.0, 0.5, 0.25], [0.5, 0.0, 0.0], [0.25, 0.0, 0.0]])
    )

    graph = SimilarityGraph(weights=weights, k=2, sigma=1.0)

    np.testing.assert_allclose(graph.degrees, [0.75, 0.5, 0.25])
    assert graph.n == 3


def test_normalized_affinity_rejects_zero_degree():
    """Тест: нулевая степень отклоняется."""
    with pytest.raises(ValidationError):
        NormalizedAffinity(s_hat=sparse.csr_matrix((2, 2)), degrees=np.array([1.0, 0.0]))


# Solver state tests
def test_adaptive_graph_valid():
    """Тест: строки на симплексе с не более чем k ненулями."""
    P = sparse.csr_matrix(np.array([[0.0, 0.6, 0.4], [1.0, 0.0, 0.0], [0.5, 0.5, 0.0]]))

    graph = AdaptiveGraph(P=P, k=2)

    assert graph.n == 3


@pytest.mark.parametrize(
    "rows, k",
    [
        ([[0.0, 0.7], [1.0, 0.0]], 1),
        ([[0.0, 1.2], [1.0, 0.0]], 1),
        ([[0.0, 1.0], [-0.5, 1.5]], 2),
        ([[0.2, 0.3, 0.5], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], 2),
    ],
)
def test_adaptive_graph_invalid(rows, k):
    """Тест: сумма строки != 1, отрицательный вес или лишние ненули отклоняются."""
    with pytest.raises(ValidationError):
        AdaptiveGraph(P=sparse.csr_matrix(np.array(rows)), k=k)


def test_projection_matrix_support():
    """Тест: опора W - множество ненулевых строк."""
    W = ProjectionMatrix(W=np.array([[0.0, 0.0], [3.0, 4.0], [0.0, -1.0]]), budget=2)

    assert W.support.tolist() == [1, 2]
    np.testing.assert_allclose(W.row_norms, [0.0, 5.0, 1.0])


def test_projection_matrix_budget():
    """Тест: больше ненулевых строк, чем бюджет, -> ошибка."""
    with pytest.raises(ValidationError):
        ProjectionMatrix(W=np.ones((3, 2)), budget=2)


def test_pseudo_labels_ball():
    """Тест: Y вне шара радиуса rho отклоняется."""
    Y = np.eye(3, 2)

    assert PseudoLabels(Y=Y, rho=np.sqrt(2.0)).orthogonality_residual == pytest.approx(0.0)
    with pytest.raises(ValidationError):
        PseudoLabels(Y=2.0 * Y, rho=np.sqrt(2.0))


def test_pseudo_labels_non_finite():
    """Тест: NaN в Y отклоняется."""
    with pytest.raises(ValidationError):
        PseudoLabels(Y=np.array([[np.nan], [0.0]]), rho=1.0)


def _trace_row(it, ok):
    return TraceRow(
        iter=it,
        f=1.0,
        orthogonality=0.0,
        delta_q=0.0,
        support_size=1,
        inner_iterations=1,
        descent_ok=ok,
        violating_block=None if ok else "W",
    )


def test_solver_state_violations():
    """Тест: violations возвращает строки трассы с нарушением убывания."""
    state = SolverState(
        P=AdaptiveGraph(P=sparse.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]])), k=1),
        W=ProjectionMatrix(W=np.array([[1.0]]), budget=1),
        Y=PseudoLabels(Y=np.array([[0.5], [0.5]]), rho=1.0),
        trace=[_trace_row(1, True), _trace_row(2, False)],
    )

    assert [row.iter for row in state.violations] == [2]


def test_solver_state_dimension_mismatch():
    """Тест: число строк Y должно совпадать с размером P."""
    with pytest.raises(ValidationError):
        SolverState(
            P=AdaptiveGraph(P=sparse.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]])), k=1),
            W=ProjectionMatrix(W=np.array([[1.0]]), budget=1),
            Y=PseudoLabels(Y=np.zeros((3, 1)), rho=1.0),
        )


# FeatureRanking tests
def test_ranking_order_appends_rest():
    """Тест: order() продолжает selected оставшимися признаками по качеству."""
    ranking = FeatureRanking(scores=np.array([0.1, 3.0, 0.5, 0.5]), selected=[1])

    assert ranking.order() == [1, 2, 3, 0]


def test_ranking_order_lower_is_better_skips_inf():
    """Тест: для Laplacian Score порядок по возрастанию, +inf не входит."""
    ranking = FeatureRanking(
        scores=np.array([0.4, np.inf, 0.2, 0.9]),
        selected=[2],
        higher_is_better=False,
        method="lapscore",
    )

    assert ranking.order() == [2, 0, 3]


@pytest.mark.parametrize("selected", [[0, 0], [3], [-1]])
def test_ranking_invalid_selected(selected):
    """Тест: повторяющиеся или вне диапазона индексы отклоняются."""
    with pytest.raises(ValidationError):
        FeatureRanking(scores=np.zeros(3), selected=selected)
