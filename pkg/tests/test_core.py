import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pagerank_spectral import (
    DenseCapError,
    DimensionError,
    DirectedGraph,
    EmptyGraphError,
    GoogleOperator,
    InputError,
    PatchPolicy,
    SparseTransition,
    apply_google,
    apply_transition,
    build_transition,
    materialize_dense,
)

from conftest import cycle, identity, random_dense_stochastic, random_simplex


def test_two_cycle_transition():
    P = cycle(2).to_dense()
    np.testing.assert_array_equal(P, [[0, 1], [1, 0]])
    assert cycle(2).dangling.size == 0


def test_fan_out_with_dangling_uniform_patch():
    P = build_transition(DirectedGraph(3, [(0, 1), (0, 2)]))
    assert list(P.dangling) == [1, 2]
    np.testing.assert_allclose(P.to_dense(), [[0, 1 / 3, 1 / 3], [0.5, 1 / 3, 1 / 3], [0.5, 1 / 3, 1 / 3]])


def test_edgeless_graph_is_all_dangling():
    P = build_transition(DirectedGraph(3, []))
    assert list(P.dangling) == [0, 1, 2]
    assert P.nnz == 0
    np.testing.assert_allclose(P.to_dense(), np.full((3, 3), 1 / 3))


def test_duplicates_accumulate_and_self_loops_count():
    g = DirectedGraph(2, [(0, 1, 1.0), (0, 1, 2.0), (0, 0, 1.0)])
    P = build_transition(g).to_dense()
    np.testing.assert_allclose(P[:, 0], [0.25, 0.75])


def test_rows_strictly_increasing_within_columns():
    g = DirectedGraph(4, [(0, 3), (0, 1), (0, 2), (2, 0), (2, 3)])
    P = build_transition(g)
    for j in range(P.n):
        rows = P.indices[P.indptr[j]:P.indptr[j + 1]]
        assert np.all(np.diff(rows) > 0)


@pytest.mark.parametrize(
    "n, edges, exc",
    [
        (0, [], EmptyGraphError),
        (2, [(0, 2)], InputError),
        (2, [(-1, 0)], InputError),
        (2, [(0, 1, 0.0)], InputError),
        (2, [(0, 1, -1.0)], InputError),
    ],
)
def test_invalid_graphs(n, edges, exc):
    with pytest.raises(exc):
        DirectedGraph(n, edges)


def test_personalization_patch_uses_v_without_densifying():
    g = DirectedGraph(3, [(0, 1)])
    P = build_transition(g, PatchPolicy.PERSONALIZATION)
    assert P.nnz == 1
    v = np.array([0.2, 0.3, 0.5])
    np.testing.assert_allclose(P.to_dense(v)[:, 1], v)
    np.testing.assert_allclose(P.column_sums(v), 1.0, atol=1e-15)
    np.testing.assert_allclose(apply_transition(P, [0, 1, 0], v), v)
    with pytest.raises(InputError):
        apply_transition(P, [0, 1, 0])


@pytest.mark.parametrize(
    "x, expected", [([1, 0], [0, 1]), ([0.3, 0.7], [0.7, 0.3])]
)
def test_apply_transition_two_cycle(x, expected):
    np.testing.assert_allclose(apply_transition(cycle(2), x), expected)


def test_apply_transition_all_dangling():
    P = build_transition(DirectedGraph(3, []))
    np.testing.assert_allclose(apply_transition(P, [1, 0, 0]), [1 / 3] * 3)


def test_apply_transition_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_transition(cycle(3), [1.0, 0.0])


def test_apply_google_two_cycle_matches_dense_oracle():
    op = GoogleOperator(cycle(2), 0.85, [0.5, 0.5])
    A = 0.85 * np.array([[0, 1], [1, 0]]) + 0.15 * np.outer([0.5, 0.5], [1, 1])
    np.testing.assert_allclose(A @ [1, 0], [0.075, 0.925], atol=1e-15)
    np.testing.assert_allclose(apply_google(op, [1, 0]), [0.075, 0.925], atol=1e-15)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.85, 0.99])
def test_apply_google_symmetric_fixed_point(alpha):
    op = GoogleOperator(cycle(2), alpha)
    np.testing.assert_allclose(apply_google(op, [0.5, 0.5]), [0.5, 0.5], atol=1e-16)


def test_apply_google_preserves_unit_sum():
    op = GoogleOperator(build_transition(DirectedGraph(2, [(0, 1)])), 0.7, [0.9, 0.1])
    assert abs(apply_google(op, [0.3, 0.7]).sum() - 1.0) < 1e-15


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_alpha_must_be_strictly_inside_unit_interval(alpha):
    with pytest.raises(InputError):
        GoogleOperator(cycle(2), alpha)


def test_bad_personalization_rejected():
    with pytest.raises(InputError):
        GoogleOperator(cycle(2), 0.5, [0.6, 0.6])
    with pytest.raises(InputError):
        GoogleOperator(cycle(2), 0.5, [1.5, -0.5])
    with pytest.raises(DimensionError):
        GoogleOperator(cycle(2), 0.5, [1.0])


def test_zero_entries_in_v_are_allowed():
    op = GoogleOperator(cycle(3), 0.5, [1.0, 0.0, 0.0])
    assert np.all(materialize_dense(op) >= 0)


def test_materialize_two_cycle():
    A = materialize_dense(GoogleOperator(cycle(2), 0.85, [0.5, 0.5]))
    np.testing.assert_allclose(A, [[0.075, 0.925], [0.925, 0.075]], atol=1e-15)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_materialize_identity(alpha):
    A = materialize_dense(GoogleOperator(identity(2), alpha, [0.5, 0.5]))
    d, o = alpha + (1 - alpha) / 2, (1 - alpha) / 2
    np.testing.assert_allclose(A, [[d, o], [o, d]], atol=1e-15)


def test_materialize_refuses_above_cap():
    op = GoogleOperator(cycle(50), 0.5)
    with pytest.raises(DenseCapError):
        materialize_dense(op, cap=49)


def test_from_dense_rejects_non_stochastic():
    with pytest.raises(InputError):
        SparseTransition.from_dense([[0.5, 0.0], [0.4, 1.0]])


def test_transition_is_immutable():
    P = cycle(3)
    with pytest.raises(ValueError):
        P.data[0] = 2.0


def _random_operator(rng, n, dangling_share=0.3, personalized=False):
    edges = []
    for s in range(n):
        if rng.random() < dangling_share:
            continue
        for t in rng.choice(n, size=rng.integers(1, n + 1), replace=True):
            edges.append((s, int(t), float(rng.uniform(0.1, 3.0))))
    policy = PatchPolicy.PERSONALIZATION if personalized else PatchPolicy.UNIFORM
    P = build_transition(DirectedGraph(n, edges), policy)
    return GoogleOperator(P, float(rng.uniform(0.01, 0.99)), random_simplex(rng, n))


def test_oracle_equivalence_random_instances(rng):
    for trial in range(120):
        n = int(rng.integers(1, 65))
        op = _random_operator(rng, n, personalized=trial % 2 == 1)
        A = materialize_dense(op)
        np.testing.assert_allclose(A.sum(axis=0), 1.0, atol=1e-12)
        x = rng.standard_normal(n)
        assert np.abs(apply_google(op, x) - A @ x).max() <= 1e-12


def test_patched_columns_sum_to_one(rng):
    for _ in range(50):
        n = int(rng.integers(1, 40))
        op = _random_operator(rng, n, dangling_share=0.5)
        np.testing.assert_allclose(op.transition.column_sums(), 1.0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(1, 30),
    seed=st.integers(0, 2**32 - 1),
    alpha=st.floats(0.001, 0.999),
    scale=st.floats(1e-3, 1e3),
)
def test_sum_preservation_and_positivity(n, seed, alpha, scale):
    rng = np.random.default_rng(seed)
    P = SparseTransition.from_dense(random_dense_stochastic(rng, n))
    v = random_simplex(rng, n)
    op = GoogleOperator(P, alpha, v)
    x = scale * rng.standard_normal(n)
    y = apply_google(op, x)
    assert abs(y.sum() - x.sum()) <= n * 1e-14 * np.abs(x).sum()

    p = random_simplex(rng, n)
    y = apply_google(op, p)
    assert np.all(y >= 0)
    assert np.all(y >= (1 - alpha) * v.min() * (1 - 1e-12))


def test_apply_is_deterministic(rng):
    op = _random_operator(rng, 40)
    x = random_simplex(rng, 40)
    assert apply_google(op, x).tobytes() == apply_google(op, x).tobytes()
