import numpy as np

from decgauge import subspaces


def test_from_span_orthonormal_under_gram(rng):
    gram = rng.uniform(0.5, 2.0, size=6)
    x = rng.standard_normal((6, 3))
    sub = subspaces.from_span(x, gram=gram)
    assert sub.dim == 3
    assert sub.orthonormality_defect() <= 1e-12


def test_from_span_rank_cut(rng):
    x = rng.standard_normal((5, 2))
    x = np.column_stack([x, x @ np.array([1.0, -2.0])])
    sub = subspaces.from_span(x)
    assert sub.dim == 2


def test_null_space_matches_constraints(rng):
    a = rng.standard_normal((3, 7))
    sub = subspaces.null_space(a)
    assert sub.dim == 4
    assert np.abs(a @ sub.columns).max() <= 1e-12


def test_null_space_empty_matrix():
    sub = subspaces.null_space(np.zeros((0, 4)), n_columns=4)
    assert sub.dim == 4


def test_projection_residual(rng):
    sub = subspaces.from_span(np.eye(5)[:, :2])
    inside = sub.columns @ rng.standard_normal(2)
    assert sub.projection_residual(inside) <= 1e-12
    outside = np.eye(5)[:, 4]
    assert sub.projection_residual(outside) > 0.9


def test_principal_angles_known():
    u = subspaces.from_span(np.eye(4)[:, :2])
    theta = 0.3
    vec = np.array([np.cos(theta), 0.0, np.sin(theta), 0.0])
    v = subspaces.from_span(vec[:, None])
    angles = subspaces.principal_angles(u, v)
    assert np.isclose(angles.max(), theta, rtol=1e-10)


def test_contains_detects_dimension_deficit():
    outer = subspaces.from_span(np.eye(4)[:, :1])
    inner = subspaces.from_span(np.eye(4)[:, :2])
    ok, angle = subspaces.contains(outer, inner)
    assert not ok


def test_ambiguity_flag():
    # smallest retained 3e-8 vs largest discarded 0.5e-8: gap under 10x
    mat = np.diag([1.0, 3e-8, 0.5e-8])
    sub = subspaces.null_space(mat)
    assert sub.ambiguous
    clear = subspaces.null_space(np.diag([1.0, 1.0, 0.0]))
    assert not clear.ambiguous
