"""Orthonormal subspace representations, null spaces, and principal angles.

All subspaces carry the inner product (a positive diagonal, or any SPD
matrix) they are orthonormal against, plus the singular values that decided
their numerical rank, so rank-threshold ambiguity can be reported instead of
silently resolved.
"""

from __future__ import annotations

import numpy as np

from . import tolerances


def _as_gram(gram, dim):
    if gram is None:
        return np.ones(dim)
    gram = np.asarray(gram, dtype=float)
    if gram.ndim == 1:
        if gram.shape != (dim,):
            raise ValueError("gram diagonal has wrong length")
        if np.any(gram <= 0):
            raise ValueError("gram diagonal must be positive")
        return gram
    raise ValueError("only diagonal gram matrices are supported")


class Subspace:
    """A linear subspace with gram-orthonormal basis columns.

    Attributes
    ----------
    columns : (dim, rank) array with columns^T diag(gram) columns = identity.
    gram : positive diagonal of the inner product.
    rank_tolerance : relative singular value cut used to fix the rank.
    singular_values : spectrum of the generating matrix (may be empty).
    ambiguous : True when retained and discarded singular values are closer
        than the configured gap factor.
    """

    def __init__(self, columns, gram=None, rank_tolerance=tolerances.RANK_REL,
                 singular_values=None, ambiguous=False):
        columns = np.atleast_2d(np.asarray(columns, dtype=float))
        self.columns = columns
        self.gram = _as_gram(gram, columns.shape[0])
        self.rank_tolerance = float(rank_tolerance)
        self.singular_values = (
            np.asarray(singular_values, dtype=float)
            if singular_values is not None
            else np.zeros(0)
        )
        self.ambiguous = bool(ambiguous)

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    def coords(self, x: np.ndarray) -> np.ndarray:
        """Coefficients of the gram-orthogonal projection of ``x``."""
        return self.columns.T @ (self.gram * np.asarray(x, dtype=float))

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.columns @ self.coords(x)

    def projection_residual(self, x: np.ndarray) -> float:
        """Relative distance of ``x`` from the subspace in the gram norm."""
        x = np.asarray(x, dtype=float)
        r = x - self.project(x)
        num = float(np.sqrt(np.dot(r, self.gram * r)))
        den = float(np.sqrt(np.dot(x, self.gram * x)))
        return num / den if den > 0 else num

    def orthonormality_defect(self) -> float:
        g = self.columns.T @ (self.gram[:, None] * self.columns)
        return float(np.abs(g - np.eye(self.dim)).max()) if self.dim else 0.0


def from_span(matrix, gram=None, rank_tolerance=tolerances.RANK_REL) -> Subspace:
    """Gram-orthonormal basis of the column span, rank cut at the tolerance."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    dim = matrix.shape[0]
    gram = _as_gram(gram, dim)
    if matrix.shape[1] == 0 or not np.any(matrix):
        return Subspace(np.zeros((dim, 0)), gram, rank_tolerance)
    w = np.sqrt(gram)
    u, s, _ = np.linalg.svd(w[:, None] * matrix, full_matrices=False)
    smax = s.max()
    rank = int(np.sum(s > rank_tolerance * smax))
    ambiguous = _gap_ambiguous(s, rank)
    cols = u[:, :rank] / w[:, None]
    return Subspace(cols, gram, rank_tolerance, singular_values=s,
                    ambiguous=ambiguous)


def null_space(matrix, gram=None, rank_tolerance=tolerances.RANK_REL,
               n_columns=None) -> Subspace:
    """Gram-orthonormal basis of the kernel of ``matrix``.

    ``matrix`` may have zero rows; ``n_columns`` disambiguates the ambient
    dimension in that case.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        if n_columns is None:
            n_columns = matrix.shape[1] if matrix.ndim == 2 else 0
        eye = np.eye(n_columns)
        return from_span(eye, gram=_as_gram(gram, n_columns),
                         rank_tolerance=rank_tolerance)
    matrix = np.atleast_2d(matrix)
    rows, cols = matrix.shape
    if rows < cols:
        # Pad square so the economy SVD still returns a complete right basis.
        matrix = np.vstack([matrix, np.zeros((cols - rows, cols))])
    _, s, vt = np.linalg.svd(matrix, full_matrices=False)
    smax = s.max() if s.size else 0.0
    if smax == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rank_tolerance * smax))
    ambiguous = _gap_ambiguous(s[:min(rows, cols)], rank)
    kernel = vt[rank:].T
    g = _as_gram(gram, cols)
    if kernel.shape[1] == 0:
        out = Subspace(np.zeros((cols, 0)), g, rank_tolerance)
    else:
        # The kernel is Euclidean-orthonormal and exactly full rank, so a
        # Cholesky of its (well-conditioned) weighted Gram re-orthonormalizes
        # it far cheaper than a second SVD.
        m = kernel.T @ (g[:, None] * kernel)
        try:
            r = np.linalg.cholesky(m)
            cols_g = np.linalg.solve(r, kernel.T).T
            out = Subspace(cols_g, g, rank_tolerance)
        except np.linalg.LinAlgError:
            out = from_span(kernel, gram=g, rank_tolerance=rank_tolerance)
    out.singular_values = s
    out.ambiguous = out.ambiguous or ambiguous
    return out


def _gap_ambiguous(s, rank, factor=tolerances.RANK_GAP_FACTOR) -> bool:
    if rank == 0 or rank >= s.size:
        return False
    kept, dropped = s[rank - 1], s[rank]
    return bool(dropped > 0 and kept / dropped < factor)


def principal_angles(a: Subspace, b: Subspace) -> np.ndarray:
    """Principal angles (radians) between two subspaces of one ambient space."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    if a.dim == 0 or b.dim == 0:
        return np.zeros(0)
    m = a.columns.T @ (a.gram[:, None] * b.columns)
    s = np.linalg.svd(m, compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))


def contains(outer: Subspace, inner: Subspace,
             angle_tolerance=tolerances.PRINCIPAL_ANGLE):
    """Whether every direction of ``inner`` lies in ``outer``.

    Returns ``(contained, max_angle)``; containment holds when all principal
    angles against ``inner``'s full dimension stay below the tolerance.
    """
    if inner.dim == 0:
        return True, 0.0
    if outer.dim < inner.dim:
        m = outer.columns.T @ (outer.gram[:, None] * inner.columns)
        s = np.linalg.svd(m, compute_uv=False)
        angles = np.arccos(np.clip(s, -1.0, 1.0))
        return False, float(angles.max(initial=np.pi / 2))
    angles = principal_angles(outer, inner)
    # svd of the (outer.dim x inner.dim) matrix yields inner.dim values.
    max_angle = float(angles.max(initial=0.0))
    return max_angle <= angle_tolerance, max_angle
