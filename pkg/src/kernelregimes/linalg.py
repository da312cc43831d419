"""Dense symmetric linear algebra: SPD solves, eigendecompositions, and
bordered-inverse updates.

Factorizations and eigensolves are delegated to LAPACK (via scipy/numpy);
this module owns the contracts: symmetry validation, failure reporting with
pivot indices, the one-shot jitter retry, and the rank-one bordered update
used by the online solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotPositiveDefinite,
    SingularBorder,
    SingularSystem,
)

SYMMETRY_ATOL = 1e-12

# Relative diagonal bump used by the one-shot retry when an SPD solve fails.
JITTER_SCALE = 1e-10


def _as_square(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(getattr(a, "entries", a), dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


def _check_symmetric(arr: np.ndarray, name: str = "matrix") -> np.ndarray:
    if arr.size and np.max(np.abs(arr - arr.T)) > SYMMETRY_ATOL:
        raise DimensionMismatch(f"{name} is not symmetric within {SYMMETRY_ATOL:g}")
    return arr


@dataclass(frozen=True)
class SymMatrix:
    """A validated symmetric matrix.

    Construction checks squareness and symmetry (absolute tolerance 1e-12);
    the stored array is symmetrized exactly so downstream code can rely on
    ``entries == entries.T`` bit for bit.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = _check_symmetric(_as_square(self.entries), "SymMatrix")
        object.__setattr__(self, "entries", 0.5 * (arr + arr.T))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral factorization A = V diag(values) V^T.

    ``values`` are sorted in decreasing order and ``vectors[:, i]`` is the
    unit eigenvector paired with ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray


def cholesky_solve(a, b) -> np.ndarray:
    """Solve ``A X = B`` for symmetric positive definite ``A``.

    Parameters
    ----------
    a : (n, n) array-like or SymMatrix
        Symmetric positive definite coefficient matrix.
    b : (n,) or (n, k) array-like
        Right-hand side(s).

    Returns
    -------
    numpy.ndarray
        Solution with the same trailing shape as ``b``.

    Raises
    ------
    NotPositiveDefinite
        If a Cholesky pivot fails; ``pivot`` reports its zero-based index.
    """
    arr = _check_symmetric(_as_square(a))
    rhs = np.asarray(b, dtype=float)
    vector_rhs = rhs.ndim == 1
    if vector_rhs:
        rhs = rhs[:, None]
    if rhs.shape[0] != arr.shape[0]:
        raise DimensionMismatch(
            f"rhs has {rhs.shape[0]} rows, matrix has {arr.shape[0]}"
        )
    factor, info = lapack.dpotrf(arr, lower=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefinite(
            f"Cholesky failed at pivot {info - 1}", pivot=info - 1
        )
    if info < 0:
        raise ValueError(f"illegal argument {-info} to dpotrf")
    x, info = lapack.dpotrs(factor, rhs, lower=1)
    if info != 0:
        raise ValueError(f"dpotrs failed with info={info}")
    return x[:, 0] if vector_rhs else x


def cholesky_solve_jittered(a, b) -> tuple[np.ndarray, float]:
    """SPD solve with the one-shot jitter retry.

    On a failed pivot, ``1e-10 * trace(A) / n`` is added to the diagonal and
    the solve retried exactly once; a second failure raises SingularSystem.

    Returns the solution and the jitter actually applied (0.0 when the first
    attempt succeeded).
    """
    arr = _check_symmetric(_as_square(a))
    try:
        return cholesky_solve(arr, b), 0.0
    except NotPositiveDefinite:
        pass
    n = arr.shape[0]
    jitter = JITTER_SCALE * float(np.trace(arr)) / max(n, 1)
    if jitter <= 0.0:
        jitter = JITTER_SCALE
    bumped = arr + jitter * np.eye(n)
    try:
        return cholesky_solve(bumped, b), jitter
    except NotPositiveDefinite as exc:
        raise SingularSystem(
            f"solve failed even after jitter {jitter:g} (pivot {exc.pivot})"
        ) from exc


def sym_eigen(a) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues come back sorted in decreasing order with matching
    orthonormal eigenvectors in the columns of ``vectors``.

    Raises
    ------
    NoConvergence
        If the LAPACK backend fails to converge within its sweep budget.
    """
    arr = _check_symmetric(_as_square(a))
    try:
        values, vectors = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(values)[::-1]
    return EigenDecomposition(values=values[order], vectors=vectors[:, order])


def block_inverse_extend(a_inv, x, b: float) -> SymMatrix:
    """Grow a symmetric inverse by one bordered row/column.

    Given ``A_inv = A^{-1}`` and a new border ``(x, b)``, returns the inverse
    of ``[[A, x], [x^T, b]]`` via the Schur complement ``s = b - x^T A^{-1} x``:

        [[A_inv + c y y^T, -c y], [-c y^T, c]],  y = A_inv x,  c = 1 / s.

    Cost is one matrix-vector product and one rank-one update, O(n^2).

    Raises
    ------
    SingularBorder
        If the Schur complement vanishes (``|s| < 1e-14 |b|`` or exactly 0).
    """
    inv = _check_symmetric(_as_square(a_inv, "a_inv"))
    vec = np.asarray(x, dtype=float).reshape(-1)
    if vec.shape[0] != inv.shape[0]:
        raise DimensionMismatch(
            f"border length {vec.shape[0]} != matrix order {inv.shape[0]}"
        )
    b = float(b)
    y = inv @ vec
    schur = b - float(vec @ y)
    if schur == 0.0 or abs(schur) < 1e-14 * abs(b):
        raise SingularBorder(
            f"Schur complement {schur:g} too small relative to border {b:g}"
        )
    c = 1.0 / schur
    n = inv.shape[0]
    out = np.empty((n + 1, n + 1), dtype=float)
    out[:n, :n] = inv + c * np.outer(y, y)
    out[:n, n] = -c * y
    out[n, :n] = -c * y
    out[n, n] = c
    return SymMatrix(out)
