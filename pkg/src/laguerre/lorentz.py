"""Linear algebra of the Lorentzian space R^{n+3}_2.

Vectors are plain numpy arrays of length n + 3, where n >= 3 is the
dimension of the base Euclidean space and the inner product has signature
(-, +, ..., +, -):

    <X, Y> = -X_1 Y_1 + X_2 Y_2 + ... + X_{n+2} Y_{n+2} - X_{n+3} Y_{n+3}.

Conventions:

* Vectors act as rows, so a matrix T acts by X -> X T and composition of
  transformations is the left-to-right matrix product.
* The distinguished light-like vector fixed by the whole transformation
  group is wp = (1, -1, 0, ..., 0).
* Tolerances are relative to a natural scale (Euclidean norm of the vector,
  max-norm of the matrix); the package-wide default is 1e-9.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError

DEFAULT_TOL = 1e-9

MIN_BASE_DIM = 3


def signature(n: int) -> np.ndarray:
    """Diagonal of the inner product on R^{n+3}_2 as a vector."""
    if n < MIN_BASE_DIM:
        raise UsageError(f"base dimension must be >= {MIN_BASE_DIM}, got {n}")
    sig = np.ones(n + 3)
    sig[0] = -1.0
    sig[-1] = -1.0
    return sig


def signature_matrix(n: int) -> np.ndarray:
    """The Gram matrix diag(-1, +1, ..., +1, -1) of size n + 3."""
    return np.diag(signature(n))


def wp(n: int) -> np.ndarray:
    """The distinguished light-like row vector (1, -1, 0, ..., 0)."""
    v = np.zeros(n + 3)
    v[0] = 1.0
    v[1] = -1.0
    return v


def base_dim(vec_or_mat: np.ndarray) -> int:
    """Base dimension n recovered from an ambient vector or square matrix."""
    size = np.asarray(vec_or_mat).shape[-1]
    n = size - 3
    if n < MIN_BASE_DIM:
        raise UsageError(f"ambient size {size} is too small (need >= {MIN_BASE_DIM + 3})")
    return n


def inner(X: np.ndarray, Y: np.ndarray) -> np.ndarray | float:
    """Inner product <X, Y> of signature (-, +, ..., +, -).

    Broadcasts over leading axes, so it applies equally to single vectors
    and to grids of vectors stored in the trailing axis.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape[-1] != Y.shape[-1]:
        raise UsageError(f"dimension mismatch: {X.shape[-1]} vs {Y.shape[-1]}")
    sig = signature(X.shape[-1] - 3)
    out = np.sum(sig * X * Y, axis=-1)
    return float(out) if out.ndim == 0 else out


def causal_type(X: np.ndarray, tol: float = 1e-12) -> str:
    """Classify a vector as 'zero', 'lightlike', 'timelike' or 'spacelike'.

    The tolerance band for the light cone is relative to the Euclidean
    squared norm of the vector.
    """
    if tol < 0:
        raise UsageError("tolerance must be nonnegative")
    X = np.asarray(X, dtype=float)
    scale = float(np.dot(X, X))
    if scale == 0.0:
        return "zero"
    q = inner(X, X)
    if abs(q) <= tol * scale:
        return "lightlike"
    return "timelike" if q < 0 else "spacelike"


def is_laguerre_matrix(T: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff T preserves the inner product and fixes wp exactly.

    Both conditions are checked entrywise against ``tol`` times a scale
    derived from the matrix: sphere coordinates grow quadratically in the
    center, so absolute tolerances would be useless.
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {T.shape}")
    n = base_dim(T)
    G = signature_matrix(n)
    scale = max(1.0, float(np.abs(T).max()) ** 2)
    if not np.all(np.isfinite(T)):
        return False
    gram_defect = np.abs(T @ G @ T.T - G).max()
    if gram_defect > tol * scale:
        return False
    wp_defect = np.abs(wp(n) @ T - wp(n)).max()
    return bool(wp_defect <= tol * max(1.0, float(np.abs(T).max())))
