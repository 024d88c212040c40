"""Finite differences and tensor calculus on rectangular parameter grids.

Fields are numpy arrays whose leading ``ngrid`` axes are grid axes and
whose remaining axes are component axes.  Derivatives use central stencils
only (2nd or 4th order).  Periodic axes wrap; on non-periodic axes the
stencil radius is unavailable near the boundary and those layers are set
to NaN.  NaN propagates through every later pointwise or stencil
operation, so the valid interior shrinks automatically with each cascaded
derivative and reductions must be NaN-aware.

Derivative outputs insert the direction axis right after the grid axes:
gradient of a (*G, k) field is (*G, m, k) with m directions.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import simpson

from .errors import InsufficientInteriorError, UsageError

# Stencil radius per derivative application, by order.
RADIUS = {2: 1, 4: 2}


def spacing(lo: float, hi: float, count: int, periodic: bool) -> float:
    """Grid step; periodic axes exclude the right endpoint."""
    if count < 4:
        raise UsageError("need at least 4 points per axis")
    return (hi - lo) / (count if periodic else count - 1)


def axis_coords(lo: float, hi: float, count: int, periodic: bool) -> np.ndarray:
    if periodic:
        return lo + (hi - lo) * np.arange(count) / count
    return np.linspace(lo, hi, count)


def _shift(f: np.ndarray, offset: int, axis: int, periodic: bool) -> np.ndarray:
    """f sampled at index + offset; NaN where that falls off a hard edge."""
    if periodic:
        return np.roll(f, -offset, axis=axis)
    out = np.full_like(f, np.nan)
    src = [slice(None)] * f.ndim
    dst = [slice(None)] * f.ndim
    if offset > 0:
        src[axis] = slice(offset, None)
        dst[axis] = slice(None, -offset)
    elif offset < 0:
        src[axis] = slice(None, offset)
        dst[axis] = slice(-offset, None)
    else:
        return f.copy()
    out[tuple(dst)] = f[tuple(src)]
    return out


def diff(f: np.ndarray, axis: int, h: float, periodic: bool, order: int = 4) -> np.ndarray:
    """First derivative along one grid axis (central stencil)."""
    if order not in RADIUS:
        raise UsageError(f"unsupported stencil order {order}")
    s = lambda k: _shift(f, k, axis, periodic)
    if order == 2:
        return (s(1) - s(-1)) / (2.0 * h)
    return (s(-2) - 8.0 * s(-1) + 8.0 * s(1) - s(2)) / (12.0 * h)


def diff2(f: np.ndarray, axis: int, h: float, periodic: bool, order: int = 4) -> np.ndarray:
    """Pure second derivative along one grid axis (central stencil)."""
    if order not in RADIUS:
        raise UsageError(f"unsupported stencil order {order}")
    s = lambda k: _shift(f, k, axis, periodic)
    if order == 2:
        return (s(1) - 2.0 * f + s(-1)) / (h * h)
    return (-s(-2) + 16.0 * s(-1) - 30.0 * f + 16.0 * s(1) - s(2)) / (12.0 * h * h)


def gradient(f: np.ndarray, ngrid: int, hs, periodic, order: int = 4) -> np.ndarray:
    """Stack of first derivatives along every grid axis.

    Output shape (*G, m, *C): the new direction axis sits at position
    ``ngrid``.
    """
    parts = [diff(f, axis, hs[axis], periodic[axis], order) for axis in range(ngrid)]
    return np.stack(parts, axis=ngrid)


def require_interior(counts, periodic, order: int, levels: int) -> None:
    """Fail early when a cascade of ``levels`` derivatives eats the grid."""
    margin = RADIUS[order] * levels
    for count, per in zip(counts, periodic):
        if not per and count <= 2 * margin + 2:
            raise InsufficientInteriorError(
                f"axis with {count} points cannot support {levels} cascaded "
                f"derivative levels (needs margin {margin} per side)"
            )


def valid_mask(*fields) -> np.ndarray:
    """Grid mask of points where every given field is finite.

    Component axes (anything beyond the common grid shape) are reduced
    with 'all finite'.
    """
    ngrid = min(f.ndim for f in fields)
    shapes = {f.shape[:ngrid] for f in fields}
    if len(shapes) != 1:
        raise UsageError("fields do not share a grid shape")
    mask = np.ones(next(iter(shapes)), dtype=bool)
    for f in fields:
        finite = np.isfinite(f)
        while finite.ndim > ngrid:
            finite = finite.all(axis=-1)
        mask &= finite
    return mask


def nanmax_abs(field: np.ndarray) -> float:
    """Largest |value| over the valid region (0.0 for an all-NaN field)."""
    if np.all(np.isnan(field)):
        return 0.0
    return float(np.nanmax(np.abs(field)))


def interior_margins(mask: np.ndarray) -> tuple[int, ...]:
    """Per-axis NaN margin of a validity mask (0 on fully valid axes)."""
    margins = []
    for axis in range(mask.ndim):
        collapsed = mask.any(axis=tuple(i for i in range(mask.ndim) if i != axis))
        idx = np.nonzero(collapsed)[0]
        margins.append(int(idx[0]) if idx.size else mask.shape[axis])
    return tuple(margins)


def _masked_batched(op, mat: np.ndarray, fill: np.ndarray) -> np.ndarray:
    """Apply a batched matrix op, routing NaN blocks around it."""
    bad = ~np.isfinite(mat).all(axis=(-2, -1))
    if not bad.any():
        return op(mat)
    work = np.where(bad[..., None, None], fill, mat)
    out = op(work)
    out = np.asarray(out, dtype=float)
    if out.ndim == bad.ndim:  # scalar per matrix (det, ...)
        return np.where(bad, np.nan, out)
    return np.where(bad[..., None, None], np.nan, out)


def grid_inv(mat: np.ndarray) -> np.ndarray:
    """Batched matrix inverse that passes NaN blocks through."""
    eye = np.eye(mat.shape[-1])
    return _masked_batched(np.linalg.inv, mat, eye)


def grid_det(mat: np.ndarray) -> np.ndarray:
    eye = np.eye(mat.shape[-1])
    return _masked_batched(np.linalg.det, mat, eye)


def grid_cholesky(mat: np.ndarray) -> np.ndarray:
    eye = np.eye(mat.shape[-1])
    return _masked_batched(np.linalg.cholesky, mat, eye)


def grid_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Batched linear solve A X = B that passes NaN blocks through."""
    bad = ~(np.isfinite(A).all(axis=(-2, -1)) & np.isfinite(B).all(axis=(-2, -1)))
    if not bad.any():
        return np.linalg.solve(A, B)
    eye = np.eye(A.shape[-1])
    Aw = np.where(bad[..., None, None], eye, A)
    Bw = np.where(bad[..., None, None], np.zeros_like(eye), B)
    out = np.linalg.solve(Aw, Bw)
    return np.where(bad[..., None, None], np.nan, out)


def grid_eigvalsh(mat: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(mat).all(axis=(-2, -1))
    if not bad.any():
        return np.linalg.eigvalsh(mat)
    eye = np.eye(mat.shape[-1])
    work = np.where(bad[..., None, None], eye, mat)
    out = np.linalg.eigvalsh(work)
    return np.where(bad[..., None], np.nan, out)


def selfadjoint_eigvals(endo: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) of an endomorphism self-adjoint for ``metric``.

    Reduces the generalized problem through the Cholesky factor of the
    metric, so the result is real and sorted.
    """
    L = grid_cholesky(metric)
    sym = np.einsum("...ab,...bc->...ac", metric, endo)
    bad = ~np.isfinite(sym).all(axis=(-2, -1)) | ~np.isfinite(L).all(axis=(-2, -1))
    eye = np.eye(metric.shape[-1])
    Lw = np.where(bad[..., None, None], eye, L)
    symw = np.where(bad[..., None, None], eye, sym)
    half = np.linalg.solve(Lw, symw)
    # full = L^{-1} sym L^{-T}; solve acts on the left, so transpose twice.
    full = np.linalg.solve(Lw, np.swapaxes(half, -1, -2))
    full = 0.5 * (full + np.swapaxes(full, -1, -2))
    vals = np.linalg.eigvalsh(full)
    return np.where(bad[..., None], np.nan, vals)


def christoffel(g: np.ndarray, ngrid: int, hs, periodic, order: int = 4,
                ginv: np.ndarray | None = None) -> np.ndarray:
    """Christoffel symbols Gamma^c_{ab} of a metric field g (*G, m, m)."""
    if ginv is None:
        ginv = grid_inv(g)
    dg = gradient(g, ngrid, hs, periodic, order)  # (*G, d, a, b)
    low = 0.5 * (
        np.moveaxis(dg, ngrid, ngrid + 1)          # [c, a, b] <- dg[a, c, b]
        + np.moveaxis(dg, ngrid, ngrid + 2)        # [c, a, b] <- dg[b, c, a] (with symmetry of g)
        - dg
    )
    # dg[a,c,b] term: derivative axis moved to slot 'a'; using g symmetry the
    # second term is dg with derivative axis in slot 'b'.
    return np.einsum("...ec,...cab->...eab", ginv, low)


def cov_d_covector(C: np.ndarray, Gamma: np.ndarray, ngrid: int, hs, periodic,
                   order: int = 4) -> np.ndarray:
    """nabla_c C_a for a covector field C (*G, m); output (*G, c, a)."""
    dC = gradient(C, ngrid, hs, periodic, order)
    return dC - np.einsum("...eca,...e->...ca", Gamma, C)


def cov_d_tensor2(T: np.ndarray, Gamma: np.ndarray, ngrid: int, hs, periodic,
                  order: int = 4) -> np.ndarray:
    """nabla_c T_ab for a covariant 2-tensor (*G, m, m); output (*G, c, a, b)."""
    dT = gradient(T, ngrid, hs, periodic, order)
    corr_a = np.einsum("...eca,...eb->...cab", Gamma, T)
    corr_b = np.einsum("...ecb,...ae->...cab", Gamma, T)
    return dT - corr_a - corr_b


def cov_d_tensor3(U: np.ndarray, Gamma: np.ndarray, ngrid: int, hs, periodic,
                  order: int = 4) -> np.ndarray:
    """nabla_d U_cab for a covariant 3-tensor (*G, m, m, m); output (*G, d, c, a, b)."""
    dU = gradient(U, ngrid, hs, periodic, order)
    corr_c = np.einsum("...edc,...eab->...dcab", Gamma, U)
    corr_a = np.einsum("...eda,...ceb->...dcab", Gamma, U)
    corr_b = np.einsum("...edb,...cae->...dcab", Gamma, U)
    return dU - corr_c - corr_a - corr_b


def laplace_beltrami(f: np.ndarray, ngrid: int, ginv: np.ndarray, sqrt_det: np.ndarray,
                     hs, periodic, order: int = 4) -> np.ndarray:
    """Laplace-Beltrami operator (1/sqrt g) d_a(sqrt g g^{ab} d_b f).

    f may carry component axes; ginv is (*G, m, m) and sqrt_det (*G).
    """
    grid_shape = f.shape[:ngrid]
    comp_shape = f.shape[ngrid:]
    fw = f.reshape(grid_shape + (-1,))             # (*G, K)
    df = gradient(fw, ngrid, hs, periodic, order)  # (*G, b, K)
    flux = np.einsum("...ab,...bk->...ak", ginv, df)
    weighted = sqrt_det[..., None, None] * flux
    div = sum(
        diff(np.take(weighted, a, axis=ngrid), a, hs[a], periodic[a], order)
        for a in range(ngrid)
    )
    out = div / sqrt_det[..., None]
    return out.reshape(grid_shape + comp_shape)


def riemann_tensor(g: np.ndarray, Gamma: np.ndarray, ngrid: int, hs, periodic,
                   order: int = 4) -> np.ndarray:
    """Lowered curvature tensor of a metric field.

    Sign and slot convention: the round sphere comes out positive through
    both K = R_{abab} / (g_aa g_bb - g_ab^2) and the Ricci contraction
    Ric_{ac} = g^{bd} R_{abcd}.
    """
    dG = gradient(Gamma, ngrid, hs, periodic, order)  # (*G, deriv, e, i, j)
    # R^d_{cab} = d_a Gamma^d_{bc} - d_b Gamma^d_{ac} + Gamma^d_{ae} Gamma^e_{bc} - Gamma^d_{be} Gamma^e_{ac}
    up = (
        np.einsum("...adbc->...dcab", dG)
        - np.einsum("...bdac->...dcab", dG)
        + np.einsum("...dae,...ebc->...dcab", Gamma, Gamma)
        - np.einsum("...dbe,...eac->...dcab", Gamma, Gamma)
    )
    # Lower the free slot; swapping the last pair afterwards lands in the
    # positive-sphere arrangement stated above.
    low = np.einsum("...de,...ecab->...abdc", g, up)
    return low


def ricci_tensor(riem: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    """Ricci contraction R_{ac} = g^{bd} R_{abcd} (positive for spheres)."""
    return np.einsum("...bd,...abcd->...ac", ginv, riem)


def scalar_curvature(ricci: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    return np.einsum("...ac,...ac->...", ginv, ricci)


def integrate(field: np.ndarray, hs, periodic) -> float:
    """Integral of a grid scalar: rectangle rule on periodic axes (which is
    spectrally accurate there), composite Simpson on bounded axes."""
    work = np.asarray(field, dtype=float)
    if np.isnan(work).any():
        raise UsageError("quadrature over a field with invalid (NaN) entries")
    for axis in reversed(range(work.ndim)):
        if periodic[axis]:
            work = work.sum(axis=axis) * hs[axis]
        else:
            work = simpson(work, dx=hs[axis], axis=axis)
    return float(work)
