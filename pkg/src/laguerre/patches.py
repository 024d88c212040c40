"""Sampled hypersurface patches with derivative jets.

A patch stores, on a rectangular parameter grid, the immersion x, its
first and second parameter derivatives, the unit normal xi and the first
and second derivatives of xi.  Patches live in one of three geometries:

* "r3"  -- Euclidean R^n (ambient form +...+),
* "r31" -- Lorentzian R^n_1 (+...+-, last axis time-like, <xi, xi> = -1),
* "r30" -- the degenerate hyperplane of R^{n+1}_1: points with first
           coordinate equal to the last; the normal is the null vector
           field normalized against nu = (1, 0, ..., 0, 1).

Builtin surfaces supply x-jets to third order analytically; the normal
jets are then produced exactly through the shape operator (the relation
d(xi) = -dx o S and its derivative), so no hand-differentiated normals
are needed anywhere.  Sampled ("samples") patches fall back to central
finite differences for every jet.

Degeneracy policy: umbilic points, vanishing principal curvatures,
curvature-label crossings and non-immersion points inside the grid abort
the build with the offending grid index; they are never smoothed over.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fd
from .errors import DegenerateSurfaceError, UsageError

UMBILIC_TOL_FACTOR = 1e-8        # times patch diameter
CURVATURE_ZERO_FACTOR = 1e-10    # divided by patch diameter
CROSSING_SPIKE_FACTOR = 20.0     # kink spike over the smooth second-difference level
CROSSING_GAP_FRACTION = 0.5      # of the median gap: "locally collapsed"


@dataclass(frozen=True)
class GridAxes:
    """Rectangular parameter grid: names, ranges, counts, periodicity."""

    names: tuple
    los: tuple
    his: tuple
    counts: tuple
    periodic: tuple

    def __post_init__(self):
        m = len(self.names)
        if not (len(self.los) == len(self.his) == len(self.counts) == len(self.periodic) == m):
            raise UsageError("inconsistent grid axis description")
        for count in self.counts:
            if count < 6:
                raise UsageError("need at least 6 samples per axis")

    @property
    def ndim(self) -> int:
        return len(self.names)

    @property
    def shape(self) -> tuple:
        return tuple(self.counts)

    @property
    def spacings(self) -> tuple:
        return tuple(
            fd.spacing(lo, hi, c, p)
            for lo, hi, c, p in zip(self.los, self.his, self.counts, self.periodic)
        )

    def coords(self):
        """1-d coordinate arrays, one per axis."""
        return [
            fd.axis_coords(lo, hi, c, p)
            for lo, hi, c, p in zip(self.los, self.his, self.counts, self.periodic)
        ]

    def meshgrid(self):
        return np.meshgrid(*self.coords(), indexing="ij")


def ambient_form_diag(space: str, n: int) -> np.ndarray:
    """Signature diagonal of the ambient inner product for each geometry."""
    if space == "r3":
        return np.ones(n)
    if space == "r31":
        d = np.ones(n)
        d[-1] = -1.0
        return d
    if space == "r30":
        d = np.ones(n + 1)
        d[-1] = -1.0
        return d
    raise UsageError(f"unknown space tag {space!r}")


def nu_vector(n: int) -> np.ndarray:
    """The null direction (1, 0, ..., 0, 1) of the degenerate hyperplane."""
    v = np.zeros(n + 1)
    v[0] = 1.0
    v[-1] = 1.0
    return v


@dataclass(eq=False)
class SurfacePatch:
    """Immutable sampled hypersurface with jets.

    Grid axes lead every array; ambient components trail.  ``dx`` has shape
    (*G, m, d), ``d2x`` (*G, m, m, d) and likewise for the normal.
    """

    space: str
    n: int
    axes: GridAxes
    x: np.ndarray
    dx: np.ndarray
    d2x: np.ndarray
    xi: np.ndarray
    dxi: np.ndarray
    d2xi: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def ambient_dim(self) -> int:
        return self.x.shape[-1]

    @property
    def form(self) -> np.ndarray:
        return ambient_form_diag(self.space, self.n)

    @property
    def ngrid(self) -> int:
        return self.axes.ndim

    def dot(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Ambient inner product, broadcasting over grid axes."""
        return np.sum(self.form * u * v, axis=-1)

    @property
    def diameter(self) -> float:
        mins = self.x.reshape(-1, self.ambient_dim).min(axis=0)
        maxs = self.x.reshape(-1, self.ambient_dim).max(axis=0)
        return float(np.linalg.norm(maxs - mins))


# ---------------------------------------------------------------------------
# Shape data
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ShapeData:
    """Pointwise curvature data of a patch.

    ``k`` holds the principal curvatures sorted descending, ``radii`` their
    reciprocals in the same order, ``r`` the mean curvature radius, ``rho``
    the size sqrt(sum (r_i - r)^2) of the trace-free radius part, ``dirs``
    the matching principal directions as rows of parameter components
    (orthonormal for the first fundamental form), ``S`` the shape operator
    S^a_b and ``I``/``II`` the fundamental forms.
    """

    k: np.ndarray
    radii: np.ndarray
    r: np.ndarray
    rho: np.ndarray
    dirs: np.ndarray
    S: np.ndarray
    I: np.ndarray
    II: np.ndarray


def first_fundamental(patch: SurfacePatch) -> np.ndarray:
    return np.einsum("...ai,...bi,i->...ab", patch.dx, patch.dx, patch.form)


def second_fundamental(patch: SurfacePatch) -> np.ndarray:
    return np.einsum("...abi,...i,i->...ab", patch.d2x, patch.xi, patch.form)


def shape_operator(patch: SurfacePatch):
    """(I, II, S) with S = I^{-1} II, the operator in d(xi) = -dx o S."""
    I = first_fundamental(patch)
    II = second_fundamental(patch)
    S = fd.grid_solve(I, II)
    return I, II, S


def shape_data(patch: SurfacePatch) -> ShapeData:
    """Principal curvatures, radii and directions over the whole grid.

    Raises DegenerateSurfaceError (naming a grid index) on umbilics,
    vanishing curvatures or curvature-label crossings; the excluded sets
    are part of the domain of everything downstream.  Patches with
    finite-difference jets carry NaN boundary layers, which simply stay
    NaN here and are skipped by the checks.
    """
    I, II, S = shape_operator(patch)

    # Generalized symmetric eigenproblem II v = k I v through the Cholesky
    # factor of I, so the directions come out I-orthonormal.
    L = fd.grid_cholesky(I)
    half = fd.grid_solve(L, II)
    sym = fd.grid_solve(L, np.swapaxes(half, -1, -2))
    sym = 0.5 * (sym + np.swapaxes(sym, -1, -2))
    bad = ~np.isfinite(sym).all(axis=(-2, -1))
    symw = np.where(bad[..., None, None], np.eye(sym.shape[-1]), sym)
    vals, vecs = np.linalg.eigh(symw)
    vals = np.where(bad[..., None], np.nan, vals[..., ::-1])
    vecs = vecs[..., ::-1]
    # Undo the Cholesky change of basis; rows of ``dirs`` are directions.
    Lw = np.where(bad[..., None, None], np.eye(sym.shape[-1]), L)
    dirs = np.swapaxes(np.linalg.solve(np.swapaxes(Lw, -1, -2), vecs), -1, -2)
    dirs = np.where(bad[..., None, None], np.nan, dirs)

    diam = patch.diameter
    k_zero_tol = CURVATURE_ZERO_FACTOR / max(diam, 1e-300)
    flat = np.abs(vals) <= k_zero_tol
    if flat.any():
        idx = tuple(int(i) for i in np.argwhere(flat)[0][:patch.ngrid])
        raise DegenerateSurfaceError(
            f"vanishing principal curvature at grid index {idx}"
        )

    radii = 1.0 / vals
    r = radii.mean(axis=-1)
    rho = np.sqrt(np.sum((radii - r[..., None]) ** 2, axis=-1))
    umb_tol = UMBILIC_TOL_FACTOR * diam
    umb = rho <= umb_tol
    if umb.any():
        idx = tuple(int(i) for i in np.argwhere(umb)[0])
        raise DegenerateSurfaceError(f"umbilic point at grid index {idx}")

    _check_crossings(vals, patch.ngrid)
    return ShapeData(k=vals, radii=radii, r=r, rho=rho, dirs=dirs, S=S, I=I, II=II)


def _check_crossings(vals: np.ndarray, ngrid: int) -> None:
    """Detect curvature-label crossings inside the grid.

    Sorted labels are continuous but kink where two curvature families
    cross, so a crossing leaves a second-difference spike on a sorted-gap
    field exactly where that gap collapses below its typical size.  Both
    signatures are required before flagging, which keeps legitimately
    wide-ranging gaps (and identically repeated curvatures) out of the
    net.
    """
    for i in range(vals.shape[-1] - 1):
        gap = vals[..., i] - vals[..., i + 1]
        med = float(np.nanmedian(gap))
        scale = float(np.nanmax(np.abs(vals)))
        if not np.isfinite(med) or med <= 1e-12 * scale:
            continue  # identically degenerate pair: allowed
        for axis in range(ngrid):
            if gap.shape[axis] < 5:
                continue
            sl_m = [slice(1, -1)] * ngrid
            sl_p = list(sl_m)
            sl_0 = list(sl_m)
            sl_m[axis] = slice(0, -2)
            sl_p[axis] = slice(2, None)
            sl_0[axis] = slice(1, -1)
            spike = np.abs(
                gap[tuple(sl_p)] - 2.0 * gap[tuple(sl_0)] + gap[tuple(sl_m)]
            )
            smooth = float(np.nanmedian(spike))
            big = np.nan_to_num(spike, nan=0.0) > max(
                CROSSING_SPIKE_FACTOR * smooth, 1e-13 * scale
            )
            local_gap = gap[tuple(sl_0)]
            collapsed = np.nan_to_num(local_gap, nan=np.inf) < CROSSING_GAP_FRACTION * med
            hit = big & collapsed
            if hit.any():
                inner = np.argwhere(hit)[0]
                idx = tuple(int(v) + 1 for v in inner)
                raise DegenerateSurfaceError(
                    f"principal curvature crossing near grid index {idx}; "
                    "re-grid to keep curvature labels separated"
                )


# ---------------------------------------------------------------------------
# Exact normal jets through the shape operator
# ---------------------------------------------------------------------------

def _xi_jets_from_shape(x, dx, d2x, d3x, xi, form):
    """First and second derivatives of the unit normal, pointwise exact.

    Uses d(xi) = -dx o S with S = I^{-1} II and differentiates S through
    the third-order jets of x.  Valid in every geometry because only the
    ambient form enters.
    """
    I = np.einsum("...ai,...bi,i->...ab", dx, dx, form)
    II = np.einsum("...abi,...i,i->...ab", d2x, xi, form)
    Iinv = np.linalg.inv(I)
    S = np.einsum("...ga,...ab->...gb", Iinv, II)
    dxi = -np.einsum("...gb,...gi->...bi", S, dx)

    dI = (
        np.einsum("...dai,...bi,i->...dab", d2x, dx, form)
        + np.einsum("...ai,...dbi,i->...dab", dx, d2x, form)
    )
    dII = (
        np.einsum("...dabi,...i,i->...dab", d3x, xi, form)
        + np.einsum("...abi,...di,i->...dab", d2x, dxi, form)
    )
    dS = np.einsum("...ga,...dab->...dgb", Iinv, dII) - np.einsum(
        "...ge,...def,...fa,...ab->...dgb", Iinv, dI, Iinv, II
    )
    d2xi = -np.einsum("...dgb,...gi->...dbi", dS, dx) - np.einsum(
        "...gb,...dgi->...dbi", S, d2x
    )
    return dxi, d2xi


# ---------------------------------------------------------------------------
# Builtin surfaces (analytic x-jets to third order)
# ---------------------------------------------------------------------------

def _torus_jets(params, U, V):
    R = float(params.get("R", 2.0))
    a = float(params.get("a", 1.0))
    cu, su, cv, sv = np.cos(U), np.sin(U), np.cos(V), np.sin(V)
    w = R + a * cu
    zeros = np.zeros_like(U)

    def vec(*comps):
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    x = vec(w * cv, w * sv, a * su)
    xu = vec(-a * su * cv, -a * su * sv, a * cu)
    xv = vec(-w * sv, w * cv, zeros)
    xuu = vec(-a * cu * cv, -a * cu * sv, -a * su)
    xuv = vec(a * su * sv, -a * su * cv, zeros)
    xvv = vec(-w * cv, -w * sv, zeros)
    xuuu = vec(a * su * cv, a * su * sv, -a * cu)
    xuuv = vec(a * cu * sv, -a * cu * cv, zeros)
    xuvv = vec(a * su * cv, a * su * sv, zeros)
    xvvv = vec(w * sv, -w * cv, zeros)
    xi = vec(cu * cv, cu * sv, su)

    dx = np.stack([xu, xv], axis=-2)
    d2x = np.stack(
        [np.stack([xuu, xuv], axis=-2), np.stack([xuv, xvv], axis=-2)], axis=-3
    )
    d3x = _third_from_table({
        (0, 0, 0): xuuu, (0, 0, 1): xuuv, (0, 1, 1): xuvv, (1, 1, 1): xvvv,
    }, 2)
    return x, dx, d2x, d3x, xi


def _sphere_jets(params, U, V):
    R = float(params.get("R", 1.0))
    cu, su, cv, sv = np.cos(U), np.sin(U), np.cos(V), np.sin(V)
    zeros = np.zeros_like(U)

    def vec(*comps):
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    xi = vec(cu * cv, cu * sv, su)
    xiu = vec(-su * cv, -su * sv, cu)
    xiv = vec(-cu * sv, cu * cv, zeros)
    xiuu = -xi
    xiuv = vec(su * sv, -su * cv, zeros)
    xivv = vec(-cu * cv, -cu * sv, zeros)
    xiuuu = -xiu
    xiuuv = -xiv
    xiuvv = vec(su * cv, su * sv, zeros)
    xivvv = vec(cu * sv, -cu * cv, zeros)

    x = R * xi
    dx = R * np.stack([xiu, xiv], axis=-2)
    d2x = R * np.stack(
        [np.stack([xiuu, xiuv], axis=-2), np.stack([xiuv, xivv], axis=-2)], axis=-3
    )
    d3x = R * _third_from_table({
        (0, 0, 0): xiuuu, (0, 0, 1): xiuuv, (0, 1, 1): xiuvv, (1, 1, 1): xivvv,
    }, 2)
    return x, dx, d2x, d3x, xi


def _cylinder_jets(params, U, V):
    R = float(params.get("R", 1.0))
    cv, sv = np.cos(V), np.sin(V)
    zeros = np.zeros_like(U)
    ones = np.ones_like(U)

    def vec(*comps):
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    x = vec(R * cv, R * sv, U)
    xu = vec(zeros, zeros, ones)
    xv = vec(-R * sv, R * cv, zeros)
    xvv = vec(-R * cv, -R * sv, zeros)
    zero3 = np.zeros_like(x)
    dx = np.stack([xu, xv], axis=-2)
    d2x = np.stack(
        [np.stack([zero3, zero3], axis=-2), np.stack([zero3, xvv], axis=-2)], axis=-3
    )
    d3x = _third_from_table({(1, 1, 1): vec(R * sv, -R * cv, zeros)}, 2,
                            zero=np.zeros_like(x))
    xi = vec(cv, sv, zeros)
    return x, dx, d2x, d3x, xi


def _graph_jets(params, *coords):
    """Translational graph x = (u_1, ..., u_m, sum_i f_i(u_i)) with
    f_i(t) = quad_i t^2 + cubic_i t^3, upward unit normal."""
    m = len(coords)
    quad = np.asarray(params.get("quad", [1.0, 0.5][:m] if m == 2 else [1.0, 0.7, 0.4]), dtype=float)
    cubic = np.asarray(params.get("cubic", np.zeros(m)), dtype=float)
    if quad.shape != (m,) or cubic.shape != (m,):
        raise UsageError("graph coefficients must match the number of axes")
    shape = np.broadcast_shapes(*(c.shape for c in coords))
    grids = [np.broadcast_to(c, shape) for c in coords]

    f = sum(quad[i] * grids[i] ** 2 + cubic[i] * grids[i] ** 3 for i in range(m))
    f1 = [2 * quad[i] * grids[i] + 3 * cubic[i] * grids[i] ** 2 for i in range(m)]
    f2 = [2 * quad[i] + 6 * cubic[i] * grids[i] for i in range(m)]
    f3 = [6 * cubic[i] * np.ones(shape) for i in range(m)]

    d = m + 1
    x = np.zeros(shape + (d,))
    for i in range(m):
        x[..., i] = grids[i]
    x[..., -1] = f

    dx = np.zeros(shape + (m, d))
    for i in range(m):
        dx[..., i, i] = 1.0
        dx[..., i, -1] = f1[i]
    d2x = np.zeros(shape + (m, m, d))
    d3x = np.zeros(shape + (m, m, m, d))
    for i in range(m):
        d2x[..., i, i, -1] = f2[i]
        d3x[..., i, i, i, -1] = f3[i]

    grad2 = sum(g * g for g in f1)
    s = np.sqrt(1.0 + grad2)
    xi = np.zeros(shape + (d,))
    for i in range(m):
        xi[..., i] = -f1[i] / s
    xi[..., -1] = 1.0 / s
    return x, dx, d2x, d3x, xi


def _torus4_jets(params, U, T, P):
    """Rotational 3-torus in R^4: circle of radius a swept over a 2-sphere
    of radius R; outward normal."""
    R = float(params.get("R", 2.0))
    a = float(params.get("a", 1.0))
    cu, su = np.cos(U), np.sin(U)
    ct, st = np.cos(T), np.sin(T)
    cp, sp = np.cos(P), np.sin(P)
    zeros = np.zeros_like(U)

    def nv(*comps):
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    # Unit 2-sphere direction and its jets in (theta, phi).
    n = nv(st * cp, st * sp, ct)
    nt = nv(ct * cp, ct * sp, -st)
    npp = nv(-st * sp, st * cp, zeros)
    ntt = -n
    ntp = nv(-ct * sp, ct * cp, zeros)
    npp2 = nv(-st * cp, -st * sp, zeros)
    nttt = -nt
    nttp = -npp
    ntpp = nv(-ct * cp, -ct * sp, zeros)
    nppp = nv(st * sp, -st * cp, zeros)

    w = R + a * cu

    def emb(scal, vec3, last):
        """(scal * vec3, last) as a 4-vector field."""
        out = np.zeros(np.broadcast_shapes(scal.shape, vec3.shape[:-1], last.shape) + (4,))
        out[..., :3] = scal[..., None] * vec3
        out[..., 3] = last
        return out

    x = emb(w, n, a * su)
    xu = emb(-a * su * np.ones_like(w), n, a * cu)
    xt = emb(w, nt, zeros)
    xp = emb(w, npp, zeros)
    xuu = emb(-a * cu * np.ones_like(w), n, -a * su)
    xut = emb(-a * su * np.ones_like(w), nt, zeros)
    xup = emb(-a * su * np.ones_like(w), npp, zeros)
    xtt = emb(w, ntt, zeros)
    xtp = emb(w, ntp, zeros)
    xpp = emb(w, npp2, zeros)
    xuuu = emb(a * su * np.ones_like(w), n, -a * cu)
    xuut = emb(-a * cu * np.ones_like(w), nt, zeros)
    xuup = emb(-a * cu * np.ones_like(w), npp, zeros)
    xutt = emb(-a * su * np.ones_like(w), ntt, zeros)
    xutp = emb(-a * su * np.ones_like(w), ntp, zeros)
    xupp = emb(-a * su * np.ones_like(w), npp2, zeros)
    xttt = emb(w, nttt, zeros)
    xttp = emb(w, nttp, zeros)
    xtpp = emb(w, ntpp, zeros)
    xppp = emb(w, nppp, zeros)

    dx = np.stack([xu, xt, xp], axis=-2)
    rows = [[xuu, xut, xup], [xut, xtt, xtp], [xup, xtp, xpp]]
    d2x = np.stack([np.stack(r, axis=-2) for r in rows], axis=-3)
    d3x = _third_from_table({
        (0, 0, 0): xuuu, (0, 0, 1): xuut, (0, 0, 2): xuup,
        (0, 1, 1): xutt, (0, 1, 2): xutp, (0, 2, 2): xupp,
        (1, 1, 1): xttt, (1, 1, 2): xttp, (1, 2, 2): xtpp,
        (2, 2, 2): xppp,
    }, 3)
    xi = emb(cu * np.ones_like(w), n, su)
    return x, dx, d2x, d3x, xi


def _catenoid_r31_jets(params, U, V):
    """Rotational maximal (zero mean curvature) surface in R^3_1:
    x = (u cos v, u sin v, arcsinh u), future-pointing time-like normal."""
    cv, sv = np.cos(V), np.sin(V)
    u = U
    zeros = np.zeros_like(U)
    t1 = (1.0 + u * u) ** -0.5
    t2 = -u * (1.0 + u * u) ** -1.5
    t3 = (2.0 * u * u - 1.0) * (1.0 + u * u) ** -2.5

    def vec(*comps):
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    x = vec(u * cv, u * sv, np.arcsinh(u))
    xu = vec(cv, sv, t1)
    xv = vec(-u * sv, u * cv, zeros)
    xuu = vec(zeros, zeros, t2)
    xuv = vec(-sv, cv, zeros)
    xvv = vec(-u * cv, -u * sv, zeros)
    xuuu = vec(zeros, zeros, t3)
    xuuv = np.zeros_like(x)
    xuvv = vec(-cv, -sv, zeros)
    xvvv = vec(u * sv, -u * cv, zeros)

    dx = np.stack([xu, xv], axis=-2)
    d2x = np.stack(
        [np.stack([xuu, xuv], axis=-2), np.stack([xuv, xvv], axis=-2)], axis=-3
    )
    d3x = _third_from_table({
        (0, 0, 0): xuuu, (0, 0, 1): xuuv, (0, 1, 1): xuvv, (1, 1, 1): xvvv,
    }, 2)
    xi = vec(cv / u, sv / u, np.sqrt(1.0 + u * u) / u)
    return x, dx, d2x, d3x, xi


def _saddle_r30_jets(params, U, V):
    """Spacelike graph t = c u v inside the degenerate hyperplane of R^4_1,
    written as x = (t, u, v, t); normal fixed by the null-frame conditions."""
    c = float(params.get("c", 1.0))
    zeros = np.zeros_like(U)
    ones = np.ones_like(U)

    def vec(*comps):
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    t = c * U * V
    x = vec(t, U, V, t)
    xu = vec(c * V, ones, zeros, c * V)
    xv = vec(c * U, zeros, ones, c * U)
    xuv = vec(c * ones, zeros, zeros, c * ones)
    zero4 = np.zeros_like(x)

    dx = np.stack([xu, xv], axis=-2)
    d2x = np.stack(
        [np.stack([zero4, xuv], axis=-2), np.stack([xuv, zero4], axis=-2)], axis=-3
    )
    d3x = np.zeros(x.shape[:-1] + (2, 2, 2, 4))

    half = 0.5 * (1.0 - c * c * (U * U + V * V))
    xi = vec(half, -c * V, -c * U, half - 1.0)
    return x, dx, d2x, d3x, xi


def _third_from_table(table, m, zero=None):
    """Assemble the symmetric third-jet array from its distinct entries."""
    sample = next(iter(table.values()))
    if zero is None:
        zero = np.zeros_like(sample)
    shape = sample.shape[:-1] + (m, m, m, sample.shape[-1])
    out = np.zeros(shape)
    for (i, j, k), val in table.items():
        for perm in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            out[(..., *perm, slice(None))] = val
    return out


BUILTINS = {
    "torus": dict(space="r3", jets=_torus_jets, naxes=2,
                  default_grid=dict(u=(-np.pi / 3, np.pi / 3, 65, False),
                                    v=(0.0, 2 * np.pi, 64, True))),
    "sphere": dict(space="r3", jets=_sphere_jets, naxes=2,
                   default_grid=dict(u=(-1.0, 1.0, 33, False),
                                     v=(0.0, 2 * np.pi, 32, True))),
    "cylinder": dict(space="r3", jets=_cylinder_jets, naxes=2,
                     default_grid=dict(u=(-1.0, 1.0, 33, False),
                                       v=(0.0, 2 * np.pi, 32, True))),
    "translational_graph": dict(space="r3", jets=_graph_jets, naxes=None,
                                default_grid=dict(u=(-0.3, 0.3, 33, False),
                                                  v=(-0.3, 0.3, 33, False))),
    "torus4": dict(space="r3", jets=_torus4_jets, naxes=3,
                   default_grid=dict(u=(-np.pi / 3, np.pi / 3, 33, False),
                                     v=(np.pi / 4, 3 * np.pi / 4, 25, False),
                                     w=(0.0, 2 * np.pi, 24, True))),
    "maximal_catenoid_r31": dict(space="r31", jets=_catenoid_r31_jets, naxes=2,
                                 default_grid=dict(u=(0.5, 2.0, 65, False),
                                                   v=(0.0, 2 * np.pi, 64, True)),
                                 zero_mean_curvature=True),
    "saddle_r30": dict(space="r30", jets=_saddle_r30_jets, naxes=2,
                       default_grid=dict(u=(0.3, 1.2, 49, False),
                                         v=(0.3, 1.2, 49, False)),
                       zero_mean_curvature=True),
}


# ---------------------------------------------------------------------------
# Build
# ---------------------------------------------------------------------------

def _parse_axes(grid_spec: dict, default: dict) -> GridAxes:
    src = default if grid_spec is None else grid_spec
    if grid_spec is None:
        names = tuple(default.keys())
        los, his, counts, periodic = zip(*(default[k] for k in names))
        return GridAxes(names, los, his, counts, periodic)
    periodic_names = set(src.get("periodic", []))
    names, los, his, counts, per = [], [], [], [], []
    for key, val in src.items():
        if key == "periodic":
            continue
        try:
            lo, hi, count = val
        except (TypeError, ValueError) as exc:
            raise UsageError(f"axis {key!r} must be [lo, hi, count]") from exc
        names.append(key)
        los.append(float(lo))
        his.append(float(hi))
        counts.append(int(count))
        per.append(key in periodic_names)
    return GridAxes(tuple(names), tuple(los), tuple(his), tuple(counts), tuple(per))


def _worst(defect: np.ndarray, ngrid: int):
    """(max value, grid index) of a defect field, skipping NaN margins."""
    if np.all(np.isnan(defect)):
        return 0.0, ()
    flatmax = np.nanmax(defect)
    idx = np.unravel_index(np.nanargmax(defect), defect.shape)[:ngrid]
    return float(flatmax), tuple(int(i) for i in idx)


def _validate_patch(patch: SurfacePatch) -> None:
    """Normal normalization, contact condition, immersion and curvature checks.

    Patches whose jets came from finite differences carry NaN boundary
    margins; every check here skips those and uses a looser tolerance.
    """
    scale = max(1.0, float(np.abs(patch.x).max()))
    analytic = patch.metadata.get("jets") != "fd"
    tol = 1e-9 * scale if analytic else 1e-4 * scale

    xi2 = patch.dot(patch.xi, patch.xi)
    if patch.space == "r3":
        unit_defect = np.abs(xi2 - 1.0)
    elif patch.space == "r31":
        unit_defect = np.abs(xi2 + 1.0)
    else:
        unit_defect = np.abs(xi2)
        nu = nu_vector(patch.n)
        worst, idx = _worst(np.abs(np.sum(patch.form * patch.xi * nu, axis=-1) - 1.0),
                            patch.ngrid)
        if worst > 1e-9:
            raise DegenerateSurfaceError(f"normal pairing with nu differs from 1 at {idx}")
        worst, _ = _worst(np.abs(np.sum(patch.form * patch.x * nu, axis=-1)), patch.ngrid)
        if worst > 1e-9 * scale:
            raise DegenerateSurfaceError("points leave the degenerate hyperplane")
    worst, idx = _worst(unit_defect, patch.ngrid)
    if worst > tol:
        raise DegenerateSurfaceError(f"normal is not normalized at grid index {idx}")

    legendre = np.abs(np.einsum("...ai,...i,i->...a", patch.dx, patch.xi, patch.form))
    worst, idx = _worst(legendre, patch.ngrid)
    if worst > tol:
        raise DegenerateSurfaceError(f"contact condition dx . xi = 0 fails at grid index {idx}")

    eig = fd.grid_eigvalsh(first_fundamental(patch))
    low = np.nanmin(eig)
    if np.isfinite(low) and low <= 0:
        idx = np.unravel_index(np.nanargmin(eig[..., 0]), eig.shape[:-1])
        raise DegenerateSurfaceError(
            f"not an immersion (metric degenerates) at grid index {tuple(int(i) for i in idx)}"
        )


def build_patch(spec: dict, scheme: str = "analytic", fd_order: int = 4) -> SurfacePatch:
    """Build a validated SurfacePatch from a surface spec dictionary.

    Builtin specs: {"builtin": name, "params": {...}, "grid": {...},
    "normal": "outward"|"inward", "space": ...}.  Sample specs carry
    {"samples": {"points": ..., "normals": ...}, "grid": {...}} and get
    finite-difference jets of order ``fd_order``.
    """
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in BUILTINS:
            raise UsageError(f"unknown builtin surface {name!r}")
        entry = BUILTINS[name]
        space = spec.get("space", entry["space"])
        if space != entry["space"]:
            raise UsageError(f"builtin {name!r} lives in space {entry['space']!r}")
        axes = _parse_axes(spec.get("grid"), entry["default_grid"])
        if entry["naxes"] is not None and axes.ndim != entry["naxes"]:
            raise UsageError(f"builtin {name!r} needs {entry['naxes']} parameter axes")
        grids = [g for g in axes.meshgrid()]
        params = spec.get("params", {})
        x, dx, d2x, d3x, xi = entry["jets"](params, *grids)

        orientation = spec.get("normal", "outward")
        if orientation not in ("outward", "inward"):
            raise UsageError("normal orientation must be 'outward' or 'inward'")
        if orientation == "inward":
            if space == "r30":
                raise UsageError("the degenerate-space normal is unique; it cannot be flipped")
            xi = -xi

        form = ambient_form_diag(space, x.shape[-1] if space != "r30" else x.shape[-1] - 1)
        dxi, d2xi = _xi_jets_from_shape(x, dx, d2x, d3x, xi, form)
        n = x.shape[-1] if space != "r30" else x.shape[-1] - 1
        patch = SurfacePatch(
            space=space, n=n, axes=axes, x=x, dx=dx, d2x=d2x,
            xi=xi, dxi=dxi, d2xi=d2xi,
            metadata={"builtin": name, "params": dict(params), "jets": "analytic",
                      "normal": orientation},
        )
        _validate_patch(patch)
        if entry.get("zero_mean_curvature"):
            _, _, S = shape_operator(patch)
            mean_k = np.trace(S, axis1=-2, axis2=-1) / S.shape[-1]
            if np.abs(mean_k).max() > 1e-8:
                raise DegenerateSurfaceError(
                    "mean curvature oracle failed: builtin advertised as minimal is not"
                )
        shape_data(patch)  # degeneracy screening happens here
        return patch

    if "samples" in spec:
        return _build_from_samples(spec, fd_order)
    raise UsageError("surface spec needs either 'builtin' or 'samples'")


def _build_from_samples(spec: dict, fd_order: int) -> SurfacePatch:
    samples = spec["samples"]
    axes = _parse_axes(spec.get("grid"), None)
    try:
        x = np.asarray(samples["points"], dtype=float)
        xi = np.asarray(samples["normals"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed samples: {exc}") from exc
    space = spec.get("space", "r3")
    if x.shape[:-1] != axes.shape or xi.shape != x.shape:
        raise UsageError("sample arrays do not match the grid shape")
    hs, per = axes.spacings, axes.periodic
    m = axes.ndim
    dx = fd.gradient(x, m, hs, per, fd_order)
    d2x = np.stack([fd.gradient(np.take(dx, a, axis=m), m, hs, per, fd_order)
                    for a in range(m)], axis=m)
    dxi = fd.gradient(xi, m, hs, per, fd_order)
    d2xi = np.stack([fd.gradient(np.take(dxi, a, axis=m), m, hs, per, fd_order)
                     for a in range(m)], axis=m)
    n = x.shape[-1] if space != "r30" else x.shape[-1] - 1
    patch = SurfacePatch(
        space=space, n=n, axes=axes, x=x, dx=dx, d2x=d2x, xi=xi, dxi=dxi, d2xi=d2xi,
        metadata={"builtin": "samples", "jets": "fd", "normal": "as-given"},
    )
    _validate_samples_patch(patch)
    return patch


def _validate_samples_patch(patch: SurfacePatch) -> None:
    """Like _validate_patch, restricted to the FD-valid interior."""
    mask = fd.valid_mask(patch.dx)
    if not mask.any():
        raise UsageError("grid too small for finite-difference jets")
    scale = max(1.0, float(np.abs(patch.x).max()))
    tol = 1e-4 * scale

    xi2 = patch.dot(patch.xi, patch.xi)
    target = {"r3": 1.0, "r31": -1.0, "r30": 0.0}[patch.space]
    defect = np.abs(xi2 - target)
    if defect.max() > 1e-8 * scale:
        idx = tuple(int(i) for i in np.unravel_index(np.argmax(defect), defect.shape))
        raise DegenerateSurfaceError(f"sampled normal is not normalized at grid index {idx}")

    legendre = np.abs(np.einsum("...ai,...i,i->...a", patch.dx, patch.xi, patch.form))
    worst = fd.nanmax_abs(legendre)
    if worst > tol:
        raise DegenerateSurfaceError(
            f"contact condition dx . xi = 0 fails on the sampled interior (max {worst:.3e})"
        )

    I = first_fundamental(patch)
    eig = fd.grid_eigvalsh(I)
    low = np.nanmin(eig)
    if np.isfinite(low) and low <= 0:
        raise DegenerateSurfaceError("sampled patch is not an immersion on the interior")
