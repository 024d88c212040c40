"""Laguerre invariants of a Euclidean hypersurface patch.

The pipeline lifts a patch x: M -> R^n with unit normal xi to the light
cone of R^{n+3}_2:

    y   = (x.xi, -x.xi, xi, 1)           scaled position on the cone,
    Y   = rho * y                         rho^2 = sum_i (r_i - r)^2,
    eta = point_sphere(x) + r * y         coordinate of the sphere of
                                          radius -r centered at x + r xi.

The metric g = <dY, dY> = rho^2 <dxi, dxi> is invariant under the whole
group.  From Y the pipeline produces the conjugate null vector N out of
the Laplace-Beltrami image of Y, an orthonormal tangent frame E_i(Y) by
Gram-Schmidt on the coordinate derivatives, and the tensor fields

    B_ab = <d_a eta, d_b Y>,  L_ab = <d_a N, d_b Y>,  C_a = -<d_a N, eta>,

together with the shape operator rho^{-1}(S^{-1} - r id).  Everything
built from derivatives of grid fields uses cascaded central differences;
the valid interior shrinks by the stencil radius per cascade level on
non-periodic axes and reductions are NaN-aware.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import fd, lorentz, patches
from .errors import DegenerateSurfaceError, UsageError
from .group import LaguerreTransform, _pencil_images
from .patches import ShapeData, SurfacePatch

# Cascade depth of the deepest residual (divergence of C), used for the
# up-front interior check: Y -> g -> Gamma/lap -> N -> C -> div C.
MAX_CASCADE_LEVELS = 4


@dataclass(eq=False)
class LaguerreLift:
    """Pointwise-exact cone fields of a patch."""

    y: np.ndarray
    Y: np.ndarray
    eta: np.ndarray
    rho: np.ndarray
    r: np.ndarray


@dataclass(eq=False)
class LaguerreFrame:
    """Moving frame {Y, N, E_i(Y), eta, wp} along the patch."""

    Y: np.ndarray
    N: np.ndarray
    EY: np.ndarray      # (*G, m, n+3), orthonormal for the ambient product
    eta: np.ndarray
    wp: np.ndarray

    def pairing_residuals(self) -> dict:
        """Max-abs defects of all the null-frame pairings."""
        inner = lorentz.inner
        m = self.EY.shape[-2]
        gram = np.einsum(
            "...ai,...bi,i->...ab", self.EY, self.EY,
            lorentz.signature(self.Y.shape[-1] - 3),
        )
        eye = np.eye(m)
        res = {
            "Y_null": fd.nanmax_abs(inner(self.Y, self.Y)),
            "N_null": fd.nanmax_abs(inner(self.N, self.N)),
            "YN_pairing": fd.nanmax_abs(inner(self.Y, self.N) + 1.0),
            "EY_orthonormal": fd.nanmax_abs(gram - eye),
            "Y_EY": fd.nanmax_abs(np.einsum("...i,...ai,i->...a", self.Y, self.EY,
                                            lorentz.signature(self.Y.shape[-1] - 3))),
            "N_EY": fd.nanmax_abs(np.einsum("...i,...ai,i->...a", self.N, self.EY,
                                            lorentz.signature(self.Y.shape[-1] - 3))),
            "eta_null": fd.nanmax_abs(inner(self.eta, self.eta)),
            "eta_wp_pairing": fd.nanmax_abs(inner(self.eta, self.wp) + 1.0),
            "eta_Y": fd.nanmax_abs(inner(self.eta, self.Y)),
            "eta_EY": fd.nanmax_abs(np.einsum("...i,...ai,i->...a", self.eta, self.EY,
                                              lorentz.signature(self.Y.shape[-1] - 3))),
            "Y_wp": fd.nanmax_abs(inner(self.Y, self.wp)),
            "N_eta": fd.nanmax_abs(inner(self.N, self.eta)),
            "N_wp": fd.nanmax_abs(inner(self.N, self.wp)),
        }
        return res


@dataclass(eq=False)
class InvariantField:
    """Everything the pipeline computes on one patch."""

    patch: SurfacePatch
    shape: ShapeData
    lift: LaguerreLift
    order: int
    g: np.ndarray
    ginv: np.ndarray
    sqrt_det: np.ndarray
    Gamma: np.ndarray
    dY: np.ndarray
    lapY: np.ndarray
    lap_norm: np.ndarray          # <Delta Y, Delta Y>
    N: np.ndarray
    B: np.ndarray                 # coordinate components
    L: np.ndarray
    C: np.ndarray
    vielbein: np.ndarray          # rows of E_i in the coordinate basis
    B_frame: np.ndarray
    L_frame: np.ndarray
    C_frame: np.ndarray
    B_eigs: np.ndarray            # descending
    S_op: np.ndarray
    S_eigs: np.ndarray            # descending
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    g_exact: np.ndarray           # rho^2 * <dxi, dxi>, pointwise exact
    residuals: dict = dataclass_field(default_factory=dict)
    diagnostics: dict = dataclass_field(default_factory=dict)

    @property
    def frame(self) -> LaguerreFrame:
        EY = np.einsum("...ia,...aj->...ij", self.vielbein, self.dY)
        return LaguerreFrame(
            Y=self.lift.Y, N=self.N, EY=EY, eta=self.lift.eta,
            wp=lorentz.wp(self.patch.n),
        )


def point_sphere_field(x: np.ndarray) -> np.ndarray:
    """Point-sphere coordinates over a grid of base points."""
    xx = np.sum(x * x, axis=-1)
    zeros = np.zeros_like(xx)
    return np.concatenate(
        [0.5 * (1.0 + xx)[..., None], 0.5 * (1.0 - xx)[..., None], x, zeros[..., None]],
        axis=-1,
    )


def laguerre_lift(patch: SurfacePatch, shape: ShapeData | None = None) -> LaguerreLift:
    """Light-cone position Y and mean-curvature-sphere coordinate eta."""
    if patch.space != "r3":
        raise UsageError("the Euclidean lift needs an r3 patch; embed space forms first")
    if shape is None:
        shape = patches.shape_data(patch)
    xdotxi = np.sum(patch.x * patch.xi, axis=-1)
    ones = np.ones_like(xdotxi)
    y = np.concatenate(
        [xdotxi[..., None], -xdotxi[..., None], patch.xi, ones[..., None]], axis=-1
    )
    Y = shape.rho[..., None] * y
    eta = point_sphere_field(patch.x) + shape.r[..., None] * y
    return LaguerreLift(y=y, Y=Y, eta=eta, rho=shape.rho, r=shape.r)


def laguerre_metric(Y: np.ndarray, axes: patches.GridAxes, order: int = 4) -> np.ndarray:
    """Metric components <d_a Y, d_b Y> in parameter coordinates."""
    dY = fd.gradient(Y, axes.ndim, axes.spacings, axes.periodic, order)
    return np.einsum("...ai,...bi,i->...ab", dY, dY, lorentz.signature(Y.shape[-1] - 3))


def analyze(patch: SurfacePatch, order: int = 4) -> InvariantField:
    """Run the full invariant pipeline on one patch."""
    if patch.space != "r3":
        raise UsageError("analyze needs an r3 patch; embed space forms first")
    axes = patch.axes
    m = axes.ndim
    hs, per = axes.spacings, axes.periodic
    fd.require_interior(axes.counts, per, order, MAX_CASCADE_LEVELS)

    shape = patches.shape_data(patch)
    lift = laguerre_lift(patch, shape)
    sig = lorentz.signature(patch.n)

    dY = fd.gradient(lift.Y, m, hs, per, order)
    g = np.einsum("...ai,...bi,i->...ab", dY, dY, sig)
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    g_low = np.nanmin(fd.grid_eigvalsh(g))
    if np.isfinite(g_low) and g_low <= 0:
        raise DegenerateSurfaceError("invariant metric is not positive definite on the grid")
    ginv = fd.grid_inv(g)
    det = fd.grid_det(g)
    sqrt_det = np.sqrt(np.where(np.isfinite(det) & (det > 0), det, np.nan))
    Gamma = fd.christoffel(g, m, hs, per, order, ginv=ginv)

    lapY = fd.laplace_beltrami(lift.Y, m, ginv, sqrt_det, hs, per, order)
    lap_norm = lorentz.inner(lapY, lapY)
    nm1 = patch.n - 1
    N = lapY / nm1 + (lap_norm / (2.0 * nm1 * nm1))[..., None] * lift.Y

    dN = fd.gradient(N, m, hs, per, order)
    deta = fd.gradient(lift.eta, m, hs, per, order)

    B = np.einsum("...ai,...bi,i->...ab", deta, dY, sig)
    B = 0.5 * (B + np.swapaxes(B, -1, -2))
    L = np.einsum("...ai,...bi,i->...ab", dN, dY, sig)
    L = 0.5 * (L + np.swapaxes(L, -1, -2))
    C = -np.einsum("...ai,...i,i->...a", dN, lift.eta, sig)

    # Orthonormal frame by Gram-Schmidt on the coordinate directions, i.e.
    # the inverse Cholesky factor of g.
    chol = fd.grid_cholesky(g)
    vielbein = fd.grid_inv(chol)
    B_frame = np.einsum("...ia,...ab,...jb->...ij", vielbein, B, vielbein)
    L_frame = np.einsum("...ia,...ab,...jb->...ij", vielbein, L, vielbein)
    C_frame = np.einsum("...ia,...a->...i", vielbein, C)
    B_eigs = fd.grid_eigvalsh(B_frame)[..., ::-1]

    Sinv = fd.grid_inv(shape.S)
    eye = np.eye(m)
    S_op = (Sinv - shape.r[..., None, None] * eye) / shape.rho[..., None, None]
    S_eigs = fd.selfadjoint_eigvals(S_op, shape.I)[..., ::-1]

    riem = fd.riemann_tensor(g, Gamma, m, hs, per, order)
    ricci = fd.ricci_tensor(riem, ginv)
    scalar = fd.scalar_curvature(ricci, ginv)

    III = np.einsum("...ai,...bi,i->...ab", patch.dxi, patch.dxi, patch.form)
    g_exact = (shape.rho ** 2)[..., None, None] * III

    fld = InvariantField(
        patch=patch, shape=shape, lift=lift, order=order,
        g=g, ginv=ginv, sqrt_det=sqrt_det, Gamma=Gamma,
        dY=dY, lapY=lapY, lap_norm=lap_norm, N=N,
        B=B, L=L, C=C,
        vielbein=vielbein, B_frame=B_frame, L_frame=L_frame, C_frame=C_frame,
        B_eigs=B_eigs, S_op=S_op, S_eigs=S_eigs,
        riemann=riem, ricci=ricci, scalar=scalar, g_exact=g_exact,
    )
    fld.diagnostics["raw_B_asymmetry"] = fd.nanmax_abs(
        np.einsum("...ai,...bi,i->...ab", deta, dY, sig)
        - np.einsum("...bi,...ai,i->...ab", deta, dY, sig)
    )
    C_dual = np.einsum("...ai,...i,i->...a", deta, N, sig)
    fld.diagnostics["C_dual_defect"] = fd.nanmax_abs(C - C_dual)
    fld.diagnostics["g_vs_rho2_III"] = fd.nanmax_abs(g - g_exact)
    return fld


def frame_and_tensors(patch: SurfacePatch, shape: ShapeData | None = None,
                      order: int = 4):
    """Moving frame plus invariant tensors, in one call."""
    fld = analyze(patch, order=order)
    return fld.frame, fld


def structural_residual_fields(fld: InvariantField) -> dict:
    """Pointwise residual fields of the structure-equation identities.

    Covariant derivatives are taken in parameter coordinates with the
    Christoffel symbols of g; each identity is evaluated as a coordinate
    tensor equation, which is equivalent to its orthonormal-frame form.
    Component axes of each residual are flattened so every entry of the
    dict is a grid scalar field (absolute value already applied).
    """
    axes = fld.patch.axes
    m = axes.ndim
    hs, per = axes.spacings, axes.periodic
    order = fld.order
    g, ginv = fld.g, fld.ginv
    n = fld.patch.n

    DL = fd.cov_d_tensor2(fld.L, fld.Gamma, m, hs, per, order)
    DB = fd.cov_d_tensor2(fld.B, fld.Gamma, m, hs, per, order)
    DC = fd.cov_d_covector(fld.C, fld.Gamma, m, hs, per, order)

    def flat(resid):
        out = np.abs(resid)
        while out.ndim > m:
            out = out.max(axis=-1)
        return out

    res = {}
    res["l_codazzi"] = flat(DL - np.swapaxes(DL, -3, -1))
    Bup = np.einsum("...ac,...ce->...ae", fld.B, ginv)
    BL = np.einsum("...ae,...eb->...ab", Bup, fld.L)
    res["c_exchange"] = flat(
        np.swapaxes(DC, -1, -2) - DC - (BL - np.swapaxes(BL, -1, -2))
    )
    codazzi_rhs = (
        np.einsum("...b,...ac->...cab", fld.C, g)
        - np.einsum("...c,...ab->...cab", fld.C, g)
    )
    res["b_codazzi"] = flat(DB - np.einsum("...cab->...bac", DB) - codazzi_rhs)

    gauss_rhs = (
        np.einsum("...bc,...ad->...abcd", fld.L, g)
        + np.einsum("...ad,...bc->...abcd", fld.L, g)
        - np.einsum("...ac,...bd->...abcd", fld.L, g)
        - np.einsum("...bd,...ac->...abcd", fld.L, g)
    )
    res["gauss"] = flat(fld.riemann - gauss_rhs)

    trB = np.einsum("...ab,...ab->...", ginv, fld.B)
    res["b_trace"] = flat(trB)
    B2 = np.einsum("...ab,...cd,...ac,...bd->...", fld.B, fld.B, ginv, ginv)
    res["b_sqnorm"] = flat(B2 - 1.0)
    trL = np.einsum("...ab,...ab->...", ginv, fld.L)
    res["l_trace_vs_lap"] = flat(trL + fld.lap_norm / (2.0 * (n - 1)))

    divB = np.einsum("...ca,...cab->...b", ginv, DB)
    res["b_divergence"] = flat(divB - (n - 2) * fld.C)

    res["ricci_vs_l"] = flat(fld.ricci + (n - 3) * fld.L + trL[..., None, None] * g)
    res["scalar_vs_lap"] = flat(fld.scalar - (n - 2) / (n - 1) * fld.lap_norm)
    return res


def structural_residuals(fld: InvariantField) -> dict:
    """Max-abs residuals of the structure identities plus frame pairings."""
    res = {k: fd.nanmax_abs(v) for k, v in structural_residual_fields(fld).items()}
    res.update({f"frame_{k}": v for k, v in fld.frame.pairing_residuals().items()})
    fld.residuals.update(res)
    return res


def laguerre_volume(patch: SurfacePatch, shape: ShapeData | None = None) -> float:
    """Total volume of the invariant metric, integrated over the patch.

    The integrand rho^{n-1} / (r_1 ... r_{n-1}) times the Euclidean area
    element is pointwise exact; the quadrature is the only approximation.
    """
    if shape is None:
        shape = patches.shape_data(patch)
    dM = np.sqrt(fd.grid_det(shape.I))
    integrand = shape.rho ** (patch.n - 1) / np.prod(shape.radii, axis=-1) * dM
    return fd.integrate(integrand, patch.axes.spacings, patch.axes.periodic)


def volume_via_curvature_quotient(patch: SurfacePatch,
                                  shape: ShapeData | None = None) -> float:
    """Surface-case (n = 3) volume through 2 * (H^2 - K) / K."""
    if patch.n != 3:
        raise UsageError("the mean/Gauss curvature form of the volume is for surfaces")
    if shape is None:
        shape = patches.shape_data(patch)
    k1, k2 = shape.k[..., 0], shape.k[..., 1]
    H = 0.5 * (k1 + k2)
    K = k1 * k2
    dM = np.sqrt(fd.grid_det(shape.I))
    integrand = 2.0 * (H * H - K) / K * dM
    return fd.integrate(integrand, patch.axes.spacings, patch.axes.periodic)


def transform_patch(T: LaguerreTransform, patch: SurfacePatch) -> SurfacePatch:
    """Image of a patch under a group element, with exact jets.

    The contact action is rational in the pencil images, so the jets of
    the new immersion and normal follow from the chain rule; no accuracy
    is lost relative to the source patch.
    """
    if patch.space != "r3":
        raise UsageError("only Euclidean patches transform under the group")
    if T.n != patch.n:
        raise UsageError("transform and patch have different base dimensions")
    h1, h2, dh1, dh2, d2h1, d2h2 = _pencil_images(
        T, patch.x, patch.xi, patch.dx, patch.dxi, patch.d2x, patch.d2xi
    )
    a, da, d2a = h1[..., -1], dh1[..., :, -1], d2h1[..., :, :, -1]
    b, db, d2b = h2[..., -1], dh2[..., :, -1], d2h2[..., :, :, -1]
    if np.min(np.abs(b)) <= 1e-12 * np.abs(h2).max():
        raise UsageError("transformed pencil degenerates on this patch")

    q, dq, d2q = _scalar_quotient_jets(a, da, d2a, b, db, d2b)
    Am, dAm, d2Am = h1[..., 2:-1], dh1[..., :, 2:-1], d2h1[..., :, :, 2:-1]
    Bm, dBm, d2Bm = h2[..., 2:-1], dh2[..., :, 2:-1], d2h2[..., :, :, 2:-1]

    x = Am - q[..., None] * Bm
    dx = dAm - dq[..., None] * Bm[..., None, :] - q[..., None, None] * dBm
    d2x = (
        d2Am
        - d2q[..., None] * Bm[..., None, None, :]
        - dq[..., :, None, None] * dBm[..., None, :, :]
        - dq[..., None, :, None] * dBm[..., :, None, :]
        - q[..., None, None, None] * d2Bm
    )

    inv_b = 1.0 / b
    xi = Bm * inv_b[..., None]
    dxi = (dBm - xi[..., None, :] * db[..., :, None]) * inv_b[..., None, None]
    d2xi = (
        d2Bm
        - dxi[..., None, :, :] * db[..., :, None, None]
        - dxi[..., :, None, :] * db[..., None, :, None]
        - xi[..., None, None, :] * d2b[..., :, :, None]
    ) * inv_b[..., None, None, None]

    new = SurfacePatch(
        space="r3", n=patch.n, axes=patch.axes,
        x=x, dx=dx, d2x=d2x, xi=xi, dxi=dxi, d2xi=d2xi,
        metadata={**patch.metadata, "jets": "chain", "transformed": True},
    )
    patches._validate_patch(new)
    patches.shape_data(new)
    return new


def _scalar_quotient_jets(a, da, d2a, b, db, d2b):
    """Jets of q = a / b from the jets of a and b."""
    q = a / b
    dq = (da - q[..., None] * db) / b[..., None]
    d2q = (
        d2a
        - dq[..., :, None] * db[..., None, :]
        - dq[..., None, :] * db[..., :, None]
        - q[..., None, None] * d2b
    ) / b[..., None, None]
    return q, dq, d2q


def compare_invariants(f1: InvariantField, f2: InvariantField) -> dict:
    """Pointwise deviations of g, the shape-operator spectrum and the
    second-fundamental-form spectrum between two aligned patches."""
    if f1.patch.axes != f2.patch.axes:
        raise UsageError("patches must share grid topology and parameter alignment")
    return {
        "max_g_deviation": fd.nanmax_abs(f1.g - f2.g),
        "max_s_eig_deviation": fd.nanmax_abs(f1.S_eigs - f2.S_eigs),
        "max_b_eig_deviation": fd.nanmax_abs(f1.B_eigs - f2.B_eigs),
    }
