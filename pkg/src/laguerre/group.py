"""The Laguerre transformation group.

Elements are (n+3) x (n+3) matrices preserving the Lorentzian inner
product and fixing the light-like row vector wp = (1, -1, 0, ..., 0); they
act on row vectors from the right, X -> X T, and therefore on quadric
points by [X] -> [X T].  Composition is the left-to-right matrix product.

Three generator families span the orthochronous part of the group:

* isometry(A, a)  -- the lift of the Euclidean motion x -> x A + a,
* parabolic(t)    -- the parallel flow (x, xi) -> (x + t xi, xi), which
                     shifts every signed sphere radius by t,
* hyperbolic(t)   -- the boost flow mixing the last coordinate axis of
                     R^n with the radius direction.

Every group element whose lower-right entry is >= 1 factors as
isometry * boost * parallel * isometry; ``decompose`` constructs such a
factorization and ``Factorization.reconstruct`` plays it back.

The block form: with respect to the splitting 2 + n + 1 of the ambient
coordinates, an element is determined by an O(n, 1) matrix [[A, u], [v, w]]
together with a translation vector (a, rho) in R^{n+1}; the correspondence
is an isomorphism onto the affine Lorentz group of R^{n+1}_1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lorentz
from .errors import InvalidElementError, UsageError
from .spheres import ContactElement, ProjectivePoint

BLOCK_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LaguerreTransform:
    """A validated group element, immutable after construction."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if not lorentz.is_laguerre_matrix(M, tol=BLOCK_TOL):
            raise InvalidElementError(
                "matrix does not preserve the inner product and fix wp"
            )
        w = M[-1, -1]
        v = M[-1, 2:-1]
        if abs(w * w - 1.0 - float(np.dot(v, v))) > BLOCK_TOL * max(1.0, w * w):
            raise InvalidElementError("lower-right block violates w^2 = 1 + |v|^2")
        object.__setattr__(self, "matrix", M)

    @property
    def n(self) -> int:
        return lorentz.base_dim(self.matrix)

    def then(self, other: "LaguerreTransform") -> "LaguerreTransform":
        """Composite that applies self first, then other (row action)."""
        return LaguerreTransform(self.matrix @ other.matrix)

    def __matmul__(self, other: "LaguerreTransform") -> "LaguerreTransform":
        return self.then(other)

    def inverse(self) -> "LaguerreTransform":
        return LaguerreTransform(np.linalg.inv(self.matrix))


@dataclass(frozen=True, eq=False)
class BlockData:
    """Block coordinates (A, u, v, w, a, rho) of a group element.

    [[A, u], [v, w]] must preserve the Lorentz form diag(1, ..., 1, -1) of
    R^{n+1}_1; (a, rho) is the translation part of the corresponding affine
    Lorentz motion.
    """

    A: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: float
    a: np.ndarray
    rho: float

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        u = np.asarray(self.u, dtype=float).reshape(-1)
        v = np.asarray(self.v, dtype=float).reshape(-1)
        a = np.asarray(self.a, dtype=float).reshape(-1)
        n = A.shape[0]
        if A.shape != (n, n) or u.shape != (n,) or v.shape != (n,) or a.shape != (n,):
            raise UsageError("inconsistent block shapes")
        M = np.zeros((n + 1, n + 1))
        M[:n, :n] = A
        M[:n, n] = u
        M[n, :n] = v
        M[n, n] = self.w
        J = np.diag(np.concatenate([np.ones(n), [-1.0]]))
        defect = np.abs(M @ J @ M.T - J).max()
        if defect > BLOCK_TOL * max(1.0, float(np.abs(M).max()) ** 2):
            raise UsageError("linear block does not preserve the Lorentz form of R^{n+1}_1")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", float(self.w))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def n(self) -> int:
        return self.A.shape[0]


def isometry(A: np.ndarray, a: np.ndarray) -> LaguerreTransform:
    """Lift of the Euclidean isometry x -> x A + a (A orthogonal)."""
    A = np.asarray(A, dtype=float)
    a = np.asarray(a, dtype=float).reshape(-1)
    n = a.shape[0]
    if A.shape != (n, n):
        raise UsageError("rotation block and translation have inconsistent sizes")
    if np.abs(A @ A.T - np.eye(n)).max() > 1e-10:
        raise UsageError("rotation block must be orthogonal")
    s = float(np.dot(a, a))
    M = np.zeros((n + 3, n + 3))
    M[0, 0] = 1.0 + 0.5 * s
    M[0, 1] = -0.5 * s
    M[0, 2:-1] = a
    M[1, 0] = 0.5 * s
    M[1, 1] = 1.0 - 0.5 * s
    M[1, 2:-1] = a
    Aa = A @ a
    M[2:-1, 0] = Aa
    M[2:-1, 1] = -Aa
    M[2:-1, 2:-1] = A
    M[-1, -1] = 1.0
    return LaguerreTransform(M)


def parabolic(t: float, n: int) -> LaguerreTransform:
    """Parallel flow shifting every signed radius by t."""
    t = float(t)
    if not np.isfinite(t):
        raise UsageError("flow parameter must be finite")
    M = np.eye(n + 3)
    M[0, 0] = 1.0 - 0.5 * t * t
    M[0, 1] = 0.5 * t * t
    M[0, -1] = -t
    M[1, 0] = -0.5 * t * t
    M[1, 1] = 1.0 + 0.5 * t * t
    M[1, -1] = -t
    M[-1, 0] = t
    M[-1, 1] = -t
    return LaguerreTransform(M)


def hyperbolic(t: float, n: int) -> LaguerreTransform:
    """Boost flow in the plane of the last space axis and the radius slot."""
    t = float(t)
    if not np.isfinite(t):
        raise UsageError("flow parameter must be finite")
    M = np.eye(n + 3)
    c, s = np.cosh(t), np.sinh(t)
    M[-2, -2] = c
    M[-2, -1] = s
    M[-1, -2] = s
    M[-1, -1] = c
    return LaguerreTransform(M)


def generator(kind: str, n: int | None = None, **params) -> LaguerreTransform:
    """Dispatch on generator kind: 'isometry', 'parabolic' or 'hyperbolic'."""
    if kind == "isometry":
        return isometry(params["A"], params["a"])
    if kind == "parabolic":
        if n is None:
            raise UsageError("parabolic generator needs the base dimension n")
        return parabolic(params["t"], n)
    if kind == "hyperbolic":
        if n is None:
            raise UsageError("hyperbolic generator needs the base dimension n")
        return hyperbolic(params["t"], n)
    raise UsageError(f"unknown generator kind {kind!r}")


def from_blocks(b: BlockData) -> LaguerreTransform:
    """Assemble the group element with the given block coordinates."""
    n = b.n
    s = float(np.dot(b.a, b.a))
    r2 = b.rho * b.rho
    M = np.zeros((n + 3, n + 3))
    M[0, 0] = 1.0 + 0.5 * s - 0.5 * r2
    M[0, 1] = -0.5 * s + 0.5 * r2
    M[0, 2:-1] = b.a
    M[0, -1] = b.rho
    M[1, 0] = 0.5 * s - 0.5 * r2
    M[1, 1] = 1.0 - 0.5 * s + 0.5 * r2
    M[1, 2:-1] = b.a
    M[1, -1] = b.rho
    Aa = b.A @ b.a
    M[2:-1, 0] = Aa - b.rho * b.u
    M[2:-1, 1] = -Aa + b.rho * b.u
    M[2:-1, 2:-1] = b.A
    M[2:-1, -1] = b.u
    va = float(np.dot(b.v, b.a))
    M[-1, 0] = va - b.rho * b.w
    M[-1, 1] = -va + b.rho * b.w
    M[-1, 2:-1] = b.v
    M[-1, -1] = b.w
    return LaguerreTransform(M)


def to_blocks(T: LaguerreTransform | np.ndarray) -> BlockData:
    """Extract the block coordinates of a group element.

    The redundant entries of the matrix are checked against the assembled
    form; a mismatch means the matrix is not in the group.
    """
    if not isinstance(T, LaguerreTransform):
        T = LaguerreTransform(T)
    M = T.matrix
    blocks = BlockData(
        A=M[2:-1, 2:-1],
        u=M[2:-1, -1],
        v=M[-1, 2:-1],
        w=M[-1, -1],
        a=M[0, 2:-1],
        rho=M[0, -1],
    )
    rebuilt = from_blocks(blocks).matrix
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(rebuilt - M).max() > RECONSTRUCTION_TOL * scale:
        raise InvalidElementError("matrix entries are inconsistent with the block form")
    return blocks


def act_on_coord(T: LaguerreTransform, gamma: ProjectivePoint) -> ProjectivePoint:
    """Image of a quadric point, [gamma] -> [gamma T]."""
    if gamma.n != T.n:
        raise UsageError("transform and coordinate have different base dimensions")
    return ProjectivePoint(gamma.vec @ T.matrix)


def map_contact_grid(T: LaguerreTransform, x: np.ndarray, xi: np.ndarray):
    """Vectorized contact action on arrays of base points and unit normals.

    x and xi have the base dimension in the trailing axis; any leading grid
    shape is allowed.  Returns the transformed (x, xi) arrays.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    h1, h2 = _pencil_images(T, x, xi, None, None, None, None)[:2]
    b = h2[..., -1]
    if np.any(np.abs(b) <= 1e-12 * np.abs(h2).max(axis=-1)):
        raise InvalidElementError("image pencil has no usable hyperplane member")
    q = h1[..., -1] / b
    new_x = h1[..., 2:-1] - q[..., None] * h2[..., 2:-1]
    new_xi = h2[..., 2:-1] / b[..., None]
    return new_x, new_xi


def _pencil_images(T, x, xi, dx, dxi, d2x, d2xi):
    """Images under T of the pencil generators gamma1, gamma2 and, when the
    jets are supplied, of their first and second parameter derivatives."""
    M = T.matrix
    xx = np.sum(x * x, axis=-1)
    xdotxi = np.sum(x * xi, axis=-1)
    g1 = np.concatenate(
        [0.5 * (1.0 + xx)[..., None], 0.5 * (1.0 - xx)[..., None], x,
         np.zeros_like(xx)[..., None]], axis=-1)
    g2 = np.concatenate(
        [xdotxi[..., None], -xdotxi[..., None], xi, np.ones_like(xx)[..., None]], axis=-1)
    h1 = g1 @ M
    h2 = g2 @ M
    if dx is None:
        return h1, h2, None, None, None, None

    # First derivatives: d(gamma1) = (x.dx, -x.dx, dx, 0) and similarly for
    # gamma2 with the product rule on x.xi.
    xdx = np.einsum("...i,...ai->...a", x, dx)
    dxdotxi = np.einsum("...ai,...i->...a", dx, xi) + np.einsum("...i,...ai->...a", x, dxi)
    zeros1 = np.zeros_like(xdx)
    dg1 = np.concatenate([xdx[..., None], -xdx[..., None], dx, zeros1[..., None]], axis=-1)
    dg2 = np.concatenate([dxdotxi[..., None], -dxdotxi[..., None], dxi, zeros1[..., None]], axis=-1)
    dh1 = dg1 @ M
    dh2 = dg2 @ M

    dxdx = np.einsum("...ai,...bi->...ab", dx, dx)
    xd2x = np.einsum("...i,...abi->...ab", x, d2x)
    d2xx = dxdx + xd2x
    d2xdotxi = (
        np.einsum("...abi,...i->...ab", d2x, xi)
        + np.einsum("...ai,...bi->...ab", dx, dxi)
        + np.einsum("...bi,...ai->...ab", dx, dxi)
        + np.einsum("...i,...abi->...ab", x, d2xi)
    )
    zeros2 = np.zeros_like(d2xx)
    d2g1 = np.concatenate(
        [d2xx[..., None], -d2xx[..., None], d2x, zeros2[..., None]], axis=-1)
    d2g2 = np.concatenate(
        [d2xdotxi[..., None], -d2xdotxi[..., None], d2xi, zeros2[..., None]], axis=-1)
    d2h1 = d2g1 @ M
    d2h2 = d2g2 @ M
    return h1, h2, dh1, dh2, d2h1, d2h2


def act_on_contact(T: LaguerreTransform, c: ContactElement) -> ContactElement:
    """Image of a contact element under the group action.

    Maps the pencil generators through T and re-extracts the point sphere
    (vanishing last coordinate) and the hyperplane (zero pairing with wp)
    of the image line.
    """
    if c.n != T.n:
        raise UsageError("transform and contact element have different base dimensions")
    new_x, new_xi = map_contact_grid(T, c.x, c.xi)
    return ContactElement(x=new_x, xi=new_xi)


@dataclass(frozen=True, eq=False)
class Factorization:
    """T = epsilon * isometry(sigma2) * boost(t) * parallel(s) * isometry(sigma1)."""

    epsilon: int
    A2: np.ndarray
    a2: np.ndarray
    t: float
    s: float
    A1: np.ndarray
    a1: np.ndarray

    @property
    def n(self) -> int:
        return self.A1.shape[0]

    def reconstruct(self) -> np.ndarray:
        """The matrix epsilon * T(sigma2) T(psi_t) T(phi_s) T(sigma1)."""
        n = self.n
        prod = (
            isometry(self.A2, self.a2).matrix
            @ hyperbolic(self.t, n).matrix
            @ parabolic(self.s, n).matrix
            @ isometry(self.A1, self.a1).matrix
        )
        return self.epsilon * prod


def _rotation_to_last_axis(v: np.ndarray) -> np.ndarray:
    """Orthogonal matrix H (acting on rows) with v H = |v| e_last.

    Householder reflection through the bisector of v/|v| and e_last; the
    identity when v already points along the last axis.
    """
    n = v.shape[0]
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return np.eye(n)
    vhat = v / norm
    e = np.zeros(n)
    e[-1] = 1.0
    w = vhat - e
    wn = float(np.dot(w, w))
    if wn < 1e-28:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(w, w) / wn


def decompose(T: LaguerreTransform | np.ndarray, tol: float = RECONSTRUCTION_TOL) -> Factorization:
    """Factor a group element into isometry * boost * parallel * isometry.

    Follows the constructive proof: read (v, w) off the last row, rotate v
    onto the last axis, peel off the parallel and boost parts, and read the
    leftover isometry.  The boost parameter is fixed by cosh t = |w| with
    sinh t >= 0; this makes the (non-unique) factorization deterministic.

    Elements whose lower-right entry w is <= -1 fix wp but are not products
    of the generator families (all generators have orthochronous Lorentz
    blocks), so the final verification fails and an error is raised.
    """
    if not isinstance(T, LaguerreTransform):
        T = LaguerreTransform(T)
    M = T.matrix
    n = T.n
    eps = 1
    W = M
    if W[-1, -1] < 0:
        eps = -1
        W = -M

    v = W[-1, 2:-1]
    w = W[-1, -1]
    k = W[-1, 0]
    A1rot = _rotation_to_last_axis(v)  # v A1rot = |v| e_last
    t = float(np.arcsinh(np.linalg.norm(v)))
    s = float(k / w)

    peeled = (
        W
        @ isometry(A1rot, np.zeros(n)).matrix
        @ parabolic(-s, n).matrix
        @ hyperbolic(-t, n).matrix
    )
    A2 = peeled[2:-1, 2:-1]
    a2 = peeled[0, 2:-1]
    if np.abs(A2 @ A2.T - np.eye(n)).max() > 1e-8:
        raise InvalidElementError(
            "element is not a product of isometries and flows "
            "(non-orthochronous Lorentz block)"
        )
    fact = Factorization(
        epsilon=eps, A2=A2, a2=a2, t=t, s=s, A1=A1rot.T, a1=np.zeros(n)
    )
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(fact.reconstruct() - M).max() > tol * scale:
        raise InvalidElementError(
            "factorization does not reproduce the element; "
            "it lies outside the subgroup generated by the three flows"
        )
    return fact


def compose_script(script, n: int | None = None) -> LaguerreTransform:
    """Build a transform from a JSON-style script, composing left to right.

    Accepts either a bare list of factor objects or a wrapper
    {"n": ..., "factors": [...]}.  Factor kinds: isometry (A, a),
    parabolic (t), hyperbolic (t), matrix (rows).
    """
    if isinstance(script, dict):
        n = script.get("n", n)
        script = script.get("factors")
    if not isinstance(script, list) or not script:
        raise UsageError("transform script must be a nonempty list of factors")

    if n is None:
        for item in script:
            kind = item.get("kind")
            if kind == "isometry":
                n = len(item["a"])
            elif kind == "matrix":
                n = len(item["rows"]) - 3
            if n is not None:
                break
    if n is None:
        raise UsageError("cannot infer the base dimension; add an explicit \"n\"")

    result: LaguerreTransform | None = None
    for item in script:
        try:
            kind = item["kind"]
            if kind == "isometry":
                factor = isometry(np.asarray(item["A"], dtype=float),
                                  np.asarray(item["a"], dtype=float))
            elif kind == "parabolic":
                factor = parabolic(item["t"], n)
            elif kind == "hyperbolic":
                factor = hyperbolic(item["t"], n)
            elif kind == "matrix":
                factor = LaguerreTransform(np.asarray(item["rows"], dtype=float))
            else:
                raise UsageError(f"unknown factor kind {kind!r}")
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed factor in transform script: {exc}") from exc
        result = factor if result is None else result.then(factor)
    return result


def random_transform(
    rng: np.random.Generator,
    n: int,
    factors: int = 4,
    translation_scale: float = 1.0,
    flow_scale: float = 0.4,
) -> LaguerreTransform:
    """Seeded random composite of all three generator kinds (for testing)."""
    result: LaguerreTransform | None = None
    kinds = rng.integers(0, 3, size=factors)
    # Make sure each family shows up at least once when there is room.
    if factors >= 3:
        kinds[:3] = [0, 1, 2]
    for kind in kinds:
        if kind == 0:
            Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            factor = isometry(Q, translation_scale * rng.standard_normal(n))
        elif kind == 1:
            factor = parabolic(flow_scale * rng.standard_normal(), n)
        else:
            factor = hyperbolic(flow_scale * rng.standard_normal(), n)
        result = factor if result is None else result.then(factor)
    return result
