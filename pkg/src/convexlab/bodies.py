"""Strictly convex bodies via support functions on direction grids.

A body is stored as support-function samples h(u) over a grid of unit
directions (uniform angles in 2D, an icosphere in 3D).  The boundary,
normals and curvature all come from derivatives of h: the inverse Gauss
map is x(u) = h u + grad_S h and the reverse Weingarten form
W = hess_S h + h g has II = W^{-1}.

2D differentiation is spectral (FFT).  In 3D, bodies built from closed
forms carry a 1-homogeneous extension H(x) = |x| h(x/|x|) which is
differentiated by high-order finite differences; explicit value tables
fall back to a one-ring quadratic fit on the sphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (DimensionError, GridMismatchError, NonConvexError,
                     NonPositiveError)

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# spectral helpers (2D, periodic)

def fourier_diff(values, order=1):
    """Spectral derivative of periodic samples on [0, 2pi)."""
    v = np.asarray(values, dtype=float)
    m = v.shape[-1]
    k = np.fft.rfftfreq(m, d=1.0 / m)
    fac = (1j * k) ** order
    if order % 2 == 1 and m % 2 == 0:
        fac = fac.copy()
        fac[-1] = 0.0  # Nyquist mode has no odd derivative
    return np.fft.irfft(np.fft.rfft(v) * fac, n=m)


@lru_cache(maxsize=16)
def fourier_diff_matrix(m: int) -> np.ndarray:
    """Dense matrix D with (D @ f) the spectral derivative of f."""
    return fourier_diff(np.eye(m), order=1).T.copy()


def fourier_resample(values, m_new: int):
    """Trigonometric interpolation of periodic samples onto m_new points."""
    v = np.asarray(values, dtype=float)
    m = v.shape[-1]
    if m_new == m:
        return v.copy()
    c = np.fft.rfft(v) / m
    c_new = np.zeros(m_new // 2 + 1, dtype=complex)
    n = min(len(c), len(c_new))
    c_new[:n] = c[:n]
    if m % 2 == 0 and len(c) - 1 < len(c_new):
        c_new[len(c) - 1] *= 1.0  # split Nyquist handled by zero-fill
    return np.fft.irfft(c_new * m_new, n=m_new)


def fourier_eval(values, theta, order=0):
    """Evaluate the trig interpolant (and derivatives) at arbitrary angles."""
    v = np.asarray(values, dtype=float)
    m = v.shape[-1]
    c = np.fft.rfft(v) / m
    k = np.arange(len(c))
    weights = np.full(len(c), 2.0)
    weights[0] = 1.0
    if m % 2 == 0:
        weights[-1] = 1.0
    fac = (1j * k) ** order
    if order % 2 == 1 and m % 2 == 0:
        fac[-1] = 0.0
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    phases = np.exp(1j * np.outer(th, k))
    out = np.real(phases @ (c * weights * fac))
    return out if np.ndim(theta) else out[0]


# ---------------------------------------------------------------------------
# direction grids

@dataclass(frozen=True)
class DirectionGrid:
    """Unit-direction grid: uniform angles (2D) or an icosphere (3D)."""

    dimension: int
    thetas: np.ndarray = None
    vertices: np.ndarray = None
    faces: np.ndarray = None
    level: int = None

    @property
    def size(self) -> int:
        if self.dimension == 2:
            return len(self.thetas)
        return len(self.vertices)

    @property
    def directions(self) -> np.ndarray:
        if self.dimension == 2:
            return np.column_stack([np.cos(self.thetas), np.sin(self.thetas)])
        return self.vertices

    @property
    def resolution_label(self) -> str:
        if self.dimension == 2:
            return f"M={self.size}"
        return f"level={self.level}"

    def matches(self, other: "DirectionGrid") -> bool:
        if self is other:
            return True
        if self.dimension != other.dimension or self.size != other.size:
            return False
        if self.dimension == 2:
            return np.allclose(self.thetas, other.thetas)
        return np.allclose(self.vertices, other.vertices)


@lru_cache(maxsize=32)
def angle_grid(m: int) -> DirectionGrid:
    thetas = TWO_PI * np.arange(m) / m
    thetas.setflags(write=False)
    return DirectionGrid(dimension=2, thetas=thetas)


def _base_icosahedron():
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=int)
    return verts, faces


@lru_cache(maxsize=8)
def icosphere(level: int) -> DirectionGrid:
    """Icosphere triangulation of S^2 at the given subdivision level."""
    verts, faces = _base_icosahedron()
    verts = list(map(tuple, verts))
    for _ in range(level):
        cache = {}
        new_faces = []

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key in cache:
                return cache[key]
            p = np.asarray(verts[i]) + np.asarray(verts[j])
            p /= np.linalg.norm(p)
            verts.append(tuple(p))
            cache[key] = len(verts) - 1
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
        faces = np.asarray(new_faces, dtype=int)
    v = np.asarray(verts, dtype=float)
    # enforce outward orientation of every face
    p0, p1, p2 = v[faces[:, 0]], v[faces[:, 1]], v[faces[:, 2]]
    flip = np.einsum("ij,ij->i", p0, np.cross(p1 - p0, p2 - p0)) < 0
    faces[flip] = faces[flip][:, ::-1]
    v.setflags(write=False)
    faces.setflags(write=False)
    return DirectionGrid(dimension=3, vertices=v, faces=faces, level=level)


def spherical_vertex_weights(grid: DirectionGrid) -> np.ndarray:
    """Per-vertex quadrature weights on S^2 from spherical triangle areas.

    One third of each incident spherical triangle's solid angle; the
    weights sum to 4*pi exactly (up to rounding), which keeps round
    bodies sharp in the Gauss-map quadrature.
    """
    v, faces = grid.vertices, grid.faces
    a, b, c = v[faces[:, 0]], v[faces[:, 1]], v[faces[:, 2]]
    triple = np.einsum("ij,ij->i", a, np.cross(b, c))
    denom = (1.0 + np.einsum("ij,ij->i", a, b)
             + np.einsum("ij,ij->i", b, c)
             + np.einsum("ij,ij->i", c, a))
    omega = 2.0 * np.arctan2(np.abs(triple), denom)
    w = np.zeros(len(v))
    for col in range(3):
        np.add.at(w, faces[:, col], omega / 3.0)
    return w


# ---------------------------------------------------------------------------
# support bodies

class SupportBody:
    """Strictly convex body given by support values on a DirectionGrid.

    h_ext, when present, is the 1-homogeneous support extension
    H(x) = |x| h(x/|x|) as a vectorized callable on (n, dim) arrays;
    3D differentiation uses it for near-machine curvature data.
    """

    def __init__(self, grid: DirectionGrid, h, label="body", h_ext=None,
                 eps_factor=1e-6, validate=True):
        self.grid = grid
        self.h = np.asarray(h, dtype=float).copy()
        self.h.setflags(write=False)
        self.label = label
        self.h_ext = h_ext
        self.eps_convex = eps_factor * float(np.mean(self.h))
        self._mesh = None
        if validate:
            self._validate()

    def _validate(self):
        if np.any(~np.isfinite(self.h)):
            raise NonPositiveError(f"{self.label}: non-finite support values")
        if np.any(self.h <= 0):
            raise NonPositiveError(f"{self.label}: support function must be "
                                   "positive (origin interior)")
        if self.grid.dimension == 2:
            rw = self.h + fourier_diff(self.h, 2)
            if rw.min() < self.eps_convex:
                raise NonConvexError(
                    f"{self.label}: reverse Weingarten min {rw.min():.3e} "
                    f"below margin {self.eps_convex:.3e}")
        else:
            mesh = self.mesh()  # raises NonConvexError on failure
            del mesh

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    def mesh(self) -> "BoundaryMesh":
        if self._mesh is None:
            self._mesh = BoundaryMesh(self)
        return self._mesh

    def __repr__(self):
        return (f"SupportBody({self.label!r}, dim={self.dimension}, "
                f"{self.grid.resolution_label})")


# ---------------------------------------------------------------------------
# 3D derivatives of the homogeneous support extension

_FD_W1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0   # offsets -2,-1,1,2
_FD_OFF = np.array([-2, -1, 1, 2])


def _ext_derivatives(h_ext, U, eps=4e-3):
    """Gradient and Hessian of H at unit directions U by 4th-order FD."""
    n = len(U)
    offsets = {}

    def key(vec):
        return tuple(int(x) for x in vec)

    need = [np.zeros(3, dtype=int)]
    for i in range(3):
        for a in _FD_OFF:
            vec = np.zeros(3, dtype=int)
            vec[i] = a
            need.append(vec)
    for i in range(3):
        for j in range(i + 1, 3):
            for a in _FD_OFF:
                for b in _FD_OFF:
                    vec = np.zeros(3, dtype=int)
                    vec[i], vec[j] = a, b
                    need.append(vec)
    uniq = []
    for vec in need:
        k = key(vec)
        if k not in offsets:
            offsets[k] = len(uniq)
            uniq.append(vec)
    shifts = np.asarray(uniq, dtype=float) * eps           # (q, 3)
    pts = U[:, None, :] + shifts[None, :, :]               # (n, q, 3)
    vals = np.asarray(h_ext(pts.reshape(-1, 3)), dtype=float).reshape(n, -1)

    def at(vec):
        return vals[:, offsets[key(np.asarray(vec, dtype=int))]]

    grad = np.zeros((n, 3))
    hess = np.zeros((n, 3, 3))
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    for i in range(3):
        e = np.zeros(3, dtype=int)
        cols = []
        for a in _FD_OFF:
            e_i = e.copy()
            e_i[i] = a
            cols.append(at(e_i))
        grad[:, i] = (_FD_W1[0] * cols[0] + _FD_W1[1] * cols[1]
                      + _FD_W1[2] * cols[2] + _FD_W1[3] * cols[3]) / eps
        stack = [cols[0], cols[1], at(e), cols[2], cols[3]]
        hess[:, i, i] = sum(c * s for c, s in zip(c2, stack)) / eps ** 2
    for i in range(3):
        for j in range(i + 1, 3):
            acc = np.zeros(n)
            for wa, a in zip(_FD_W1, _FD_OFF):
                for wb, b in zip(_FD_W1, _FD_OFF):
                    vec = np.zeros(3, dtype=int)
                    vec[i], vec[j] = a, b
                    acc += wa * wb * at(vec)
            hess[:, i, j] = hess[:, j, i] = acc / eps ** 2
    return grad, hess


def _one_ring(grid: DirectionGrid):
    nbrs = [set() for _ in range(len(grid.vertices))]
    for a, b, c in grid.faces:
        nbrs[a].update((b, c))
        nbrs[b].update((a, c))
        nbrs[c].update((a, b))
    return [sorted(s) for s in nbrs]


def _tangent_frames(U):
    """Deterministic orthonormal tangent frame (e1, e2) per unit vector."""
    n = len(U)
    ref = np.tile(np.array([0.0, 0.0, 1.0]), (n, 1))
    near_pole = np.abs(U[:, 2]) > 0.9
    ref[near_pole] = np.array([1.0, 0.0, 0.0])
    e1 = np.cross(ref, U)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(U, e1)
    return e1, e2


def _fit_ring_derivatives(grid, h):
    """One-ring quadratic fit of the support extension (3D value tables).

    Uses the gnomonic trick: H(u + t) = h(u')/<u', u> for the neighbor
    direction u' with tangential offset t, so the fit sees the plane
    restriction of the 1-homogeneous extension whose Hessian is exactly
    the reverse Weingarten form.
    """
    U = grid.vertices
    e1, e2 = _tangent_frames(U)
    rings = _one_ring(grid)
    n = len(U)
    grad = np.zeros((n, 3))
    hess_t = np.zeros((n, 2, 2))
    for i in range(n):
        nb = rings[i]
        u = U[i]
        un = U[nb]
        c = un @ u
        t = un / c[:, None] - u
        p1, p2 = t @ e1[i], t @ e2[i]
        rhsv = h[nb] / c - h[i]
        A = np.column_stack([p1, p2, 0.5 * p1 ** 2, p1 * p2, 0.5 * p2 ** 2])
        coef, *_ = np.linalg.lstsq(A, rhsv, rcond=None)
        g1, g2, s11, s12, s22 = coef
        grad[i] = h[i] * u + g1 * e1[i] + g2 * e2[i]
        hess_t[i] = [[s11, s12], [s12, s22]]
    return grad, hess_t, e1, e2


# ---------------------------------------------------------------------------
# boundary meshes

class BoundaryMesh:
    """Discretized boundary with points, normals, curvature and weights.

    2D fields: theta, points, normals, tangents, kappa, jacobian (ds/dtheta),
    area weights a = jacobian * dtheta.
    3D fields: points, normals (= grid directions), frames (n,2,3),
    rw (reverse Weingarten, n,2,2), II (n,2,2), principal curvatures,
    spherical weights w_sph and area weights a = det(rw) * w_sph.
    """

    def __init__(self, body: SupportBody):
        self.body = body
        self.grid = body.grid
        self.dimension = body.dimension
        if self.dimension == 2:
            self._build_2d(body)
        else:
            self._build_3d(body)

    def _build_2d(self, body):
        h = body.h
        grid = self.grid
        theta = grid.thetas
        u = grid.directions
        uperp = np.column_stack([-u[:, 1], u[:, 0]])
        h1 = fourier_diff(h, 1)
        h2 = fourier_diff(h, 2)
        jac = h + h2
        if jac.min() < body.eps_convex:
            raise NonConvexError(
                f"{body.label}: h'' + h reaches {jac.min():.3e}")
        self.theta = theta
        self.points = h[:, None] * u + h1[:, None] * uperp
        self.normals = u
        self.tangents = uperp
        self.jacobian = jac
        self.kappa = 1.0 / jac
        self.dtheta = TWO_PI / grid.size
        self.area_weights = jac * self.dtheta

    def _build_3d(self, body):
        grid = self.grid
        U = grid.vertices
        if body.h_ext is not None:
            g3, hfull = _ext_derivatives(body.h_ext, U)
            e1, e2 = _tangent_frames(U)
            points = g3
            rw = np.empty((len(U), 2, 2))
            he1 = np.einsum("nij,nj->ni", hfull, e1)
            he2 = np.einsum("nij,nj->ni", hfull, e2)
            rw[:, 0, 0] = np.einsum("ni,ni->n", e1, he1)
            rw[:, 0, 1] = rw[:, 1, 0] = np.einsum("ni,ni->n", e1, he2)
            rw[:, 1, 1] = np.einsum("ni,ni->n", e2, he2)
        else:
            points, rw, e1, e2 = _fit_ring_derivatives(grid, body.h)
        eigs = np.linalg.eigvalsh(rw)
        if eigs[:, 0].min() < body.eps_convex:
            raise NonConvexError(
                f"{body.label}: reverse Weingarten min eigenvalue "
                f"{eigs[:, 0].min():.3e} below margin")
        self.points = points
        self.normals = U
        self.frames = np.stack([e1, e2], axis=1)
        self.rw = rw
        self.II = np.linalg.inv(rw)
        self.II = 0.5 * (self.II + np.transpose(self.II, (0, 2, 1)))
        self.principal = np.sort(np.linalg.eigvalsh(self.II), axis=1)
        self.w_sph = spherical_vertex_weights(grid)
        self.det_rw = rw[:, 0, 0] * rw[:, 1, 1] - rw[:, 0, 1] ** 2
        self.area_weights = self.det_rw * self.w_sph
        self.faces = grid.faces

    # common derived fields -------------------------------------------------
    @property
    def mean_curvature(self) -> np.ndarray:
        """Euclidean mean curvature H_g = tr(II)."""
        if self.dimension == 2:
            return self.kappa
        return self.II[:, 0, 0] + self.II[:, 1, 1]

    @property
    def min_principal(self) -> np.ndarray:
        if self.dimension == 2:
            return self.kappa
        return self.principal[:, 0]

    @property
    def spacing(self) -> float:
        """Typical grid spacing used by tolerance calibration."""
        if self.dimension == 2:
            return TWO_PI / self.grid.size
        # mean edge length of the icosphere
        return float(np.sqrt(np.mean(self.w_sph)))


def boundary_mesh(body: SupportBody) -> BoundaryMesh:
    return body.mesh()


# ---------------------------------------------------------------------------
# constructors

def _require_same_grid(K: SupportBody, L: SupportBody):
    if not K.grid.matches(L.grid):
        raise GridMismatchError(
            f"{K.label} and {L.label} live on different grids")


def minkowski_sum_support(K: SupportBody, L: SupportBody,
                          t: float) -> SupportBody:
    """Support function of K + t L (support functions add)."""
    _require_same_grid(K, L)
    if t < 0:
        raise ValueError("t must be >= 0")
    h = K.h + t * L.h
    h_ext = None
    if K.h_ext is not None and L.h_ext is not None:
        hk, hl = K.h_ext, L.h_ext
        h_ext = (lambda X, hk=hk, hl=hl, t=t: hk(X) + t * hl(X))
    return SupportBody(K.grid, h, label=f"{K.label}+{t:g}*{L.label}",
                       h_ext=h_ext)


def disc(radius=1.0, M=256) -> SupportBody:
    grid = angle_grid(M)
    return SupportBody(grid, np.full(M, float(radius)),
                       label=f"disc:{radius:g}")


def ellipse(a, b, M=256) -> SupportBody:
    grid = angle_grid(M)
    th = grid.thetas
    h = np.sqrt((a * np.cos(th)) ** 2 + (b * np.sin(th)) ** 2)
    return SupportBody(grid, h, label=f"ellipse:{a:g},{b:g}")


def ball(radius=1.0, level=4) -> SupportBody:
    grid = icosphere(level)
    r = float(radius)
    return SupportBody(grid, np.full(grid.size, r),
                       label=f"ball:{radius:g}",
                       h_ext=lambda X, r=r: r * np.linalg.norm(X, axis=-1))


def ellipsoid(a, b, c, level=4) -> SupportBody:
    grid = icosphere(level)
    diag = np.array([a * a, b * b, c * c], dtype=float)

    def h_ext(X, diag=diag):
        X = np.asarray(X, dtype=float)
        return np.sqrt(np.einsum("...i,i,...i->...", X, diag, X))

    return SupportBody(grid, h_ext(grid.vertices),
                       label=f"ellipsoid:{a:g},{b:g},{c:g}", h_ext=h_ext)


def random_body_2d(seed, amp=0.1, M=256, radius=1.0, kmax=6) -> SupportBody:
    """Seeded random smooth 2D body: bounded low-order harmonics of h."""
    rng = np.random.default_rng(seed)
    grid = angle_grid(M)
    th = grid.thetas
    for _ in range(200):
        coefs = rng.uniform(-amp, amp, size=(kmax, 2)) * radius
        coefs /= np.arange(1, kmax + 1)[:, None]
        h = np.full(M, float(radius))
        for k in range(1, kmax + 1):
            h += coefs[k - 1, 0] * np.cos(k * th) + \
                 coefs[k - 1, 1] * np.sin(k * th)
        try:
            return SupportBody(grid, h, label=f"random2d:seed={seed}")
        except (NonConvexError, NonPositiveError):
            continue
    raise NonConvexError(f"random body seed {seed}: no convex sample "
                         "after 200 draws")


def _real_sph_harm(l, m, U):
    """Real spherical harmonic evaluated at unit vectors U (n, 3)."""
    from scipy.special import sph_harm_y
    theta = np.arccos(np.clip(U[..., 2], -1.0, 1.0))
    phi = np.arctan2(U[..., 1], U[..., 0])
    y = sph_harm_y(l, abs(m), theta, phi)
    if m > 0:
        return np.sqrt(2.0) * np.real(y)
    if m < 0:
        return np.sqrt(2.0) * np.imag(y)
    return np.real(y)


def random_body_3d(seed, amp=0.08, level=4, radius=1.0, lmax=4) -> SupportBody:
    rng = np.random.default_rng(seed)
    grid = icosphere(level)
    for _ in range(200):
        terms = []
        for l in range(1, lmax + 1):
            for m in range(-l, l + 1):
                c = rng.uniform(-amp, amp) * radius / (1 + l) ** 2
                terms.append((l, m, c))

        def h_ext(X, terms=terms, radius=radius):
            X = np.asarray(X, dtype=float)
            r = np.linalg.norm(X, axis=-1)
            U = X / r[..., None]
            acc = np.full(r.shape, float(radius))
            for l, m, c in terms:
                acc = acc + c * _real_sph_harm(l, m, U)
            return r * acc

        try:
            return SupportBody(grid, h_ext(grid.vertices),
                               label=f"random3d:seed={seed}", h_ext=h_ext)
        except (NonConvexError, NonPositiveError):
            continue
    raise NonConvexError(f"random 3D body seed {seed}: no convex sample")


def body_from_table(grid: DirectionGrid, h, label="table") -> SupportBody:
    """Body from an explicit support table; convexity margin enforced."""
    return SupportBody(grid, h, label=label)


def make_body(spec: str, M=256, level=4) -> SupportBody:
    """Parse the body mini-grammar: disc:1, ellipse:2,1, ball:1,
    ellipsoid:1.2,1,0.9, random:seed=7,amp=0.1[,dim=3]."""
    spec = spec.strip()
    name, _, rest = spec.partition(":")
    name = name.lower()
    if name in ("disc", "circle"):
        return disc(float(rest or 1.0), M=M)
    if name == "ball":
        return ball(float(rest or 1.0), level=level)
    if name == "ellipse":
        a, b = (float(x) for x in rest.split(","))
        return ellipse(a, b, M=M)
    if name == "ellipsoid":
        a, b, c = (float(x) for x in rest.split(","))
        return ellipsoid(a, b, c, level=level)
    if name == "random":
        kv = {}
        for part in rest.split(","):
            if not part:
                continue
            key, _, val = part.partition("=")
            kv[key.strip()] = val.strip()
        seed = int(kv.get("seed", 0))
        amp = float(kv.get("amp", 0.1))
        dim = int(kv.get("dim", 2))
        radius = float(kv.get("R", 1.0))
        if dim == 2:
            return random_body_2d(seed, amp=amp, M=M, radius=radius)
        return random_body_3d(seed, amp=amp, level=level, radius=radius)
    raise ValueError(f"unknown body spec {spec!r}")


# ---------------------------------------------------------------------------
# sizes and mixed areas

def euclidean_size(body: SupportBody):
    """(volume, boundary area) of the body, Lebesgue measure."""
    if body.dimension == 2:
        h = body.h
        h1 = fourier_diff(h, 1)
        dtheta = TWO_PI / body.grid.size
        area = 0.5 * float(np.sum(h * h - h1 * h1)) * dtheta
        perimeter = float(np.sum(h)) * dtheta
        return area, perimeter
    mesh = body.mesh()
    area = float(np.sum(mesh.area_weights))
    volume = float(np.sum(body.h * mesh.area_weights)) / 3.0
    return volume, area


def mixed_area(K: SupportBody, L: SupportBody) -> float:
    """Planar mixed area A(K, L) = 1/2 int (h_K h_L - h_K' h_L') dtheta."""
    if K.dimension != 2 or L.dimension != 2:
        raise DimensionError("mixed_area is defined for planar bodies only")
    _require_same_grid(K, L)
    hk1 = fourier_diff(K.h, 1)
    hl1 = fourier_diff(L.h, 1)
    dtheta = TWO_PI / K.grid.size
    return 0.5 * float(np.sum(K.h * L.h - hk1 * hl1)) * dtheta


def support_from_points(points, directions):
    """Recompute support values from boundary points: max_i <x_i, u>."""
    return np.max(points @ directions.T, axis=0)
