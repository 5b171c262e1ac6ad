"""Weight densities, curvature-dimension checks and weighted measures.

The measure is mu = exp(-V) dVol.  The dimension parameter is always
stored as invN = 1/N in [-inf, 1/n]; every coefficient that involves N
is evaluated through guarded closed forms in invN with explicit limit
branches at invN = 0 (N = infinity) and invN = -inf (N = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import SupportBody, fourier_diff
from .errors import (ConventionViolationError, DimensionError,
                     QuadratureFailureError)
from .report import VerdictReport

TOL_CD = 1e-9


# ---------------------------------------------------------------------------
# densities

class Density:
    """Smooth positive weight exp(-V) with V, grad V, hess V evaluators.

    radial, when set, is a (v, v', v'') triple of callables of r for
    rotationally invariant densities; the interior mode solver needs it.
    """

    def __init__(self, tag, V, grad, hess, radial=None):
        self.tag = tag
        self._V = V
        self._grad = grad
        self._hess = hess
        self.radial = radial

    def V(self, X):
        return np.asarray(self._V(np.asarray(X, dtype=float)), dtype=float)

    def grad(self, X):
        return np.asarray(self._grad(np.asarray(X, dtype=float)), dtype=float)

    def hess(self, X):
        return np.asarray(self._hess(np.asarray(X, dtype=float)), dtype=float)

    def weight(self, X):
        return np.exp(-self.V(X))

    @property
    def is_lebesgue(self):
        return self.tag == "lebesgue"

    def __repr__(self):
        return f"Density({self.tag!r})"


def lebesgue() -> Density:
    return Density(
        "lebesgue",
        V=lambda X: np.zeros(X.shape[:-1]),
        grad=lambda X: np.zeros_like(X),
        hess=lambda X: np.zeros(X.shape[:-1] + (X.shape[-1], X.shape[-1])),
        radial=(lambda r: 0.0 * r, lambda r: 0.0 * r, lambda r: 0.0 * r),
    )


def gaussian(s=1.0) -> Density:
    s = float(s)
    s2 = s * s

    def hess(X):
        d = X.shape[-1]
        eye = np.eye(d) / s2
        return np.broadcast_to(eye, X.shape[:-1] + (d, d)).copy()

    return Density(
        f"gaussian:{s:g}",
        V=lambda X: np.sum(X * X, axis=-1) / (2.0 * s2),
        grad=lambda X: X / s2,
        hess=hess,
        radial=(lambda r: r * r / (2.0 * s2),
                lambda r: r / s2,
                lambda r: np.full_like(np.asarray(r, dtype=float), 1.0 / s2)),
    )


def cauchy(alpha=3.0) -> Density:
    a = float(alpha)

    def V(X):
        return 0.5 * a * np.log1p(np.sum(X * X, axis=-1))

    def grad(X):
        r2 = np.sum(X * X, axis=-1, keepdims=True)
        return a * X / (1.0 + r2)

    def hess(X):
        d = X.shape[-1]
        r2 = np.sum(X * X, axis=-1)
        eye = np.eye(d)
        outer = X[..., :, None] * X[..., None, :]
        denom = (1.0 + r2)[..., None, None]
        return a * (eye * denom - 2.0 * outer) / denom ** 2

    return Density(
        f"cauchy:{a:g}", V=V, grad=grad, hess=hess,
        radial=(lambda r: 0.5 * a * np.log1p(r * r),
                lambda r: a * r / (1.0 + r * r),
                lambda r: a * (1.0 - r * r) / (1.0 + r * r) ** 2),
    )


def polynomial(coeffs: dict, dim: int) -> Density:
    """V as an explicit multivariate polynomial {exponent tuple: coeff}."""
    terms = [(np.asarray(e, dtype=int), float(c)) for e, c in coeffs.items()]

    def V(X):
        out = np.zeros(X.shape[:-1])
        for e, c in terms:
            out += c * np.prod(X ** e, axis=-1)
        return out

    def grad(X):
        out = np.zeros_like(X)
        for e, c in terms:
            for i in range(dim):
                if e[i] == 0:
                    continue
                ei = e.copy()
                ei[i] -= 1
                out[..., i] += c * e[i] * np.prod(X ** ei, axis=-1)
        return out

    def hess(X):
        out = np.zeros(X.shape[:-1] + (dim, dim))
        for e, c in terms:
            for i in range(dim):
                for j in range(dim):
                    eij = e.copy()
                    fac = c
                    if i == j:
                        if e[i] < 2:
                            continue
                        fac *= e[i] * (e[i] - 1)
                        eij[i] -= 2
                    else:
                        if e[i] == 0 or e[j] == 0:
                            continue
                        fac *= e[i] * e[j]
                        eij[i] -= 1
                        eij[j] -= 1
                    out[..., i, j] += fac * np.prod(X ** eij, axis=-1)
        return out

    return Density("polynomial", V=V, grad=grad, hess=hess)


def density_from_spec(spec: str) -> Density:
    spec = spec.strip().lower()
    name, _, rest = spec.partition(":")
    if name == "lebesgue":
        return lebesgue()
    if name == "gaussian":
        return gaussian(float(rest or 1.0))
    if name == "cauchy":
        return cauchy(float(rest or 3.0))
    raise ValueError(f"unknown density spec {spec!r}")


# ---------------------------------------------------------------------------
# invN conventions

def check_invN(invN, n, density: Density | None = None):
    """Validate invN in [-inf, 1/n]; 1/n requires the unweighted measure."""
    if invN is None or (not math.isinf(invN) and not np.isfinite(invN)):
        raise ConventionViolationError("invN must be a number or -inf")
    if invN == math.inf:
        raise ConventionViolationError("invN = +inf is outside [-inf, 1/n]")
    if invN > 1.0 / n + 1e-12:
        raise ConventionViolationError(
            f"invN = {invN} exceeds the upper bound 1/{n}")
    if density is not None and abs(invN - 1.0 / n) <= 1e-12 \
            and not density.is_lebesgue:
        raise ConventionViolationError(
            "invN = 1/n is admissible only for the unweighted density")


def cd_coef(invN, n):
    """Coefficient 1/(N - n) of the dV x dV term, written in invN.

    1/(N - n) = invN / (1 - n*invN); the limits are 0 at invN = 0 and
    -1/n at invN = -inf.
    """
    if invN == 0.0:
        return 0.0
    if math.isinf(invN):
        return -1.0 / n
    denom = 1.0 - n * invN
    if abs(denom) < 1e-14:
        # invN = 1/n, only reachable with constant V; the term vanishes
        return 0.0
    return invN / denom


def one_minus_invN(invN):
    """(N - 1)/N = 1 - invN, with the +inf limit at invN = -inf."""
    if math.isinf(invN):
        return math.inf
    return 1.0 - invN


def n_over_n_minus_one(invN):
    """N/(N - 1) = 1/(1 - invN); 0 at invN = -inf, 1 at invN = 0."""
    if math.isinf(invN):
        return 0.0
    return 1.0 / (1.0 - invN)


def ric_mu_N(density: Density, X, invN):
    """Generalized Ricci tensor of the weighted Euclidean space at X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[-1]
    H = density.hess(X)
    g = density.grad(X)
    coef = cd_coef(invN, n)
    return H - coef * g[..., :, None] * g[..., None, :]


def cd_check(density: Density, rho, invN, samples,
             tol=TOL_CD) -> VerdictReport:
    """Verify Ric_{mu,N} >= rho * g pointwise over the sample set."""
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.size == 0:
        raise ValueError("cd_check needs a nonempty sample set")
    n = X.shape[-1]
    check_invN(invN, n, density)
    ric = ric_mu_N(density, X, invN)
    eigs = np.linalg.eigvalsh(ric)
    min_eig = float(eigs[..., 0].min() - rho)
    return VerdictReport(
        inequality_id="cd", lhs=0.0, rhs=min_eig, tol=tol,
        density_id=density.tag, rho=float(rho), invN=float(invN),
        resolution=f"samples={len(X)}",
        extra={"min_eig_minus_rho": min_eig})


# ---------------------------------------------------------------------------
# explicit test functions (for the pointwise Bochner-type check)

@dataclass
class TestFunction:
    """Scalar function with exact gradient and Hessian evaluators."""

    label: str
    value: callable
    grad: callable
    hess: callable

    def laplacian(self, X):
        h = self.hess(X)
        return np.trace(h, axis1=-2, axis2=-1)


def tf_half_square(dim: int) -> TestFunction:
    return TestFunction(
        "half-square",
        value=lambda X: 0.5 * np.sum(X * X, axis=-1),
        grad=lambda X: np.array(X, dtype=float),
        hess=lambda X: np.broadcast_to(
            np.eye(dim), X.shape[:-1] + (dim, dim)).copy())


def tf_coordinate(i: int, dim: int) -> TestFunction:
    def grad(X):
        g = np.zeros_like(X)
        g[..., i] = 1.0
        return g

    return TestFunction(
        f"x{i}",
        value=lambda X: X[..., i],
        grad=grad,
        hess=lambda X: np.zeros(X.shape[:-1] + (dim, dim)))


def tf_random_cubic(seed: int, dim: int) -> TestFunction:
    """Random polynomial of degree <= 3 with exact derivatives."""
    rng = np.random.default_rng(seed)
    exps = []
    for total in range(4):
        if dim == 2:
            exps += [(i, total - i) for i in range(total + 1)]
        else:
            exps += [(i, j, total - i - j)
                     for i in range(total + 1) for j in range(total + 1 - i)]
    coeffs = {e: rng.uniform(-1, 1) for e in exps}
    poly = polynomial(coeffs, dim)
    return TestFunction(
        f"cubic:seed={seed}",
        value=lambda X: poly.V(X),
        grad=lambda X: poly.grad(X),
        hess=lambda X: poly.hess(X))


def gamma2_check(density: Density, u: TestFunction, samples, invN,
                 tol=TOL_CD) -> VerdictReport:
    """Pointwise Bochner bound: Gamma2(u) >= <Ric_{mu,N} grad u, grad u>
    + (1/N)(Lu)^2, with the convention -inf * 0 = 0."""
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    n = X.shape[-1]
    check_invN(invN, n, density)
    gu = u.grad(X)
    hu = u.hess(X)
    gv = density.grad(X)
    lu = u.laplacian(X) - np.einsum("...i,...i->...", gv, gu)
    hess_sq = np.einsum("...ij,...ij->...", hu, hu)
    coef = cd_coef(invN, n)
    dv_term = coef * np.einsum("...i,...i->...", gv, gu) ** 2
    flag = ""
    if math.isinf(invN):
        # the (Lu)^2 term participates only where Lu = 0; elsewhere the
        # bound is vacuous
        mask = np.abs(lu) <= 1e-10
        if np.any(mask):
            min_slack = float(np.min((hess_sq + dv_term)[mask]))
        else:
            min_slack = 0.0
            flag = "HypothesisUnmet"
    else:
        slack = hess_sq + dv_term - invN * lu ** 2
        min_slack = float(np.min(slack))
    return VerdictReport(
        inequality_id="gamma2", lhs=0.0, rhs=min_slack, tol=tol,
        density_id=density.tag, invN=float(invN), flag=flag,
        resolution=f"samples={len(X)}", extra={"test_function": u.label})


# ---------------------------------------------------------------------------
# weighted measures

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_S = 0.5 * (_GL_NODES + 1.0)      # nodes on [0, 1]
_GL_W = 0.5 * _GL_WEIGHTS


@dataclass
class WeightedMeasures:
    mu: float
    mu_boundary: float
    hmu: np.ndarray              # generalized mean curvature per mesh point
    mass: np.ndarray             # boundary weights m_i = a_i exp(-V(x_i))
    mesh: object = field(repr=False, default=None)
    density: Density = field(repr=False, default=None)


def region_measure_from_rays(points, jac_det, density: Density,
                             weights) -> float:
    """Weighted measure of a star-shaped region from its boundary rays.

    points: boundary points x_j; jac_det: the angular Jacobian factor
    det[x, dx] (2D) or h * det W (3D per unit-sphere measure); weights:
    the angular quadrature weights.  Radial direction uses fixed
    Gauss-Legendre nodes on [0, 1].
    """
    dim = points.shape[1]
    total = 0.0
    for s, w in zip(_GL_S, _GL_W):
        vals = density.weight(points * s)
        if np.any(~np.isfinite(vals)):
            raise QuadratureFailureError("non-finite density in interior")
        total += w * s ** (dim - 1) * float(np.sum(vals * jac_det * weights))
    return total


def weighted_measures(body: SupportBody, density: Density) -> WeightedMeasures:
    mesh = body.mesh()
    x = mesh.points
    vb = density.V(x)
    if np.any(~np.isfinite(vb)):
        raise QuadratureFailureError("non-finite density on the boundary")
    wb = np.exp(-vb)
    mass = mesh.area_weights * wb
    mu_boundary = float(np.sum(mass))
    gv = density.grad(x)
    hmu = mesh.mean_curvature - np.einsum("ij,ij->i", gv, mesh.normals)
    if body.dimension == 2:
        xp = np.column_stack([fourier_diff(x[:, 0]), fourier_diff(x[:, 1])])
        jac_det = x[:, 0] * xp[:, 1] - x[:, 1] * xp[:, 0]
        weights = np.full(len(x), mesh.dtheta)
    else:
        jac_det = body.h * mesh.det_rw
        weights = mesh.w_sph
    mu = region_measure_from_rays(x, jac_det, density, weights)
    return WeightedMeasures(mu=mu, mu_boundary=mu_boundary, hmu=hmu,
                            mass=mass, mesh=mesh, density=density)


@dataclass
class Quermass:
    """Zeroth, first and second variations of mu under geodesic extension."""

    d0: float
    d1: float
    d2: float
    invN: float
    W: tuple = None   # (W_N, W_{N-1}, W_{N-2}) when N not in {0, 1}

    @classmethod
    def from_deltas(cls, d0, d1, d2, invN):
        W = None
        if invN not in (0.0,) and not math.isinf(invN):
            N = 1.0 / invN
            if abs(N) > 1e-12 and abs(N - 1.0) > 1e-12:
                W = (d0, d1 / N, d2 / (N * (N - 1.0)))
        return cls(d0=d0, d1=d1, d2=d2, invN=invN, W=W)


def quermassintegrals(body: SupportBody, density: Density,
                      invN) -> Quermass:
    check_invN(invN, body.dimension, density)
    wm = weighted_measures(body, density)
    d2 = float(np.sum(wm.hmu * wm.mass))
    return Quermass.from_deltas(wm.mu, wm.mu_boundary, d2, float(invN))


# ---------------------------------------------------------------------------
# interior sampling

def sample_interior(body: SupportBody, count: int, seed: int) -> np.ndarray:
    """Uniform rejection sampling of points strictly inside the body."""
    rng = np.random.default_rng(seed)
    U = body.grid.directions
    bound = float(np.max(body.h))
    out = []
    dim = body.dimension
    while len(out) < count:
        cand = rng.uniform(-bound, bound, size=(4 * count, dim))
        inside = np.all(cand @ U.T <= body.h[None, :] * 0.999, axis=1)
        out.extend(cand[inside])
    return np.asarray(out[:count])


# ---------------------------------------------------------------------------
# boundary curvature-dimension (3D bodies)

def boundary_cd(body: SupportBody, density: Density, rho, invN,
                tol=None) -> VerdictReport:
    """Check the induced curvature-dimension of the boundary surface.

    Computes Ric of the weighted boundary (tangential hess V plus the
    curvature product (H_mu g0 - II) II, Euclidean ambient), subtracts
    the dV x dV correction with dimension parameter N - 1, and compares
    against the candidate lower bound rho0 = rho + sigma (xi - sigma)
    built from the uniform bounds sigma <= II, xi <= H_g.
    """
    check_invN(invN, body.dimension, density)
    if body.dimension == 2:
        return VerdictReport(
            inequality_id="boundary-cd", lhs=0.0, rhs=0.0, tol=0.0,
            body_id=body.label, density_id=density.tag, rho=float(rho),
            invN=float(invN), resolution=body.grid.resolution_label,
            flag="Degenerate",
            extra={"note": "1D boundary carries no intrinsic Ricci"})
    mesh = body.mesh()
    x = mesh.points
    II = mesh.II
    frames = mesh.frames
    gv = density.grad(x)
    hv = density.hess(x)
    hmu = mesh.mean_curvature - np.einsum("ij,ij->i", gv, mesh.normals)
    # tangential 2x2 blocks in the orthonormal frame
    hv_t = np.einsum("nai,nij,nbj->nab", frames, hv, frames)
    gv_t = np.einsum("nai,ni->na", frames, gv)
    eye = np.eye(2)
    prod = np.einsum("nab,nbc->nac",
                     hmu[:, None, None] * eye[None] - II, II)
    prod = 0.5 * (prod + np.transpose(prod, (0, 2, 1)))
    coef = cd_coef(invN, body.dimension)  # 1/((N-1)-(n-1)) = 1/(N-n)
    ric_b = hv_t + prod - coef * gv_t[:, :, None] * gv_t[:, None, :]
    sigma = float(mesh.principal[:, 0].min())
    xi = float(mesh.mean_curvature.min())
    rho0 = float(rho) + sigma * (xi - sigma)
    eigs = np.linalg.eigvalsh(ric_b)
    min_eig = float(eigs[:, 0].min())
    if tol is None:
        tol = max(1e-8, 2.0 * mesh.spacing ** 2 * max(1.0, abs(rho0)))
    lam_ls = None
    if not math.isinf(invN) and abs(1.0 - 2.0 * invN) > 1e-14:
        lam_ls = rho0 * (1.0 - invN) / (1.0 - 2.0 * invN)
    return VerdictReport(
        inequality_id="boundary-cd", lhs=rho0, rhs=min_eig, tol=tol,
        body_id=body.label, density_id=density.tag, rho=float(rho),
        invN=float(invN), resolution=body.grid.resolution_label,
        extra={"sigma": sigma, "xi": xi, "rho0": rho0,
               "log_sobolev": lam_ls})
