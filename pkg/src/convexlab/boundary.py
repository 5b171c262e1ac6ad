"""Weighted boundary Laplacian, spectral gap and boundary inequalities.

The 2D operator is assembled in weak form from the spectral arclength
parametrization: S = D_s^T diag(m) D_s with D_s the Fourier derivative
in arclength and m the weighted arclength elements.  Constants are in
the kernel to machine precision and integration by parts is exact by
construction, which keeps the circle equality cases sharp.  The 3D
operator is piecewise-linear finite elements (cotangent weights) with
exp(-V) in both stiffness and mass.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bodies import (SupportBody, BoundaryMesh, fourier_diff,
                     fourier_diff_matrix)
from .errors import (ConventionViolationError, DimensionError,
                     NonMeanConvexError, SolverFailureError)
from .measures import (Density, WeightedMeasures, cd_coef, check_invN,
                       one_minus_invN, n_over_n_minus_one, weighted_measures,
                       boundary_cd)
from .report import VerdictReport


def calibrated_tol(mesh: BoundaryMesh, *values, tol_scale=1.0) -> float:
    """Inequality tolerance: max(1e-8, c_h h^2) scaled by magnitude.

    c_h is calibrated so that the ball equality cases sit well inside
    the tolerance at default resolutions while genuine violations of
    size O(1) are still caught.
    """
    h = mesh.spacing
    c_h = 0.02 if mesh.dimension == 2 else 2.0
    mag = max([1.0] + [abs(float(v)) for v in values if np.isfinite(v)])
    return max(1e-8, c_h * h * h) * mag * tol_scale


# ---------------------------------------------------------------------------
# boundary functions

class BoundaryFunction:
    """Node values plus (optionally exact) tangential gradient data.

    2D: dfds is the derivative along arclength (signed scalar field).
    3D: tgrad is the tangential gradient vector per vertex.
    """

    def __init__(self, values, dfds=None, tgrad=None, label="f",
                 exact=False):
        self.values = np.asarray(values, dtype=float)
        self.dfds = None if dfds is None else np.asarray(dfds, dtype=float)
        self.tgrad = None if tgrad is None else np.asarray(tgrad, dtype=float)
        self.label = label
        self.exact = exact


def bf_cos(mesh: BoundaryMesh, k: int, phase=0.0) -> BoundaryFunction:
    """f = cos(k theta + phase) in the Gauss-angle parameter, exact d/ds."""
    if mesh.dimension != 2:
        raise DimensionError("bf_cos is a planar test function")
    th = mesh.theta
    vals = np.cos(k * th + phase)
    dfds = -k * np.sin(k * th + phase) / mesh.jacobian
    return BoundaryFunction(vals, dfds=dfds, label=f"cos:{k}", exact=True)


def bf_one(mesh: BoundaryMesh) -> BoundaryFunction:
    n = len(mesh.points)
    if mesh.dimension == 2:
        return BoundaryFunction(np.ones(n), dfds=np.zeros(n), label="one",
                                exact=True)
    return BoundaryFunction(np.ones(n), tgrad=np.zeros((n, 3)), label="one",
                            exact=True)


def bf_band_limited(mesh: BoundaryMesh, seed: int, kmax=6,
                    amp=1.0) -> BoundaryFunction:
    """Random band-limited function of the Gauss angle with exact d/ds."""
    if mesh.dimension != 2:
        raise DimensionError("bf_band_limited is planar")
    rng = np.random.default_rng(seed)
    th = mesh.theta
    vals = np.zeros_like(th)
    dvals = np.zeros_like(th)
    for k in range(1, kmax + 1):
        a, b = rng.uniform(-amp, amp, 2) / k
        vals += a * np.cos(k * th) + b * np.sin(k * th)
        dvals += k * (-a * np.sin(k * th) + b * np.cos(k * th))
    return BoundaryFunction(vals, dfds=dvals / mesh.jacobian,
                            label=f"band:seed={seed}", exact=True)


def bf_linear(mesh: BoundaryMesh, direction) -> BoundaryFunction:
    """Restriction of the linear function <x, d> to the boundary."""
    d = np.asarray(direction, dtype=float)
    vals = mesh.points @ d
    if mesh.dimension == 2:
        dfds = mesh.tangents @ d
        return BoundaryFunction(vals, dfds=dfds, label="linear", exact=True)
    tg = d[None, :] - np.outer(mesh.normals @ d, np.ones(3)) * mesh.normals
    return BoundaryFunction(vals, tgrad=tg, label="linear", exact=True)


def bf_from_values(mesh: BoundaryMesh, values, label="table"):
    values = np.asarray(values, dtype=float)
    if mesh.dimension == 2:
        dfds = fourier_diff(values) / mesh.jacobian
        return BoundaryFunction(values, dfds=dfds, label=label)
    tgrad = fem_vertex_gradient(mesh, values)
    return BoundaryFunction(values, tgrad=tgrad, label=label)


def fem_vertex_gradient(mesh: BoundaryMesh, values) -> np.ndarray:
    """Tangential gradient of a vertex table: per-face P1 gradients,
    area-averaged to vertices and projected to the vertex tangent plane."""
    pts, faces = mesh.points, mesh.faces
    f = np.asarray(values, dtype=float)
    p0, p1, p2 = pts[faces[:, 0]], pts[faces[:, 1]], pts[faces[:, 2]]
    e1, e2 = p1 - p0, p2 - p0
    nrm = np.cross(e1, e2)
    area2 = np.linalg.norm(nrm, axis=1)
    nhat = nrm / area2[:, None]
    # gradient of the linear interpolant on each face
    g = (np.cross(nhat, e1) * (f[faces[:, 2]] - f[faces[:, 0]])[:, None]
         - np.cross(nhat, e2) * (f[faces[:, 1]] - f[faces[:, 0]])[:, None])
    g /= area2[:, None]
    acc = np.zeros_like(pts)
    wacc = np.zeros(len(pts))
    for col in range(3):
        np.add.at(acc, faces[:, col], g * area2[:, None])
        np.add.at(wacc, faces[:, col], area2)
    acc /= wacc[:, None]
    nu = mesh.normals
    acc -= np.einsum("ij,ij->i", acc, nu)[:, None] * nu
    return acc


def _grad_quadratic_form(mesh: BoundaryMesh, f: BoundaryFunction,
                         forms) -> np.ndarray:
    """Pointwise <A grad f, grad f> for a field of symmetric forms.

    2D: forms is a scalar array (the form acting on the 1D tangent).
    3D: forms is (n, 2, 2) in the mesh frame coordinates.
    """
    if mesh.dimension == 2:
        dfds = f.dfds if f.dfds is not None else \
            fourier_diff(f.values) / mesh.jacobian
        return forms * dfds ** 2
    tg = f.tgrad if f.tgrad is not None else fem_vertex_gradient(
        mesh, f.values)
    comp = np.einsum("nai,ni->na", mesh.frames, tg)
    return np.einsum("na,nab,nb->n", comp, forms, comp)


# ---------------------------------------------------------------------------
# operator assembly

class BoundaryOperator:
    """Symmetric PSD representation of -L on the boundary, with mass m."""

    def __init__(self, mesh: BoundaryMesh, density: Density,
                 measures: WeightedMeasures | None = None):
        self.mesh = mesh
        self.density = density
        self.measures = measures or None
        if measures is None:
            raise ValueError("assemble via BoundaryOperator.build")
        self.mass = measures.mass
        if mesh.dimension == 2:
            m = self.mass
            Ds = fourier_diff_matrix(len(m)) / mesh.jacobian[:, None]
            S = Ds.T @ (m[:, None] * Ds)
            self.stiffness = 0.5 * (S + S.T)
            self._Ds = Ds
        else:
            self.stiffness = _fem_stiffness(mesh, density)
            self._Ds = None

    @classmethod
    def build(cls, body: SupportBody, density: Density,
              measures: WeightedMeasures | None = None):
        wm = measures or weighted_measures(body, density)
        return cls(body.mesh(), density, wm)

    def apply(self, f) -> np.ndarray:
        """L f (weighted boundary Laplacian applied to node values)."""
        f = np.asarray(f, dtype=float)
        if sp.issparse(self.stiffness):
            return -(self.stiffness @ f) / self.mass
        return -(self.stiffness @ f) / self.mass

    def dirichlet_energy(self, f) -> float:
        f = np.asarray(f, dtype=float)
        return float(f @ (self.stiffness @ f))

    def spectral_gap(self):
        """First positive eigenvalue and m-normalized eigenfunction."""
        m = self.mass
        if self.mesh.dimension == 2:
            w, v = scipy.linalg.eigh(self.stiffness, np.diag(m))
        else:
            S = sp.csc_matrix(self.stiffness)
            Mm = sp.diags(m).tocsc()
            try:
                w, v = spla.eigsh(S, k=6, M=Mm, sigma=-1e-2, which="LM")
            except Exception as exc:  # pragma: no cover - solver trouble
                raise SolverFailureError(str(exc)) from exc
            order = np.argsort(w)
            w, v = w[order], v[:, order]
        scale = abs(w[-1]) if len(w) > 1 else 1.0
        pos = np.where(w > 1e-10 * max(1.0, scale))[0]
        if len(pos) == 0:
            raise SolverFailureError("no positive eigenvalue found")
        i = pos[0]
        lam = float(w[i])
        u = v[:, i]
        u = u / math.sqrt(float(np.sum(u * u * m)))
        if u[np.argmax(np.abs(u))] < 0:
            u = -u
        return lam, u


def _fem_stiffness(mesh: BoundaryMesh, density: Density) -> sp.csr_matrix:
    pts, faces = mesh.points, mesh.faces
    wv = density.weight(pts)
    wf = wv[faces].mean(axis=1)
    i0, i1, i2 = faces[:, 0], faces[:, 1], faces[:, 2]
    e0 = pts[i2] - pts[i1]
    e1 = pts[i0] - pts[i2]
    e2 = pts[i1] - pts[i0]
    area2 = np.linalg.norm(np.cross(e1, e2), axis=1)
    # cotangent weights: cot(angle at vertex k) = -<e_i, e_j> / (2 area)
    cot0 = -np.einsum("ij,ij->i", e1, e2) / area2
    cot1 = -np.einsum("ij,ij->i", e2, e0) / area2
    cot2 = -np.einsum("ij,ij->i", e0, e1) / area2
    rows, cols, vals = [], [], []
    for (a, b, cot) in ((i1, i2, cot0), (i2, i0, cot1), (i0, i1, cot2)):
        w = 0.5 * cot * wf
        rows += [a, b, a, b]
        cols += [b, a, a, b]
        vals += [-w, -w, w, w]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    S = sp.coo_matrix((vals, (rows, cols)),
                      shape=(len(pts), len(pts))).tocsr()
    return S


def spectral_gap(body: SupportBody, density: Density):
    op = BoundaryOperator.build(body, density)
    return op.spectral_gap()


# ---------------------------------------------------------------------------
# inequality verifiers

def _ctx(body, density, measures=None):
    mesh = body.mesh()
    wm = measures or weighted_measures(body, density)
    return mesh, wm


def colesanti_verify(body: SupportBody, density: Density, invN,
                     f: BoundaryFunction, measures=None,
                     tol_scale=1.0) -> VerdictReport:
    """Weighted Poincare-type boundary inequality:

    int H_mu f^2 dmu_b - (1 - invN) (int f dmu_b)^2 / mu
        <= int <II^{-1} grad f, grad f> dmu_b.
    """
    mesh, wm = _ctx(body, density, measures)
    check_invN(invN, body.dimension, density)
    m = wm.mass
    fv = f.values
    mean_term = float(np.sum(fv * m))
    if math.isinf(invN):
        if abs(mean_term) > 1e-8 * float(np.sum(np.abs(fv) * m) + 1e-30):
            raise ConventionViolationError(
                "invN = -inf requires zero-mean boundary data")
        lhs = float(np.sum(wm.hmu * fv * fv * m))
    else:
        lhs = float(np.sum(wm.hmu * fv * fv * m)) \
            - (1.0 - invN) * mean_term ** 2 / wm.mu
    inv_forms = 1.0 / mesh.kappa if mesh.dimension == 2 else mesh.rw
    rhs = float(np.sum(_grad_quadratic_form(mesh, f, inv_forms) * m))
    tol = calibrated_tol(mesh, lhs, rhs, tol_scale=tol_scale)
    return VerdictReport(
        inequality_id="colesanti", lhs=lhs, rhs=rhs, tol=tol,
        body_id=body.label, density_id=density.tag, invN=float(invN),
        resolution=body.grid.resolution_label, extra={"f": f.label})


def colesanti_strengthened(body: SupportBody, density: Density, invN,
                           f: BoundaryFunction, measures=None,
                           tol_scale=1.0) -> VerdictReport:
    """Strengthened form: adds (int f beta dmu_b)^2 / int beta dmu_b to
    the left-hand side, beta = (1 - invN) mu_b / mu - H_mu."""
    if math.isinf(invN):
        raise ConventionViolationError(
            "the strengthened inequality needs finite invN")
    mesh, wm = _ctx(body, density, measures)
    check_invN(invN, body.dimension, density)
    m = wm.mass
    fv = f.values
    beta = (1.0 - invN) * wm.mu_boundary / wm.mu - wm.hmu
    beta_total = float(np.sum(beta * m))
    base = colesanti_verify(body, density, invN, f, measures=wm,
                            tol_scale=tol_scale)
    tol_beta = 1e-8 * wm.mu_boundary * max(1.0, float(np.max(np.abs(wm.hmu))))
    if beta_total <= tol_beta:
        return VerdictReport(
            inequality_id="colesanti-strong", lhs=base.lhs, rhs=base.rhs,
            tol=base.tol, body_id=body.label, density_id=density.tag,
            invN=float(invN), resolution=body.grid.resolution_label,
            flag="DegenerateBeta",
            extra={"beta_total": beta_total, "f": f.label})
    extra_term = float(np.sum(fv * beta * m)) ** 2 / beta_total
    lhs = base.lhs + extra_term
    return VerdictReport(
        inequality_id="colesanti-strong", lhs=lhs, rhs=base.rhs,
        tol=base.tol, body_id=body.label, density_id=density.tag,
        invN=float(invN), resolution=body.grid.resolution_label,
        extra={"beta_total": beta_total, "extra_term": extra_term,
               "f": f.label})


def dual_colesanti_verify(body: SupportBody, density: Density, rho,
                          f: BoundaryFunction, C=None, measures=None,
                          tol_scale=1.0) -> VerdictReport:
    """Dual inequality (CD(rho, 0), H_mu > 0):

    int <II grad f, grad f> dmu_b
        <= int (1/H_mu) (L f + rho (f - C)/2)^2 dmu_b, any constant C.
    """
    mesh, wm = _ctx(body, density, measures)
    if wm.hmu.min() <= 0:
        raise NonMeanConvexError(
            f"{body.label}: H_mu reaches {wm.hmu.min():.3e}")
    m = wm.mass
    fv = f.values
    if C is None:
        C = float(np.sum(fv * m) / np.sum(m))
    op = BoundaryOperator(mesh, density, wm)
    lf = op.apply(fv)
    forms = mesh.kappa if mesh.dimension == 2 else mesh.II
    lhs = float(np.sum(_grad_quadratic_form(mesh, f, forms) * m))
    rhs = float(np.sum((lf + 0.5 * rho * (fv - C)) ** 2 / wm.hmu * m))
    tol = calibrated_tol(mesh, lhs, rhs, tol_scale=tol_scale)
    return VerdictReport(
        inequality_id="dual-colesanti", lhs=lhs, rhs=rhs, tol=tol,
        body_id=body.label, density_id=density.tag, rho=float(rho),
        resolution=body.grid.resolution_label,
        extra={"C": C, "f": f.label})


def mean_curvature_inequalities(body: SupportBody, density: Density, invN,
                                measures=None, tol_scale=1.0):
    """Three linked verdicts on the total mean curvature:

    (upper)    int H_mu dmu_b  <=  (1 - invN) mu_b^2 / mu
    (cs)       mu_b^2          <=  int H_mu dmu_b * int (1/H_mu) dmu_b
    (harmonic) mu / (1 - invN) <=  int (1/H_mu) dmu_b

    The middle and harmonic links need H_mu > 0 and are emitted as
    flagged rows when the body is not mean-convex.
    """
    mesh, wm = _ctx(body, density, measures)
    check_invN(invN, body.dimension, density)
    m = wm.mass
    h_int = float(np.sum(wm.hmu * m))
    omi = one_minus_invN(invN)
    reports = []
    rhs_upper = omi * wm.mu_boundary ** 2 / wm.mu
    reports.append(VerdictReport(
        inequality_id="mean-curv-upper", lhs=h_int, rhs=rhs_upper,
        tol=calibrated_tol(mesh, h_int, tol_scale=tol_scale),
        body_id=body.label, density_id=density.tag, invN=float(invN),
        resolution=body.grid.resolution_label))
    mean_convex = wm.hmu.min() > 0
    if mean_convex:
        inv_h_int = float(np.sum(m / wm.hmu))
        reports.append(VerdictReport(
            inequality_id="mean-curv-cs", lhs=wm.mu_boundary ** 2,
            rhs=h_int * inv_h_int,
            tol=calibrated_tol(mesh, wm.mu_boundary ** 2,
                               tol_scale=tol_scale),
            body_id=body.label, density_id=density.tag, invN=float(invN),
            resolution=body.grid.resolution_label))
        lhs_h = 0.0 if math.isinf(invN) else wm.mu / omi
        reports.append(VerdictReport(
            inequality_id="mean-curv-harmonic", lhs=lhs_h, rhs=inv_h_int,
            tol=calibrated_tol(mesh, inv_h_int, tol_scale=tol_scale),
            body_id=body.label, density_id=density.tag, invN=float(invN),
            resolution=body.grid.resolution_label))
    else:
        for iid in ("mean-curv-cs", "mean-curv-harmonic"):
            reports.append(VerdictReport(
                inequality_id=iid, lhs=0.0, rhs=0.0, tol=0.0,
                body_id=body.label, density_id=density.tag,
                invN=float(invN), resolution=body.grid.resolution_label,
                flag="HypothesisUnmet",
                extra={"min_hmu": float(wm.hmu.min())}))
    return reports


def _entropy(values, mass):
    total = float(np.sum(mass))
    avg = float(np.sum(values * mass)) / total
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = np.where(values > 0, values * np.log(values / avg), 0.0)
    return float(np.sum(ent * mass))


def bound_suite(body: SupportBody, density: Density, rho, invN,
                measures=None, tol_scale=1.0, generalized=False):
    """Table of spectral-gap lower bounds and related functional checks."""
    mesh, wm = _ctx(body, density, measures)
    check_invN(invN, body.dimension, density)
    op = BoundaryOperator(mesh, density, wm)
    lam1, phi = op.spectral_gap()
    m = wm.mass
    n = body.dimension
    sigma_i = mesh.min_principal
    sigma = float(sigma_i.min())
    xi_mu = float(wm.hmu.min())
    res = body.grid.resolution_label
    tol = calibrated_tol(mesh, lam1, tol_scale=tol_scale)
    rows = []

    def row(iid, bound, flag="", extra=None):
        rows.append(VerdictReport(
            inequality_id=iid, lhs=bound, rhs=lam1, tol=tol,
            body_id=body.label, density_id=density.tag, rho=float(rho),
            invN=float(invN), resolution=res, flag=flag,
            extra=extra or {}))

    # (a) lambda1 >= sigma * xi under CD(0,0) and mean convexity
    if sigma > 0 and xi_mu > 0:
        row("gap-sigma-xi", sigma * xi_mu,
            extra={"sigma": sigma, "xi": xi_mu})
    else:
        row("gap-sigma-xi", 0.0, flag="HypothesisUnmet")

    # (b) improved bound using the ambient curvature rho >= 0
    a = sigma * xi_mu
    if rho >= 0 and sigma > 0 and xi_mu > 0:
        bound_b = 0.5 * (rho + a + math.sqrt(2 * a * rho + a * a))
        row("gap-curvature", bound_b, extra={"a": a})
    else:
        row("gap-curvature", 0.0, flag="HypothesisUnmet")

    # (c) Lichnerowicz-type bound on the boundary (unweighted, surfaces)
    hg = mesh.mean_curvature
    xi_g = float(hg.min())
    if n == 3 and density.is_lebesgue and xi_g - sigma > 0 and sigma > 0:
        bound_c = (n - 1.0) / (n - 2.0) * (xi_g - sigma) * sigma
        row("gap-lichnerowicz-boundary", bound_c,
            extra={"sigma": sigma, "xi_g": xi_g})
    else:
        row("gap-lichnerowicz-boundary", 0.0, flag="HypothesisUnmet")

    # (d) harmonic-mean refinement with pointwise curvature data
    use_xi = wm.hmu if generalized else hg
    ok_d = n == 3 and (generalized or density.is_lebesgue)
    prod = (use_xi - sigma_i) * sigma_i
    if ok_d and prod.min() > 0:
        mass_d = m if generalized else mesh.area_weights
        avg = float(np.sum(mass_d / prod) / np.sum(mass_d))
        row("gap-veysseire-boundary", 1.0 / avg)
    else:
        row("gap-veysseire-boundary", 0.0, flag="HypothesisUnmet")

    # (e) empirical variance-bound ratio; the sharp universal constant is
    # unknown, so this row is informational only
    if sigma > 0 and xi_mu > 0:
        avg_inv_xi = float(np.sum(m / wm.hmu) / np.sum(m))
        avg_inv_sigma = float(np.sum(m / sigma_i) / np.sum(m))
        c_emp = 1.0 / (lam1 * avg_inv_xi * avg_inv_sigma)
        row("gap-variance-ratio", 0.0, flag="ReportedOnly",
            extra={"C_emp": c_emp})
    else:
        row("gap-variance-ratio", 0.0, flag="HypothesisUnmet")

    # (f) boundary log-Sobolev spot checks with eigenfunction perturbations
    if n == 3:
        bcd = boundary_cd(body, density, rho, invN)
        lam_ls = bcd.extra.get("log_sobolev")
        if lam_ls is not None and lam_ls > 0:
            worst = math.inf
            for eps in (0.01, 0.1, 0.5):
                fv = 1.0 + eps * phi
                ent = _entropy(fv * fv, m)
                energy = eps * eps * op.dirichlet_energy(phi)
                slack = (2.0 / lam_ls) * energy - ent
                worst = min(worst, slack)
            rows.append(VerdictReport(
                inequality_id="log-sobolev-boundary", lhs=0.0, rhs=worst,
                tol=tol, body_id=body.label, density_id=density.tag,
                rho=float(rho), invN=float(invN), resolution=res,
                extra={"lambda_ls": lam_ls}))
        else:
            rows.append(VerdictReport(
                inequality_id="log-sobolev-boundary", lhs=0.0, rhs=0.0,
                tol=0.0, body_id=body.label, density_id=density.tag,
                rho=float(rho), invN=float(invN), resolution=res,
                flag="HypothesisUnmet"))
    else:
        rows.append(VerdictReport(
            inequality_id="log-sobolev-boundary", lhs=0.0, rhs=0.0,
            tol=0.0, body_id=body.label, density_id=density.tag,
            rho=float(rho), invN=float(invN), resolution=res,
            flag="HypothesisUnmet"))
    return lam1, rows
