"""Interior verification on discs with radial densities.

The weighted Poisson problems behind the boundary inequalities are
solved by Fourier-mode reduction: for data proportional to cos(k theta)
the solution is u_k(r) cos(k theta) with

    u'' + (1/r - V'(r)) u' - (k^2 / r^2) u = rhs(r).

Each mode is collocated on Chebyshev nodes over [-R, R] folded by the
parity of k (u_k is even for even k, odd for odd k), which handles the
coordinate singularity at r = 0 without regularization.  All identity
terms reduce to 1D radial integrals with the angular factors in closed
form; quadrature interpolates the collocation polynomial to a fixed
Gauss-Legendre rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .errors import (ConventionViolationError, IncompatibleDataError,
                     NonMeanConvexError, SolverFailureError,
                     VariantMismatchError)
from .measures import Density, check_invN
from .report import VerdictReport

_GLN, _GLW = np.polynomial.legendre.leggauss(160)


def chebyshev_matrices(n: int):
    """Chebyshev-Lobatto nodes on [-1, 1] and differentiation matrix."""
    idx = np.arange(n + 1)
    x = np.cos(np.pi * idx / n)
    c = np.hstack([2.0, np.ones(n - 1), 2.0]) * (-1.0) ** idx
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


@dataclass
class RadialProblem:
    R: float
    density: Density
    k: int
    bc: str                      # "neumann" | "dirichlet"
    data: float = 1.0            # boundary amplitude of the cos(k.) mode
    nodes: int = 64              # positive-half collocation count

    def __post_init__(self):
        if self.density.radial is None:
            raise ValueError("interior solves need a radial density profile")
        if self.bc not in ("neumann", "dirichlet"):
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if self.k < 0:
            raise ValueError("mode index must be >= 0")


@dataclass
class ModeSolution:
    problem: RadialProblem
    r: np.ndarray                 # positive collocation radii (desc from R)
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    residual: float
    bc_residual: float
    rhs_label: str = ""
    _interp: object = field(default=None, repr=False)

    @property
    def parity(self) -> int:
        return 1 if self.problem.k % 2 == 0 else -1

    def profile(self, rq):
        """(u, u', u'') interpolated at query radii in [0, R]."""
        return self._interp(rq)


def _fold_matrices(R: float, nodes: int, parity: int):
    """Parity-folded first/second derivative matrices on (0, R]."""
    n = 2 * nodes - 1            # odd: no node at the origin
    x, D = chebyshev_matrices(n)
    x = x * R
    D = D / R
    D2 = D @ D
    pos = np.arange(nodes)       # x[0] = R down to smallest positive node
    mirror = n - pos
    s = float(parity)
    D1f = D[np.ix_(pos, pos)] + s * D[np.ix_(pos, mirror)]
    D2f = D2[np.ix_(pos, pos)] + s * D2[np.ix_(pos, mirror)]
    return x[pos], D1f, D2f, x


def solve_mode(p: RadialProblem, rhs=0.0) -> ModeSolution:
    """Solve the radial mode problem; rhs is a constant (k = 0) or a
    callable radial profile with the parity of the mode."""
    v, v1, _v2 = p.density.radial
    parity = 1 if p.k % 2 == 0 else -1
    r, D1, D2, x_full = _fold_matrices(p.R, p.nodes, parity)
    vp = np.asarray(v1(r), dtype=float)
    A = D2 + np.diag(1.0 / r - vp) @ D1
    if p.k > 0:
        A = A - np.diag(p.k ** 2 / r ** 2)
    if callable(rhs):
        b = np.asarray(rhs(r), dtype=float)
        rhs_label = "profile"
    else:
        if float(rhs) != 0.0 and p.k != 0:
            raise IncompatibleDataError(
                "constant right-hand side is a k = 0 source")
        b = np.full(p.nodes, float(rhs))
        rhs_label = f"const:{float(rhs):g}"

    rows = [A[i] for i in range(1, p.nodes)]     # interior equations
    rhs_rows = [b[i] for i in range(1, p.nodes)]
    if p.bc == "dirichlet":
        bc_row = np.zeros(p.nodes)
        bc_row[0] = 1.0
    else:
        bc_row = D1[0]
    rows.append(bc_row)
    rhs_rows.append(p.data)

    if p.bc == "neumann" and p.k == 0:
        # constants are in the kernel; check compatibility, then pin u(R)
        w = np.exp(-np.asarray(v(r), dtype=float))
        mu = 2.0 * math.pi * _radial_integral(
            lambda rq: np.exp(-np.asarray(v(rq), dtype=float)) * rq, p.R)
        mu_b = 2.0 * math.pi * p.R * math.exp(-float(v(np.array([p.R]))[0]))
        if callable(rhs):
            src = 2.0 * math.pi * _radial_integral(
                lambda rq: np.asarray(rhs(rq), dtype=float)
                * np.exp(-np.asarray(v(rq), dtype=float)) * rq, p.R)
        else:
            src = float(rhs) * mu
        flux = p.data * mu_b
        if abs(src - flux) > 1e-8 * max(1.0, abs(flux), abs(src)):
            raise IncompatibleDataError(
                f"source integral {src:.6g} does not match boundary flux "
                f"{flux:.6g}")
        pin = np.zeros(p.nodes)
        pin[0] = 1.0
        rows.append(pin)
        rhs_rows.append(0.0)
        M = np.vstack(rows)
        u, *_ = np.linalg.lstsq(M, np.asarray(rhs_rows), rcond=None)
        del w
    else:
        M = np.vstack(rows)
        try:
            u = np.linalg.solve(M, np.asarray(rhs_rows))
        except np.linalg.LinAlgError as exc:
            raise SolverFailureError(str(exc)) from exc

    du = D1 @ u
    d2u = D2 @ u
    residual = float(np.max(np.abs(A[1:] @ u - b[1:])))
    bc_residual = float(abs(bc_row @ u - p.data))
    scale = max(1.0, float(np.max(np.abs(u))))
    if residual > 1e-8 * scale or bc_residual > 1e-8 * scale:
        raise SolverFailureError(
            f"mode k={p.k}: residual {residual:.3e}, bc {bc_residual:.3e}")

    # barycentric interpolants of u, u', u'' on the full (mirrored) grid,
    # using x_full[n - i] = -x_full[i] and the parity of each quantity
    full = np.empty((len(x_full), 3))
    pos = np.arange(p.nodes)
    n_full = len(x_full) - 1
    s = float(parity)
    for col, (vals, par) in enumerate(((u, s), (du, -s), (d2u, s))):
        full[pos, col] = vals
        full[n_full - pos, col] = par * vals
    interp = BarycentricInterpolator(x_full, full)

    def prof(rq, interp=interp):
        out = interp(np.asarray(rq, dtype=float))
        return out[..., 0], out[..., 1], out[..., 2]

    return ModeSolution(problem=p, r=r, u=u, du=du, d2u=d2u,
                        residual=residual, bc_residual=bc_residual,
                        rhs_label=rhs_label, _interp=prof)


def _radial_integral(fn, R: float) -> float:
    rq = 0.5 * R * (_GLN + 1.0)
    return 0.5 * R * float(np.sum(_GLW * fn(rq)))


# ---------------------------------------------------------------------------
# identity terms

def reilly_terms(sol: ModeSolution) -> dict:
    """All integrals of the integrated Bochner identity for one mode."""
    p = sol.problem
    v, v1, v2 = p.density.radial
    k = p.k
    R = p.R
    c_cos = 2.0 * math.pi if k == 0 else math.pi
    c_sin = 0.0 if k == 0 else math.pi

    def integrand(rq):
        u, du, d2u = sol.profile(rq)
        w = np.exp(-np.asarray(v(rq), dtype=float)) * rq
        vp = np.asarray(v1(rq), dtype=float)
        vpp = np.asarray(v2(rq), dtype=float)
        lu = d2u + (1.0 / rq - vp) * du - (k ** 2 / rq ** 2) * u
        h_tt = du / rq - (k ** 2 / rq ** 2) * u
        h_rt_sq = (k * (du / rq - u / rq ** 2)) ** 2
        hess = (d2u ** 2 + h_tt ** 2) * c_cos + 2.0 * h_rt_sq * c_sin
        ric = vpp * du ** 2 * c_cos + (vp / rq) * (k * u / rq) ** 2 * c_sin
        return np.stack([lu ** 2 * c_cos * w, hess * w, ric * w])

    rq = 0.5 * R * (_GLN + 1.0)
    vals = integrand(rq)
    lu2, hess2, ric = (0.5 * R * float(np.sum(_GLW * vals[i]))
                       for i in range(3))

    uR, duR, _ = (float(np.asarray(x).ravel()[0])
                  for x in sol.profile(np.array([R])))
    vR = float(np.asarray(v(np.array([R])), dtype=float)[0])
    vpR = float(np.asarray(v1(np.array([R])), dtype=float)[0])
    bw = R * math.exp(-vR)                       # radial boundary weight
    hmu = 1.0 / R - vpR
    b_h = hmu * duR ** 2 * c_cos * bw
    b_ii = (1.0 / R) * (k * uR / R) ** 2 * c_sin * bw
    b_cross = (k ** 2) * duR * uR / R ** 2 * c_sin * bw
    b_ulu = duR * (-(k ** 2) * uR / R ** 2) * c_cos * bw
    ii_inv_data = R * (k * p.data / R) ** 2 * c_sin * bw
    return {
        "lu2": lu2, "hess2": hess2, "ric": ric,
        "b_h": b_h, "b_ii": b_ii, "b_cross": b_cross, "b_ulu": b_ulu,
        "ii_inv_data": ii_inv_data,
        "uR": uR, "duR": duR, "hmu_R": hmu, "bw": bw,
        "c_cos": c_cos, "c_sin": c_sin,
    }


VARIANTS = ("full", "neumann-constant", "dirichlet")


def reilly_residual(sol: ModeSolution, variant: str,
                    terms: dict | None = None) -> VerdictReport:
    """Relative defect of the integrated identity for the given variant."""
    if variant not in VARIANTS:
        raise VariantMismatchError(f"unknown variant {variant!r}")
    p = sol.problem
    t = terms or reilly_terms(sol)
    if variant == "neumann-constant":
        boundary_const = p.k == 0 or (
            p.bc == "dirichlet" and abs(t["uR"]) <= 1e-10)
        if not boundary_const:
            raise VariantMismatchError(
                "the reduced identity needs u or its normal derivative "
                "constant on the boundary")
        rhs = t["hess2"] + t["ric"] + t["b_h"] + t["b_ii"]
    elif variant == "dirichlet":
        if p.bc != "dirichlet":
            raise VariantMismatchError(
                "dirichlet variant requested for a non-dirichlet solution")
        rhs = (t["hess2"] + t["ric"] + t["b_h"] + t["b_ii"]
               + 2.0 * t["b_ulu"])
    else:
        rhs = (t["hess2"] + t["ric"] + t["b_h"] + t["b_ii"]
               - 2.0 * t["b_cross"])
    lhs = t["lu2"]
    scale = max(abs(lhs), abs(t["hess2"]), abs(t["ric"]), abs(t["b_h"]),
                abs(t["b_ii"]), 2 * abs(t["b_cross"]), 2 * abs(t["b_ulu"]),
                1e-12)
    residual = abs(lhs - rhs) / scale
    return VerdictReport(
        inequality_id=f"reilly-{variant}", lhs=residual, rhs=1e-6,
        tol=0.0, density_id=p.density.tag,
        resolution=f"nodes={p.nodes},k={p.k}",
        extra={"terms": t, "abs_defect": abs(lhs - rhs), "scale": scale})


# ---------------------------------------------------------------------------
# proof chains

@dataclass
class ChainReport:
    label: str
    cs_slack: float
    gamma2_slack: float
    final_slack: float
    accounting_error: float
    invN: float
    density_id: str
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        tol = 1e-8 * max(1.0, abs(self.final_slack))
        return (self.cs_slack >= -tol and self.gamma2_slack >= -tol
                and self.final_slack >= -tol)


def _disc_measures(density: Density, R: float):
    v = density.radial[0]
    mu = 2.0 * math.pi * _radial_integral(
        lambda rq: np.exp(-np.asarray(v(rq), dtype=float)) * rq, R)
    mu_b = 2.0 * math.pi * R * math.exp(-float(np.asarray(
        v(np.array([R])), dtype=float)[0]))
    return mu, mu_b


def colesanti_proof_chain(coeffs: dict, density: Density, R: float, invN,
                          nodes=64) -> ChainReport:
    """Per-mode accounting of the boundary inequality proof.

    coeffs maps mode index k to the amplitude of cos(k theta) in the
    boundary data f.  Solves the Neumann problem per mode, then reports
    the Cauchy-Schwarz slack, the Bochner (Gamma2) slack, and the final
    inequality slack; the three satisfy final = cs + gamma2 up to the
    quadrature defect of the integrated identity.
    """
    check_invN(invN, 2, density)
    mu, mu_b = _disc_measures(density, R)
    c0 = float(coeffs.get(0, 0.0))
    if math.isinf(invN) and abs(c0) > 1e-14:
        raise ConventionViolationError(
            "invN = -inf requires zero-mean boundary data")
    cs = g2 = 0.0
    lu2_total = 0.0
    h_f2 = 0.0
    ii_inv_total = 0.0
    for k, ck in sorted(coeffs.items()):
        ck = float(ck)
        if ck == 0.0:
            continue
        if k == 0:
            rhs = ck * mu_b / mu
        else:
            rhs = 0.0
        p = RadialProblem(R=R, density=density, k=int(k), bc="neumann",
                          data=ck, nodes=nodes)
        sol = solve_mode(p, rhs=rhs)
        t = reilly_terms(sol)
        cs += t["b_ii"] + t["ii_inv_data"] - 2.0 * t["b_cross"]
        gamma = t["hess2"] + t["ric"]
        if math.isinf(invN):
            g2 += gamma
        else:
            g2 += gamma - invN * t["lu2"]
        lu2_total += t["lu2"]
        h_f2 += t["hmu_R"] * ck ** 2 * t["c_cos"] * t["bw"]
        ii_inv_total += t["ii_inv_data"]
    if math.isinf(invN):
        lhs = h_f2
    else:
        f_int = c0 * 2.0 * math.pi * R * math.exp(
            -float(np.asarray(density.radial[0](np.array([R])))[0]))
        lhs = h_f2 - (1.0 - invN) * f_int ** 2 / mu
    final = ii_inv_total - lhs
    acct = abs(final - (cs + g2))
    return ChainReport(
        label="colesanti-chain", cs_slack=cs, gamma2_slack=g2,
        final_slack=final, accounting_error=acct, invN=float(invN),
        density_id=density.tag,
        extra={"mu": mu, "mu_b": mu_b, "lu2": lu2_total})


def ros_proof_chain(density: Density, R: float, invN,
                    nodes=64) -> ChainReport:
    """Accounting for the harmonic mean-curvature lower bound.

    Solves Lu = 1 with u = 0 on the boundary circle and decomposes
    int (1/H_mu) dmu_b - mu/(1 - invN) into a normalized Cauchy-Schwarz
    slack plus a normalized Gamma2 slack.
    """
    check_invN(invN, 2, density)
    if math.isinf(invN):
        raise ConventionViolationError(
            "the harmonic bound chain needs finite invN (N != 0)")
    mu, mu_b = _disc_measures(density, R)
    p = RadialProblem(R=R, density=density, k=0, bc="dirichlet", data=0.0,
                      nodes=nodes)
    sol = solve_mode(p, rhs=1.0)
    t = reilly_terms(sol)
    if t["hmu_R"] <= 0:
        raise NonMeanConvexError(
            f"H_mu = {t['hmu_R']:.4g} on the boundary circle")
    A = t["b_h"]                              # int H_mu u_nu^2 dmu_b
    P = t["duR"] * t["c_cos"] * t["bw"]       # int u_nu dmu_b (= mu)
    inv_h_int = (1.0 / t["hmu_R"]) * t["c_cos"] * t["bw"]
    gamma = t["hess2"] + t["ric"]
    g2_raw = gamma - invN * t["lu2"]
    cs_raw = A * inv_h_int - P ** 2
    cs_norm = cs_raw / A
    q = 1.0 / (1.0 - invN)
    g2_norm = (P ** 2 - q * mu * A) / A
    final = inv_h_int - q * mu
    acct = abs(final - (cs_norm + g2_norm))
    # g2_norm is, up to the identity defect, q * lu2 * g2_raw / A >= 0
    return ChainReport(
        label="ros-chain", cs_slack=cs_norm, gamma2_slack=g2_norm,
        final_slack=final, accounting_error=acct, invN=float(invN),
        density_id=density.tag,
        extra={"mu": mu, "mu_b": mu_b, "gamma2_raw": g2_raw,
               "cs_raw": cs_raw, "A": A, "P": P})
