"""Acceptance suite: sharp analytic cases and randomized property sweeps.

Each test covers one numbered acceptance item and prints a summary
line on success (visible with pytest -s / in captured output).
"""

import math

import numpy as np
import pytest

import convexlab as cx
from convexlab.boundary import (bf_band_limited, bf_cos, bf_one,
                                bound_suite, colesanti_verify,
                                dual_colesanti_verify,
                                mean_curvature_inequalities, spectral_gap)
from convexlab.flow import (flow_vs_support_sum, parallel_normal_diagnostic,
                            pnf_integrate, wave_flow, _curve_geometry)
from convexlab.measures import boundary_cd, weighted_measures
from convexlab.profiles import (concavity_profile, euclidean_quadratic_slack,
                                isoperimetric_checks, minkowski_second,
                                transform_G)
from convexlab.radial import (RadialProblem, colesanti_proof_chain,
                              reilly_residual, ros_proof_chain, solve_mode)


# ----------------------------------------------------------------- helpers

def _mu_ratio_gaussian(R):
    return R * math.exp(-0.5 * R * R) / (1.0 - math.exp(-0.5 * R * R))


def _reilly_grid(density, R=1.0, nodes=64):
    """(variant, solution) pairs for k = 0..3, all three variants."""
    out = []
    ratio = (2.0 / R if density.tag == "lebesgue"
             else _mu_ratio_gaussian(R))
    for k in range(4):
        if k == 0:
            p = RadialProblem(R, density, 0, "neumann", data=1.0,
                              nodes=nodes)
            out.append(("full", solve_mode(p, rhs=ratio)))
        else:
            p = RadialProblem(R, density, k, "neumann", data=1.0,
                              nodes=nodes)
            out.append(("full", solve_mode(p, rhs=0.0)))
        for variant in ("neumann-constant", "dirichlet"):
            p = RadialProblem(R, density, k, "dirichlet", data=0.0,
                              nodes=nodes)
            out.append((variant,
                        solve_mode(p, rhs=lambda r, k=k: r ** k)))
    return out


@pytest.fixture(scope="module")
def flow_suite():
    """Ten seeded (K, L, t) triples with their integrated traces."""
    suite = []
    for i in range(10):
        K = cx.random_body_2d(100 + i, amp=0.1)
        L = cx.random_body_2d(200 + i, amp=0.1)
        t = 0.2 + 0.08 * i
        trace = pnf_integrate(K, L, T=t, steps=100)
        suite.append((K, L, t, trace))
    return suite


# ------------------------------------------------------------- criteria

def test_01_ball_equality_suite():
    cases = ((cx.disc(1.0, 256), 0.5), (cx.ball(1.0, 4), 1.0 / 3))
    for body, invN in cases:
        leb = cx.lebesgue()
        ms = minkowski_second(body, leb, invN)
        assert abs(ms.rhs - ms.lhs) <= 1e-6 * ms.rhs
        rows = {r.inequality_id: r
                for r in mean_curvature_inequalities(body, leb, invN)}
        for rid in ("mean-curv-upper", "mean-curv-harmonic"):
            r = rows[rid]
            assert abs(r.rhs - r.lhs) <= 1e-6 * max(abs(r.rhs), 1.0)
        rep = colesanti_verify(body, leb, invN, bf_one(body.mesh()))
        assert abs(rep.slack) <= 1e-6 * max(1.0, abs(rep.lhs))
    # harmonic-mean chain equality on the disc
    chain = ros_proof_chain(cx.lebesgue(), 1.0, 0.5)
    assert abs(chain.final_slack) <= 1e-6
    print("ACCEPTANCE 1 PASS: ball equality suite (2D and 3D)")


def test_02_wirtinger_sharpness():
    K = cx.disc(1.0, 256)
    f = bf_cos(K.mesh(), 1)
    assert abs(colesanti_verify(K, cx.lebesgue(), 0.5, f).slack) <= 1e-8
    assert abs(dual_colesanti_verify(K, cx.lebesgue(), 0.0, f).slack) \
        <= 1e-8
    print("ACCEPTANCE 2 PASS: Wirtinger sharpness at M=256")


def test_03_spectral_sharpness():
    lam_c, _ = spectral_gap(cx.disc(1.0, 256), cx.lebesgue())
    assert lam_c == pytest.approx(1.0, abs=1e-6)
    lam_s, rows = bound_suite(cx.ball(1.0, 4), cx.lebesgue(), rho=0.0,
                              invN=1.0 / 3)
    assert lam_s == pytest.approx(2.0, abs=1e-2)
    lich = {r.inequality_id: r for r in rows}["gap-lichnerowicz-boundary"]
    assert lich.lhs == pytest.approx(2.0, abs=1e-6)
    assert lich.passed
    print("ACCEPTANCE 3 PASS: circle gap 1, sphere gap 2, sharp bound")


def test_04_gaussian_circle_bound():
    K = cx.disc(0.5, 256)
    lam, rows = bound_suite(K, cx.gaussian(1.0), rho=1.0, invN=0.0)
    assert lam == pytest.approx(4.0, abs=1e-6)
    curv = {r.inequality_id: r for r in rows}["gap-curvature"]
    assert curv.lhs == pytest.approx((4.0 + math.sqrt(15.0)) / 2.0,
                                     rel=1e-9)
    assert curv.passed
    assert curv.lhs / lam >= 0.98
    print("ACCEPTANCE 4 PASS: gaussian circle gap 4, bound ratio >= 0.98")


def test_05_flow_equivalence(flow_suite):
    for K, L, t, trace in flow_suite:
        assert not trace.truncated
        err = flow_vs_support_sum(K, L, t, steps=100, trace=trace)
        assert err <= 1e-3
    # spatial convergence order on disc + ellipse
    errs_m = []
    for M in (16, 32, 64):
        errs_m.append(flow_vs_support_sum(cx.disc(1.0, M),
                                          cx.ellipse(1.3, 0.8, M),
                                          0.5, steps=100))
    orders = [math.log2(a / b) for a, b in zip(errs_m, errs_m[1:])]
    assert min(orders) >= 2.0, errs_m
    # step convergence: trajectories are straight lines, so the RK4
    # time error sits at round-off; accept either the measured order
    # or a sub-1e-9 noise floor
    K, L = cx.disc(1.0, 256), cx.ellipse(1.3, 0.8, 256)
    errs_s = [flow_vs_support_sum(K, L, 0.5, steps=s)
              for s in (25, 50, 100)]
    if max(errs_s) >= 1e-9:
        orders_s = [math.log2(a / b) for a, b in zip(errs_s, errs_s[1:])]
        assert min(orders_s) >= 3.5, errs_s
    print("ACCEPTANCE 5 PASS: flow equals support sum; orders verified")


def test_06_parallel_normal_invariant(flow_suite):
    for _, _, _, trace in flow_suite:
        assert parallel_normal_diagnostic(trace) <= 1e-3
    tr_const = pnf_integrate(cx.random_body_2d(42), 0.4, T=1.0, steps=50)
    assert parallel_normal_diagnostic(tr_const) <= 1e-10
    print("ACCEPTANCE 6 PASS: normal drift within bounds")


def test_07_reilly_residual_grid():
    for density in (cx.lebesgue(), cx.gaussian(1.0)):
        for variant, sol in _reilly_grid(density):
            rep = reilly_residual(sol, variant)
            assert rep.lhs <= 1e-6, (density.tag, variant, rep.lhs)
    # refinement decreases the residual on an underresolved mode
    res = []
    for nodes in (8, 12, 24):
        p = RadialProblem(1.0, cx.gaussian(1.0), 3, "dirichlet",
                          data=0.0, nodes=nodes)
        sol = solve_mode(p, rhs=lambda r: r ** 3 * np.sin(4 * r))
        res.append(reilly_residual(sol, "full").lhs)
    assert res[0] > res[1] > res[2]
    print("ACCEPTANCE 7 PASS: 24 identity residuals <= 1e-6, refining")


def test_08_proof_chain_accounting():
    coeffs = {0: 1.0, 1: 0.5, 2: 0.25, 3: 0.1}
    runs = [colesanti_proof_chain(coeffs, cx.lebesgue(), 1.0, 0.5),
            colesanti_proof_chain(coeffs, cx.gaussian(1.0), 1.0, 0.0),
            colesanti_proof_chain(coeffs, cx.gaussian(1.0), 1.0, -1.0),
            ros_proof_chain(cx.lebesgue(), 1.0, 0.5),
            ros_proof_chain(cx.gaussian(1.0), 0.5, 0.0),
            ros_proof_chain(cx.gaussian(1.0), 0.5, -1.0)]
    for rep in runs:
        assert rep.accounting_error <= 1e-6, rep.label
        assert rep.passed, rep.label
    print("ACCEPTANCE 8 PASS: chain slacks add up within 1e-6")


def test_09_randomized_inequality_suite():
    fails = []
    for i in range(100):
        K = cx.random_body_2d(i, amp=0.12)
        if i % 2 == 0:
            D, invN, rho = cx.lebesgue(), 0.5, 0.0
        else:
            D = cx.gaussian(1.0)
            invN, rho = (0.0 if i % 4 == 1 else -1.0), 1.0
        wm = weighted_measures(K, D)
        f = bf_band_limited(K.mesh(), i + 1000)
        reps = [colesanti_verify(K, D, invN, f, measures=wm),
                minkowski_second(K, D, invN)]
        reps += mean_curvature_inequalities(K, D, invN, measures=wm)
        if float(np.min(wm.hmu)) > 0:
            reps.append(dual_colesanti_verify(K, D, rho, f, measures=wm))
        fails += [(i, r.inequality_id) for r in reps if not r.passed]
    assert not fails, fails
    print("ACCEPTANCE 9 PASS: 100 randomized triples, zero failures")


def test_10_concavity_suite():
    D = cx.gaussian(1.0)
    for seed in range(400, 420):
        K = cx.random_body_2d(seed, amp=0.08)
        L = cx.random_body_2d(seed + 100, amp=0.08)
        assert euclidean_quadratic_slack(K, L) >= -1e-10
        geo = concavity_profile("geodesic", K, D, 0.0, T=1.0, samples=33)
        assert geo.passed, (seed, geo.max_d2G, geo.tol)
        pnf = concavity_profile("pnf", K, D, 0.0, T=0.6, samples=17,
                                phi=L, steps_per_sample=2)
        assert pnf.passed and not pnf.flag, (seed, pnf.max_d2G, pnf.tol)
        # wave flow on a gentler grid: explicit stepping cost scales
        # with the cube of the resolution
        Kw = cx.random_body_2d(seed, amp=0.05, M=64, kmax=4)
        phi0 = 1.0 + 0.2 * np.cos(2 * Kw.grid.thetas)
        wav = concavity_profile("wave", Kw, D, 0.0, T=0.2, samples=9,
                                phi=phi0, steps_per_sample=2)
        assert wav.passed and not wav.flag, (seed, wav.max_d2G, wav.tol)
    print("ACCEPTANCE 10 PASS: concavity profiles on 20 seeded bodies")


def test_11_boundary_curvature_identity():
    mesh = cx.ellipsoid(1.2, 1.0, 0.9, 4).mesh()
    II = mesh.II
    H = mesh.mean_curvature
    eye = np.eye(2)
    lhs = (H[:, None, None] * eye - II) @ II
    rhs = (1.0 / mesh.det_rw)[:, None, None] * eye
    rel = np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))
    assert rel <= 1e-4
    for R in (1.0, 2.0):
        rep = boundary_cd(cx.ball(R, 4), cx.lebesgue(), rho=0.0,
                          invN=1.0 / 3)
        assert rep.passed
        assert rep.extra["rho0"] == pytest.approx(1.0 / R ** 2, rel=1e-6)
    print("ACCEPTANCE 11 PASS: curvature identity and sphere rho0")


def test_12_isoperimetric_checks():
    r, R = 1.0, 2.0
    reps = isoperimetric_checks(cx.disc(r, 256), cx.disc(1.0, 256),
                                cx.disc(R, 256), cx.lebesgue(), 0.5)
    by_id = {rep.inequality_id: rep for rep in reps}
    low = by_id["isoperimetric-lower"]
    assert low.lhs == pytest.approx(math.pi * r * (R - r) / R, rel=1e-10)
    assert low.rhs == pytest.approx(2.0 * math.pi * r, rel=1e-10)
    assert low.passed and by_id["profile-derivative-test"].passed
    Om = cx.disc(4.0, 256)
    for i in range(20):
        K = cx.random_body_2d(i, amp=0.08)
        L = cx.random_body_2d(100 + i, amp=0.08)
        D, invN = ((cx.lebesgue(), 0.5) if i % 2 == 0
                   else (cx.gaussian(1.0), 0.0))
        reps = isoperimetric_checks(K, L, Om, D, invN, samples=21)
        assert all(rep.passed for rep in reps), i
    print("ACCEPTANCE 12 PASS: nested-disc closed form + 20 pairs")


# --------------------------------------------------- cross-cutting checks

def test_invariant_semigroup():
    K = cx.random_body_2d(31, amp=0.08)
    L = cx.random_body_2d(131, amp=0.08)
    s, t = 0.3, 0.4
    single = pnf_integrate(K, L, T=s + t, steps=70)
    first = pnf_integrate(K, L, T=s, steps=30)
    # trajectory normals stay at the grid directions, so the support
    # values of the intermediate front are exact nodewise products
    th = K.grid.thetas
    u = np.stack([np.cos(th), np.sin(th)], axis=1)
    h_mid = np.einsum("ij,ij->i", first.points[-1], u)
    mid = cx.SupportBody(K.grid, h_mid)
    second = pnf_integrate(mid, L, T=t, steps=40)
    gap = float(np.max(np.linalg.norm(
        second.points[-1] - single.points[-1], axis=1)))
    tol = 2.0 * max(flow_vs_support_sum(K, L, s + t, steps=70), 1e-10)
    assert gap <= max(tol, 1e-8), gap
    print("INVARIANT PASS: flow semigroup property")


def test_invariant_first_variation():
    K = cx.random_body_2d(17, amp=0.08)
    L = cx.random_body_2d(117, amp=0.08)
    D = cx.gaussian(1.0)
    wm = weighted_measures(K, D)
    mu_plus = float(np.sum(L.h * wm.mass))
    eps = 1e-4
    fwd = (weighted_measures(cx.minkowski_sum_support(K, L, eps), D).mu
           - wm.mu) / eps
    assert mu_plus == pytest.approx(fwd, rel=5e-4)
    print("INVARIANT PASS: anisotropic perimeter is the first variation")


def test_invariant_wave_mass():
    K = cx.random_body_2d(7, amp=0.08, M=64)
    D = cx.gaussian(1.0)
    phi0 = 1.0 + 0.2 * np.cos(2 * K.grid.thetas)
    tr = wave_flow(K, D, phi0, T=0.3, steps=60)
    dth = 2.0 * math.pi / K.grid.size
    flux = np.array([
        float(np.sum(tr.phi[s] * D.weight(p) * _curve_geometry(p)[0]))
        * dth for s, p in enumerate(tr.points)])
    dmu = np.gradient(tr.mu, tr.times)
    rel = np.max(np.abs(flux[1:-1] - dmu[1:-1])) / np.max(np.abs(flux))
    assert rel <= 1e-5
    print("INVARIANT PASS: wave-flow volume rate equals weighted flux")


def test_invariant_branch_totality():
    K = cx.random_body_2d(6)
    L, Om = cx.disc(1.0, 256), cx.disc(4.0, 256)
    for invN, dens in ((0.5, cx.lebesgue()), (1.0 / 3, cx.lebesgue()),
                       (0.0, cx.gaussian(1.0)), (-1.0, cx.gaussian(1.0)),
                       (-1e6, cx.gaussian(1.0))):
        assert np.all(np.isfinite(
            transform_G(np.array([1.0, 2.0, 10.0]), invN)))
        reps = isoperimetric_checks(K, L, Om, dens, invN, samples=21)
        assert all(np.isfinite(r.lhs) and np.isfinite(r.rhs)
                   and r.passed for r in reps)
    print("INVARIANT PASS: all dimensional-parameter branches evaluate")
