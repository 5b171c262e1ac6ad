"""Radial interior solver, integral identity residuals, proof chains."""

import math

import numpy as np
import pytest

import convexlab as cx
from convexlab.errors import (ConventionViolationError,
                              IncompatibleDataError, NonMeanConvexError)
from convexlab.radial import (RadialProblem, colesanti_proof_chain,
                              reilly_residual, reilly_terms,
                              ros_proof_chain, solve_mode, VARIANTS)


def _mu_ratio_gaussian(R):
    """mu_boundary / mu of the disc of radius R under gaussian(1)."""
    return R * math.exp(-0.5 * R * R) / (1.0 - math.exp(-0.5 * R * R))


def _grid_solutions(density, R=1.0, nodes=64):
    """(variant, solution) pairs for k = 0..3 mirroring the CLI grid."""
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
            out.append((variant, solve_mode(p, rhs=lambda r, k=k: r ** k)))
    return out


def test_harmonic_mode_exact():
    p = RadialProblem(1.0, cx.lebesgue(), 1, "dirichlet", data=1.0)
    sol = solve_mode(p)
    r = np.linspace(0.05, 1.0, 20)
    u, du, d2u = sol.profile(r)
    assert np.allclose(u, r, atol=1e-10)
    assert np.allclose(du, 1.0, atol=1e-9)
    assert np.allclose(d2u, 0.0, atol=1e-8)


def test_gaussian_neumann_flux_closed_form():
    R = 1.0
    D = cx.gaussian(1.0)
    c = _mu_ratio_gaussian(R)
    sol = solve_mode(RadialProblem(R, D, 0, "neumann", data=1.0), rhs=c)
    # flux form: r e^{-r^2/2} u'(r) = c (1 - e^{-r^2/2})
    r = np.linspace(0.1, 1.0, 13)
    _, du, _ = sol.profile(r)
    expect = c * (1.0 - np.exp(-0.5 * r * r)) / (r * np.exp(-0.5 * r * r))
    assert np.allclose(du, expect, rtol=1e-10)


def test_incompatible_neumann_rejected():
    with pytest.raises(IncompatibleDataError):
        solve_mode(RadialProblem(1.0, cx.gaussian(1.0), 0, "neumann",
                                 data=1.0), rhs=0.0)


def test_residual_grid_small():
    for D in (cx.lebesgue(), cx.gaussian(1.0)):
        for variant, sol in _grid_solutions(D):
            rep = reilly_residual(sol, variant)
            assert rep.lhs <= 1e-6, (D.tag, variant, rep.lhs)


def test_residual_decreases_under_refinement():
    # near the center the k = 3 mode terms u/r, u/r^2 punish a poorly
    # resolved profile, so the identity residual is resolution-limited
    # and must decay as nodes are added
    D = cx.gaussian(1.0)
    res = []
    for nodes in (8, 10, 12, 16, 24):
        p = RadialProblem(1.0, D, 3, "dirichlet", data=0.0, nodes=nodes)
        sol = solve_mode(p, rhs=lambda r: r ** 3 * np.sin(4 * r))
        res.append(reilly_residual(sol, "full").lhs)
    assert all(a > b for a, b in zip(res, res[1:]))
    assert res[-1] <= 1e-12


def test_reilly_terms_signs():
    D = cx.gaussian(1.0)
    sol = solve_mode(RadialProblem(1.0, D, 2, "dirichlet", data=0.0),
                     rhs=lambda r: r ** 2)
    terms = reilly_terms(sol)
    assert terms["hess2"] >= 0.0
    assert terms["ric"] >= 0.0          # gaussian Ricci is positive
    assert terms["lu2"] >= 0.0


def test_colesanti_chain_accounting():
    coeffs = {0: 1.0, 1: 0.5, 2: 0.25, 3: 0.1}
    for D, invN in ((cx.lebesgue(), 0.5), (cx.gaussian(1.0), 0.0),
                    (cx.gaussian(1.0), -1.0)):
        rep = colesanti_proof_chain(coeffs, D, 1.0, invN)
        assert rep.accounting_error <= 1e-6
        assert rep.passed


def test_ros_chain_accounting():
    for D, R, invN in ((cx.lebesgue(), 1.0, 0.5),
                       (cx.gaussian(1.0), 0.5, 0.0),
                       (cx.gaussian(1.0), 0.5, -1.0)):
        rep = ros_proof_chain(D, R, invN)
        assert rep.accounting_error <= 1e-6
        assert rep.passed


def test_ros_chain_guards():
    with pytest.raises(ConventionViolationError):
        ros_proof_chain(cx.gaussian(1.0), 0.5, -math.inf)
    # gaussian circle of radius >= 1 has nonpositive weighted mean
    # curvature, so the harmonic-mean chain hypothesis fails
    with pytest.raises(NonMeanConvexError):
        ros_proof_chain(cx.gaussian(1.0), 1.5, 0.0)


def test_chain_neg_inf_branch():
    rep = colesanti_proof_chain({2: 1.0}, cx.gaussian(1.0), 1.0,
                                -math.inf)
    assert rep.accounting_error <= 1e-6
    assert rep.passed


def test_variant_list_stable():
    assert VARIANTS == ("full", "neumann-constant", "dirichlet")
