"""Weighted measures, curvature-dimension checks, quermassintegrals."""

import math

import numpy as np
import pytest

import convexlab as cx
from convexlab.errors import ConventionViolationError
from convexlab.measures import (boundary_cd, cd_check, check_invN,
                                density_from_spec, gamma2_check,
                                quermassintegrals, tf_coordinate,
                                tf_half_square, tf_random_cubic,
                                weighted_measures)


def test_lebesgue_measures_match_euclidean_size():
    for K in (cx.disc(1.3, 256), cx.ellipse(1.4, 0.8, 256)):
        wm = weighted_measures(K, cx.lebesgue())
        area, perim = cx.euclidean_size(K)
        assert wm.mu == pytest.approx(area, rel=1e-10)
        assert wm.mu_boundary == pytest.approx(perim, rel=1e-10)
    B = cx.ball(1.0, 4)
    wm = weighted_measures(B, cx.lebesgue())
    vol, surf = cx.euclidean_size(B)
    assert wm.mu == pytest.approx(vol, rel=1e-9)
    assert wm.mu_boundary == pytest.approx(surf, rel=1e-9)


def test_gaussian_disc_closed_form():
    R = 1.2
    wm = weighted_measures(cx.disc(R, 256), cx.gaussian(1.0))
    assert wm.mu == pytest.approx(
        2.0 * math.pi * (1.0 - math.exp(-0.5 * R * R)), rel=1e-12)
    assert wm.mu_boundary == pytest.approx(
        2.0 * math.pi * R * math.exp(-0.5 * R * R), rel=1e-12)
    # generalized mean curvature of the circle: 1/R - V'(R) = 1/R - R
    assert np.allclose(wm.hmu, 1.0 / R - R, atol=1e-10)


def test_weighted_mean_curvature_is_first_variation():
    # d/dt mu_boundary(disc radius r+t) at t=0 equals integral of
    # H_mu against the weighted boundary measure
    for r in (0.5, 1.0, 2.0):
        D = cx.gaussian(1.0)
        eps = 1e-6
        a = weighted_measures(cx.disc(r + eps, 256), D).mu_boundary
        b = weighted_measures(cx.disc(r - eps, 256), D).mu_boundary
        wm = weighted_measures(cx.disc(r, 256), D)
        lhs = (a - b) / (2 * eps)
        rhs = float(np.sum(wm.hmu * wm.mass))
        assert lhs == pytest.approx(rhs, rel=1e-6)


def test_check_invN_conventions():
    check_invN(0.5, 2, cx.lebesgue())
    check_invN(0.0, 2, cx.gaussian(1.0))
    check_invN(-math.inf, 2, cx.gaussian(1.0))
    with pytest.raises(ConventionViolationError):
        check_invN(0.6, 2, cx.lebesgue())           # invN > 1/n
    with pytest.raises(ConventionViolationError):
        check_invN(0.5, 2, cx.gaussian(1.0))        # N = n needs lebesgue


def test_cd_check_gaussian():
    D = cx.gaussian(1.0)
    K = cx.disc(1.0, 64)
    pts = cx.measures.sample_interior(K, 200, seed=0)
    assert cd_check(D, 1.0, 0.0, pts).passed        # CD(1, infty) holds
    assert cd_check(D, 1.0, -1.0, pts).passed       # negative N branch
    assert not cd_check(D, 2.0, 0.0, pts).passed    # rho too large


def test_gamma2_check_lower_bound():
    D = cx.gaussian(1.0)
    pts = cx.measures.sample_interior(cx.disc(1.5, 64), 100, seed=3)
    for tf in (tf_coordinate(0, 2), tf_half_square(2),
               tf_random_cubic(7, 2)):
        assert gamma2_check(D, tf, pts, 0.0).passed


def test_quermassintegrals_disc_lebesgue():
    q = quermassintegrals(cx.disc(1.0, 256), cx.lebesgue(), 0.5)
    assert q.d0 == pytest.approx(math.pi, rel=1e-10)
    assert q.d1 == pytest.approx(2 * math.pi, rel=1e-10)
    assert q.d2 == pytest.approx(2 * math.pi, rel=1e-8)


def test_quermassintegrals_first_variation():
    # d1 equals the t-derivative of mu(K + t*disc) at 0
    K = cx.random_body_2d(5)
    D = cx.gaussian(1.0)
    q = quermassintegrals(K, D, 0.0)
    eps = 1e-5
    ball1 = cx.disc(1.0, K.grid.size)
    vp = weighted_measures(cx.minkowski_sum_support(K, ball1, eps), D).mu
    v0 = weighted_measures(K, D).mu
    assert q.d1 == pytest.approx((vp - v0) / eps, rel=1e-4)


def test_boundary_cd_sphere():
    # boundary CD curvature of a round sphere of radius R is 1/R^2
    for R in (1.0, 2.0):
        rep = boundary_cd(cx.ball(R, 4), cx.lebesgue(), rho=0.0,
                          invN=1.0 / 3)
        assert rep.passed
        assert rep.extra["rho0"] == pytest.approx(1.0 / R ** 2, rel=1e-6)


def test_density_from_spec():
    assert density_from_spec("lebesgue").tag == cx.lebesgue().tag
    g = density_from_spec("gaussian:1")
    x = np.array([[0.3, 0.4]])
    assert g.weight(x) == pytest.approx(math.exp(-0.5 * 0.25))
    with pytest.raises(Exception):
        density_from_spec("bogus:1")
