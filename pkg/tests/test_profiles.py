"""Concavity profiles, second Minkowski inequality, isoperimetric checks."""

import math

import numpy as np
import pytest

import convexlab as cx
from convexlab.errors import (ContainmentViolatedError,
                              DiameterCertificateError, NonPositiveError)
from convexlab.profiles import (concavity_profile, euclidean_quadratic_slack,
                                isoperimetric_checks, minkowski_second,
                                transform_G)


def test_transform_branches():
    v = np.array([0.5, 1.0, 2.0])
    assert np.allclose(transform_G(v, 0.0), np.log(v))
    assert np.allclose(transform_G(v, 0.5), 2.0 * (np.sqrt(v) - 1.0))
    assert np.allclose(transform_G(v, -math.inf), 0.0)
    # near the -inf regime the transform must not blow up for v >= 1,
    # and saturates to -inf (never NaN) for small v
    out = transform_G(np.array([1.0, 2.0, 1e8]), -1e6)
    assert np.all(np.isfinite(out))
    sat = transform_G(np.array([1e-8]), -1e6)
    assert not np.any(np.isnan(sat))
    with pytest.raises(NonPositiveError):
        transform_G(np.array([-1.0]), 0.5)


def test_geodesic_profile_disc_exact():
    # area(disc + t ball) = pi (1+t)^2: sqrt is affine, D2 G = 0
    prof = concavity_profile("geodesic", cx.disc(1.0, 128), cx.lebesgue(),
                             0.5, T=1.0, samples=21)
    assert prof.passed
    assert abs(prof.max_d2G) <= 1e-9


def test_geodesic_profile_gaussian_log_concave():
    for seed in (0, 1, 2):
        prof = concavity_profile("geodesic", cx.random_body_2d(seed),
                                 cx.gaussian(1.0), 0.0, T=1.0, samples=33)
        assert prof.passed, (seed, prof.max_d2G, prof.tol)


def test_euclidean_sum_profile():
    K = cx.random_body_2d(3)
    L = cx.random_body_2d(103)
    prof = concavity_profile("euclidean-sum", K, cx.lebesgue(), 0.5,
                             T=1.5, samples=31, companion=L)
    assert prof.passed
    assert euclidean_quadratic_slack(K, L) >= -1e-10


def test_pnf_profile_matches_euclidean_sum():
    K = cx.random_body_2d(4)
    L = cx.random_body_2d(104)
    D = cx.gaussian(1.0)
    p1 = concavity_profile("euclidean-sum", K, D, 0.0, T=0.6, samples=13,
                           companion=L)
    p2 = concavity_profile("pnf", K, D, 0.0, T=0.6, samples=13, phi=L)
    assert p2.passed and not p2.flag
    assert np.allclose(p1.v, p2.v, rtol=1e-8)


def test_minkowski_second_closed_forms():
    # disc, lebesgue: d1^2 = 2 d0 d2 exactly (4pi^2 each side)
    rep = minkowski_second(cx.disc(1.0, 256), cx.lebesgue(), 0.5)
    assert rep.passed
    assert rep.rhs == pytest.approx(rep.lhs, rel=1e-9)
    # ellipse(2,1): slack = 4pi^2 (a+b)^2/4 - 2 pi ab pi (a+b) ... > 0
    a, b = 2.0, 1.0
    rep = minkowski_second(cx.ellipse(a, b, 256), cx.lebesgue(), 0.5)
    perim = cx.euclidean_size(cx.ellipse(a, b, 256))[1]
    expect = perim ** 2 - 2.0 * (math.pi * a * b) * (2.0 * math.pi)
    assert rep.rhs - rep.lhs == pytest.approx(expect, rel=1e-8)
    # gaussian circle: d1 = pi e^{-1/8} at R = 1/2, d2 = (3/2) d1
    rep = minkowski_second(cx.disc(0.5, 256), cx.gaussian(1.0), 0.0)
    assert rep.extra["d1"] == pytest.approx(math.pi * math.exp(-0.125),
                                            rel=1e-10)
    assert rep.extra["d2"] == pytest.approx(1.5 * rep.extra["d1"],
                                            rel=1e-10)
    assert rep.passed


def test_isoperimetric_nested_discs():
    r, R = 1.0, 2.0
    reps = isoperimetric_checks(cx.disc(r, 256), cx.disc(1.0, 256),
                                cx.disc(R, 256), cx.lebesgue(), 0.5)
    by_id = {rep.inequality_id: rep for rep in reps}
    low = by_id["isoperimetric-lower"]
    assert low.lhs == pytest.approx(math.pi * r * (R - r) / R, rel=1e-10)
    assert low.rhs == pytest.approx(2.0 * math.pi * r, rel=1e-10)
    assert low.passed
    assert by_id["profile-derivative-test"].passed


def test_isoperimetric_guards():
    with pytest.raises(ContainmentViolatedError):
        isoperimetric_checks(cx.disc(2.0, 128), cx.disc(1.0, 128),
                             cx.disc(1.0, 128), cx.lebesgue(), 0.5)
    with pytest.raises(DiameterCertificateError):
        isoperimetric_checks(cx.disc(1.0, 128), cx.disc(1.0, 128),
                             cx.disc(2.0, 128), cx.lebesgue(), 0.5,
                             D_claimed=1.0)   # certified diameter is 4


def test_branch_totality():
    K = cx.random_body_2d(6)
    L = cx.disc(1.0, 256)
    Om = cx.disc(4.0, 256)
    for invN, dens in ((0.5, cx.lebesgue()), (1.0 / 3, cx.lebesgue()),
                       (0.0, cx.gaussian(1.0)), (-1.0, cx.gaussian(1.0)),
                       (-1e6, cx.gaussian(1.0))):
        if invN == 0.5:
            prof = concavity_profile("geodesic", K, dens, invN, T=1.0,
                                     samples=17)
            assert np.all(np.isfinite(prof.G))
        reps = isoperimetric_checks(K, L, Om, dens, invN, samples=21)
        assert all(np.isfinite(r.lhs) and np.isfinite(r.rhs)
                   for r in reps)
        assert all(r.passed for r in reps)
