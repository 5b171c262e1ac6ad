"""Support-function geometry: closed forms, Minkowski sums, meshes."""

import math

import numpy as np
import pytest

import convexlab as cx
from convexlab.bodies import fourier_eval, make_body, mixed_area
from convexlab.errors import NonConvexError


def test_disc_closed_forms():
    K = cx.disc(2.0, 256)
    area, perim = cx.euclidean_size(K)
    assert area == pytest.approx(4.0 * math.pi, rel=1e-12)
    assert perim == pytest.approx(4.0 * math.pi, rel=1e-12)
    mesh = K.mesh()
    assert np.allclose(mesh.kappa, 0.5, atol=1e-12)
    assert np.allclose(np.linalg.norm(mesh.points, axis=1), 2.0, atol=1e-12)


def test_ellipse_area_perimeter():
    a, b = 1.5, 0.7
    K = cx.ellipse(a, b, 256)
    area, perim = cx.euclidean_size(K)
    assert area == pytest.approx(math.pi * a * b, rel=1e-10)
    # Gauss-Kummer series for the ellipse perimeter
    h = ((a - b) / (a + b)) ** 2
    s, term = 1.0, 1.0
    for n in range(1, 40):
        c = math.comb(2 * n, n) / (4 ** n * (2 * n - 1))
        term = c * c * h ** n
        s += term
    assert perim == pytest.approx(math.pi * (a + b) * s, rel=1e-10)


def test_ball_and_ellipsoid_size():
    B = cx.ball(1.0, 4)
    vol, surf = cx.euclidean_size(B)
    assert vol == pytest.approx(4.0 * math.pi / 3.0, rel=1e-6)
    assert surf == pytest.approx(4.0 * math.pi, rel=1e-6)
    E = cx.ellipsoid(1.2, 1.0, 0.9, 4)
    vol, _ = cx.euclidean_size(E)
    assert vol == pytest.approx(4.0 * math.pi / 3.0 * 1.2 * 0.9, rel=1e-5)


def test_minkowski_sum_support_adds():
    K = cx.disc(1.0, 128)
    L = cx.ellipse(1.3, 0.8, 128)
    S = cx.minkowski_sum_support(K, L, 0.5)
    assert np.allclose(S.h, K.h + 0.5 * L.h, atol=1e-14)
    # sum of discs is a disc
    S2 = cx.minkowski_sum_support(cx.disc(1.0, 128), cx.disc(2.0, 128), 1.0)
    assert np.allclose(S2.h, 3.0, atol=1e-14)


def test_mixed_area_bilinear_symmetric():
    K = cx.random_body_2d(1)
    L = cx.random_body_2d(2)
    assert mixed_area(K, L) == pytest.approx(mixed_area(L, K), rel=1e-12)
    # A(K+L) = A(K) + 2A(K,L) + A(L)
    S = cx.minkowski_sum_support(K, L, 1.0)
    lhs = mixed_area(S, S)
    rhs = mixed_area(K, K) + 2.0 * mixed_area(K, L) + mixed_area(L, L)
    assert lhs == pytest.approx(rhs, rel=1e-11)
    assert mixed_area(K, K) == pytest.approx(cx.euclidean_size(K)[0],
                                             rel=1e-11)


def test_random_bodies_strictly_convex():
    for seed in range(20):
        K = cx.random_body_2d(seed)
        assert np.min(K.mesh().kappa) > 0
    for seed in range(3):
        B = cx.random_body_3d(seed, level=3)
        assert np.min(B.mesh().min_principal) > 0


def test_nonconvex_support_rejected():
    grid = cx.angle_grid(128)
    with pytest.raises(NonConvexError):
        cx.SupportBody(grid, 1.0 + 0.5 * np.cos(4 * grid.thetas))


def test_make_body_grammar():
    assert make_body("disc:1.5", M=64).dimension == 2
    assert make_body("ellipse:2,1", M=64).dimension == 2
    assert make_body("ball:1", level=3).dimension == 3
    assert make_body("ellipsoid:1.2,1,0.9", level=3).dimension == 3
    K = make_body("random:seed=7,amp=0.1", M=64)
    assert K.dimension == 2 and K.grid.size == 64
    with pytest.raises(Exception):
        make_body("pentagon:1")


def test_fourier_eval_roundtrip():
    grid = cx.angle_grid(64)
    vals = np.cos(3 * grid.thetas) + 0.5 * np.sin(grid.thetas)
    out = fourier_eval(vals, grid.thetas + 2 * math.pi)
    assert np.allclose(out, vals, atol=1e-12)
    dv = fourier_eval(vals, grid.thetas, order=1)
    assert np.allclose(dv, -3 * np.sin(3 * grid.thetas)
                       + 0.5 * np.cos(grid.thetas), atol=1e-10)


def test_icosphere_partition_of_sphere():
    mesh = cx.ball(1.0, 3).mesh()
    assert np.sum(mesh.w_sph) == pytest.approx(4.0 * math.pi, rel=1e-12)
    assert np.allclose(np.linalg.norm(mesh.normals, axis=1), 1.0,
                       atol=1e-12)
