"""Quadrature rules shared across modules."""

from functools import lru_cache
import math

import numpy as np
from scipy.special import roots_jacobi, roots_laguerre, roots_genlaguerre


def sphere_volume(d):
    """Surface measure of the unit sphere S^(d-1) in R^d."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_volume(d):
    """Volume omega_d of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


@lru_cache(maxsize=64)
def _sphere_rule(d, order):
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        m = 2 * order
        phi = 2 * np.pi * np.arange(m) / m
        pts = np.column_stack([np.cos(phi), np.sin(phi)])
        return pts, np.full(m, 2 * np.pi / m)
    # polar angle against the first axis, weight (1 - x^2)^((d-3)/2)
    a = (d - 3) / 2
    x, wx = roots_jacobi(order, a, a)
    sub_pts, sub_w = _sphere_rule(d - 1, order)
    s = np.sqrt(1.0 - x * x)
    pts = np.concatenate(
        [np.column_stack([np.full(len(sub_w), xi), si * sub_pts]) for xi, si in zip(x, s)]
    )
    w = np.concatenate([wi * sub_w for wi in wx])
    return pts, w


def sphere_rule(d, order):
    """Product rule on S^(d-1) in R^d.

    Gauss-Jacobi in each polar angle, trapezoid with 2*order points in the
    last azimuth. Exact for polynomials of degree < 2*order restricted to the
    sphere.
    """
    pts, w = _sphere_rule(int(d), int(order))
    return pts.copy(), w.copy()


@lru_cache(maxsize=64)
def _laguerre(order, alpha):
    if alpha == 0:
        return roots_laguerre(order)
    return roots_genlaguerre(order, alpha)


def laguerre_rule(order, alpha=0.0):
    """Nodes and weights for integral_0^inf s^alpha e^(-s) f(s) ds."""
    x, w = _laguerre(int(order), float(alpha))
    return x.copy(), w.copy()
