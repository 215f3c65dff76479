"""Regenerate frozen.json: reference values computed without the library's solvers.

Run from the repository root:  python3 tests/oracles/make_oracles.py
"""

import json
import math
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy import integrate

mp.mp.dps = 40
HERE = Path(__file__).parent


# method of fundamental solutions with a Ritz (Galerkin) reduction ----------


def star_curve(coeffs, theta):
    r = 1.0 + sum(a * np.cos(k * theta) + b * np.sin(k * theta) for k, a, b in coeffs)
    dr = sum(-k * a * np.sin(k * theta) + k * b * np.cos(k * theta) for k, a, b in coeffs)
    z = r * np.exp(1j * theta)
    dz = (dr + 1j * r) * np.exp(1j * theta)
    return z, dz


def mfs_steklov(coeffs, sources=80, scale=1.5, nodes=2048, count=20):
    th = 2 * np.pi * np.arange(nodes) / nodes
    z, dz = star_curve(coeffs, th)
    w = np.abs(dz) * 2 * np.pi / nodes
    src = star_curve(coeffs, 2 * np.pi * np.arange(sources) / sources)[0] * scale
    normal = -1j * dz / np.abs(dz)
    d = z[:, None] - src[None, :]
    V = np.hstack([np.log(np.abs(d)), np.ones((nodes, 1))])
    Dn = np.hstack([np.real(np.conj(d) * normal[:, None]) / np.abs(d) ** 2, np.zeros((nodes, 1))])
    _, S, Wt = np.linalg.svd(np.sqrt(w)[:, None] * V, full_matrices=False)
    keep = S > 1e-13 * S[0]
    C = Wt[keep].T / S[keep]
    A = C.T @ (V.T @ (w[:, None] * Dn)) @ C
    return np.linalg.eigvalsh(0.5 * (A + A.T))[:count].tolist()


# annulus: roots of the 2x2 boundary determinant -----------------------------


def annulus_levels(rho, kmax=6, lam_max=12.0):
    rho = mp.mpf(rho)
    out = []
    for k in range(kmax + 1):
        def det(lam):
            if k == 0:
                # u = a + b log r; outer: b = lam a; inner: -b / rho = lam (a + b log rho)
                return -1 / rho * lam - lam * (1 + lam * mp.log(rho))
            # u = a r^k + b r^-k
            m11 = k - lam
            m12 = -k - lam
            m21 = -k * rho ** (k - 1) - lam * rho**k
            m22 = k * rho ** (-k - 1) - lam * rho ** (-k)
            return m11 * m22 - m12 * m21

        grid = [mp.mpf(lam_max) * i / 4000 for i in range(4001)]
        vals = [det(g) for g in grid]
        for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
            if fa == 0:
                out.append((k, float(a)))
            elif fa * fb < 0:
                out.append((k, float(mp.findroot(det, (a, b), solver="anderson"))))
    return out


# traces summed in extended precision ------------------------------------------


def disk_trace(t, K=40000):
    t = mp.mpf(t)
    return float(1 + 2 * mp.fsum(mp.exp(-k * t) for k in range(1, K)))


def ball2_trace(t, L=20000):
    t = mp.mpf(t)
    return float(mp.fsum((2 * l + 1) * mp.exp(-l * t) for l in range(L)))


# Dirichlet energy of a harmonic extension by 2-D quadrature -----------------------


def disk_energy():
    # u = r cos(theta) + 0.5 r^2 sin(2 theta); |grad u|^2 = u_r^2 + u_theta^2 / r^2
    def f(r, th):
        ur = math.cos(th) + r * math.sin(2 * th)
        ut = -r * math.sin(th) + r * r * math.cos(2 * th)
        return (ur * ur + (ut / r) ** 2) * r

    val, _ = integrate.dblquad(f, 0, 2 * math.pi, 0, 1, epsabs=1e-13, epsrel=1e-13)
    return val


def main():
    doc = {
        "mfs_star_3": {"coeffs": [[3, 0.1, 0.0]], "eigenvalues": mfs_steklov([(3, 0.1, 0.0)])},
        "mfs_star_2_5": {
            "coeffs": [[2, 0.15, 0.0], [5, 0.0, 0.03]],
            "eigenvalues": mfs_steklov([(2, 0.15, 0.0), (5, 0.0, 0.03)]),
        },
        "annulus_half": {"rho": 0.5, "levels": annulus_levels(0.5)},
        "disk_trace": {str(t): disk_trace(t) for t in (0.01, 0.1, 1.0)},
        "ball2_trace": {str(t): ball2_trace(t) for t in (0.01, 0.1, 1.0)},
        "disk_energy_cos1_halfsin2": disk_energy(),
    }
    (HERE / "frozen.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
