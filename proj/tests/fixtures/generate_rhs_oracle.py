#!/usr/bin/env python3
"""Symbolic reference values for the manufactured source terms.

Builds f = u_t + v.grad(u) + u div_G(v) - lap_G(u) with sympy, using the
divergence form lap_G(u) = tr(P D(P grad u)) (P = I - nu nu^T, nu extended as
grad d / |grad d|). The C++ code uses the ambient curvature identity instead,
so the two routes are independent.

Usage: python3 generate_rhs_oracle.py  (writes rhs_example1.csv, rhs_example2.csv)
"""
import csv
import math
import os
import random

import sympy as sp

x1, x2, x3, t = sp.symbols("x1 x2 x3 t", real=True)
X = sp.Matrix([x1, x2, x3])


def grad(expr):
    return sp.Matrix([sp.diff(expr, v) for v in (x1, x2, x3)])


def jac(vec):
    return vec.jacobian(X)


def source_term(d, u):
    gd = grad(d)
    nrm2 = (gd.T * gd)[0]
    nu = gd / sp.sqrt(nrm2)
    P = sp.eye(3) - nu * nu.T
    v = -sp.diff(d, t) * gd / nrm2
    gu = grad(u)
    surf_grad_u = P * gu
    lap_g = (P * jac(surf_grad_u)).trace()
    div_g_v = (P * jac(v)).trace()
    return sp.diff(u, t) + (v.T * gu)[0] + u * div_g_v - lap_g


def write(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "x3", "t", "f"])
        for r in rows:
            w.writerow(["%.17g" % c for c in r])


def example1(rng, n=100, time=0.5):
    a = 1 + sp.Rational(1, 4) * sp.sin(t)
    d = x1**2 / a + x2**2 + x3**2 - 1
    u = sp.sin(t) * x1 * x2
    f = sp.lambdify((x1, x2, x3, t), source_term(d, u), "mpmath")
    av = 1 + 0.25 * math.sin(time)
    rows = []
    for _ in range(n):
        # uniform direction on the upper unit hemisphere, stretched in x1
        while True:
            p = [rng.gauss(0, 1) for _ in range(3)]
            r = math.sqrt(sum(c * c for c in p))
            if r > 1e-3:
                break
        p = [c / r for c in p]
        p[2] = abs(p[2])
        q = (p[0] * math.sqrt(av), p[1], p[2])
        rows.append((*q, time, float(f(*q, time))))
    return rows


def example2(rng, n=100, time=0.3):
    a = sp.Rational(1, 10) + sp.Rational(1, 100) * sp.sin(2 * sp.pi * t)
    L = 1 + sp.Rational(3, 10) * sp.sin(4 * sp.pi * t)

    def G(s):
        return sp.Rational(3125, 100) * s * (s - sp.Rational(36, 100)) * (s - sp.Rational(95, 100))

    d = x1**2 / a**2 + G(x2**2) + G(x3**2 / L**2) - 1
    u = sp.cos(sp.pi * t) * x1 * x2 * x3
    f = sp.lambdify((x1, x2, x3, t), source_term(d, u), "mpmath")

    av = 0.1 + 0.01 * math.sin(2 * math.pi * time)
    Lv = 1 + 0.3 * math.sin(4 * math.pi * time)

    def Gn(s):
        return 31.25 * s * (s - 0.36) * (s - 0.95)

    rows = []
    while len(rows) < n:
        y = rng.uniform(-1, 1)
        z = rng.uniform(-Lv, Lv)
        g = Gn(y * y) + Gn(z * z / (Lv * Lv))
        # stay away from the rim where the sheets meet
        if g > 0.9:
            continue
        xa = av * math.sqrt(1 - g) * rng.choice((-1.0, 1.0))
        q = (xa, y, z)
        rows.append((*q, time, float(f(*q, time))))
    return rows


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    rng = random.Random(20240917)
    write(os.path.join(here, "rhs_example1.csv"), example1(rng))
    write(os.path.join(here, "rhs_example2.csv"), example2(rng))


if __name__ == "__main__":
    main()
