#!/usr/bin/env python3
"""Regularity profile of the squared distance from an ellipse along its
major axis.

Inside the open segment |x| < (a^2 - b^2)/a the one-sided slopes along the
incoming normal geodesic disagree (two nearest feet); at the segment
endpoint the slopes merge but the one-sided second differences still
disagree (1 outside vs -b^2/(a^2-b^2) inside).
"""
import argparse

import numpy as np

from cutloci import cutengine
from cutloci import manifolds as mf
from cutloci import submanifolds as sm


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--a", type=float, default=2.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=12)
    args = ap.parse_args()

    e2 = mf.parse_manifold("euclidean:2")
    el = sm.Ellipse(e2, args.a, args.b)
    cusp = el.cusp
    print(f"ellipse a={args.a} b={args.b}; segment endpoint x = {cusp:.6f}")
    print(f"{'x':>8} {'d(N,q)':>12} {'mult':>5} {'left slope':>12} {'right slope':>12} {'gap':>10}")
    for x in np.linspace(0.05 * cusp, 0.95 * cusp, args.steps):
        q = mf.point(e2, [x, 0.0])
        ms = el.dist_to(q)
        u = (q.coords - ms.minimizers[0].coords) / ms.distance
        pr = cutengine.onesided_derivative_probe(el, q, u)
        print(
            f"{x:8.4f} {ms.distance:12.8f} {ms.multiplicity:5d} "
            f"{pr.left_slope:12.6f} {pr.right_slope:12.6f} {pr.slope_gap:10.6f}"
        )
    p0 = mf.point(e2, [cusp, 0.0])
    pr = cutengine.onesided_derivative_probe(el, p0, np.array([1.0, 0.0]))
    expected_left = -args.b ** 2 / (args.a ** 2 - args.b ** 2)
    print(f"\nendpoint ({cusp:.4f}, 0): slopes {pr.left_slope:.8f} / {pr.right_slope:.8f}")
    print(f"second differences: left {pr.left_quad:.6f} (expect {expected_left:.6f}), "
          f"right {pr.right_quad:.6f} (expect 1)")


if __name__ == "__main__":
    main()
