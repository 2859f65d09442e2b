#!/usr/bin/env python3
"""Regenerate the 30-direction gradient table used by the phantom.

Minimizes antipodally symmetric electrostatic energy (each direction repels
both copies of every other direction) and prints the result folded onto the
z >= 0 hemisphere as a C++ initializer list.
"""
import numpy as np
from scipy.optimize import minimize

N = 30


def to_xyz(p):
    th, ph = p[:N], p[N:]
    return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], 1)


def energy(p):
    u = to_xyz(p)
    e = 0.0
    for i in range(N):
        d1 = np.linalg.norm(u[i] - u[i + 1:], axis=1)
        d2 = np.linalg.norm(u[i] + u[i + 1:], axis=1)
        e += np.sum(1.0 / d1) + np.sum(1.0 / d2)
    return e


best = None
for seed in range(8):
    rng = np.random.default_rng(seed)
    x0 = np.r_[np.arccos(rng.uniform(0, 1, N)), rng.uniform(0, 2 * np.pi, N)]
    r = minimize(energy, x0, method="BFGS", options={"gtol": 1e-12, "maxiter": 20000})
    if best is None or r.fun < best.fun:
        best = r

u = to_xyz(best.x)
u[u[:, 2] < 0] *= -1
u /= np.linalg.norm(u, axis=1)[:, None]
print(f"// energy = {best.fun:.12f}")
for v in u:
    print(f"    {{{v[0]:.17f}, {v[1]:.17f}, {v[2]:.17f}}},")
