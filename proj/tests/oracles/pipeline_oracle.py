#!/usr/bin/env python3
"""Brute-force check of `cvmdi keyrate --json` against an independent pipeline.

Z4 comes from truncated Fock sums at 40 digits, the excess noise from the full
(unsimplified) gain-mismatch expression, and the symplectic spectrum from the
eigenvalues of Omega*gamma. Nothing here reuses the closed forms in the C++ code.

usage: pipeline_oracle.py <path-to-cvmdi>
"""
import json
import subprocess
import sys

import mpmath as mp
import numpy as np

mp.mp.dps = 40
CUTOFF = 80


def four_state_z(alpha_sq):
    a = mp.sqrt(mp.mpf(alpha_sq))
    # |Psi> = sum_k sqrt(w_k) |phi_k>|phi_k>, phi_k supported on m = k (mod 4)
    # with coefficients (-1)^j a^m / sqrt(m!), m = 4j + k, normalized per class.
    amps = [a**m / mp.sqrt(mp.factorial(m)) for m in range(CUTOFF + 1)]
    weight = [mp.mpf(0)] * 4
    for m in range(CUTOFF + 1):
        weight[m % 4] += amps[m] ** 2
    total = sum(weight)
    phi = [(-1 if (m // 4) % 2 else 1) * amps[m] / mp.sqrt(weight[m % 4]) for m in range(CUTOFF + 1)]

    def coeff(m, n):
        if m % 4 != n % 4:
            return mp.mpf(0)
        return mp.sqrt(weight[m % 4] / total) * phi[m] * phi[n]

    n_mean = mp.mpf(0)
    a1a2 = mp.mpf(0)
    for m in range(CUTOFF + 1):
        for n in range(m % 4, CUTOFF + 1, 4):
            cmn = coeff(m, n)
            n_mean += cmn**2 * m
            if m < CUTOFF and n < CUTOFF:
                a1a2 += cmn * coeff(m + 1, n + 1) * mp.sqrt((m + 1) * (n + 1))
    return 1 + 2 * n_mean, 2 * a1a2


def g_entropy(x):
    x = mp.mpf(x)
    if x <= 0:
        return mp.mpf(0)
    return (x + 1) * mp.log(x + 1, 2) - x * mp.log(x, 2)


def symplectic(gamma):
    omega = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)
    ev = np.sort(np.abs(np.linalg.eigvals(omega @ gamma).imag))
    return ev[3], ev[1]


def key_rate(scheme, vmod, lac, lbc, eps_a, eps_b, beta):
    vmod = mp.mpf(vmod)
    v = 1 + vmod
    if scheme == "four-state":
        x, z = four_state_z(vmod / 2)
    else:
        x, z = v, mp.sqrt(v * v - 1)
    eta_a = mp.mpf(10) ** (-mp.mpf("0.02") * lac)
    eta_b = mp.mpf(10) ** (-mp.mpf("0.02") * lbc)
    g2 = 2 * (v - 1) / (eta_b * (v + 1))
    chi_a = 1 / eta_a - 1 + eps_a
    chi_b = 1 / eta_b - 1 + eps_b
    mismatch = mp.sqrt(2 / (eta_b * g2)) * mp.sqrt(v - 1) - mp.sqrt(v + 1)
    eps = 1 + chi_a + eta_b / eta_a * (chi_b - 1) + eta_b / eta_a * mismatch**2
    eta = eta_a * g2 / 2
    chi = 1 / eta - 1 + eps
    a, b, c = x, eta * (x + chi), mp.sqrt(eta) * z
    i_ab = mp.log((a + 1) / (a + 1 - c * c / (b + 1)), 2)
    gamma = np.array([[a, 0, c, 0], [0, a, 0, -c], [c, 0, b, 0], [0, -c, 0, b]], dtype=float)
    k1, k2 = symplectic(gamma)
    k3 = a - c * c / (b + 1)
    chi_be = g_entropy((k1 - 1) / 2) + g_entropy((k2 - 1) / 2) - g_entropy((k3 - 1) / 2)
    return {"i_ab": float(i_ab), "chi_be": float(chi_be), "key_rate": float(beta * i_ab - chi_be)}


CASES = [
    ("four-state", 0.4, 0, 0, 0.0, 0.0, 0.9),
    ("four-state", 0.4, 20, 0, 0.002, 0.002, 0.9),
    ("four-state", 0.3, 12, 3, 0.002, 0.004, 0.95),
    ("gaussian", 40, 20, 0, 0.002, 0.002, 0.9),
    ("gaussian", 10, 5, 1, 0.003, 0.001, 0.92),
]


def main():
    exe = sys.argv[1]
    bad = 0
    for scheme, vmod, lac, lbc, ea, eb, beta in CASES:
        out = subprocess.run(
            [exe, "keyrate", "--json", "--scheme", scheme, "--vmod", str(vmod), "--lac", str(lac),
             "--lbc", str(lbc), "--eps-a", str(ea), "--eps-b", str(eb), "--beta", str(beta)],
            check=True, capture_output=True, text=True).stdout
        got = json.loads(out)
        want = key_rate(scheme, vmod, lac, lbc, ea, eb, beta)
        for key, ref in want.items():
            # the CLI prints 9 significant digits
            ok = abs(got[key] - ref) <= 5e-9 * max(abs(ref), 1e-3)
            bad += not ok
            print(f"{'ok ' if ok else 'BAD'} {scheme:10s} vm={vmod:<4} L={lac}/{lbc} {key:8s} "
                  f"cli={got[key]:.9g} oracle={ref:.9g}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
