"""Regenerate ``oracle_values.json`` with mpmath/sympy (independent of the package).

    python tests/data/make_oracles.py

Nothing here imports ``khavinson``: closed forms come from sympy and the
constants from 30-digit mpmath quadrature of the one-dimensional
representation, written out from scratch.
"""

import json
import os

import mpmath as mp
import sympy as sp

mp.mp.dps = 30
OUT = os.path.join(os.path.dirname(__file__), "oracle_values.json")


def closed_forms():
    n = sp.Symbol("n", positive=True)
    w = sp.Symbol("w")
    out = {}
    out["rational_integral"] = float(sp.integrate(w**2 * (1 - w**2) / (1 + w**2) ** 3, (w, 0, 1)))
    out["c_zero"] = {
        str(k): float(2 / sp.sqrt(sp.pi) * sp.gamma(sp.Rational(k + 2, 2)) / sp.gamma(sp.Rational(k + 1, 2)))
        for k in range(2, 9)
    }
    out["halfspace_radial"] = {
        str(k): float(4 / sp.sqrt(sp.pi) * sp.Integer(k - 1) ** sp.Rational(k - 1, 2)
                      / sp.Integer(k) ** sp.Rational(k, 2)
                      * sp.gamma(sp.Rational(k, 2)) / sp.gamma(sp.Rational(k - 1, 2)))
        for k in range(3, 9)
    }
    t = sp.Symbol("t")
    out["t_moment0"] = {str(k): float(sp.integrate((1 - t**2) ** sp.Rational(k - 4, 2), (t, 0, 1)))
                        for k in range(3, 9)}
    out["t_moment2"] = {str(k): float(sp.integrate(t**2 * (1 - t**2) ** sp.Rational(k - 4, 2), (t, 0, 1)))
                        for k in range(3, 9)}
    out["p_rho0_at_zero"] = {str(k): float(sp.Rational(k, 2**k * (k - 1))) for k in range(3, 9)}
    return out


def _params(n, rho):
    a = mp.mpf(n - 2) * rho / n
    b = (n - (n - 2) * rho) / mp.mpf(2)
    k = (1 - rho) / (1 + rho)
    return a, b, k


def p_rho(z, n, rho):
    a, b, k = _params(n, rho)
    Z = (z + mp.sqrt(z * z + 1 - a * a)) / (1 - a)
    f = lambda w: (n - b + n * z * w - b * w * w) * w ** (n - 2) / (
        (1 + w * w) ** (mp.mpf(n) / 2 + 1) * (1 + k * k * w * w) ** (mp.mpf(n) / 2 - 1))
    return mp.quad(f, [0, Z])


def constant(n, rho, tau):
    """C(rho e1; ell_tau) from the one-dimensional representation."""
    rho = mp.mpf(rho)
    lead = 2 ** (n - 1) / (1 + rho) ** (n - 1)
    if tau == "pi/2":
        _, _, k = _params(n, rho)
        f = lambda w: w ** (n - 1) / ((1 + w * w) ** (mp.mpf(n) / 2 + 1) * (1 + k * k * w * w) ** (mp.mpf(n) / 2 - 1))
        return 2 * n / mp.pi * lead * mp.quad(f, [0, 1, mp.inf])
    tau = mp.mpf(tau)
    if tau == 0:
        return 4 / mp.sqrt(mp.pi) * mp.gamma(mp.mpf(n) / 2) / mp.gamma(mp.mpf(n - 1) / 2) * lead * p_rho(0, n, rho)
    g = mp.tan(tau)
    area = lambda m: 2 * mp.pi ** (mp.mpf(m) / 2) / mp.gamma(mp.mpf(m) / 2) if m > 1 else mp.mpf(2)
    ratio = area(n - 2) / area(n)
    inner = mp.quad(lambda t: (p_rho(g * t, n, rho) + p_rho(-g * t, n, rho)) * (1 - t * t) ** (mp.mpf(n - 4) / 2), [0, 1])
    return 4 * ratio * lead / mp.sqrt(1 + g * g) * inner


CONSTANT_POINTS = [
    (3, 0.5, 0.7), (3, 0.9, 0.3), (3, 0.99, 1.2), (3, 0.25, "pi/2"), (3, 0.7, 0.0),
    (4, 0.3, 0.5), (4, 0.9, "pi/2"), (4, 0.999, 0.1), (5, 0.6, 1.0), (6, 0.8, 0.0),
]

HYP_POINTS = [
    (0.5, 1.5, 2.5, 0.3), (-2.7, 0.4, 1.1, -0.8), (2.2, 3.1, 4.0, 0.85), (1.0, 1.0, 2.0, -0.5),
    (0.25, 0.75, 1.5, 0.6), (-1.0, 2.0, 3.0, 0.9), (3.5, 0.3, 0.9, -0.2),
]


def main():
    data = {"closed_forms": closed_forms()}
    data["constants"] = [
        {"n": n, "rho": r, "tau": t, "value": float(constant(n, r, t))} for n, r, t in CONSTANT_POINTS
    ]
    data["hyp2f1"] = [{"a": a, "b": b, "c": c, "z": z, "value": float(mp.hyp2f1(a, b, c, z))}
                      for a, b, c, z in HYP_POINTS]
    data["p_rho"] = [{"n": n, "rho": r, "z": z, "value": float(p_rho(mp.mpf(z), n, mp.mpf(r)))}
                     for n, r, z in [(3, 0.5, 0.0), (3, 0.5, -2.0), (4, 0.9, 3.0), (7, 0.2, 0.5)]]
    with open(OUT, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
