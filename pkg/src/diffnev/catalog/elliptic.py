"""Complete elliptic integral, Jacobi sn/cn/dn and Weierstrass p.

K is computed with the arithmetic-geometric mean, real-argument Jacobi
functions by descending Landen transformation, complex arguments through the
Jacobi imaginary transformation, and p by its nome expansion after reducing
z into the fundamental cell.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def agm(a: float, b: float) -> float:
    for _ in range(64):
        if abs(a - b) <= 1e-16 * abs(a):
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind with modulus k (not parameter)."""
    k = float(k)
    if not 0.0 <= k < 1.0:
        raise ValueError(f"elliptic_K: modulus must satisfy 0 <= k < 1, got {k}")
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


@lru_cache(maxsize=64)
def _landen(k: float):
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    a, b, c = [1.0], [kp], [k]
    while abs(c[-1]) > 1e-17 and len(a) < 40:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(math.sqrt(an * bn))
        c.append(0.5 * (an - bn))
    return np.array(a), np.array(c)


def sncndn_real(x, k: float):
    """sn, cn, dn for real x (array) and 0 <= k < 1."""
    x = np.asarray(x, dtype=float)
    if k == 0.0:
        return np.sin(x), np.cos(x), np.ones_like(x)
    K = elliptic_K(k)
    x = x - 4.0 * K * np.round(x / (4.0 * K))
    a, c = _landen(k)
    n = len(a) - 1
    phi = (2.0 ** n) * a[n] * x
    prev = phi
    for j in range(n, 0, -1):
        prev = phi
        phi = 0.5 * (phi + np.arcsin(np.clip(c[j] / a[j] * np.sin(phi), -1.0, 1.0)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    if n == 0:
        dn = np.sqrt(1.0 - (k * sn) ** 2)
    else:
        dn = cn / np.cos(prev - phi)
    return sn, cn, dn


def sncndn(z, k: float):
    """sn, cn, dn for complex z; poles come back as inf."""
    z = np.asarray(z, dtype=complex)
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    s, c, d = sncndn_real(z.real, k)
    s1, c1, d1 = sncndn_real(z.imag, kp)
    den = c1 * c1 + (k * s * s1) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        sn = (s * d1 + 1j * c * d * s1 * c1) / den
        cn = (c * c1 - 1j * s * d * s1 * d1) / den
        dn = (d * c1 * d1 - 1j * k * k * s * c * s1) / den
    bad = den == 0
    if np.any(bad):
        sn = np.where(bad, np.inf, sn)
        cn = np.where(bad, np.inf, cn)
        dn = np.where(bad, np.inf, dn)
    return sn, cn, dn


def sn(z, k: float):
    return sncndn(z, k)[0]


def sn_periods(k: float):
    """(K, K') and the period lattice basis (4K, 2iK')."""
    K = elliptic_K(k)
    Kp = elliptic_K(math.sqrt((1.0 - k) * (1.0 + k)))
    return K, Kp


# --- Weierstrass p ----------------------------------------------------------

def reduce_basis(W1: complex, W2: complex):
    """Gauss-reduce a lattice basis so that |W1| <= |W2| and Im(W2/W1) > 0."""
    W1, W2 = complex(W1), complex(W2)
    for _ in range(100):
        if abs(W2) < abs(W1):
            W1, W2 = W2, W1
        m = round((W2 / W1).real)
        if m == 0:
            break
        W2 = W2 - m * W1
    if (W2 / W1).imag < 0:
        W2 = -W2
    return W1, W2


def _horner(coef, x):
    # sum_{n>=1} coef[n-1] x^n
    acc = np.zeros_like(x)
    for c in coef[::-1]:
        acc = (acc + c) * x
    return acc


def _cos_series(coef, E):
    return 0.5 * (_horner(coef, E) + _horner(coef, 1.0 / E))


def _sin_series(coef, E):
    return -0.5j * (_horner(coef, E) - _horner(coef, 1.0 / E))


class WeierstrassLattice:
    """Precomputed nome data for p with periods 2*w1, 2*w2."""

    def __init__(self, w1: complex, w2: complex):
        self.w1, self.w2 = complex(w1), complex(w2)
        self.W1, self.W2 = reduce_basis(2 * self.w1, 2 * self.w2)
        om = self.W1 / 2.0
        tau = self.W2 / self.W1
        self.om = om
        absq = math.exp(-math.pi * tau.imag)
        nterms = int(math.ceil(math.log(1e-18) / math.log(absq))) + 2
        q2 = np.exp(2j * np.pi * tau * np.arange(1, nterms + 1))
        n = np.arange(1, nterms + 1)
        self._n = n
        self._wn = n * q2 / (1.0 - q2)
        self._scale = (np.pi / (2.0 * om)) ** 2
        self._const = self._scale * (1.0 - 24.0 * np.sum(self._wn)) / 3.0
        M = np.array([[self.W1.real, self.W2.real], [self.W1.imag, self.W2.imag]])
        self._Minv = np.linalg.inv(M)
        self.e1 = complex(self.p(self.W1 / 2))
        self.e2 = complex(self.p((self.W1 + self.W2) / 2))
        self.e3 = complex(self.p(self.W2 / 2))
        self.g2 = 2.0 * (self.e1 ** 2 + self.e2 ** 2 + self.e3 ** 2)
        self.g3 = 4.0 * self.e1 * self.e2 * self.e3

    def reduce(self, z):
        """Return (z reduced into the centred fundamental cell, lattice translation)."""
        z = np.asarray(z, dtype=complex)
        st = np.tensordot(self._Minv, np.stack([z.real, z.imag]), axes=1)
        m = np.round(st)
        shift = m[0] * self.W1 + m[1] * self.W2
        return z - shift, shift

    def p(self, z):
        u, _ = self.reduce(z)
        arg = np.pi * u / (2.0 * self.om)
        with np.errstate(divide="ignore", invalid="ignore"):
            csc2 = 1.0 / np.sin(arg) ** 2
        series = _cos_series(self._wn, np.exp(1j * np.pi * u / self.om))
        out = -self._const + self._scale * csc2 - 8.0 * self._scale * series
        return np.where(u == 0, np.inf, out)

    def dp(self, z):
        u, _ = self.reduce(z)
        arg = np.pi * u / (2.0 * self.om)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.sin(arg)
            term = -2.0 * np.cos(arg) / s ** 3 * (np.pi / (2.0 * self.om))
        series = _sin_series(self._wn * self._n, np.exp(1j * np.pi * u / self.om))
        out = self._scale * term + 8.0 * self._scale * (np.pi / self.om) * series
        return np.where(u == 0, np.inf, out)


@lru_cache(maxsize=64)
def weierstrass_lattice(w1: complex, w2: complex) -> WeierstrassLattice:
    return WeierstrassLattice(w1, w2)
