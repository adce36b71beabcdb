"""Shared high-precision oracles for the test suite.

The oracle evaluates the characteristic function from its definition
using mpmath at 60 decimal digits, entirely independently of the
package's own evaluation path (power series for the entire kernels is
replaced by mpmath's arbitrary-precision cos/sin of a square root).
"""

import mpmath as mp

mp.mp.dps = 60


def oracle_kernels(z):
    """cos(sqrt(z)) and sin(sqrt(z))/sqrt(z) at 60 digits."""
    z = mp.mpc(z)
    if z == 0:
        return mp.mpf(1), mp.mpf(1)
    w = mp.sqrt(z)
    return mp.cos(w), mp.sin(w) / w


def oracle_F_pm(k, gamma, sign):
    k = mp.mpc(k)
    gamma = mp.mpf(gamma)
    z = k * k + sign * 1j * gamma
    c, s = oracle_kernels(z)
    return 2j * k * c - (2 * k * k + sign * 1j * gamma) * s


def oracle_F0(k, gamma):
    k = mp.mpc(k)
    gamma = mp.mpf(gamma)
    _, sm = oracle_kernels(k * k - 1j * gamma)
    _, sp = oracle_kernels(k * k + 1j * gamma)
    return gamma**2 * sm * sp


def oracle_F(k, gamma, ell):
    k = mp.mpc(k)
    return (oracle_F_pm(k, gamma, -1) * oracle_F_pm(k, gamma, +1)
            - mp.exp(-4j * k * mp.mpf(ell)) * oracle_F0(k, gamma))


def to_complex(x):
    return complex(float(mp.re(x)), float(mp.im(x)))
