"""Seeded test-problem generators.

Random streams come from xoshiro256** seeded through splitmix64, both
defined by a handful of 64-bit shifts, rotations and multiplications, so
any port reproduces the same numbers bit for bit.  Normal variates use the
Box-Muller transform and are consumed in pairs: ``cos`` branch first, then
``sin``.
"""

from __future__ import annotations

import math

import numpy as np

from .ratfun import RationalFunction

MASK = (1 << 64) - 1


def splitmix64(x):
    """One splitmix64 step; returns ``(new_state, output)``."""
    x = (x + 0x9E3779B97F4A7C15) & MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return x, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro256:
    def __init__(self, seed=0):
        x = int(seed) & MASK
        s = []
        for _ in range(4):
            x, z = splitmix64(x)
            s.append(z)
        self.s = s
        self._spare = None

    def next_u64(self):
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK, 7) * 9) & MASK
        t = (s1 << 17) & MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def uniform(self):
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def normal(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normals(self, count):
        return np.array([self.normal() for _ in range(count)])

    def complex_normal(self):
        re = self.normal()
        return complex(re, self.normal())

    def split(self):
        """Independent child stream seeded from this one."""
        return Xoshiro256(self.next_u64())


def derive_seed(seed, stream):
    """Seed for sub-stream number ``stream`` of a base seed."""
    x = (int(seed) + (int(stream) + 1) * 0x9E3779B97F4A7C15) & MASK
    return splitmix64(x)[1]


def gen_grcar(n, k=3):
    """Toeplitz matrix: -1 on the subdiagonal, 1 on the diagonal and ``k`` superdiagonals."""
    if n < 5:
        raise ValueError("grcar matrices need n >= 5")
    A = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    A[idx[1:], idx[:-1]] = -1.0
    for d in range(k + 1):
        A[idx[: n - d], idx[d:]] = 1.0
    return A


def gen_randn_shift(n, shift, seed):
    """Real standard-normal ``n x n`` matrix plus ``shift * I`` (row-major fill)."""
    rng = Xoshiro256(seed)
    A = rng.normals(n * n).reshape(n, n).astype(complex)
    return A + complex(shift) * np.eye(n)


def gen_random_vector(n, seed, normalize=True):
    b = Xoshiro256(seed).normals(n).astype(complex)
    return b / np.linalg.norm(b) if normalize else b


def gen_random_rational(degD, degN, seed):
    """``delta prod(z - s_i) / (gamma prod(z - r_j))`` with complex normal factors.

    Draw order: gamma, r_1..r_J, delta, s_1..s_L, each as (re, im).
    """
    if degD < 1:
        raise ValueError("degD must be at least 1")
    if degN < 0:
        raise ValueError("degN must be nonnegative")
    rng = Xoshiro256(seed)
    gamma = rng.complex_normal()
    poles = [rng.complex_normal() for _ in range(degD)]
    delta = rng.complex_normal()
    zeros = [rng.complex_normal() for _ in range(degN)]
    return RationalFunction.from_factors(gamma, poles, delta, zeros)
