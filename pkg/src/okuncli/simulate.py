"""Seeded random numbers and the textbook stochastic processes.

The generator is numpy's PCG64 bit generator, used only for its raw 64-bit
output stream (which numpy keeps stable across releases and platforms).
Uniforms take the top 53 bits; normals use the Box-Muller transform on
consecutive uniform pairs, cosine branch first.  Nothing here depends on
``numpy.random.Generator`` methods, whose streams are not version-stable.
"""

from __future__ import annotations

import math

import numpy as np

from .dataset import Series

ALGORITHM = "pcg64-boxmuller"

_TWO53 = float(2**53)


class Rng:
    """Seeded uniform/normal stream.

    ``fork(i)`` derives an independent stream for parallel experiments from
    the same seed, so results never depend on how work is scheduled.
    """

    algorithm = ALGORITHM

    def __init__(self, seed=0, stream=None):
        self.seed = int(seed)
        self.stream = stream
        if stream is None:
            ss = np.random.SeedSequence(self.seed)
        else:
            ss = np.random.SeedSequence(self.seed, spawn_key=(int(stream),))
        self._bits = np.random.PCG64(ss)

    def __repr__(self):
        extra = "" if self.stream is None else f", stream={self.stream}"
        return f"Rng(seed={self.seed}{extra})"

    def fork(self, stream):
        return Rng(self.seed, stream)

    @property
    def state(self):
        return self._bits.state["state"]

    def uniform(self, n):
        """``n`` draws from U[0, 1)."""
        raw = self._bits.random_raw(n)
        return (raw >> np.uint64(11)).astype(float) / _TWO53

    def normal(self, n):
        """``n`` i.i.d. N(0, 1) draws via Box-Muller."""
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        u1, u2 = u[0::2], u[1::2]
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        angle = 2.0 * math.pi * u2
        z = np.empty(2 * m)
        z[0::2] = radius * np.cos(angle)
        z[1::2] = radius * np.sin(angle)
        return z[:n]


def normal(rng: Rng, T, name="normal") -> Series:
    if T < 1:
        raise ValueError("need at least one observation")
    return Series(name, rng.normal(T))


def uniform(rng: Rng, T, name="uniform") -> Series:
    if T < 1:
        raise ValueError("need at least one observation")
    return Series(name, rng.uniform(T))


def ar_recursion(innovations, phi, intercept=0.0):
    """y[t] = intercept + sum_i phi[i] * y[t-1-i] + innovations[t], zero pre-sample."""
    phi = [float(p) for p in np.atleast_1d(phi)]
    e = np.asarray(innovations, dtype=float).tolist()
    y = [0.0] * len(e)
    p = len(phi)
    for t in range(len(e)):
        acc = intercept
        for i in range(min(p, t)):
            acc += phi[i] * y[t - 1 - i]
        y[t] = acc + e[t]
    return np.array(y)


def ar_path(rng: Rng, T, phi, intercept=0.0, sigma=1.0, name="ar") -> Series:
    """AR(p) path driven by ``sigma``-scaled normal innovations.

    Explosive coefficients are allowed; ``is_explosive`` reports them.
    """
    if T < 1:
        raise ValueError("need at least one observation")
    e = sigma * rng.normal(T)
    return Series(name, ar_recursion(e, phi, intercept))


def is_explosive(phi):
    """True when the AR polynomial has a root on or inside the unit circle."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if phi.size == 0:
        return False
    roots = np.roots(np.r_[1.0, -phi][::-1])
    return bool(np.any(np.abs(roots) <= 1.0 + 1e-12))


def random_walk(rng: Rng, T, drift=0.0, sigma=1.0, name="rw") -> Series:
    """Y_t = drift + Y_{t-1} + e_t with Y_0 = 0."""
    if T < 1:
        raise ValueError("need at least one observation")
    e = (sigma * rng.normal(T)).tolist()
    y = [0.0] * T
    prev = 0.0
    for t in range(T):
        prev = drift + prev + e[t]
        y[t] = prev
    return Series(name, np.array(y))
