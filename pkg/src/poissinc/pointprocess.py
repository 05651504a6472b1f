"""Renewal arrival streams ``S_n = X_1 + ... + X_n``."""

from __future__ import annotations

import csv
import math

import numpy as np

from ._numerics import ParameterError, neumaier_prefix
from .distributions import DistributionSpec, sample
from .rng import RngStream

__all__ = ["ArrivalStream", "poisson_arrivals", "count_in", "lpr_floor"]

FIRST_BLOCK = 1 << 8
MAX_BLOCK = 1 << 16


def block_size(b):
    """Length of increment block ``b``: 256, 256, 512, ... capped at 65536."""
    return min(FIRST_BLOCK << max(b - 1, 0), MAX_BLOCK)


class ArrivalStream:
    """Lazily realized arrivals of a renewal process.

    Increments are drawn in blocks of fixed sizes (:func:`block_size`), block
    ``b`` from the child stream ``stream.split(b)``, so the realized prefix depends only on the seed and
    never on how extension requests were chunked. Prefix sums carry a running
    Neumaier compensation term across blocks.

    Parameters
    ----------
    spec : DistributionSpec
        Law of the increments.
    stream : RngStream
        Key of this path.
    """

    def __init__(self, spec, stream):
        self.spec = spec
        self.stream = stream
        self._inc = np.empty(0)
        self._arr = np.empty(0)
        self._sum = 0.0
        self._comp = 0.0
        self._nblocks = 0
        self.length = 0

    @classmethod
    def from_increments(cls, increments):
        """A fixed, fully realized path; it cannot be extended."""
        x = np.asarray(increments, dtype=float)
        if x.ndim != 1 or np.any(x < 0):
            raise ParameterError("increments must be a nonnegative vector")
        self = cls(None, None)
        self._arr, self._sum, self._comp = neumaier_prefix(x, 0.0, 0.0)
        self._inc = x.copy()
        self.length = len(x)
        return self

    def __len__(self):
        return self.length

    @property
    def seed(self):
        return self.stream.key

    @property
    def increments(self):
        return self._inc[:self.length]

    @property
    def arrivals(self):
        return self._arr[:self.length]

    def _grow(self, target):
        incs = [self._inc]
        arrs = [self._arr]
        have = len(self._inc)
        while have < target:
            b = self._nblocks
            x = sample(self.spec, block_size(b), self.stream.split(b))
            self._nblocks += 1
            have += len(x)
            out, s, c = neumaier_prefix(x, self._sum, self._comp)
            self._sum, self._comp = s, c
            incs.append(x)
            arrs.append(out)
        self._inc = np.concatenate(incs)
        self._arr = np.concatenate(arrs)

    def extend(self, up_to):
        """Realize the first ``up_to`` arrivals; earlier ones never change."""
        if up_to < self.length:
            raise ParameterError(
                f"cannot shrink a stream from {self.length} to {up_to}")
        need = up_to - len(self._inc)
        if need > 0 and self.stream is None:
            raise ParameterError(f"fixed path has {len(self._inc)} arrivals, {up_to} requested")
        if need > 0:
            self._grow(up_to)
        self.length = up_to
        return self

    def extend_past(self, t):
        """Realize arrivals until the last one exceeds ``t``."""
        if self.length == 0:
            self.extend(1)
        while self._arr[self.length - 1] <= t:
            if self.length < len(self._arr):
                idx = np.searchsorted(self._arr, t, side="right")
                self.length = min(len(self._arr), max(self.length, idx + 1))
            elif self.stream is None:
                raise ParameterError(f"fixed path ends before {t}")
            else:
                self.extend(self.length + 1)
        return self

    def reciprocals(self, n):
        """``R_k = 1/S_k`` for ``k <= n`` and ``D_k = R_k - R_{k+1}`` for ``k <= n-1``.

        ``D_k`` is evaluated as ``X_{k+1} / (S_k S_{k+1})``, which is the same
        quantity without the cancellation in ``R_k - R_{k+1}``.
        """
        if n > self.length:
            raise ParameterError(f"only {self.length} arrivals realized, need {n}")
        s = self._arr[:n]
        if np.any(s <= 0):
            raise ZeroDivisionError("an arrival equals 0; 1/S_n is undefined")
        r = 1.0 / s
        d = self._inc[1:n] / (s[:-1] * s[1:])
        return r, d

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "S_n"])
            for i, v in enumerate(self.arrivals, 1):
                w.writerow([i, repr(float(v))])

    def __repr__(self):
        return f"ArrivalStream({self.spec}, key={self.seed}, length={self.length})"


def poisson_arrivals(seed, experiment=0, replicate=0, rate=1.0):
    """Arrival stream of a homogeneous Poisson process."""
    return ArrivalStream(DistributionSpec.exponential(rate),
                         RngStream(seed, experiment, replicate))


def count_in(stream, t):
    """Number of arrivals in ``[0, t]``."""
    stream.extend_past(t)
    return int(np.searchsorted(stream.arrivals, t, side="right"))


def lpr_floor(p):
    """Smallest ``n`` at which ``E R_n^p`` is averaged (``ceil(4p) + 1``)."""
    return math.ceil(4 * p) + 1
