"""Finite sample models of the disorder configuration space and its shift action.

The configuration space is materialized as a finite list of base samples; shifts
produce lazily-extended views, so coefficient functions can be evaluated on the
whole shift orbit of every listed sample.  Site values come from a counter-based
hash (splitmix64), so any site of any sample is computable on demand and two
runs with the same seed agree bit for bit on every platform.
"""

import math
from dataclasses import dataclass, field

from .errors import StructureError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """One output of the splitmix64 generator seeded at state ``z``.

    Pinned test vectors (also asserted in the test suite):
        splitmix64(0)          = 0xE220A8397B1DCDAF
        splitmix64(1)          = 0x910A2DEC89025CC1
        splitmix64(0xDEADBEEF) = 0x4ADFB90F68C9EB9B
    """
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _site_hash(seed, words):
    """Chain splitmix64 over a tuple of integers (two's complement for negatives)."""
    s = seed & _MASK64
    for w in words:
        s = splitmix64(s ^ (int(w) & _MASK64))
    return splitmix64(s)


def _unit_interval(u64):
    # 53 mantissa bits, exact and uniform on [0, 1)
    return (u64 >> 11) * (1.0 / (1 << 53))


_GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DisorderSpace:
    """Sampled configuration space with a Z^d shift action.

    kind 'point' is the single trivial configuration; 'iid' draws independent
    uniform on-site values in [-W/2, W/2]; 'quasiperiodic' uses
    lam * cos(2 pi (beta . (x + phase_offsets))) with golden-mean beta.
    """

    kind: str
    d: int
    channels: int = 1
    count: int = 1
    seed: int = 0
    W: float = 0.0
    lam: float = 0.0
    beta: tuple = ()
    weights: tuple = field(default=None)

    def __post_init__(self):
        if self.kind not in ("point", "iid", "quasiperiodic"):
            raise StructureError(f"unknown disorder kind {self.kind!r}")
        if self.kind == "point" and self.count != 1:
            raise StructureError("point space has exactly one sample")
        if self.count < 1:
            raise StructureError("sample count must be positive")
        if self.kind == "quasiperiodic" and not self.beta:
            object.__setattr__(self, "beta", (_GOLDEN_MEAN,) * self.d)
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0 / self.count,) * self.count)
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise StructureError("sample weights must sum to 1")

    def samples(self):
        return [DisorderConfig(self, i, (0,) * self.d) for i in range(self.count)]

    def site_value(self, base, offset, x, channel):
        """On-site parameter of base sample ``base`` at lattice site x + offset."""
        site = tuple(a + b for a, b in zip(x, offset))
        if self.kind == "point":
            return 0.0
        if self.kind == "iid":
            u = _unit_interval(_site_hash(self.seed, (base, channel) + site))
            return self.W * (u - 0.5)
        phase = _unit_interval(_site_hash(self.seed, (base, channel)))
        arg = sum(b * s for b, s in zip(self.beta, site)) + phase
        return self.lam * math.cos(2.0 * math.pi * arg)


@dataclass(frozen=True)
class DisorderConfig:
    """A configuration: a base sample viewed through a Z^d offset."""

    space: DisorderSpace
    base: int
    offset: tuple

    @property
    def key(self):
        return (self.base, self.offset)

    def value(self, x, channel=0):
        return self.space.site_value(self.base, self.offset, tuple(x), channel)

    def values(self, x):
        return [self.value(x, c) for c in range(self.space.channels)]


def shift(omega: DisorderConfig, n) -> DisorderConfig:
    """The shifted configuration (alpha^n omega)(x) = omega(x + n)."""
    n = tuple(n)
    if len(n) != omega.space.d:
        raise StructureError(f"shift vector length {len(n)} != d={omega.space.d}")
    return DisorderConfig(omega.space, omega.base, tuple(a + b for a, b in zip(omega.offset, n)))


def average(observable, space: DisorderSpace, count=None):
    """Weighted mean of a scalar observable over the sampled space.

    Returns (mean, standard_error).  The summation order is fixed by the sample
    order, so results are reproducible bit for bit.
    """
    samples = space.samples()
    if count is None:
        count = len(samples)
    if count > len(samples):
        raise StructureError(f"requested {count} samples but only {len(samples)} available")
    if count == 0:
        raise StructureError("cannot average over an empty sample set")
    sub = samples[:count]
    w = [space.weights[i] for i in range(count)]
    total = sum(w)
    w = [wi / total for wi in w]
    values = [float(observable(s)) for s in sub]
    mean = sum(wi * v for wi, v in zip(w, values))
    if count == 1:
        return mean, 0.0
    var = sum(wi * (v - mean) ** 2 for wi, v in zip(w, values))
    return mean, math.sqrt(var / (count - 1))
