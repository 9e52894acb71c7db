"""Deterministic, splittable random-number streams.

Every stochastic routine in this package draws from a xoshiro256++
generator whose 256-bit state is derived from the triple
``(master_seed, stream_index, role)`` by a fixed SplitMix64 key schedule:

    k  = mix64(master_seed + GOLDEN)
    k  = mix64((k ^ stream_index) + GOLDEN)
    k  = mix64((k ^ role) + GOLDEN)
    s_i = mix64(k + (i + 1) * GOLDEN)      for i = 0..3

where ``mix64`` is the SplitMix64 finalizer and GOLDEN = 0x9E3779B97F4A7C15.
All arithmetic is modulo 2**64.  The derivation is a pure integer function,
so streams are identical on every machine and independent of thread count
or scheduling.  Distinct ``(master_seed, stream_index, role)`` triples give
statistically independent streams.

Conventions:
  * ``stream_index`` numbers independent replications (paths).
  * ``role`` separates the sub-streams one replication consumes; the walk
    simulators reserve the role constants below.
  * Uniform variates are ``(x >> 11) * 2**-53`` in [0, 1); the open-unit
    variant returns ``1 - u`` in (0, 1] and is used wherever a logarithm
    is taken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# Reserved roles.  The direct stepper consumes role 0; the coupled
# construction consumes roles 1 and 2 for its two internal walks and
# role 3 + j for the geometric sequence of the j-th configured line.
ROLE_WALK = 0
ROLE_HORIZONTAL = 1
ROLE_VERTICAL = 2
ROLE_LEVEL_BASE = 3
ROLE_ORACLE_H = 1001
ROLE_ORACLE_V = 1002


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus stream index identifying one logical random stream.

    Distinct (master_seed, stream_index) pairs yield independent streams;
    ensemble code assigns one stream index per path so that results never
    depend on how paths are scheduled across workers.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & MASK64)
        object.__setattr__(self, "stream_index", int(self.stream_index) & MASK64)

    def offset(self, delta: int) -> "SeedSpec":
        """Stream shifted by ``delta`` path slots (mod 2**64)."""
        return SeedSpec(self.master_seed, (self.stream_index + delta) & MASK64)


def mix64(z: int) -> int:
    """SplitMix64 finalizer, a bijection on 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_state(master_seed: int, stream_index: int, role: int) -> tuple[int, int, int, int]:
    """Expand (master_seed, stream_index, role) into a xoshiro256++ state."""
    k = mix64((master_seed + GOLDEN) & MASK64)
    k = mix64(((k ^ stream_index) + GOLDEN) & MASK64)
    k = mix64(((k ^ role) + GOLDEN) & MASK64)
    state = []
    for _ in range(4):
        k = (k + GOLDEN) & MASK64
        state.append(mix64(k))
    return tuple(state)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256pp:
    """Pure-Python xoshiro256++ stream; reference for the compiled kernels.

    Step-by-step simulators use this class; bulk consumers go through
    :func:`uniforms`, which produces the identical sequence via numba.
    """

    def __init__(self, seed: SeedSpec, role: int = ROLE_WALK):
        self._s = list(derive_state(seed.master_seed, seed.stream_index, role))

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[0] + s[3]) & MASK64, 23) + s[0]) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """One uniform variate in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_open(self) -> float:
        """One uniform variate in (0, 1], safe under log()."""
        return 1.0 - self.uniform()


def uniforms(seed: SeedSpec, count: int, role: int = ROLE_WALK, open_unit: bool = False) -> np.ndarray:
    """Bulk uniform variates from the given stream (compiled fill).

    With ``open_unit`` the variates lie in (0, 1] instead of [0, 1).
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    return _kernels.uniforms_fill(
        np.uint64(seed.master_seed),
        np.uint64(seed.stream_index),
        np.uint64(role),
        np.int64(count),
        open_unit,
    )


def normals(seed: SeedSpec, count: int, role: int) -> np.ndarray:
    """Standard normal variates via Box-Muller on the stream's uniforms.

    Consecutive pairs come from independent (radius, angle) pairs, so
    slicing the output into even/odd halves yields two independent
    normal samples.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs, role=role)
    r = np.sqrt(-2.0 * np.log(1.0 - u[0::2]))
    theta = (2.0 * np.pi) * u[1::2]
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]
