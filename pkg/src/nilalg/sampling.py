"""Deterministic seeded sampling and exact envelope fitting.

All randomness flows from a single 64-bit seed through counter-based Philox
substreams keyed by a stream index, so draws are reproducible no matter how
calls interleave or parallelize. Every draw is converted to an exact rational
before any arithmetic touches it.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import mpq

from .errors import StructuralError
from .intervals import Iv
from .scalars import Q0, Q1, Scalar, rat

DENOM_BITS = 12


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for stream `index` under the given seed."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, index, 0]))


def rand_q(gen, lo=-1, hi=1) -> mpq:
    """Uniform rational on [lo, hi] with a fixed dyadic denominator."""
    n = 1 << DENOM_BITS
    k = int(gen.integers(0, n + 1))
    lo = rat(lo)
    return lo + (rat(hi) - lo) * mpq(k, n)


def rand_sign(gen) -> int:
    return 1 if int(gen.integers(0, 2)) else -1


def sample_box_coords(fb, gen, sigma_max, complex_coords: bool = False):
    """One coordinate vector drawn per-layer uniform on the dilation-normalized
    unit box, then dilated by a random scale in [0, sigma_max]. Keeps samples
    spread across scales instead of clustering near the identity."""
    z = rand_q(gen, 0, sigma_max)
    coords = []
    for w in fb.weights:
        zw = z**w
        re = rand_q(gen) * zw
        if complex_coords:
            coords.append(Scalar(re, rand_q(gen) * zw))
        else:
            coords.append(re)
    return tuple(coords)


def sample_l1_letter(fb, gen):
    """Rational vector supported on the weight-1 layer with l1 norm <= 1.

    Magnitudes come from uniform cuts of [0, 1] (a simplex point) scaled by a
    uniform radius, so no rejection is needed at any layer dimension."""
    idxs = fb.weight_one_indices()
    if not idxs:
        raise StructuralError("algebra has no weight-1 basis vectors")
    p = len(idxs)
    cuts = sorted(rand_q(gen, 0, 1) for _ in range(p - 1))
    mags = []
    prev = Q0
    for c in cuts:
        mags.append(c - prev)
        prev = c
    mags.append(Q1 - prev)
    scale = rand_q(gen, 0, 1)
    vec = [Q0] * fb.dim
    for i, mag in zip(idxs, mags):
        vec[i] = rand_sign(gen) * mag * scale
    return tuple(vec)


# -- two-parameter envelope fitting ---------------------------------------


def _cross(o, a, b) -> mpq:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _upper_hull(pts):
    """Vertices of the upper convex hull of (x, y) pairs sorted by x."""
    hull = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return hull


def fit_envelope(points, d_floor=Q0):
    """Fit (C, D) so that y <= C x + D covers every training point.

    Points are (Iv, Iv) pairs read pessimistically as (x.lo, y.hi). The
    slope is the steeper of a least-squares fit through the upper-hull
    vertices and the hull's endpoint chord (least squares averages over
    plateau segments and underestimates data whose upper slope is reached
    only at the far end), inflated by a quarter; the offset then re-covers
    every point with a margin proportional to the sample spread, so a
    holdout residual has to beat the training maximum by a spread-sized
    gap before it can violate.

    `d_floor` lower-bounds the offset before the margin is added, for data
    with a known plateau near x = 0 that a lucky training draw might miss.
    """
    pess = sorted((x.lo, y.hi) for x, y in points)
    if not pess:
        raise StructuralError("cannot fit an envelope to zero points")
    hull = _upper_hull(pess)
    C = Q0
    if len(hull) >= 2:
        n = len(hull)
        xbar = sum((p[0] for p in hull), Q0) / n
        ybar = sum((p[1] for p in hull), Q0) / n
        den = sum(((p[0] - xbar) ** 2 for p in hull), Q0)
        if den:
            C = sum(((p[0] - xbar) * (p[1] - ybar) for p in hull), Q0) / den
        dx = hull[-1][0] - hull[0][0]
        if dx:
            C = max(C, (hull[-1][1] - hull[0][1]) / dx)
    if C < 0:
        C = Q0
    C = C + (C + 1) / 4
    ys = [y for _, y in pess]
    spread = max(ys) - min(ys)
    D0 = max(max(y - C * x for x, y in pess), rat(d_floor), Q0)
    D = D0 + (1 + D0 + spread) / 8
    return C, D


def count_violations(points, C, D) -> int:
    """Pessimistic violation count of y <= C x + D over (Iv, Iv) pairs."""
    return sum(1 for x, y in points if y.hi > C * x.lo + D)


def as_point(value) -> Iv:
    """Wrap an exact value as a point interval for the fitting interfaces."""
    return value if isinstance(value, Iv) else Iv(rat(value))
