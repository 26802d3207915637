"""Bit/symbol mapping and soft demapping for BPSK with a rotation-borne
second bit.

A symbol is a length-2 float array (real, imaginary); all functions
broadcast over leading axes, so a frame is an (n, 2) array. The inner
bit selects the BPSK point on the real axis; the outer bit selects a
rotation of 0 or a quarter turn, which lands the symbol on one of four
points. The two admissible rotations are exact component swaps and
negations, never sin/cos, so rotate/derotate round trips are bit-exact.
"""

import math
from dataclasses import dataclass

import numpy as np

QUARTER_TURN = math.pi / 2

# Outer bit carried by each constellation point, in point order s1..s4.
_OUTER_BITS = (0, 1, 0, 1)


def map_bpsk(v1, es):
    """BPSK point for the inner bit: 0 -> (+sqrt(es), 0), 1 -> (-sqrt(es), 0)."""
    if es <= 0:
        raise ValueError("es must be positive")
    v = np.asarray(v1)
    amp = math.sqrt(es)
    out = np.zeros(v.shape + (2,), dtype=np.float64)
    out[..., 0] = np.where(v.astype(np.int64) & 1, -amp, amp)
    return out


def beta_from_bit(v2):
    """Rotation angle for an outer bit: 0 -> 0, 1 -> pi/2."""
    return QUARTER_TURN if (int(v2) & 1) else 0.0


def bit_from_beta(beta):
    if beta == 0.0:
        return 0
    if beta == QUARTER_TURN:
        return 1
    raise ValueError("rotation angle must be 0 or pi/2")


def rotate(z, beta, inverse=False):
    """Rotate a symbol by an admissible angle (0 or pi/2), exactly.

    A quarter turn maps (a, b) to (-b, a); the inverse maps (a, b) to
    (b, -a). Zero is the identity. Amplitude is preserved exactly and
    rotate followed by its inverse returns the input bit-for-bit.
    """
    z = np.asarray(z, dtype=np.float64)
    if beta == 0.0:
        return z.copy()
    if beta != QUARTER_TURN:
        raise ValueError("rotation angle must be 0 or pi/2")
    a, b = z[..., 0], z[..., 1]
    if inverse:
        return np.stack([b, -a], axis=-1)
    return np.stack([-b, a], axis=-1)


def derotate(y, beta_hat):
    """Inverse rotation by the estimated angle."""
    return rotate(y, beta_hat, inverse=True)


def rotate_by_bits(z, bits, inverse=False):
    """Per-symbol rotation selected by a bit array (0: none, 1: quarter turn)."""
    z = np.asarray(z, dtype=np.float64)
    b = np.asarray(bits).astype(bool)
    a, bb = z[..., 0], z[..., 1]
    if inverse:
        re = np.where(b, bb, a)
        im = np.where(b, -a, bb)
    else:
        re = np.where(b, -bb, a)
        im = np.where(b, a, bb)
    return np.stack([re, im], axis=-1)


def map_dmm(v1, v2, es):
    """Map an (inner, outer) bit pair onto one of the four points
    s1=(+sqrt(es),0), s2=(0,+sqrt(es)), s3=(-sqrt(es),0), s4=(0,-sqrt(es)):
    the BPSK point for v1, rotated a quarter turn when v2 is 1."""
    return rotate_by_bits(map_bpsk(v1, es), v2)


@dataclass(frozen=True)
class Constellation:
    """The four rotated-BPSK points at symbol energy es."""

    es: float

    def __post_init__(self):
        if self.es <= 0:
            raise ValueError("es must be positive")

    @property
    def points(self):
        a = math.sqrt(self.es)
        return np.array(
            [[a, 0.0], [0.0, a], [-a, 0.0], [0.0, -a]], dtype=np.float64
        )


def demap_outer_hard(y, cst):
    """Outer bit of the nearest constellation point (squared Euclidean
    distance; ties resolve to the lowest point index)."""
    y = np.asarray(y, dtype=np.float64)
    d2 = ((y[..., None, :] - cst.points) ** 2).sum(axis=-1)
    idx = np.argmin(d2, axis=-1)
    return (idx & 1).astype(np.uint8)


def demap_outer_llr(y, cst, sigma2_dim):
    """Exact pairwise log-sum-exp LLR for the outer bit.

    log[(p(y|s1)+p(y|s3)) / (p(y|s2)+p(y|s4))] with independent
    per-dimension Gaussian noise of variance sigma2_dim and equal
    priors; positive favors outer bit 0.
    """
    if sigma2_dim <= 0:
        raise ValueError("sigma2_dim must be positive")
    y = np.asarray(y, dtype=np.float64)
    e = -((y[..., None, :] - cst.points) ** 2).sum(axis=-1) / (2.0 * sigma2_dim)
    return np.logaddexp(e[..., 0], e[..., 2]) - np.logaddexp(e[..., 1], e[..., 3])


def demap_inner_llr(y1, es, sigma2_dim):
    """BPSK LLR on the real part of the derotated symbol:
    2*sqrt(es)*re(y1)/sigma2_dim. The imaginary part carries only
    quadrature noise and is discarded; positive favors inner bit 0."""
    if es <= 0:
        raise ValueError("es must be positive")
    if sigma2_dim <= 0:
        raise ValueError("sigma2_dim must be positive")
    y1 = np.asarray(y1, dtype=np.float64)
    return 2.0 * math.sqrt(es) * y1[..., 0] / sigma2_dim
