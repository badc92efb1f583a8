"""Reduction of a cubic-leading-coefficient ODE to the canonical ten-parameter form.

The general equation is

    pi3 y'' + (pi2 + pi0 pi3) y' + (pihat2 / pi3 + pi1) y = 0,

with ``pi3 = (x - r1)(x - r2)(x - r3)`` monic and ``r1 < r2 < r3``.  The affine
substitution ``x = r1 + s t`` with ``s = r2 - r1`` moves the roots to
``0, 1, r`` and, after dividing by ``s``, gives

    t(1-t)(r-t) Y'' + (p2(t) + d t(1-t)(r-t)) Y' + (phat2(t) / (t(1-t)(r-t)) + p1(t)) Y = 0

with ``p2 = pi2(r1+st)/s**2``, ``phat2 = pihat2(r1+st)/s**4``, ``p1 = pi1(r1+st)/s``
and ``d = s pi0``.  For unit root spacing these reduce to a plain shift.

Polynomial coefficients are stored in ascending powers throughout.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DegenerateRoots, InvalidR
from .parameters import CanonicalParams

ROOT_TOL = 1e-9


@dataclass(frozen=True)
class CubicODESpec:
    roots: tuple
    pi0: float
    pi2: tuple = (0.0, 0.0, 0.0)
    pihat2: tuple = (0.0, 0.0, 0.0)
    pi1: tuple = (0.0, 0.0)

    def operator(self, y, y1, y2, x):
        """Left-hand side of the original equation for samples of y, y', y''."""
        x = np.asarray(x, dtype=float)
        pi3 = np.prod([x - q for q in self.roots], axis=0)
        return (
            pi3 * y2
            + (P.polyval(x, self.pi2) + self.pi0 * pi3) * y1
            + (P.polyval(x, self.pihat2) / pi3 + P.polyval(x, self.pi1)) * y
        )


@dataclass(frozen=True)
class QuadDecomposition:
    """``tilde`` = ascending coefficients of the quadratic, ``residues`` = (a, b, c)."""

    tilde: tuple
    residues: tuple
    r: float

    def identity_residuals(self):
        ta, tb, tc = self.tilde
        a, b, c = self.residues
        r = self.r
        return (
            ta - a * r,
            ta + tb + tc - b * (1 - r),
            ta + r * tb + r * r * tc - c * r * (r - 1),
        )


def _pad(coeffs, length):
    out = np.zeros(length)
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    out[: len(coeffs)] = coeffs
    return out


def partial_fraction(tilde, r):
    """Residues (a, b, c) with a(1-x)(r-x) - b x(r-x) - c x(1-x) = ta + tb x + tc x^2."""
    if not r > 1:
        raise InvalidR(f"r must exceed 1, got {r}")
    ta, tb, tc = _pad(tilde, 3)
    a = ta / r
    b = (ta + tb + tc) / (1 - r)
    c = (ta + r * tb + r * r * tc) / (r * (r - 1))
    return a, b, c


def reconstruct_coefficients(residues, r):
    """Inverse of :func:`partial_fraction`: ascending coefficients of the quadratic."""
    a, b, c = residues
    return (a * r, -a * (1 + r) - b * r - c, a + b + c)


def decompose(tilde, r):
    return QuadDecomposition(tuple(_pad(tilde, 3)), partial_fraction(tilde, r), r)


def _affine(coeffs, shift, scale):
    # coefficients of q(shift + scale*t) in t
    out = np.zeros(1)
    for k, ck in enumerate(coeffs):
        out = P.polyadd(out, ck * P.polypow([shift, scale], k))
    return out


def _inverse_affine(coeffs, shift, scale):
    return _affine(coeffs, -shift / scale, 1.0 / scale)


def canonicalize(spec):
    """Return ``(params, shift, scale)`` for a :class:`CubicODESpec`.

    Roots are sorted here; the caller's ordering is not trusted.
    """
    r1, r2, r3 = sorted(float(q) for q in spec.roots)
    tol = ROOT_TOL * max(1.0, abs(r1), abs(r2), abs(r3))
    if r2 - r1 <= tol or r3 - r2 <= tol:
        raise DegenerateRoots(f"roots too close: {(r1, r2, r3)}")
    shift, scale = r1, r2 - r1
    r = (r3 - r1) / scale
    if abs(r - 1) <= tol:
        raise DegenerateRoots(f"r = {r} too close to 1")

    p2 = _pad(_affine(spec.pi2, shift, scale) / scale**2, 3)
    phat2 = _pad(_affine(spec.pihat2, shift, scale) / scale**4, 3)
    p1 = _pad(_affine(spec.pi1, shift, scale) / scale, 2)

    a, b, c = partial_fraction(p2, r)
    A, B, C = partial_fraction(phat2, r)
    params = CanonicalParams(
        a=a, b=b, c=c, d=spec.pi0 * scale, r=r, A=A, B=B, C=C, D=p1[1], E=-p1[0]
    )
    return params, shift, scale


def reconstruct(params, shift, scale):
    """Recover ``(pi0, pi2, pihat2, pi1)`` in the original variable."""
    p = params
    p2 = reconstruct_coefficients((p.a, p.b, p.c), p.r)
    phat2 = reconstruct_coefficients((p.A, p.B, p.C), p.r)
    p1 = (-p.E, p.D)
    pi2 = _pad(_inverse_affine(np.asarray(p2) * scale**2, shift, scale), 3)
    pihat2 = _pad(_inverse_affine(np.asarray(phat2) * scale**4, shift, scale), 3)
    pi1 = _pad(_inverse_affine(np.asarray(p1) * scale, shift, scale), 2)
    return p.d / scale, pi2, pihat2, pi1
