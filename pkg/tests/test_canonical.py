import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from trahahn.canonical import (
    CubicODESpec,
    canonicalize,
    decompose,
    partial_fraction,
    reconstruct,
    reconstruct_coefficients,
)
from trahahn.errors import DegenerateRoots, InvalidR
from trahahn.verify import apply_operator

from conftest import random_spec


def test_trivial_spec():
    p, shift, scale = canonicalize(CubicODESpec(roots=(0, 1, 2), pi0=1.0))
    assert (p.r, shift, scale, p.d) == (2.0, 0.0, 1.0, 1.0)
    assert all(getattr(p, k) == 0 for k in "abcABCDE")


def test_shift_and_scale():
    p, shift, scale = canonicalize(CubicODESpec(roots=(5, 1, 3), pi0=1.0))
    assert (p.r, shift, scale) == (2.0, 1.0, 2.0)


@pytest.mark.parametrize("roots", [(0, 0, 1), (1, 2, 2 + 1e-12), (3, 3, 3)])
def test_degenerate_roots(roots):
    with pytest.raises(DegenerateRoots):
        canonicalize(CubicODESpec(roots=roots, pi0=1.0))


def test_partial_fraction_examples():
    assert partial_fraction((0, 0, 0), 3.7) == (0, 0, 0)
    a, b, c = partial_fraction((2, -3, 1), 2.0)
    assert (a, b, c) == (1.0, 0.0, 0.0)
    for x in np.linspace(-1, 3, 5):
        assert a * (1 - x) * (2 - x) - b * x * (2 - x) - c * x * (1 - x) == pytest.approx(2 - 3 * x + x * x)


def test_partial_fraction_rejects_small_r():
    with pytest.raises(InvalidR):
        partial_fraction((1, 2, 3), 1.0)


def test_partial_fraction_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(50):
        tilde = rng.uniform(-10, 10, 3)
        r = rng.uniform(1.1, 6)
        back = reconstruct_coefficients(partial_fraction(tilde, r), r)
        np.testing.assert_allclose(back, tilde, rtol=1e-13, atol=1e-12)
        res = decompose(tilde, r).identity_residuals()
        assert max(abs(v) for v in res) <= 1e-13 * max(1, np.max(np.abs(tilde)) * r * r)


def test_reconstruction_pointwise():
    rng = np.random.default_rng(11)
    spec = random_spec(rng)
    p, shift, scale = canonicalize(spec)
    assert p.r > 1
    pi0, pi2, pihat2, pi1 = reconstruct(p, shift, scale)
    xs = rng.uniform(-6, 6, 10)
    for orig, back in ((spec.pi2, pi2), (spec.pihat2, pihat2), (spec.pi1, pi1)):
        ref = P.polyval(xs, orig)
        assert np.max(np.abs(P.polyval(xs, back) - ref)) <= 1e-10 * np.max(np.abs(ref))
    assert pi0 == pytest.approx(spec.pi0, rel=1e-14)


def test_canonical_operator_matches_original():
    # For Y(t) = y(shift + scale t): J_canonical Y = (original operator y) / scale.
    rng = np.random.default_rng(3)
    spec = random_spec(rng)
    p, shift, scale = canonicalize(spec)
    t = np.linspace(0.1, 0.9, 9)
    x = shift + scale * t
    y, y1, y2 = np.sin(x), np.cos(x), -np.sin(x)
    original = spec.operator(y, y1, y2, x)
    canonical_side = apply_operator(y, scale * y1, scale**2 * y2, t, p)
    np.testing.assert_allclose(canonical_side, original / scale, rtol=1e-10, atol=1e-10)
