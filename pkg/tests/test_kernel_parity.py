"""The compiled kernel and the pure-Python fallback must agree exactly."""

import random

import pytest

from freemult import _kernel_py

cython_kernel = pytest.importorskip(
    "freemult._kernel", reason="compiled kernel not built"
)

M = 3


def _random_reduced(rng, length):
    w = []
    for _ in range(length):
        choices = [l for l in range(-M, M + 1) if l and (not w or l != -w[-1])]
        w.append(rng.choice(choices))
    return tuple(w)


def _random_stream(rng, length):
    letters = [l for l in range(-M, M + 1) if l]
    return tuple(rng.choice(letters) for _ in range(length))


def test_backend_names():
    assert _kernel_py.BACKEND == "python"
    assert cython_kernel.BACKEND == "cython"


def test_reduce_and_multiply_parity():
    rng = random.Random(1)
    for _ in range(300):
        s = _random_stream(rng, rng.randrange(0, 30))
        assert cython_kernel.reduce_word(s) == _kernel_py.reduce_word(s)
        x = _random_reduced(rng, rng.randrange(0, 12))
        y = _random_reduced(rng, rng.randrange(0, 12))
        assert cython_kernel.multiply(x, y) == _kernel_py.multiply(x, y)
        assert cython_kernel.invert(x) == _kernel_py.invert(x)


def _random_images(rng):
    """A random automorphism-like image table (not necessarily a basis;
    parity needs only identical inputs)."""
    images = [None] * (2 * M + 1)
    for l in range(1, M + 1):
        img = _random_reduced(rng, rng.randrange(1, 4))
        images[l + M] = img
        images[-l + M] = tuple(-t for t in reversed(img))
    images[M] = ()
    return images


def test_morphism_and_classify_parity():
    rng = random.Random(2)
    for _ in range(120):
        images = _random_images(rng)
        w = _random_reduced(rng, rng.randrange(0, 8))
        assert cython_kernel.apply_morphism(w, images, M) == _kernel_py.apply_morphism(
            w, images, M
        )
        y = _random_reduced(rng, rng.randrange(0, 4))
        z = _random_reduced(rng, rng.randrange(1, 3))
        limit = len(z) * 3 + len(y) + 2
        assert cython_kernel.classify_cone(
            y, z, images, M, limit, 3
        ) == _kernel_py.classify_cone(y, z, images, M, limit, 3)


def test_classify_constants_match():
    assert (
        cython_kernel.INCLUDED,
        cython_kernel.DISJOINT,
        cython_kernel.MIXED,
    ) == (_kernel_py.INCLUDED, _kernel_py.DISJOINT, _kernel_py.MIXED)
