"""Shared fixtures: reference systems, random builders, subgroup automata."""

from __future__ import annotations

import cmath

import numpy as np
import pytest

from freemult import (
    Alphabet,
    CosetAutomaton,
    MatrixSystem,
    automaton_from_generators,
    normalize_to_compatible,
)

AB = Alphabet("aAbB")


def make_spherical(s: float = 0.0) -> MatrixSystem:
    """Rank-two system with every space one-dimensional, every admissible
    transfer equal to 3^(-1/2+is), and every form 1/4.  Compatible for all
    real s: each letter has three admissible sources and 3 * |h|^2 / 4 = 1/4.
    """
    h = np.array([[3.0 ** -0.5 * cmath.exp(1j * s * cmath.log(3.0))]])
    H = {(b, a): h for b, a in _pairs(AB)}
    B = {a: np.array([[0.25]]) for a in AB.letters}
    return MatrixSystem(AB, {a: 1 for a in AB.letters}, H, B)


def _pairs(al: Alphabet):
    for a in al.letters:
        for b in al.letters:
            if b != al.inverse(a):
                yield (b, a)


def random_system(
    rng: np.random.Generator,
    al: Alphabet = AB,
    max_dim: int = 3,
    real: bool = False,
) -> MatrixSystem:
    """Gaussian transfer matrices, identity forms."""
    dims = {a: int(rng.integers(1, max_dim + 1)) for a in al.letters}
    H = {}
    for b, a in _pairs(al):
        m = rng.standard_normal((dims[b], dims[a]))
        if not real:
            m = m + 1j * rng.standard_normal((dims[b], dims[a]))
        H[(b, a)] = m / np.sqrt(dims[b] * 3.0)
    B = {a: np.eye(dims[a]) for a in al.letters}
    return MatrixSystem(al, dims, H, B)


def random_compatible(
    rng: np.random.Generator, al: Alphabet = AB, max_dim: int = 3
) -> MatrixSystem:
    """A compatible system with positive-definite forms, built by
    normalizing a random one (retrying until the eigen-forms are PD)."""
    for _ in range(40):
        sys0 = random_system(rng, al, max_dim)
        out, rho = normalize_to_compatible(sys0)
        if rho < 1e-6:
            continue
        if all(
            np.linalg.eigvalsh(out.B(a)).min() > 1e-6 * out.dims[a]
            for a in al.letters
            if out.dims[a]
        ):
            return out
    raise AssertionError("no positive-definite compatible sample found")


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def spherical() -> MatrixSystem:
    return make_spherical(0.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260815)


@pytest.fixture
def index2_automaton() -> CosetAutomaton:
    return automaton_from_generators(AB, ["aa", "b", "aba"])


@pytest.fixture
def index3_automaton() -> CosetAutomaton:
    # states {e, a, b}; a swaps the first two cosets, b the outer two
    return CosetAutomaton(
        AB,
        {"a": [1, 0, 2], "A": [1, 0, 2], "b": [2, 1, 0], "B": [2, 1, 0]},
        size=3,
    )
