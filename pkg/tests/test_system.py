"""Matrix-system container, compatibility defect, subsystems, and maps.

The compatibility defect is cross-checked against a summation oracle that
iterates entrywise with plain Python loops.
"""

import numpy as np
import pytest

from freemult import (
    InputError,
    MatrixSystem,
    Subsystem,
    SystemMap,
    ValidationError,
    compatibility_defect,
    conjugate,
    direct_sum,
    invariance_defect,
    map_residual,
    quotient_system,
    restrict_to_subsystem,
)
from freemult.system import is_invariant_subsystem

from .conftest import AB, make_spherical, random_compatible, random_system, random_unitary


def defect_oracle(sys):
    """Entrywise recomputation of the compatibility gap."""
    worst = 0.0
    for a in sys.alphabet.letters:
        d = sys.dims[a]
        if d == 0:
            continue
        acc = [[0j] * d for _ in range(d)]
        for b in sys.alphabet.letters:
            if b == sys.alphabet.inverse(a) or sys.dims[b] == 0:
                continue
            h = sys.H(b, a)
            bb = sys.B(b)
            for i in range(d):
                for j in range(d):
                    acc[i][j] += sum(
                        h[k, i].conjugate() * bb[k, l] * h[l, j]
                        for k in range(sys.dims[b])
                        for l in range(sys.dims[b])
                    )
        gap = sys.B(a) - np.array(acc)
        worst = max(worst, float(np.linalg.norm(gap, 2)))
    return worst


def test_spherical_fixture_compatible(spherical):
    assert compatibility_defect(spherical) <= 1e-12
    assert defect_oracle(spherical) <= 1e-12
    assert spherical.total_dim == 4


def test_spherical_fixture_compatible_complex_parameter():
    sysc = make_spherical(0.3)
    assert compatibility_defect(sysc) <= 1e-12
    assert defect_oracle(sysc) <= 1e-12


def test_defect_matches_oracle_on_random_systems(rng):
    for _ in range(10):
        sys0 = random_system(rng, max_dim=3)
        assert compatibility_defect(sys0) == pytest.approx(
            defect_oracle(sys0), abs=1e-10
        )


def test_direct_sum_of_spherical(spherical):
    two = direct_sum(spherical, make_spherical(0.3))
    assert two.dims == {a: 2 for a in AB.letters}
    assert compatibility_defect(two) <= 1e-12
    h = two.H("b", "a")
    assert h[0, 1] == 0 and h[1, 0] == 0


def test_construction_validation(spherical):
    dims = {a: 1 for a in AB.letters}
    B = {a: np.eye(1) for a in AB.letters}
    with pytest.raises(InputError):
        MatrixSystem(AB, {"a": 1, "A": 1, "b": 1}, {}, B)
    with pytest.raises(InputError):
        MatrixSystem(AB, {a: -1 for a in AB.letters}, {}, B)
    with pytest.raises(ValidationError):
        MatrixSystem(AB, dims, {("A", "a"): [[1.0]]}, B)  # inverse pair
    with pytest.raises(ValidationError):
        MatrixSystem(AB, dims, {}, {a: [[-1.0]] for a in AB.letters})  # not PSD
    with pytest.raises(ValidationError):
        MatrixSystem(
            AB,
            {a: 2 for a in AB.letters},
            {},
            {a: [[0, 1], [0, 0]] for a in AB.letters},  # not Hermitian
        )
    with pytest.raises(InputError):
        MatrixSystem(AB, dims, {("b", "a"): [[1, 2]]}, B)  # wrong shape


def test_zero_dimensional_letters_allowed():
    dims = {"a": 1, "A": 1, "b": 0, "B": 0}
    H = {("a", "a"): [[1.0]], ("A", "A"): [[1.0]]}
    B = {"a": [[1.0]], "A": [[1.0]], "b": np.zeros((0, 0)), "B": np.zeros((0, 0))}
    sys0 = MatrixSystem(AB, dims, H, B)
    assert sys0.total_dim == 2
    assert sys0.H("b", "a").shape == (0, 1)
    assert compatibility_defect(sys0) <= 1e-12


def test_subsystem_invariance(spherical):
    full = Subsystem(AB, {a: np.eye(1) for a in AB.letters})
    assert is_invariant_subsystem(spherical, full)
    zero = Subsystem(AB, {a: np.zeros((1, 0)) for a in AB.letters})
    assert zero.is_zero() and is_invariant_subsystem(spherical, zero)

    two = direct_sum(spherical, make_spherical(0.3))
    first = Subsystem(AB, {a: np.array([[1.0], [0.0]]) for a in AB.letters})
    assert invariance_defect(two, first) <= 1e-12
    tilted = Subsystem.from_spanning(
        AB, {a: np.array([[1.0], [1.0]]) for a in AB.letters}
    )
    assert invariance_defect(two, tilted) > 1e-3


def test_restrict_and_quotient(spherical):
    two = direct_sum(spherical, make_spherical(0.3))
    first = Subsystem(AB, {a: np.array([[1.0], [0.0]]) for a in AB.letters})

    restricted, emb = restrict_to_subsystem(two, first)
    assert restricted.dims == {a: 1 for a in AB.letters}
    assert restricted.close_to(spherical)
    assert map_residual(restricted, two, emb) <= 1e-12

    quot, proj = quotient_system(two, first)
    assert quot.dims == {a: 1 for a in AB.letters}
    assert quot.close_to(make_spherical(0.3))
    assert map_residual(two, quot, proj) <= 1e-12

    with pytest.raises(ValidationError):
        restrict_to_subsystem(
            two,
            Subsystem.from_spanning(
                AB, {a: np.array([[1.0], [1.0]]) for a in AB.letters}
            ),
        )


def test_conjugation_by_random_unitaries(rng):
    sys0 = random_compatible(rng)
    J = SystemMap(
        AB, {a: random_unitary(rng, sys0.dims[a]) for a in AB.letters}
    )
    assert J.is_unitary()
    out = conjugate(sys0, J)
    assert compatibility_defect(out) <= 1e-10
    assert map_residual(sys0, out, J) <= 1e-10
    # composing with the adjoint gives the identity map
    Jinv = SystemMap(AB, {a: J[a].conj().T for a in AB.letters})
    assert J.compose(Jinv).is_unitary()
    back = conjugate(out, Jinv)
    assert back.close_to(sys0, tol=1e-9)


def test_conjugate_rejects_non_unitary(spherical):
    J = SystemMap(AB, {a: np.array([[2.0]]) for a in AB.letters})
    with pytest.raises(ValidationError):
        conjugate(spherical, J)


def test_map_residual_shape_check(spherical):
    two = direct_sum(spherical, spherical)
    J = SystemMap(AB, {a: np.eye(1) for a in AB.letters})
    with pytest.raises(InputError):
        map_residual(spherical, two, J)
