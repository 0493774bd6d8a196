"""Coset automata, fundamental domains, Schreier bases, boundary data.

The index-two fixture (generated by aa, b, aba) has all reference values
below recomputed by hand: two cosets, domain {e, a}, three basis elements,
and one contact vertex per basis letter.
"""

import itertools

import numpy as np
import pytest

from freemult import (
    CosetAutomaton,
    FundamentalSubtree,
    InputError,
    ValidationError,
    automaton_from_generators,
    complete_D,
    decompose_left,
    schreier_subtree,
)
from freemult.words import ball, last_letter

from .conftest import AB


def test_automaton_validation():
    with pytest.raises(ValidationError):
        CosetAutomaton(AB, {"a": [0, 0], "b": [0, 1]})  # not a permutation
    with pytest.raises(InputError):
        CosetAutomaton(AB, {"a": [0, 1]})  # no data for b
    with pytest.raises(ValidationError):
        # disconnected: both letters fix both states
        CosetAutomaton(AB, {"a": [0, 1], "b": [0, 1]})
    aut = CosetAutomaton(AB, {"a": [1, 0], "b": [0, 1]})
    assert aut.index == 2
    assert aut.step(0, "a") == 1 and aut.step(0, "A") == 1
    assert aut.contains(AB.word("aa")) and not aut.contains(AB.word("a"))


def test_fold_from_generators(index2_automaton):
    aut = index2_automaton
    assert aut.index == 2
    for g in ("aa", "b", "aba"):
        assert aut.contains(AB.word(g))
    assert not aut.contains(AB.word("a"))
    assert not aut.contains(AB.word("ab"))


def test_fold_detects_infinite_index():
    with pytest.raises(ValidationError):
        automaton_from_generators(AB, ["aa"])
    with pytest.raises(ValidationError):
        automaton_from_generators(AB, ["ab", "ba"])


def test_index_one_is_the_whole_group():
    aut = automaton_from_generators(AB, ["a", "b"])
    assert aut.index == 1
    fs = FundamentalSubtree(aut)
    assert fs.reps == (AB.identity,)
    assert fs.subgroup_alphabet.rank == 2
    assert {str(fs.gamma_of[c]) for c in ("g1", "g2")} == {"a", "b"}


def test_index2_reference_data(index2_automaton):
    fs = FundamentalSubtree(index2_automaton)
    assert [str(u) for u in fs.reps] == ["e", "a"]
    assert fs.subgroup_alphabet.rank == 3
    gammas = {c: str(fs.gamma_of[c]) for c in ("g1", "g2", "g3")}
    assert gammas == {"g1": "AA", "g2": "b", "g3": "abA"}
    contacts = {c: str(fs.contact[c]) for c in fs.subgroup_alphabet.letters}
    assert contacts == {
        "g1": "A",
        "G1": "aa",
        "g2": "b",
        "G2": "B",
        "g3": "ab",
        "G3": "aB",
    }
    assert fs.contact_letter == {
        c: last_letter(fs.contact[c]) for c in fs.subgroup_alphabet.letters
    }
    assert schreier_subtree(index2_automaton).reps == fs.reps


def test_index3_reference_data(index3_automaton):
    fs = FundamentalSubtree(index3_automaton)
    assert [str(u) for u in fs.reps] == ["e", "a", "b"]
    # rank identity: 1 + n (m - 1) with n = 3 cosets, m = 2 generators
    assert fs.subgroup_alphabet.rank == 1 + 3 * (2 - 1)
    gammas = {str(fs.gamma_of[c]) for c in ("g1", "g2", "g3", "g4")}
    assert gammas == {"AA", "BB", "abA", "baB"}
    for c in fs.subgroup_alphabet.letters:
        assert fs.automaton.contains(fs.gamma_of[c])


def test_rank_identity_random_automata(rng):
    # random permutation automata of several sizes
    for size in (2, 3, 4, 5):
        for _ in range(4):
            while True:
                perms = {
                    s: list(rng.permutation(size)) for s in ("a", "b")
                }
                try:
                    aut = CosetAutomaton(AB, perms, size=size)
                    break
                except ValidationError:
                    continue  # disconnected sample
            fs = FundamentalSubtree(aut)
            assert len(fs.reps) == size
            assert fs.subgroup_alphabet.rank == 1 + size * (AB.rank - 1)


def test_domain_is_prefix_closed_shortlex(index3_automaton):
    fs = FundamentalSubtree(index3_automaton)
    for u in fs.reps:
        if len(u) > 0:
            assert fs.in_domain(u.prefix(len(u) - 1))
    # each representative is shortlex-minimal in its coset within ball 4
    for v in ball(AB.identity, 4):
        s = fs.state_of(v)
        assert not v.sort_key() < fs.reps[s].sort_key()


def test_contacts_are_nearest_domain_exits(index2_automaton):
    fs = FundamentalSubtree(index2_automaton)
    dom = set(fs.reps)
    for c in fs.subgroup_alphabet.letters:
        g = fs.gamma_of[c]
        translated = [g * u for u in fs.reps]
        # distance from a translated vertex to the domain
        def dist(v):
            return min(len(u.inverse() * v) for u in dom)

        x = fs.contact[c]
        assert x in translated
        assert dist(x) == 1
        assert sum(1 for v in translated if dist(v) == 1) == 1


def test_complete_D(index2_automaton, index3_automaton):
    for aut in (index2_automaton, index3_automaton):
        fs = FundamentalSubtree(aut)
        tree = complete_D(fs)
        assert tree.is_complete
        assert tree.interior == frozenset(fs.reps)
        assert tree.terminals == frozenset(fs.contact.values())
        assert len(tree) == len(fs.reps) + len(set(fs.contact.values()))


def test_decompose_left_roundtrip(index2_automaton, rng):
    fs = FundamentalSubtree(index2_automaton)
    for v in ball(AB.identity, 5):
        spelling, gamma, u = decompose_left(fs, v)
        assert fs.automaton.contains(gamma)
        assert fs.in_domain(u)
        assert gamma * u == v
        assert fs.expand(spelling) == gamma


def test_translates_cover_ball_disjointly(index2_automaton, index3_automaton):
    """Exhaustive cover check: every vertex of ball(e, 6) lies in exactly
    one subgroup translate of the domain (the oracle tries every u)."""
    for aut in (index2_automaton, index3_automaton):
        fs = FundamentalSubtree(aut)
        for v in ball(AB.identity, 6):
            hits = [u for u in fs.reps if aut.contains(v * u.inverse())]
            assert len(hits) == 1
            _, gamma, u = decompose_left(fs, v)
            assert u == hits[0] and gamma == v * u.inverse()


def test_expand_concatenates_generators(index2_automaton):
    fs = FundamentalSubtree(index2_automaton)
    sub = fs.subgroup_alphabet
    w = sub.word(["g1", "g2", "G1"])
    assert fs.expand(w) == fs.gamma_of["g1"] * fs.gamma_of["g2"] * fs.gamma_of["G1"]
    assert fs.expand(sub.identity) == AB.identity
    with pytest.raises(InputError):
        fs.expand(AB.word("a"))
