"""Multiplicative vector-valued functions on the tree of a free group.

A function of depth ``N`` is determined by one vector in ``V_(last letter
of x)`` per word ``x`` of length ``N``; values at longer words follow by
applying the transfer matrices along the word, and the function is left
unspecified closer to the root.  Functions are stored sparsely: words
whose vector is zero are omitted.

The group acts by left translation: ``act(x, f)`` is the function ``z ->
f(x^-1 z)`` represented at depth ``N + |x|``.  The inner product of two
functions at common depth ``D`` is ``sum_{|w| = D} f(w)* B_(last letter)
g(w)``, conjugate-linear in the first argument; compatibility of the
system makes it independent of the choice of ``D``.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import InputError, ResourceLimitError, ValidationError
from .system import MatrixSystem
from .words import FiniteSubtree, Word, last_letter

# Refinement depths beyond this fail fast; spheres grow geometrically.
DEPTH_CAP = 12


def _check_depth(depth: int, depth_cap: int | None) -> None:
    cap = DEPTH_CAP if depth_cap is None else depth_cap
    if depth > cap:
        raise ResourceLimitError(
            f"requested depth {depth} exceeds the cap {cap}; "
            f"the sphere has on the order of q**{depth} vertices"
        )


class MultiplicativeFunction:
    """A depth-``N`` multiplicative function over a matrix system."""

    __slots__ = ("system", "depth", "values")

    def __init__(
        self,
        system: MatrixSystem,
        depth: int,
        values: Mapping[Word, np.ndarray],
    ):
        if depth < 1:
            raise InputError("depth must be at least one")
        self.system = system
        self.depth = depth
        vals: dict[Word, np.ndarray] = {}
        for x, v in values.items():
            if x.alphabet != system.alphabet:
                raise InputError("support word over a different alphabet")
            if len(x) != depth:
                raise InputError(
                    f"support word {x} has length {len(x)}, expected {depth}"
                )
            vec = np.asarray(v, dtype=complex).reshape(-1)
            d = system.dims[last_letter(x)]
            if vec.shape != (d,):
                raise InputError(
                    f"value at {x} has shape {vec.shape}, expected ({d},)"
                )
            if np.any(vec):
                vals[x] = vec
        self.values = vals

    @property
    def alphabet(self):
        return self.system.alphabet

    def support(self) -> list[Word]:
        return sorted(self.values, key=Word.sort_key)

    def __repr__(self) -> str:
        return (
            f"MultiplicativeFunction(depth={self.depth}, "
            f"support={len(self.values)})"
        )


def shadow(system: MatrixSystem, x: Word, v: np.ndarray) -> MultiplicativeFunction:
    """The depth-``|x|`` function supported on the single word ``x``."""
    if len(x) < 1:
        raise InputError("a shadow needs a nontrivial word")
    return MultiplicativeFunction(system, len(x), {x: v})


def refine(
    f: MultiplicativeFunction, depth: int, depth_cap: int | None = None
) -> MultiplicativeFunction:
    """Re-express ``f`` at a larger depth by pushing values outward."""
    if depth < f.depth:
        raise ValidationError("cannot refine to a smaller depth")
    if depth == f.depth:
        return f
    _check_depth(depth, depth_cap)
    sysm = f.system
    al = sysm.alphabet
    values = f.values
    for _ in range(depth - f.depth):
        nxt: dict[Word, np.ndarray] = {}
        for x, v in values.items():
            t = last_letter(x)
            banned = al.inverse(t)
            for c in al.letters:
                if c == banned:
                    continue
                m = sysm._H.get((c, t))
                if m is None:
                    continue
                w = m @ v
                if np.any(w):
                    nxt[Word(al, x.data + (al._to_int[c],))] = w
        values = nxt
    return MultiplicativeFunction(sysm, depth, values)


def evaluate(f: MultiplicativeFunction, y: Word) -> np.ndarray:
    """Value of ``f`` at a word of length at least the depth."""
    if y.alphabet != f.alphabet:
        raise InputError("word over a different alphabet")
    if len(y) < f.depth:
        raise ValidationError(
            f"value at {y} (length {len(y)}) is not determined at depth {f.depth}"
        )
    al = f.alphabet
    prefix = y.prefix(f.depth)
    v = f.values.get(prefix)
    if v is None:
        return np.zeros(f.system.dims[last_letter(y)], dtype=complex)
    prev = al._from_int[y.data[f.depth - 1]]
    for k in range(f.depth, len(y)):
        cur = al._from_int[y.data[k]]
        v = f.system.H(cur, prev) @ v
        prev = cur
    return v


def inner_product(f: MultiplicativeFunction, g: MultiplicativeFunction) -> complex:
    """Inner product at common depth, conjugate-linear in ``f``."""
    if not f.system.close_to(g.system):
        raise InputError("functions live over different systems")
    d = max(f.depth, g.depth)
    fr = refine(f, d)
    gr = refine(g, d)
    total = 0.0 + 0.0j
    for x, v in fr.values.items():
        w = gr.values.get(x)
        if w is not None:
            total += v.conj() @ f.system.B(last_letter(x)) @ w
    return complex(total)


def norm2(f: MultiplicativeFunction) -> float:
    return max(inner_product(f, f).real, 0.0)


def act(
    x: Word, f: MultiplicativeFunction, depth_cap: int | None = None
) -> MultiplicativeFunction:
    """Left translation: the function ``z -> f(x^-1 z)`` at depth ``N + |x|``.

    A value at ``z`` in the new sphere is nonzero only when the depth-``N``
    prefix of ``x^-1 z`` supports ``f``; the support is therefore walked by
    extending each supporting word by at most ``2 |x|`` letters.
    """
    if x.alphabet != f.alphabet:
        raise InputError("word over a different alphabet")
    n_out = f.depth + len(x)
    if len(x) == 0:
        return f
    _check_depth(n_out, depth_cap)
    sysm = f.system
    al = f.alphabet
    out: dict[Word, np.ndarray] = {}
    max_ext = 2 * len(x)

    def walk(w: Word, v: np.ndarray, ext: int) -> None:
        z = x * w
        if len(z) == n_out and np.any(v):
            out[z] = v
        if ext == max_ext:
            return
        t = last_letter(w)
        banned = al.inverse(t)
        for c in al.letters:
            if c == banned:
                continue
            m = sysm._H.get((c, t))
            if m is None:
                continue
            v2 = m @ v
            if np.any(v2):
                walk(Word(al, w.data + (al._to_int[c],)), v2, ext + 1)

    for p, vp in f.values.items():
        walk(p, vp, 0)
    return MultiplicativeFunction(sysm, n_out, out)


def norm_via_subtree(f: MultiplicativeFunction, tree: FiniteSubtree) -> float:
    """Squared norm as the terminal sum over a complete subtree containing
    the ball of the function's depth around the identity."""
    if tree.alphabet != f.alphabet:
        raise InputError("subtree over a different alphabet")
    if not tree.is_complete:
        raise ValidationError("norm needs a complete subtree")
    if not tree.contains_ball(f.alphabet.identity, f.depth):
        raise ValidationError(
            "subtree must contain the ball of the function's depth"
        )
    total = 0.0
    for t in tree.terminals:
        v = evaluate(f, t)
        total += float((v.conj() @ f.system.B(last_letter(t)) @ v).real)
    return total


def matrix_coefficient(
    x: Word, f: MultiplicativeFunction, g: MultiplicativeFunction
) -> complex:
    """Pairing ``<act(x, f), g>`` of the translated function against ``g``."""
    return inner_product(act(x, f), g)


def functions_close(
    f: MultiplicativeFunction, g: MultiplicativeFunction, tol: float = 1e-9
) -> bool:
    """Equality after refining to a common depth, within ``tol`` per value."""
    if not f.system.close_to(g.system):
        return False
    d = max(f.depth, g.depth)
    fr = refine(f, d)
    gr = refine(g, d)
    for x in set(fr.values) | set(gr.values):
        v = fr.values.get(x)
        w = gr.values.get(x)
        if v is None:
            v = np.zeros_like(w)
        if w is None:
            w = np.zeros_like(v)
        if np.linalg.norm(v - w) > tol:
            return False
    return True
