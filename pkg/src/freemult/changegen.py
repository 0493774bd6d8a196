"""Change of free generators and transport of systems across it.

A generator map sends each letter of a source alphabet to a word over a
target alphabet such that the images form a free basis of the target
group.  The two words of the same group element — one over each alphabet —
have comparable lengths, with stretch factors given by the longest image
in each direction.

The cone of a source vertex maps into, out of, or across a target cone;
the bounded exhaustive search deciding which is the backbone of the
frontier computation: for a target vertex ``z``, the frontier ``Y(z)`` is
the antichain of minimal source vertices whose cones embed into the target
cone at ``z``.  Frontiers index the blocks of the transported system, and
the transported transfer matrices are propagation products along frontier
suffixes.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import (
    InputError,
    InternalCheckError,
    ResourceLimitError,
    ValidationError,
)
from .multfunc import MultiplicativeFunction, evaluate, _check_depth
from .subgroup import automaton_from_generators
from .system import MatrixSystem, compatibility_defect
from .words import Alphabet, FiniteSubtree, Word, drop_last, last_letter, sphere

try:
    from . import _kernel as _k
except ImportError:
    from . import _kernel_py as _k

INCLUDED = _k.INCLUDED
MIXED = _k.MIXED
DISJOINT = _k.DISJOINT


class GeneratorMap:
    """A free-basis substitution from a source onto a target alphabet.

    ``images`` maps source letters to nonempty target words; inverse
    letters may be omitted and are filled in by inversion.  Validation
    checks the images generate the whole target group (fold of their rose
    has a single state) and computes the inverse substitution by Nielsen
    reduction; the two routes must agree.
    """

    __slots__ = (
        "source",
        "target",
        "images",
        "back_images",
        "stretch_to_target",
        "stretch_to_source",
        "_img_table",
        "_classify_memo",
    )

    def __init__(
        self,
        source: Alphabet,
        target: Alphabet,
        images: Mapping[str, "Word | str"],
    ):
        if source.size != target.size:
            raise ValidationError(
                "source and target alphabets must have equal rank"
            )
        self.source = source
        self.target = target

        img: dict[str, Word] = {}
        for s, w in images.items():
            if s not in source:
                raise InputError(f"unknown source letter {s!r}")
            img[s] = target.word(w)
        full: dict[str, Word] = {}
        for s in source.letters:
            si = source.inverse(s)
            if s in img:
                full[s] = img[s]
                if si in img and img[si] != img[s].inverse():
                    raise ValidationError(
                        f"images of {s!r} and {si!r} are not inverse"
                    )
            elif si in img:
                full[s] = img[si].inverse()
            else:
                raise InputError(f"no image for letter {s!r} or its inverse")
        for s, w in full.items():
            if len(w) == 0:
                raise ValidationError(f"image of {s!r} is trivial")
        self.images = full

        # Route one: fold the rose of the images; a basis leaves one state.
        positives = _positive_letters(source)
        try:
            aut = automaton_from_generators(
                target, [full[s] for s in positives]
            )
            fold_ok = aut.index == 1
        except ValidationError:
            fold_ok = False

        # Route two: Nielsen-reduce the image tuple while tracking source
        # expressions; a basis reduces to single letters.
        back = _nielsen_back_images(source, target, full, positives)
        if (back is None) == fold_ok:
            raise InternalCheckError(
                "folding and Nielsen reduction disagree on the basis property"
            )
        if back is None:
            raise ValidationError(
                "images do not form a free basis of the target group"
            )
        self.back_images = back

        self.stretch_to_target = max(len(w) for w in full.values())
        self.stretch_to_source = max(len(w) for w in back.values())

        m = source.rank
        table: list[tuple[int, ...]] = []
        for i in range(-m, m + 1):
            if i == 0:
                table.append(())
            else:
                table.append(full[source._from_int[i]].data)
        self._img_table = tuple(table)
        self._classify_memo: dict[tuple, int] = {}

        for a in target.letters:
            if self.expand(self.spell(target.word([a]))) != target.word([a]):
                raise InternalCheckError(
                    f"inverse substitution fails on letter {a!r}"
                )

    def expand(self, w: Word) -> Word:
        """Target word of a source word (apply the substitution)."""
        if w.alphabet != self.source:
            raise InputError("expand needs a source-alphabet word")
        return Word(
            self.target,
            _k.apply_morphism(w.data, self._img_table, self.source.rank),
        )

    def spell(self, w: Word) -> Word:
        """Source word of a target word (apply the inverse substitution)."""
        if w.alphabet != self.target:
            raise InputError("spell needs a target-alphabet word")
        out = self.source.identity
        for a in w.letters():
            out = out * self.back_images[a]
        return out

    def classify(self, y: Word, z: Word) -> int:
        """INCLUDED, DISJOINT, or MIXED position of the source cone at ``y``
        relative to the target cone at ``z``, decided exhaustively within
        the stretch bound."""
        if len(y) == 0 or len(z) == 0:
            raise ValidationError("cones are rooted at nontrivial vertices")
        key = (y.data, z.data)
        cached = self._classify_memo.get(key)
        if cached is not None:
            return cached
        limit = contract_length_bound(self, z) + 1
        res = _k.classify_cone(
            y.data,
            z.data,
            self._img_table,
            self.source.rank,
            max(limit, len(y)),
            self.stretch_to_target,
        )
        self._classify_memo[key] = res
        return res

    def __repr__(self) -> str:
        ims = ", ".join(
            f"{s}->{self.images[s]}" for s in _positive_letters(self.source)
        )
        return f"GeneratorMap({ims})"


def _positive_letters(al: Alphabet) -> list[str]:
    return [al._from_int[i] for i in range(1, al.rank + 1)]


def _nielsen_back_images(
    source: Alphabet,
    target: Alphabet,
    images: Mapping[str, Word],
    positives: list[str],
) -> dict[str, Word] | None:
    """Express each target letter as a source word, or ``None`` if the
    images are not a basis.

    Nielsen reduction on pairs ``(image word, source expression)``: as long
    as some product of two tuple entries is shorter than a factor, replace
    that factor; a generating tuple of the free group reduces this way to
    single letters in distinct inverse pairs.
    """
    pairs: list[tuple[Word, Word]] = [
        (images[s], source.word([s])) for s in positives
    ]

    def state_key(ps):
        # Total length first, then the sorted word keys: every applied move
        # strictly decreases this, so the loop terminates.
        return (
            sum(len(w) for w, _ in ps),
            sorted(w.sort_key() for w, _ in ps),
        )

    while True:
        if any(len(w) == 0 for w, _ in pairs):
            return None
        key = state_key(pairs)
        best = None
        n = len(pairs)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                wi, ei = pairs[i]
                for wj, ej in (
                    pairs[j],
                    (pairs[j][0].inverse(), pairs[j][1].inverse()),
                ):
                    for cand in ((wi * wj, ei * ej), (wj * wi, ej * ei)):
                        if len(cand[0]) > len(wi):
                            continue
                        trial = list(pairs)
                        trial[i] = cand
                        tkey = state_key(trial)
                        if tkey < key and (best is None or tkey < best[0]):
                            best = (tkey, trial)
        if best is None:
            break
        pairs = best[1]

    seen: dict[str, Word] = {}
    for w, e in pairs:
        if len(w) != 1:
            return None
        a = last_letter(w)
        ai = target.inverse(a)
        if a in seen or ai in seen:
            return None
        seen[a] = e
        seen[ai] = e.inverse()
    if set(seen) != set(target.letters):
        return None
    return seen


def contract_length_bound(gm: GeneratorMap, z: Word) -> int:
    """Source-length bound past which a cone's position relative to the
    target cone at ``z`` is decided: father-vertices of frontier members
    never exceed it."""
    return gm.stretch_to_target * (len(z) + gm.stretch_to_source) + 1


def cone_included(gm: GeneratorMap, y: Word, z: Word) -> bool:
    """Whether the source cone at ``y`` lands inside the target cone at ``z``."""
    return gm.classify(y, z) == INCLUDED


class YFrontier:
    """The minimal source vertices whose cones embed into a target cone.

    ``members`` are in shortlex order.  A member is *settled* when its cone
    already embeds into a deeper cone ``C(z b)`` for some letter ``b``;
    unsettled members are the roots of pruned subtrees.
    """

    __slots__ = ("z", "members", "settled")

    def __init__(self, z: Word, members: tuple[Word, ...], settled: dict[Word, bool]):
        self.z = z
        self.members = members
        self.settled = settled

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"YFrontier({self.z}: {[str(m) for m in self.members]})"


def compute_Y(gm: GeneratorMap, z: Word) -> YFrontier:
    """Frontier of the target cone at ``z`` in the source tree.

    Breadth-first from the root's children: included vertices are members,
    disjoint ones are dropped, mixed ones are expanded.  The stretch bound
    caps the search depth; crossing it means the map is inconsistent.
    """
    if z.alphabet != gm.target:
        raise InputError("frontier needs a target-alphabet vertex")
    if len(z) == 0:
        raise ValidationError("frontiers are rooted at nontrivial vertices")
    bound = contract_length_bound(gm, z)
    members: list[Word] = []
    queue: list[Word] = list(_source_children(gm.source, gm.source.identity))
    while queue:
        y = queue.pop(0)
        if len(y) > bound + 1:
            raise InternalCheckError(
                f"frontier search for {z} passed the stretch bound {bound}"
            )
        res = gm.classify(y, z)
        if res == INCLUDED:
            members.append(y)
        elif res == MIXED:
            queue.extend(_source_children(gm.source, y))
    members.sort(key=Word.sort_key)
    settled = {}
    deeper = [
        z * gm.target.word([b])
        for b in gm.target.letters
        if b != gm.target.inverse(last_letter(z))
    ]
    for y in members:
        settled[y] = any(gm.classify(y, zb) == INCLUDED for zb in deeper)
    return YFrontier(z, tuple(members), settled)


def _source_children(al: Alphabet, y: Word):
    banned = -y.data[-1] if y.data else 0
    for i in al._file_ints:
        if i != banned:
            yield Word(al, y.data + (i,))


def pruned_subtree(gm: GeneratorMap, w: Word, a: str) -> FiniteSubtree:
    """The complete source subtree hanging at a frontier member ``w`` of the
    target letter ``a``, pruned at the deeper frontiers.

    Vertices: the parent of ``w``, then all descendants of ``w`` up to and
    including the first ones whose cones embed into some deeper cone
    ``C(a b)``.
    """
    if a not in gm.target:
        raise InputError(f"unknown target letter {a!r}")
    za = gm.target.word([a])
    if gm.classify(w, za) != INCLUDED:
        raise ValidationError(f"{w} is not a frontier member of {a!r}")
    if len(w) > 1 and gm.classify(drop_last(w), za) == INCLUDED:
        raise ValidationError(f"{w} is not minimal over {a!r}")
    deeper = [
        za * gm.target.word([b])
        for b in gm.target.letters
        if b != gm.target.inverse(a)
    ]
    bound = max(contract_length_bound(gm, zb) for zb in deeper)
    verts = [drop_last(w)]
    queue = [w]
    while queue:
        y = queue.pop(0)
        if len(y) > bound + 1:
            raise InternalCheckError(
                f"pruned subtree at {w} passed the stretch bound {bound}"
            )
        verts.append(y)
        if any(gm.classify(y, zb) == INCLUDED for zb in deeper):
            continue
        queue.extend(_source_children(gm.source, y))
    tree = FiniteSubtree(gm.source, verts)
    if not tree.is_complete:
        raise InternalCheckError("pruned subtree came out incomplete")
    return tree


def _frontier_projection(
    gm: GeneratorMap, front: YFrontier, g: Word
) -> tuple[Word, Word]:
    """Split the source word of ``g`` as (frontier member, remaining suffix).

    ``g`` is a target-alphabet element whose cone embeds into the cone of
    the frontier's root; the member is the unique one on the source
    geodesic of ``g``.
    """
    s = gm.spell(g)
    for k in range(1, len(s) + 1):
        p = s.prefix(k)
        if gm.classify(p, front.z) == INCLUDED:
            if p not in front.settled:
                raise InternalCheckError(
                    f"projection of {g} hit {p}, which is not a frontier member"
                )
            suffix = Word(gm.source, s.data[k:])
            return p, suffix
    raise InternalCheckError(f"no frontier prefix found for {g}")


def transport_system(
    gm: GeneratorMap, sys: MatrixSystem, tol: float = 1e-8
) -> MatrixSystem:
    """Re-express a system over the source alphabet as one over the target
    alphabet.

    The space at a target letter is the direct sum, over its frontier
    members, of the source spaces at the members' final letters; forms are
    block-diagonal.  A transfer block propagates along the source suffix
    between frontier members, and is the identity when the suffix is
    empty.
    """
    if sys.alphabet != gm.source:
        raise InputError("transport needs a system over the source alphabet")
    al = gm.target
    fronts = {a: compute_Y(gm, al.word([a])) for a in al.letters}

    block_dims: dict[str, list[int]] = {}
    offsets: dict[str, dict[Word, int]] = {}
    dims: dict[str, int] = {}
    for a in al.letters:
        offs: dict[Word, int] = {}
        pos = 0
        sizes = []
        for y in fronts[a].members:
            offs[y] = pos
            d = sys.dims[last_letter(y)]
            sizes.append(d)
            pos += d
        block_dims[a] = sizes
        offsets[a] = offs
        dims[a] = pos

    B = {}
    for a in al.letters:
        m = np.zeros((dims[a], dims[a]), dtype=complex)
        for y in fronts[a].members:
            o = offsets[a][y]
            d = sys.dims[last_letter(y)]
            m[o : o + d, o : o + d] = sys.B(last_letter(y))
        B[a] = m

    H = {}
    for a in al.letters:
        for b in al.letters:
            if b == al.inverse(a):
                continue
            mat = np.zeros((dims[b], dims[a]), dtype=complex)
            for zrow in fronts[b].members:
                g = al.word([a]) * gm.expand(zrow)
                member, suffix = _frontier_projection(gm, fronts[a], g)
                o_r = offsets[b][zrow]
                d_r = sys.dims[last_letter(zrow)]
                o_c = offsets[a][member]
                d_c = sys.dims[last_letter(member)]
                if len(suffix) == 0:
                    src = gm.spell(g)
                    if last_letter(src) != last_letter(zrow):
                        raise InternalCheckError(
                            "empty-suffix block with mismatched value spaces"
                        )
                    mat[o_r : o_r + d_r, o_c : o_c + d_c] = np.eye(d_r)
                else:
                    prev = last_letter(member)
                    block = np.eye(sys.dims[prev], dtype=complex)
                    for i in suffix.data:
                        cur = gm.source._from_int[i]
                        block = sys.H(cur, prev) @ block
                        prev = cur
                    if prev != last_letter(zrow):
                        raise InternalCheckError(
                            "propagation block with mismatched value spaces"
                        )
                    mat[o_r : o_r + d_r, o_c : o_c + d_c] = block
            if np.any(mat):
                H[(b, a)] = mat

    out = MatrixSystem(al, dims, H, B)
    if compatibility_defect(sys) <= tol:
        d = compatibility_defect(out)
        if d > max(tol, 1e-8) * 10:
            raise InternalCheckError(
                f"transport broke compatibility: defect {d:.3e}"
            )
    return out


def intertwine_changegen(
    gm: GeneratorMap,
    sys: MatrixSystem,
    f: MultiplicativeFunction,
    transported: MatrixSystem | None = None,
    depth: int | None = None,
    depth_cap: int | None = None,
) -> MultiplicativeFunction:
    """Carry a multiplicative function over the source alphabet to one over
    the target alphabet, preserving norms and the translation action.

    The value of the output at a target word ``x a``, in the block of a
    frontier member ``y`` of ``a``, is the input evaluated at the source
    word of ``x * expand(y)``.
    """
    if f.system is not sys and not f.system.close_to(sys):
        raise InputError("function does not live over the given system")
    if transported is None:
        transported = transport_system(gm, sys)
    al = gm.target
    n_out = depth if depth is not None else max(2, f.depth * gm.stretch_to_target)
    _check_depth(n_out, depth_cap)
    fronts = {a: compute_Y(gm, al.word([a])) for a in al.letters}

    values: dict[Word, np.ndarray] = {}
    for xa in sphere(al, n_out):
        a = last_letter(xa)
        x = drop_last(xa)
        front = fronts[a]
        vec = np.zeros(transported.dims[a], dtype=complex)
        pos = 0
        for y in front.members:
            d = sys.dims[last_letter(y)]
            s = gm.spell(x * gm.expand(y))
            if len(s) < f.depth:
                raise ValidationError(
                    f"output depth {n_out} is too small for input depth {f.depth}"
                )
            vec[pos : pos + d] = evaluate(f, s)
            pos += d
        if np.any(vec):
            values[xa] = vec
    return MultiplicativeFunction(transported, n_out, values)
