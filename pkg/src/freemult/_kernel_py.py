"""Pure-Python word kernel: reduction, multiplication, bounded cone search.

Letters are nonzero signed integers; ``-i`` is the inverse of ``+i``.  A word
is a tuple of letters with no adjacent cancelling pair.  The compiled twin in
``_kernel.pyx`` implements exactly the same contract; ``test_kernel_parity``
keeps the two in lock-step.
"""

BACKEND = "python"

INCLUDED = 1
MIXED = 0
DISJOINT = -1


def reduce_word(letters):
    """Freely reduce a letter sequence to a tuple."""
    out = []
    for letter in letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def multiply(x, y):
    """Product of two reduced words, reduced."""
    i = len(x)
    j = 0
    n = len(y)
    while i > 0 and j < n and x[i - 1] == -y[j]:
        i -= 1
        j += 1
    return x[:i] + y[j:]


def invert(x):
    return tuple(-letter for letter in reversed(x))


def apply_morphism(word, images, m):
    """Image of ``word`` under letter -> images[letter + m], freely reduced.

    ``images`` is a flat table of length 2m + 1 over the source letters
    -m..m (slot m unused); each entry is a reduced word in the target
    alphabet.
    """
    out = []
    for letter in word:
        for t in images[letter + m]:
            if out and out[-1] == -t:
                out.pop()
            else:
                out.append(t)
    return tuple(out)


def classify_cone(y, z, images, m, limit, max_step):
    """Position of the image of the source cone at ``y`` relative to the
    target cone at ``z``.

    Walks every reduced source word ``u`` extending ``y`` with ``|u| <=
    limit``, tracking the reduced form of ``g(u) = z^-1 * image(u)``; ``u``
    lands in the target cone iff ``g(u)`` is empty or does not start with
    the inverse of ``z``'s last letter.  A branch whose verdict provably
    cannot change within the remaining budget is counted once and not
    expanded: each extension step erodes at most ``max_step`` letters of
    ``g``, so the first letter survives whenever ``len(g)`` exceeds the
    total remaining erosion.

    Returns INCLUDED if every visited word is inside, DISJOINT if every
    one is outside, MIXED otherwise.
    """
    if not z:
        raise ValueError("target cone root must be nontrivial")
    bad = -z[-1]
    g0 = multiply(invert(z), apply_morphism(y, images, m))
    seen_in = False
    seen_out = False
    stack = [(g0, y[-1] if y else 0, len(y))]
    while stack:
        g, last, depth = stack.pop()
        if not g or g[0] != bad:
            seen_in = True
        else:
            seen_out = True
        if seen_in and seen_out:
            return MIXED
        if depth >= limit:
            continue
        if len(g) > (limit - depth) * max_step:
            continue
        for letter in range(-m, m + 1):
            if letter == 0 or letter == -last:
                continue
            stack.append((multiply(g, images[letter + m]), letter, depth + 1))
    return INCLUDED if seen_in else DISJOINT
