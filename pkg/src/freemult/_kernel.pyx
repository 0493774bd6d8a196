# cython: boundscheck=False, cdivision=True
"""Compiled word kernel; same contract as ``_kernel_py``.

Words stay Python tuples at the API boundary; the cone search runs on flat
C buffers with one preallocated scratch row per search depth.
"""

from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

BACKEND = "cython"

INCLUDED = 1
MIXED = 0
DISJOINT = -1


def reduce_word(letters):
    """Freely reduce a letter sequence to a tuple."""
    cdef list out = []
    cdef long letter
    for letter in letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def multiply(tuple x, tuple y):
    """Product of two reduced words, reduced."""
    cdef Py_ssize_t i = len(x)
    cdef Py_ssize_t j = 0
    cdef Py_ssize_t n = len(y)
    while i > 0 and j < n and <long> x[i - 1] == -(<long> y[j]):
        i -= 1
        j += 1
    return x[:i] + y[j:]


def invert(tuple x):
    cdef Py_ssize_t i
    cdef Py_ssize_t n = len(x)
    cdef list out = [0] * n
    for i in range(n):
        out[i] = -(<long> x[n - 1 - i])
    return tuple(out)


def apply_morphism(word, images, long m):
    """Image of ``word`` under letter -> images[letter + m], freely reduced."""
    cdef list out = []
    cdef long letter, t
    for letter in word:
        for t in images[letter + m]:
            if out and out[-1] == -t:
                out.pop()
            else:
                out.append(t)
    return tuple(out)


cdef struct Frame:
    Py_ssize_t glen
    long last
    long next_letter  # next child letter to try, scans -m..m


def classify_cone(tuple y, tuple z, images, long m, long limit, long max_step):
    """Bounded exhaustive cone comparison; see the pure twin for semantics."""
    if len(z) == 0:
        raise ValueError("target cone root must be nontrivial")

    cdef long bad = -(<long> z[-1])
    cdef Py_ssize_t base_depth = len(y)
    cdef Py_ssize_t levels = limit - base_depth + 1
    if levels < 1:
        levels = 1

    g0 = multiply(invert(z), apply_morphism(y, images, m))

    # Flatten the image table once.
    cdef Py_ssize_t tbl = 2 * m + 1
    cdef long *img_len = <long *> malloc(tbl * sizeof(long))
    cdef long **img = <long **> malloc(tbl * sizeof(long *))
    cdef Py_ssize_t i, k
    cdef long maxw = 0
    for i in range(tbl):
        w = images[i] if i != m else ()
        img_len[i] = len(w)
        if img_len[i] > maxw:
            maxw = img_len[i]
        img[i] = <long *> malloc((img_len[i] + 1) * sizeof(long))
        for k in range(img_len[i]):
            img[i][k] = <long> w[k]

    # One g-buffer per depth level; a child g can outgrow its parent by at
    # most the longest image.
    cdef Py_ssize_t cap = len(g0) + levels * maxw + 1
    cdef long **buf = <long **> malloc(levels * sizeof(long *))
    for i in range(levels):
        buf[i] = <long *> malloc(cap * sizeof(long))
    cdef Frame *stack = <Frame *> malloc(levels * sizeof(Frame))

    for k in range(len(g0)):
        buf[0][k] = <long> g0[k]
    stack[0].glen = len(g0)
    if base_depth > 0:
        stack[0].last = <long> y[-1]
    else:
        stack[0].last = 0
    stack[0].next_letter = -m

    cdef bint seen_in = False
    cdef bint seen_out = False
    cdef Py_ssize_t top = 0
    cdef bint entered = False  # has the current top frame been scored yet
    cdef Py_ssize_t depth, glen, child_len
    cdef long letter, wl
    cdef long *g
    cdef long *child
    cdef int result = MIXED

    while top >= 0:
        depth = base_depth + top
        g = buf[top]
        glen = stack[top].glen
        if not entered:
            entered = True
            if glen == 0 or g[0] != bad:
                seen_in = True
            else:
                seen_out = True
            if seen_in and seen_out:
                break
            if depth >= limit or glen > (limit - depth) * max_step:
                top -= 1
                continue
        letter = stack[top].next_letter
        while letter <= m and (letter == 0 or letter == -stack[top].last):
            letter += 1
        if letter > m:
            top -= 1
            continue
        stack[top].next_letter = letter + 1
        # child g = g * images[letter]
        child = buf[top + 1]
        wl = img_len[letter + m]
        i = glen
        k = 0
        while i > 0 and k < wl and g[i - 1] == -img[letter + m][k]:
            i -= 1
            k += 1
        memcpy(child, g, i * sizeof(long))
        child_len = i
        while k < wl:
            child[child_len] = img[letter + m][k]
            child_len += 1
            k += 1
        top += 1
        stack[top].glen = child_len
        stack[top].last = letter
        stack[top].next_letter = -m
        entered = False

    if not (seen_in and seen_out):
        result = INCLUDED if seen_in else DISJOINT

    for i in range(tbl):
        free(img[i])
    free(img)
    free(img_len)
    for i in range(levels):
        free(buf[i])
    free(buf)
    free(stack)
    return result
