"""Transfer operator on Hermitian form tuples and its leading eigenpair.

The transfer operator sends a tuple of Hermitian matrices ``(X_a)_a`` to
``(sum_b H(b,a)* X_b H(b,a))_a``.  It preserves the cone of positive
semidefinite tuples, so its spectral radius is attained on that cone; the
leading eigenpair drives the normalization of a system to a compatible
one.

Vectorization uses the real basis of Hermitian matrices (diagonal units,
symmetric and antisymmetric off-diagonal units), making the operator a
real matrix on ``sum_a dims[a]^2`` coordinates.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import InputError, NumericError, ValidationError
from .system import MatrixSystem, compatibility_defect, is_psd

FormTuple = dict[str, np.ndarray]


def apply_transfer(sys: MatrixSystem, forms: Mapping[str, np.ndarray]) -> FormTuple:
    """One transfer step: pull each form back along the outgoing matrices."""
    out: FormTuple = {}
    for a in sys.alphabet.letters:
        acc = np.zeros((sys.dims[a], sys.dims[a]), dtype=complex)
        for b in sys.alphabet.letters:
            m = sys._H.get((b, a))
            if m is not None:
                x = np.asarray(forms[b], dtype=complex)
                acc += m.conj().T @ x @ m
        out[a] = acc
    return out


class _HermitianLayout:
    """Real coordinates on tuples of Hermitian matrices."""

    def __init__(self, sys: MatrixSystem):
        self.letters = sys.alphabet.letters
        self.dims = {a: sys.dims[a] for a in self.letters}
        self.offsets = {}
        n = 0
        for a in self.letters:
            self.offsets[a] = n
            n += self.dims[a] ** 2
        self.size = n

    def to_vector(self, forms: Mapping[str, np.ndarray]) -> np.ndarray:
        v = np.zeros(self.size)
        for a in self.letters:
            d = self.dims[a]
            x = np.asarray(forms[a])
            o = self.offsets[a]
            k = o
            for i in range(d):
                v[k] = x[i, i].real
                k += 1
            for i in range(d):
                for j in range(i + 1, d):
                    v[k] = x[i, j].real
                    v[k + 1] = x[i, j].imag
                    k += 2
        return v

    def from_vector(self, v: np.ndarray) -> FormTuple:
        out: FormTuple = {}
        for a in self.letters:
            d = self.dims[a]
            x = np.zeros((d, d), dtype=complex)
            k = self.offsets[a]
            for i in range(d):
                x[i, i] = v[k]
                k += 1
            for i in range(d):
                for j in range(i + 1, d):
                    x[i, j] = v[k] + 1j * v[k + 1]
                    x[j, i] = v[k] - 1j * v[k + 1]
                    k += 2
            out[a] = x
        return out


def transfer_matrix(sys: MatrixSystem) -> tuple[np.ndarray, _HermitianLayout]:
    """The transfer operator as a dense real matrix in Hermitian coordinates."""
    layout = _HermitianLayout(sys)
    n = layout.size
    m = np.zeros((n, n))
    basis = np.eye(n)
    for k in range(n):
        forms = layout.from_vector(basis[k])
        m[:, k] = layout.to_vector(apply_transfer(sys, forms))
    return m, layout


def _identity_tuple(sys: MatrixSystem) -> FormTuple:
    return {a: np.eye(sys.dims[a], dtype=complex) for a in sys.alphabet.letters}


def _trace_sum(forms: FormTuple) -> float:
    return float(sum(np.trace(x).real for x in forms.values()))


def _normalize_trace(forms: FormTuple) -> FormTuple:
    t = _trace_sum(forms)
    if t <= 0:
        raise NumericError("form tuple has nonpositive total trace")
    return {a: x / t for a, x in forms.items()}


def _symmetrize(forms: FormTuple) -> FormTuple:
    return {a: (x + x.conj().T) / 2 for a, x in forms.items()}


def _snorm(x: np.ndarray) -> float:
    return 0.0 if x.size == 0 else float(np.linalg.norm(x, 2))


def _residual(sys: MatrixSystem, rho: float, forms: FormTuple) -> float:
    img = apply_transfer(sys, forms)
    num = max(
        _snorm(img[a] - rho * forms[a]) for a in sys.alphabet.letters
    )
    scale = max(_snorm(forms[a]) for a in forms)
    return num / max(scale, 1e-300)


def _psd_tuple(forms: FormTuple, tol: float = 1e-9) -> bool:
    scale = max(_snorm(x) for x in forms.values())
    if scale == 0.0:
        return False
    return all(is_psd(x / scale, tol) for x in forms.values())


def _nilpotent_eigentuple(
    sys: MatrixSystem, mat: np.ndarray, layout: _HermitianLayout
) -> FormTuple:
    # With spectral radius zero the operator is nilpotent; the last nonzero
    # iterate of the identity tuple is positive semidefinite and killed by
    # the next step, hence an eigenvector for eigenvalue zero.
    v = layout.to_vector(_identity_tuple(sys))
    prev = v
    for _ in range(layout.size + 1):
        nxt = mat @ prev
        if np.linalg.norm(nxt) <= 1e-14 * max(1.0, np.linalg.norm(prev)):
            return _symmetrize(layout.from_vector(prev))
        prev = nxt
    raise NumericError("transfer operator looked nilpotent but never vanished")


def pf_eigenpair(sys: MatrixSystem, tol: float = 1e-9) -> tuple[float, FormTuple]:
    """Spectral radius of the transfer operator and a positive semidefinite
    eigentuple, normalized to total trace one.

    Raises :class:`NumericError` when no certified pair is found.
    """
    if sys.total_dim == 0:
        raise InputError("the zero system has no leading eigenpair")
    mat, layout = transfer_matrix(sys)
    evals, evecs = np.linalg.eig(mat)
    rho = float(np.max(np.abs(evals))) if evals.size else 0.0

    if rho <= tol:
        forms = _normalize_trace(_nilpotent_eigentuple(sys, mat, layout))
        return 0.0, forms

    # Real eigenvalues near the spectral radius, best first.
    order = np.argsort(-evals.real)
    for k in order:
        lam = evals[k]
        if abs(lam.imag) > tol * max(1.0, rho):
            continue
        if lam.real < rho - max(tol, 1e-12) * max(1.0, rho):
            break
        vec = evecs[:, k]
        real_part = vec.real if np.linalg.norm(vec.real) >= np.linalg.norm(
            vec.imag
        ) else vec.imag
        forms = _symmetrize(layout.from_vector(real_part))
        t = _trace_sum(forms)
        if abs(t) < 1e-12:
            continue
        forms = {a: x / t for a, x in forms.items()}
        if not _psd_tuple(forms, 1e-7):
            continue
        forms = _normalize_trace(forms)
        if _residual(sys, lam.real, forms) <= max(tol, 1e-10) * max(1.0, rho):
            return float(lam.real), forms

    # Defective or numerically clustered peripheral spectrum: averaged power
    # iteration from the identity tuple stays in the cone and converges to a
    # leading eigenvector.
    v = layout.to_vector(_identity_tuple(sys))
    v /= np.linalg.norm(v)
    acc = np.zeros_like(v)
    lam_est = rho
    for it in range(1, 20001):
        w = mat @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            break
        lam_est = nw
        v = w / nw
        acc += v
        if it % 50 == 0:
            cand = acc / np.linalg.norm(acc)
            forms = _symmetrize(layout.from_vector(cand))
            try:
                forms = _normalize_trace(forms)
            except NumericError:
                continue
            if _psd_tuple(forms, 1e-7) and _residual(sys, rho, forms) <= max(
                tol, 1e-9
            ):
                return rho, _normalize_trace(forms)
    raise NumericError(
        f"no certified leading eigenpair (spectral radius {rho:.6e}, "
        f"last estimate {lam_est:.6e})"
    )


def normalize_to_compatible(
    sys: MatrixSystem, tol: float = 1e-9
) -> tuple[MatrixSystem, float]:
    """Rescale the transfer matrices and replace the forms so the system
    becomes compatible.

    Divides every ``H`` by the square root of the spectral radius and
    installs the leading eigentuple as the forms.  Returns the normalized
    system and the spectral radius of the input.  Fails when the spectral
    radius vanishes.
    """
    rho, forms = pf_eigenpair(sys, tol)
    if rho <= tol:
        raise ValidationError(
            "system is degenerate: the transfer operator has spectral radius zero"
        )
    out = sys.scale_H(1.0 / np.sqrt(rho)).with_forms(forms)
    defect = compatibility_defect(out)
    if defect > max(tol, 1e-9) * 100:
        raise NumericError(f"normalization left compatibility defect {defect:.3e}")
    return out, rho
