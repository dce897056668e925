"""Dense complex linear-algebra kernel.

Matrices are plain ``numpy`` complex arrays in row-major order. Composite
spaces use the first-factor-most-significant convention: the basis ket
``|i_A i_B>`` sits at row ``i_A * d_B + i_B``.
"""
from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DimMismatch, DomainError, EmptyKeep, NotHermitian, NotSquare

HERMITIAN_TOL = 1e-9
SUPPORT_CUTOFF = 1e-12
NEGATIVE_CLIP = 1e-9


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns are orthonormal


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"matrix is {a.shape[0]}x{a.shape[1]}")
    return a


def hermiticity_residual(m) -> float:
    a = _square(m)
    return float(np.linalg.norm(a - a.conj().T))


def hermitian_eig(m) -> HermitianEigen:
    a = _square(m)
    dim = a.shape[0]
    resid = hermiticity_residual(a)
    if resid > HERMITIAN_TOL * dim:
        raise NotHermitian(f"||m - m^H||_F = {resid:.3g} exceeds {HERMITIAN_TOL * dim:.3g}")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return HermitianEigen(w, v)


def matrix_function(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    support_only: bool = False,
    support_cutoff: float = SUPPORT_CUTOFF,
) -> np.ndarray:
    """Apply the scalar function ``f`` to the spectrum of the Hermitian ``m``.

    With ``support_only`` the function acts only on eigenvalues with
    ``|lambda| > support_cutoff``; the rest map to 0 (the ``0 log 0 = 0``
    and pseudo-inverse conventions). In that mode eigenvalues in
    ``(-1e-9, 0)`` are treated as round-off and clipped to zero first.
    """
    w, v = hermitian_eig(m)
    if support_only:
        w = np.where((w < 0) & (w > -NEGATIVE_CLIP), 0.0, w)
        keep = np.abs(w) > support_cutoff
    else:
        keep = np.ones_like(w, dtype=bool)
    fw = np.zeros_like(w)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(w[keep]), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = w[keep][~np.isfinite(vals)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad}")
    fw[keep] = vals
    return (v * fw) @ v.conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor of ``dims`` whose position is not in ``keep``.

    Kept factors stay in their original order.
    """
    a = _square(m)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != a.shape[0]:
        raise DimMismatch(f"dims {dims} do not multiply to {a.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise EmptyKeep("nothing to keep")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimMismatch(f"keep positions {keep} out of range for {len(dims)} factors")

    n = len(dims)
    t = a.reshape(dims + dims)
    # einsum subscripts: row index i_k, column index j_k; traced factors share a letter
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    rows = [next(letters) for _ in range(n)]
    cols = [rows[k] if k not in keep else next(letters) for k in range(n)]
    out = [rows[k] for k in keep] + [cols[k] for k in keep]
    t = np.einsum("".join(rows) + "".join(cols) + "->" + "".join(out), t)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def commutator_norm(a, b) -> float:
    a = _square(a)
    b = _square(b)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.linalg.norm(a @ b - b @ a))
