"""Small linear-algebra helpers shared by the closed-form modules."""

from __future__ import annotations

import numpy as np


def hermitian_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A X = B for Hermitian positive-definite A, batched.

    Trailing dimension 2 uses the closed adjugate form (hot path inside the
    per-slot planners); larger sizes go through LAPACK.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] == 2:
        a00 = a[..., 0, 0].real
        a11 = a[..., 1, 1].real
        a01 = a[..., 0, 1]
        det = a00 * a11 - (a01.real**2 + a01.imag**2)
        inv = np.empty_like(a, dtype=np.result_type(a, b))
        inv[..., 0, 0] = a11
        inv[..., 1, 1] = a00
        inv[..., 0, 1] = -a01
        inv[..., 1, 0] = -np.conj(a01)
        inv /= det[..., None, None]
        return inv @ b
    return np.linalg.solve(a, b)


def real_checked(values, tol: float = 1e-10):
    """Real part of a mathematically real quantity, asserting the residue.

    Raises if |imag| > tol * max(|real|, tiny) anywhere.
    """
    values = np.asarray(values)
    if not np.iscomplexobj(values):
        return values
    re = values.real
    im = values.imag
    scale = np.maximum(np.abs(re), 1e-100)
    if np.any(np.abs(im) > tol * scale):
        worst = float(np.max(np.abs(im) / scale))
        raise ValueError(f"imaginary residue {worst:.3e} exceeds tolerance {tol:.1e}")
    return re


def hermitize(m: np.ndarray) -> np.ndarray:
    """(M + M^H)/2, bitwise Hermitian."""
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))
