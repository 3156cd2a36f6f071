"""Random channel sampling: Rayleigh main channel with its singular value
decomposition, eavesdropper fast fading, and Haar-distributed unitaries.
"""

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MainChannel",
    "FadingDraw",
    "main_channel_from_matrix",
    "sample_main_channel",
    "sample_fading",
    "sample_haar_unitary",
    "sample_haar_unitary_batch",
    "complex_gaussian",
    "load_channel_file",
]


def complex_gaussian(rng, shape):
    """i.i.d. CN(0, 1) entries of the given shape."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True)
class MainChannel:
    """Main channel H (N x K) with its cached right-singular structure.

    ``lam`` holds the K squared singular values (zero-padded when N < K,
    descending) and ``v1`` the K x K right singular basis, so that
    H = V0 diag(sqrt(lam)) V1^H.
    """

    h: np.ndarray
    lam: np.ndarray
    v1: np.ndarray


@dataclass(frozen=True)
class FadingDraw:
    """One draw of the M x K eavesdropper fast fading W."""

    w: np.ndarray
    sigma_row: np.ndarray

    def scaled(self):
        """W * diag(sigma)^(1/2), the physical channel draw."""
        return self.w * np.sqrt(self.sigma_row)[None, :]


def main_channel_from_matrix(h):
    """Wrap an explicit channel matrix, computing lam and V1."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise ValueError(f"channel matrix must be 2-D, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ArithmeticError("channel matrix has non-finite entries")
    n, k = h.shape
    # Right singular basis of the full K x K space; vh is K x K.
    _, s, vh = np.linalg.svd(h, full_matrices=True)
    lam = np.zeros(k)
    lam[: s.size] = s**2
    return MainChannel(h=h, lam=lam, v1=vh.conj().T)


def sample_main_channel(beta, rng):
    """Draw H with entry (n, k) ~ CN(0, beta[n, k])."""
    b = beta.beta
    h = np.sqrt(b) * complex_gaussian(rng, b.shape)
    return main_channel_from_matrix(h)


def sample_fading(m, k, sigma_row, rng):
    """Draw the M x K fast fading for one eavesdropper location."""
    if m < 1 or k < 1:
        raise ValueError(f"fading dimensions must be >= 1, got m={m}, k={k}")
    sigma_row = np.asarray(sigma_row, dtype=float)
    if sigma_row.shape != (k,) or np.any(sigma_row <= 0):
        raise ValueError("sigma_row must be a length-k positive vector")
    return FadingDraw(w=complex_gaussian(rng, (m, k)), sigma_row=sigma_row)


def sample_haar_unitary(k, rng):
    """Haar-distributed K x K unitary via QR of a Ginibre matrix with the
    R-diagonal phase correction."""
    return sample_haar_unitary_batch(k, 1, rng)[0]


def sample_haar_unitary_batch(k, count, rng):
    """Batch of ``count`` independent Haar unitaries, shape (count, k, k)."""
    if k < 1:
        raise ValueError(f"dimension must be >= 1, got {k}")
    z = complex_gaussian(rng, (count, k, k))
    q, r = np.linalg.qr(z)
    d = np.einsum("...ii->...i", r)
    ph = d / np.abs(d)
    return q * ph[:, None, :]


def load_channel_file(path):
    """Load an injected channel matrix from a JSON file.

    Format: {"h": [[[re, im], ...], ...]} row-major.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    rows = raw["h"]
    h = np.array([[complex(re, im) for re, im in row] for row in rows])
    return main_channel_from_matrix(h)
