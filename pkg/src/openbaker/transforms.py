"""Discrete Fourier and Walsh transforms on the quantized torus.

Position space at inverse Planck constant N is C^N with amplitudes
attached to the half-integer grid q_j = (j + 1/2) / N.  The centered DFT
exchanges this grid with the analogous momentum grid; the Walsh variants
replace the exponential by its digitwise-exact piecewise version and
factorize over the tensor decomposition C^(D^k) = (C^D)^(x k).
"""

from __future__ import annotations

import numpy as np

# Dense D**k matrices above this are refused (2 GiB+ of complex128).
MAX_DENSE_DIM = 2 ** 14


def digit_encode(j: int, D: int, k: int) -> tuple[int, ...]:
    """Base-D digits of j, most significant first, padded to length k."""
    if D < 2:
        raise ValueError(f"base must be >= 2, got {D}")
    if not 0 <= j < D**k:
        raise ValueError(f"index {j} out of range for {k} base-{D} digits")
    word = []
    for _ in range(k):
        word.append(j % D)
        j //= D
    return tuple(reversed(word))


def digit_decode(word, D: int) -> int:
    """Inverse of digit_encode: j = sum_l eps_l * D^(k-l)."""
    if D < 2:
        raise ValueError(f"base must be >= 2, got {D}")
    j = 0
    for eps in word:
        if not 0 <= eps < D:
            raise ValueError(f"digit {eps} out of range for base {D}")
        j = j * D + eps
    return j


def digit_reversal_permutation(D: int, k: int) -> np.ndarray:
    """perm[j] = index whose base-D word is the reverse of j's word."""
    n = D**k
    return np.arange(n).reshape((D,) * k).transpose(range(k - 1, -1, -1)).ravel()


def dft_centered(N: int) -> np.ndarray:
    """Centered DFT: entries N^(-1/2) exp(-2 pi i (j+1/2)(j'+1/2) / N).

    This is the transform respecting the parity symmetry q -> 1 - q of the
    half-integer grid.  Unitary.
    """
    if N < 1:
        raise ValueError(f"dimension must be >= 1, got {N}")
    g = np.arange(N) + 0.5
    return np.exp(-2j * np.pi * np.outer(g, g) / N) / np.sqrt(N)


def dft_plain(N: int) -> np.ndarray:
    """Plain DFT without the half-integer shift: N^(-1/2) exp(-2 pi i j j' / N)."""
    if N < 1:
        raise ValueError(f"dimension must be >= 1, got {N}")
    g = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(g, g) / N) / np.sqrt(N)


def _seed(D: int, variant: str) -> np.ndarray:
    if variant == "V":
        return dft_plain(D)
    if variant == "W":
        return dft_centered(D)
    raise ValueError(f"variant must be 'V' or 'W', got {variant!r}")


def build_walsh(D: int, k: int, variant: str = "V") -> np.ndarray:
    """Dense Walsh transform of dimension D^k.

    Variant "V" uses plain-DFT phases exp(-2 pi i eps eps' / D) digit by
    digit; variant "W" the half-integer phases (eps+1/2)(eps'+1/2).  Both
    equal the digit-reversal permutation composed with the k-fold tensor
    power of the D-dimensional seed transform, hence are unitary.  k = 0
    returns the 1x1 identity.
    """
    if D < 2:
        raise ValueError(f"base must be >= 2, got {D}")
    if k < 0:
        raise ValueError(f"length must be >= 0, got {k}")
    if D**k > MAX_DENSE_DIM:
        raise ValueError(f"dense dimension {D}**{k} exceeds cap {MAX_DENSE_DIM}")
    if k == 0:
        return np.ones((1, 1), dtype=complex)
    F = _seed(D, variant)
    M = F
    for _ in range(k - 1):
        M = np.kron(M, F)
    return M[digit_reversal_permutation(D, k)]


def walsh_apply(psi: np.ndarray, D: int, variant: str = "V") -> np.ndarray:
    """Matrix-free Walsh transform of a state of length D^k.

    Applies the D-dimensional seed along every tensor axis and reverses
    the axis order; cost O(D^k * k * D) instead of O(D^2k).
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    k = 0
    n = len(psi)
    while D**k < n:
        k += 1
    if D**k != n:
        raise ValueError(f"state length {n} is not a power of {D}")
    F = _seed(D, variant)
    T = psi.reshape((D,) * k)
    for ax in range(k):
        T = np.moveaxis(np.tensordot(F, T, axes=(1, ax)), 0, ax)
    return T.transpose(range(k - 1, -1, -1)).ravel()


def tensor_state(factors) -> np.ndarray:
    """Product state v_1 x v_2 x ... x v_k as a flat vector (first factor
    most significant, matching the digit order of the position grid)."""
    out = np.asarray(factors[0], dtype=complex)
    for v in factors[1:]:
        out = np.kron(out, np.asarray(v, dtype=complex))
    return out


def quantize_observable(samples, axis: str, N: int) -> np.ndarray:
    """Quantize an observable from its values on the grid (j+1/2)/N.

    Position observables multiply pointwise; momentum observables are the
    same diagonal conjugated by the centered DFT.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (N,):
        raise ValueError(f"expected {N} samples, got shape {samples.shape}")
    diag = np.diag(samples.astype(complex))
    if axis == "position":
        return diag
    if axis == "momentum":
        G = dft_centered(N)
        return G.conj().T @ diag @ G
    raise ValueError(f"axis must be 'position' or 'momentum', got {axis!r}")


def check_finite(M: np.ndarray) -> np.ndarray:
    """Validate a dense complex matrix: 2-D, nonempty, finite entries."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or Inf entries")
    return M
