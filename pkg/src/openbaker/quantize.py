"""Quantum matrices for closed and open baker's maps.

The standard (DFT) quantization conjugates a block-diagonal stack of
smaller centered DFTs by the full centered DFT; opening the map zeroes
the blocks of the removed branches.  The Walsh quantization replaces the
DFTs by Walsh transforms, which at N = D^k makes the model exactly
solvable; at D = 3 with the half-integer variant it reproduces the
"tilted diagonal" toy matrix entry for entry.
"""

from __future__ import annotations

import numpy as np

from .classical import OpenBakerSpec
from .transforms import build_walsh, check_finite, dft_centered, _seed


def _block_stack(N: int, D: int, kept, block: np.ndarray) -> np.ndarray:
    """Block-diagonal N x N matrix with `block` in the kept slots."""
    M = np.zeros((N, N), dtype=complex)
    n = N // D
    for b in kept:
        M[b * n:(b + 1) * n, b * n:(b + 1) * n] = block
    return M


def quantize_closed(D: int, N: int) -> np.ndarray:
    """Unitary quantization of the closed D-baker (Balazs-Voros style):
    G_N^* . blockdiag(G_{N/D}, ..., G_{N/D})."""
    if N % D != 0 or N < D:
        raise ValueError(f"dimension {N} must be a positive multiple of {D}")
    G = dft_centered(N)
    return G.conj().T @ _block_stack(N, D, range(D), dft_centered(N // D))


def quantize_open(spec: OpenBakerSpec, N: int) -> np.ndarray:
    """Subunitary quantization of an open baker: the closed propagator
    truncated by the projector onto the kept strips.  Rank s*N/D, all
    singular values 0 or 1."""
    if N % spec.D != 0 or N < spec.D:
        raise ValueError(f"dimension {N} must be a positive multiple of {spec.D}")
    G = dft_centered(N)
    return G.conj().T @ _block_stack(N, spec.D, spec.kept, dft_centered(N // spec.D))


def parity_operator(N: int) -> np.ndarray:
    """Signed position reversal: Pi |q_j> = -|q_{N-1-j}>.  Squares to I."""
    if N < 1:
        raise ValueError(f"dimension must be >= 1, got {N}")
    return -np.eye(N)[::-1].astype(complex)


def parity_isometry(N: int, sector: str) -> np.ndarray:
    """Orthonormal isometry from C^(N/2) onto one parity sector.

    "even" spans the amplitude-symmetric states (e_j + e_{N-1-j})/sqrt(2),
    "odd" the antisymmetric ones; with the global minus sign in the parity
    operator these are its -1 and +1 eigenspaces respectively.  Requires
    even N.
    """
    if N % 2 != 0:
        raise ValueError(f"parity reduction requires even N, got {N}")
    if sector not in ("even", "odd"):
        raise ValueError(f"sector must be 'even' or 'odd', got {sector!r}")
    sign = 1.0 if sector == "even" else -1.0
    S = np.zeros((N, N // 2), dtype=complex)
    rt = 1.0 / np.sqrt(2.0)
    for j in range(N // 2):
        S[j, j] = rt
        S[N - 1 - j, j] = sign * rt
    return S


def parity_restrict(B: np.ndarray, sector: str, commutator_tol: float = 1e-10) -> np.ndarray:
    """Restrict a parity-commuting matrix to one parity sector.

    Returns the (N/2) x (N/2) matrix in the isometry basis; its nonzero
    spectrum equals the nonzero spectrum of B (1 +/- Pi)/2.
    """
    B = check_finite(B)
    N = B.shape[0]
    P = parity_operator(N)
    comm = np.max(np.abs(B @ P - P @ B))
    if comm > commutator_tol:
        raise ValueError(
            f"matrix does not commute with parity: max commutator entry {comm:.3e}"
        )
    S = parity_isometry(N, sector)
    return S.conj().T @ B @ S


def build_toy_diagonal(N: int) -> np.ndarray:
    """Toy model of the open 3-baker: only the tilted-diagonal entries
    (n, m) = (3l + eps, l + ell*N/3), ell in {0, 2}, survive, with moduli
    fixed to 1/sqrt(3) and phases exp((2 pi i/3)(eps+1/2)(ell+1/2))."""
    if N % 3 != 0 or N < 3:
        raise ValueError(f"dimension {N} must be a positive multiple of 3")
    B = np.zeros((N, N), dtype=complex)
    for l in range(N // 3):
        for ell in (0, 2):
            col = l + ell * N // 3
            for eps in range(3):
                B[3 * l + eps, col] = np.exp(
                    2j * np.pi / 3 * (eps + 0.5) * (ell + 0.5)
                ) / np.sqrt(3)
    return B


def walsh_quantize(spec: OpenBakerSpec, k: int, variant: str = "W") -> np.ndarray:
    """Walsh quantization of a (possibly open) D-baker at N = D^k:
    S_k^* . blockdiag with S_{k-1} in the kept slots.  Unitary when the
    map is closed; coincides with build_toy_diagonal for the 3-baker with
    the half-integer variant."""
    if k < 1:
        raise ValueError(f"length must be >= 1, got {k}")
    N = spec.D**k
    Sk = build_walsh(spec.D, k, variant)
    inner = build_walsh(spec.D, k - 1, variant)
    return Sk.conj().T @ _block_stack(N, spec.D, spec.kept, inner)


def tensor_open_apply(psi: np.ndarray, spec: OpenBakerSpec, variant: str = "W") -> np.ndarray:
    """Matrix-free application of the Walsh-quantized baker:
    v_1 x ... x v_k  ->  v_2 x ... x v_k x (S pi_kept v_1),
    with seed S = G_D^* (variant W) or F_D^* (variant V)."""
    psi = np.asarray(psi, dtype=complex)
    flat = psi.ndim == 1
    block = psi.reshape(psi.shape[0], -1)
    out = tensor_open_apply_block(block, spec, variant)
    return out.ravel() if flat else out


def tensor_open_apply_block(X: np.ndarray, spec: OpenBakerSpec, variant: str = "W") -> np.ndarray:
    """Apply the Walsh-quantized baker to each column of an (N, m) array."""
    X = np.asarray(X, dtype=complex)
    N, m = X.shape
    D = spec.D
    if N % D != 0:
        raise ValueError(f"state length {N} is not divisible by {D}")
    seed = _seed(D, variant).conj().T
    # zero the removed first-digit slices, rotate the first digit to the end
    T = X.reshape(D, N // D, m).copy()
    removed = [b for b in range(D) if b not in spec.kept]
    if removed:
        T[removed] = 0.0
    # out[rest, b, m] = sum_a seed[b, a] T[a, rest, m]
    out = np.einsum("ba,arm->rbm", seed, T)
    return out.reshape(N, m)
