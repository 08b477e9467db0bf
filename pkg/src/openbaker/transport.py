"""Coherent transport through the Walsh-quantized 4-baker cavity.

The closed cavity propagator is the 4-baker quantized with the plain
Walsh transform at N = 4^k.  Two leads occupy the first-digit values 0
and 3; the transmission matrix sums all paths entering through lead 1,
bouncing inside the interior digits {1, 2}, and exiting through lead 2.
Landauer theory then gives the conductance g = tr(t t*), the noise power
P = tr(t t*(1 - t t*)), and the Fano factor F = P / g.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classical import CLOSED_B4, OPEN_B4
from .quantize import tensor_open_apply_block, walsh_quantize

# Dense resolvent solves are refused above 4^6 = 4096 (memory budget);
# the truncated series with the tensor-structured apply remains available.
MAX_RESOLVENT_K = 6

SHOT_NOISE_CONSTANT = 11.0 / 80.0
RANDOM_MATRIX_FANO = 1.0 / 8.0


def lead_projectors(k: int):
    """Diagonals of the two lead projectors and the interior projector.

    Returned as three 0/1 vectors of length 4^k selecting first digit 0
    (lead 1), 3 (lead 2), and {1, 2} (interior).  They are mutually
    orthogonal and sum to the identity.
    """
    if k < 1:
        raise ValueError(f"length must be >= 1, got {k}")
    N = 4**k
    first = np.arange(N) // (N // 4)
    return (
        (first == 0).astype(float),
        (first == 3).astype(float),
        ((first == 1) | (first == 2)).astype(float),
    )


def cavity_propagator(k: int) -> np.ndarray:
    """Dense closed-cavity unitary: the V-variant Walsh 4-baker at 4^k."""
    return walsh_quantize(CLOSED_B4, k, "V")


def _apply_U(X: np.ndarray) -> np.ndarray:
    """Tensor-structured application of the closed cavity propagator to
    the columns of X."""
    return tensor_open_apply_block(X, CLOSED_B4, "V")


def transmission_matrix(k: int, theta: float = 0.0, method: str = "resolvent",
                        tol: float = 1e-12) -> np.ndarray:
    """Transmission matrix t(theta) from lead 1 to lead 2, as the
    (N/4) x (N/4) block indexed by the remaining k-1 digits.

    resolvent: e^{i theta} Pi_L2 U (I - e^{i theta} Pi_I U)^{-1} Pi_L1
    via a dense solve.  series: the sum over bounce numbers n, truncated
    when the Frobenius norm of the next term drops below tol.
    """
    if k < 1:
        raise ValueError(f"length must be >= 1, got {k}")
    if tol <= 0:
        raise ValueError(f"tolerance must be > 0, got {tol}")
    N = 4**k
    n4 = N // 4
    phase = np.exp(1j * theta)
    if method == "resolvent":
        if k > MAX_RESOLVENT_K:
            raise ValueError(
                f"dense resolvent capped at k = {MAX_RESOLVENT_K}; "
                "use method='series'"
            )
        U = cavity_propagator(k)
        _, _, interior = lead_projectors(k)
        A = -phase * (interior[:, None] * U)
        A[np.diag_indices(N)] += 1.0
        X = np.linalg.solve(A, np.eye(N, n4, dtype=complex))
        return phase * (U[3 * n4:, :] @ X)
    if method == "series":
        n_max = 200 * k
        t = np.zeros((n4, n4), dtype=complex)
        # C holds (Pi_I U)^(n-1) Pi_L1 applied to the lead-1 basis columns
        C = np.eye(N, n4, dtype=complex)
        for n in range(1, n_max + 1):
            UC = _apply_U(C)
            term = phase**n * UC[3 * n4:, :]
            t += term
            if np.linalg.norm(term) < tol:
                return t
            C = UC
            C[:n4] = 0.0
            C[3 * n4:] = 0.0
        raise RuntimeError(
            f"transmission series did not converge within {n_max} terms"
        )
    raise ValueError(f"method must be 'resolvent' or 'series', got {method!r}")


@dataclass
class TransportResult:
    """Transmission summary at one quasi-energy."""

    k: int
    theta: float
    T: np.ndarray = field(repr=False)  # transmission eigenvalues, descending
    g: float
    P: float
    F: float | None

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "theta": self.theta,
            "g": self.g,
            "P": self.P,
            "F": self.F,
            "T": [float(x) for x in self.T],
        }


def transport_quantities(t: np.ndarray, k: int = 0, theta: float = 0.0) -> TransportResult:
    """Transmission eigenvalues (squared singular values of t) and the
    Landauer conductance, noise power, and Fano factor."""
    t = np.asarray(t, dtype=complex)
    sv = np.linalg.svd(t, compute_uv=False)
    T = np.sort(sv**2)[::-1]
    g = float(T.sum())
    P = float((T * (1.0 - T)).sum())
    F = P / g if g > 0 else None
    return TransportResult(k, theta, T, g, P, F)


def transport_result(k: int, theta: float = 0.0, method: str = "resolvent",
                     tol: float = 1e-12) -> TransportResult:
    return transport_quantities(transmission_matrix(k, theta, method, tol),
                                k=k, theta=theta)


def transport_asymptotics(k_range, theta_grid=(0.0,), method: str = "resolvent",
                          tol: float = 1e-12) -> dict:
    """Compare computed transport against the large-k asymptotics
    g ~ 4^(k-1)/2 and P ~ (11/80) 2^(k-1), and report the spread over
    quasi-energies (expected to be tiny)."""
    rows = []
    spread = []
    for k in k_range:
        gs = []
        for theta in theta_grid:
            res = transport_result(k, theta, method, tol)
            gs.append(res.g)
            rows.append({
                "k": k,
                "theta": float(theta),
                "g": res.g,
                "g_normalized": res.g / (4 ** (k - 1) / 2.0),
                "P": res.P,
                "P_normalized": res.P / 2 ** (k - 1),
                "F": res.F,
            })
        gs = np.asarray(gs)
        rel = float(gs.std() / gs.mean()) if len(gs) > 1 and gs.mean() > 0 else 0.0
        spread.append({"k": k, "g_relative_std": rel})
    return {
        "rows": rows,
        "theta_spread": spread,
        "reference": {
            "shot_noise_constant": SHOT_NOISE_CONSTANT,
            "random_matrix_fano": RANDOM_MATRIX_FANO,
        },
    }


def open_cavity_propagator(k: int) -> np.ndarray:
    """The subunitary inside propagator (closed propagator times the
    interior projector); its spectrum obeys a fractal Weyl law with
    exponent 1/2."""
    return walsh_quantize(OPEN_B4, k, "V")
