"""Resonance spectra: eigensolving, sector counting, Weyl-law fitting,
and the closed-form spectrum of the Walsh toy model.

Eigenvalues of the subunitary open maps play the role of resonances; the
fractal Weyl law predicts that the number of them outside a radius r
grows like N^mu along geometric sequences of dimensions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .transforms import check_finite

# Full dense diagonalization is refused above this dimension; use parity
# reduction (or the closed-form toy spectrum) instead.
MAX_EIG_DIM = 6000

LAMBDA_PLUS = 1.0 + 0.0j
LAMBDA_MINUS = 1j / np.sqrt(3.0)


def canonical_order(values: np.ndarray) -> np.ndarray:
    """Sort by modulus descending, then by argument ascending in [0, 2pi)."""
    values = np.asarray(values, dtype=complex)
    args = np.mod(np.angle(values), 2 * np.pi)
    idx = np.lexsort((args, -np.abs(values)))
    return values[idx]


@dataclass
class Spectrum:
    """Eigenvalue multiset in canonical order, tagged with the dimension N
    of the full map it came from and a provenance label."""

    values: np.ndarray = field(repr=False)
    N: int
    label: str = ""

    def __post_init__(self):
        self.values = canonical_order(self.values)

    def __len__(self):
        return len(self.values)

    def moduli(self) -> np.ndarray:
        return np.abs(self.values)


def _opnorm_estimate(M: np.ndarray, iters: int = 20) -> float:
    """Power iteration on M^H M; cheap lower bound on the 2-norm."""
    rng = np.random.default_rng(0)
    v = rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = M.conj().T @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        est = math.sqrt(nw)
        v = w / nw
    return est


def _best_residual(M: np.ndarray, lam: complex, v: np.ndarray,
                   target: float, max_refine: int = 3) -> float:
    """Residual ||M v - lam v|| for the best unit vector reachable from v.

    The raw eigenvector is polished by inverse iteration on (M - lam I);
    for defective eigenvalue clusters this recovers the near-null vector
    that the direct eigensolver misses.
    """
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return math.inf
    v = v / nv
    res = np.linalg.norm(M @ v - lam * v)
    shift = np.eye(M.shape[0], dtype=complex) * lam
    for _ in range(max_refine):
        if res <= target:
            break
        try:
            w = np.linalg.solve(M - shift, v)
        except np.linalg.LinAlgError:
            # exactly singular: perturb the shift by one ulp of the scale
            eps = 1e-15 * max(abs(lam), 1.0)
            w = np.linalg.solve(M - shift - eps * np.eye(M.shape[0]), v)
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0.0:
            break
        v = w / nw
        res = min(res, np.linalg.norm(M @ v - lam * v))
    return float(res)


def eigen_spectrum(M: np.ndarray, N: int | None = None, label: str = "",
                   check_residuals: bool = True, residual_tol: float = 1e-8,
                   n_samples: int = 10) -> Spectrum:
    """All eigenvalues of a dense square matrix, canonically sorted.

    The accuracy contract ||M v - lambda v|| <= residual_tol * ||M|| is
    verified on a sample of returned eigenpairs.
    """
    M = check_finite(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    dim = M.shape[0]
    if dim > MAX_EIG_DIM:
        raise ValueError(
            f"dense eigensolve capped at {MAX_EIG_DIM}; dimension {dim} too "
            "large - reduce by parity sector first"
        )
    vals, vecs = scipy.linalg.eig(M)
    if check_residuals and dim > 0:
        norm = max(_opnorm_estimate(M), 1e-300)
        rng = np.random.default_rng(1)
        sample = rng.choice(dim, size=min(n_samples, dim), replace=False)
        for i in sample:
            res = _best_residual(M, vals[i], vecs[:, i], residual_tol * norm)
            if res > residual_tol * norm:
                raise RuntimeError(
                    f"eigensolver residual {res:.3e} exceeds "
                    f"{residual_tol:.1e} * ||M|| = {residual_tol * norm:.3e}"
                )
    return Spectrum(vals, N=dim if N is None else N, label=label)


@dataclass(frozen=True)
class SectorQuery:
    """Annular sector |lambda| > r, |arg(lambda e^{i theta})| <= rho.
    rho = pi recovers the full annulus."""

    r: float
    theta: float = 0.0
    rho: float = math.pi

    def __post_init__(self):
        if not 0.0 <= self.r < 1.0:
            raise ValueError(f"inner radius must be in [0, 1), got {self.r}")
        if not 0.0 < self.rho <= math.pi:
            raise ValueError(f"half-width must be in (0, pi], got {self.rho}")


def count_sector(spectrum: Spectrum, query: SectorQuery,
                 boundary_warn: float = 1e-9) -> int:
    """Number of eigenvalues in the sector, counted with multiplicity.

    The radial cut is strict (|lambda| > r); a warning is emitted when an
    eigenvalue sits within boundary_warn of the radius.
    """
    mods = spectrum.moduli()
    near = np.abs(mods - query.r) <= boundary_warn
    if query.r > 0 and np.any(near):
        warnings.warn(
            f"{int(near.sum())} eigenvalue(s) within {boundary_warn:g} of the "
            f"counting radius r={query.r}; count may be ambiguous",
            stacklevel=2,
        )
    keep = mods > query.r
    if query.rho < math.pi:
        args = np.angle(spectrum.values * np.exp(1j * query.theta))
        keep &= np.abs(args) <= query.rho
    return int(np.count_nonzero(keep))


@dataclass
class WeylFit:
    """Least-squares fit of log(count) against log(N)."""

    slope: float
    intercept: float
    points: list
    doubling_ratios: list

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "points": self.points,
            "doubling_ratios": self.doubling_ratios,
        }


def weyl_fit(series) -> WeylFit:
    """Fit the fractal Weyl exponent from (N, count) pairs.

    Only points with positive count enter the fit; consecutive ratios
    count_{i+1}/count_i are reported alongside (along a geometric D^k
    sequence the fractal law predicts doubling for mu = log 2 / log D).
    """
    pts = [(int(N), int(c)) for N, c in series]
    pos = [(N, c) for N, c in pts if c > 0]
    if len(pos) < 2:
        raise ValueError("need at least 2 points with positive count")
    x = np.log([N for N, _ in pos])
    y = np.log([c for _, c in pos])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    points = [
        {"N": N, "count": c, "log_residual": float(r)}
        for (N, c), r in zip(pos, resid)
    ]
    ratios = [pos[i + 1][1] / pos[i][1] for i in range(len(pos) - 1)]
    return WeylFit(float(slope), float(intercept), points, ratios)


def profile_curve(spectra, mu: float, r_grid, D: int) -> np.ndarray:
    """Rescaled counting functions n(N, r) * (N/D)^(-mu).

    Row i corresponds to r_grid[i]; column j to spectra[j].  Along a
    geometric sequence the columns should collapse onto one profile.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if len(r_grid) and np.any(np.diff(r_grid) <= 0):
        raise ValueError("r_grid must be strictly increasing")
    if np.any((r_grid < 0) | (r_grid >= 1)):
        raise ValueError("r_grid values must lie in [0, 1)")
    out = np.empty((len(r_grid), len(spectra)))
    for j, spec in enumerate(spectra):
        scale = (spec.N / D) ** (-mu)
        mods = spec.moduli()
        for i, r in enumerate(r_grid):
            out[i, j] = np.count_nonzero(mods > r) * scale
    return out


@dataclass
class ClosedFormToySpectrum:
    """Exact spectrum of the Walsh toy 3-baker at N = 3^k.

    Nonzero eigenvalues form a lattice on the circles of modulus
    3^(-p/2k); the ring-p multiplicities total binomial(k, p).  Zero has
    multiplicity 3^k - 2^k.
    """

    k: int
    entries: list  # (eigenvalue, multiplicity) pairs, zero included

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def nonzero_entries(self) -> list:
        return [(z, m) for z, m in self.entries if z != 0]

    def ring_of(self, z: complex) -> int:
        """Ring index p with |z| = 3^(-p/2k)."""
        return round(-2 * self.k * math.log(abs(z)) / math.log(3.0))

    def ring_totals(self) -> dict:
        totals: dict[int, int] = {}
        for z, m in self.nonzero_entries():
            p = self.ring_of(z)
            totals[p] = totals.get(p, 0) + m
        return totals

    def expand(self) -> np.ndarray:
        vals = []
        for z, m in self.entries:
            vals.extend([z] * m)
        return canonical_order(np.array(vals, dtype=complex))


def toy_closed_spectrum(k: int) -> ClosedFormToySpectrum:
    """Exact eigenvalues of the toy 3-baker with exact multiplicities.

    The map acts as a weighted cyclic shift on words over the two nonzero
    eigendirections of G_3^* pi_{0,2} (eigenvalues 1 and i/sqrt(3)).  Each
    cyclic orbit of length d with m minus-symbols per period contributes
    the d d-th roots of 1^(d-m) (i/sqrt 3)^m, which land on the lattice
    points e^{2 pi i l/k} (i/sqrt 3)^(p/k); summing orbit lengths over the
    words with p minus-symbols recovers the ring total binomial(k, p).
    """
    if k < 1:
        raise ValueError(f"length must be >= 1, got {k}")
    seen: set[int] = set()
    acc: dict[complex, int] = {}
    for w in range(2**k):
        if w in seen:
            continue
        # cyclic orbit of the k-bit word w
        orbit = []
        v = w
        while v not in seen:
            seen.add(v)
            orbit.append(v)
            v = ((v << 1) | (v >> (k - 1))) & ((1 << k) - 1)
        d = len(orbit)
        # minus-symbols consumed around one period (w is d-periodic)
        m = bin(w).count("1") * d // k
        prod = LAMBDA_PLUS ** (d - m) * LAMBDA_MINUS**m
        mod = abs(prod) ** (1.0 / d)
        base_arg = np.angle(prod) / d
        for l in range(d):
            z = mod * np.exp(1j * (base_arg + 2 * np.pi * l / d))
            key = complex(round(z.real, 12), round(z.imag, 12))
            acc[key] = acc.get(key, 0) + 1
    entries = [(z, m) for z, m in sorted(acc.items(), key=lambda t: (-abs(t[0]),
               np.mod(np.angle(t[0]), 2 * np.pi)))]
    entries.append((0j, 3**k - 2**k))
    return ClosedFormToySpectrum(k, entries)


def invariant_nonzero_spectrum(M: np.ndarray, k: int,
                               rank_rtol: float = 1e-8) -> tuple:
    """Nonzero eigenvalues of M via the k-th power factorization.

    After k steps the generalized kernel is exhausted: range(M^k) is the
    invariant subspace carrying every nonzero eigenvalue, so the spectrum
    of M restricted to an orthonormal basis Q of range(M^k) is exactly
    the nonzero spectrum.  This sidesteps the eigensolver scatter that a
    direct dense diagonalization produces around a large defective kernel.

    Returns (nonzero eigenvalues in canonical order, kernel dimension).
    The numerical rank cut uses rank_rtol relative to the largest
    singular value of M^k and requires a clean gap (factor 10^3) between
    kept and discarded singular values.
    """
    M = check_finite(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    P = np.linalg.matrix_power(M, k)
    U, s, _ = np.linalg.svd(P)
    if s[0] == 0.0:
        return np.zeros(0, dtype=complex), M.shape[0]
    rank = int(np.count_nonzero(s > rank_rtol * s[0]))
    if rank < len(s) and s[rank] > 1e-3 * s[rank - 1]:
        raise RuntimeError(
            f"no clean rank gap in M^{k}: sigma_{rank - 1} = {s[rank - 1]:.3e} "
            f"vs sigma_{rank} = {s[rank]:.3e}"
        )
    Q = U[:, :rank]
    vals = scipy.linalg.eigvals(Q.conj().T @ M @ Q)
    return canonical_order(vals), M.shape[0] - rank


@dataclass
class MatchReport:
    """Result of matching a computed spectrum against a reference."""

    max_distance: float
    unmatched: int
    ring_totals: dict
    distances: np.ndarray = field(repr=False)

    @property
    def all_matched(self) -> bool:
        return self.unmatched == 0


def compare_spectra(spectrum: Spectrum, reference: ClosedFormToySpectrum,
                    tol: float = 1e-8) -> MatchReport:
    """Greedy nearest-point matching of computed eigenvalues to the
    closed-form lattice, largest moduli first.

    Reports the worst matched distance, how many pairs exceed tol, and
    the per-ring tallies of the matched reference points.
    """
    computed = spectrum.values
    ref = reference.expand()
    if len(computed) != len(ref):
        raise ValueError(
            f"dimension mismatch: {len(computed)} computed vs {len(ref)} reference"
        )
    remaining = ref.copy()
    alive = np.ones(len(ref), dtype=bool)
    distances = np.empty(len(computed))
    ring_totals: dict[int, int] = {}
    for i, z in enumerate(computed):
        idx = np.where(alive)[0]
        j = idx[np.argmin(np.abs(remaining[idx] - z))]
        distances[i] = abs(remaining[j] - z)
        alive[j] = False
        if remaining[j] != 0:
            p = reference.ring_of(remaining[j])
            ring_totals[p] = ring_totals.get(p, 0) + 1
    unmatched = int(np.count_nonzero(distances > tol))
    return MatchReport(float(distances.max()), unmatched, ring_totals, distances)


def kernel_dimension(spectrum: Spectrum, threshold: float = 1e-6) -> int:
    """Number of eigenvalues with |lambda| <= threshold."""
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    return int(np.count_nonzero(spectrum.moduli() <= threshold))
