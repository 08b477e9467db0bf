"""Spectral tools: eigensolving with residual checks, sector counting,
Weyl fits, profile curves, and the closed-form toy spectrum."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from openbaker.classical import B3
from openbaker.quantize import build_toy_diagonal, walsh_quantize
from openbaker.spectral import (SectorQuery, Spectrum, canonical_order,
                                compare_spectra, count_sector, eigen_spectrum,
                                invariant_nonzero_spectrum, kernel_dimension,
                                profile_curve, toy_closed_spectrum, weyl_fit)


# -------------------------------------------------------------- ordering

@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False,
                                   allow_infinity=False),
                min_size=1, max_size=30))
def test_canonical_order_sorts_by_modulus(values):
    out = canonical_order(np.array(values))
    mods = np.abs(out)
    assert np.all(mods[:-1] >= mods[1:] - 1e-15)
    # a permutation of the input
    assert sorted(map(abs, values)) == pytest.approx(sorted(mods))


def test_canonical_order_breaks_ties_by_argument():
    vals = np.exp(2j * np.pi * np.array([0.75, 0.25, 0.0, 0.5]))
    out = canonical_order(vals)
    args = np.mod(np.angle(out), 2 * np.pi)
    assert np.all(np.diff(args) > 0)


def test_spectrum_sorts_on_construction():
    s = Spectrum(np.array([0.1, 1.0, 0.5]), N=3)
    assert np.allclose(np.abs(s.values), [1.0, 0.5, 0.1])
    assert len(s) == 3


# ----------------------------------------------------------- eigensolver

def test_eigen_spectrum_of_diagonal_matrix():
    # [TRIVIAL]
    d = np.array([3.0, -1.0j, 0.25])
    s = eigen_spectrum(np.diag(d))
    assert np.allclose(canonical_order(d), s.values)


def test_eigen_spectrum_handles_defective_kernels():
    # [DERIVED] the Walsh toy map has a large defective kernel; the
    # residual contract must still hold via eigenvector refinement
    s = eigen_spectrum(walsh_quantize(B3, 4, "W"))
    assert len(s) == 81


def test_eigen_spectrum_rejects_bad_input():
    with pytest.raises(ValueError):
        eigen_spectrum(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigen_spectrum(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(ValueError):
        eigen_spectrum(np.zeros((6001, 6001)))


# -------------------------------------------------------------- counting

def test_count_sector_strict_radius():
    s = Spectrum(np.array([1.0, 0.5, 0.5, 0.1]), N=4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert count_sector(s, SectorQuery(0.5)) == 1
        assert count_sector(s, SectorQuery(0.4)) == 3
        assert count_sector(s, SectorQuery(0.0)) == 4


def test_count_sector_warns_near_boundary():
    s = Spectrum(np.array([0.5 + 1e-12]), N=1)
    with pytest.warns(UserWarning, match="counting radius"):
        count_sector(s, SectorQuery(0.5))


def test_count_sector_angular_wedge():
    s = Spectrum(np.exp(2j * np.pi * np.array([0.0, 0.25, 0.5, 0.75])), N=4)
    q = SectorQuery(0.1, theta=0.0, rho=0.1)
    assert count_sector(s, q) == 1  # only the eigenvalue at angle 0
    q = SectorQuery(0.1, theta=math.pi / 2, rho=0.1)
    assert count_sector(s, q) == 1  # rotated wedge catches angle -pi/2


@given(st.floats(min_value=0, max_value=0.99), st.floats(min_value=0, max_value=0.99))
def test_count_sector_is_monotone_in_radius(r1, r2):
    rng = np.random.default_rng(42)
    vals = rng.uniform(0, 1, 50) * np.exp(2j * np.pi * rng.uniform(0, 1, 50))
    s = Spectrum(vals, N=50)
    lo, hi = sorted((r1, r2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert count_sector(s, SectorQuery(lo)) >= count_sector(s, SectorQuery(hi))


def test_sector_query_validation():
    with pytest.raises(ValueError):
        SectorQuery(1.0)
    with pytest.raises(ValueError):
        SectorQuery(0.5, rho=0.0)


# ------------------------------------------------------------- Weyl fits

def test_weyl_fit_recovers_power_law():
    # [DERIVED] exact power law data n = 3 N^0.4
    dims = [20, 100, 500, 2500]
    series = [(N, round(3 * N**0.4)) for N in dims]
    fit = weyl_fit(series)
    assert fit.slope == pytest.approx(0.4, abs=0.01)
    assert len(fit.doubling_ratios) == 3
    assert fit.as_dict()["points"][0]["N"] == 20


def test_weyl_fit_needs_two_positive_points():
    with pytest.raises(ValueError):
        weyl_fit([(10, 5), (20, 0)])


def test_profile_curve_collapses_self_similar_data():
    # [DERIVED] counts built to scale exactly like (N/D)^mu collapse
    mu, D = 0.5, 5
    r_grid = np.array([0.1, 0.3, 0.5])
    spectra = []
    for N in (20, 100, 500):
        n_each = int(round(4 * (N / D) ** mu))
        vals = np.concatenate([np.full(n_each, r + 0.05) for r in r_grid])
        spectra.append(Spectrum(vals.astype(complex), N=N))
    table = profile_curve(spectra, mu, r_grid, D)
    spread = np.abs(table - table[:, :1])
    assert np.max(spread / table[:, :1]) < 0.05


def test_profile_curve_validates_grid():
    s = Spectrum(np.array([0.5]), N=5)
    with pytest.raises(ValueError):
        profile_curve([s], 0.5, [0.5, 0.1], 5)
    with pytest.raises(ValueError):
        profile_curve([s], 0.5, [0.5, 1.5], 5)


# ------------------------------------------------------ toy closed form

@pytest.mark.parametrize("k", range(1, 8))
def test_toy_closed_spectrum_combinatorics(k):
    # [PAPER] ring-p totals binomial(k,p); kernel 3^k - 2^k; total 3^k
    cf = toy_closed_spectrum(k)
    assert cf.total_multiplicity() == 3**k
    assert dict(cf.entries)[0j] == 3**k - 2**k
    totals = cf.ring_totals()
    assert totals == {p: math.comb(k, p) for p in range(k + 1)}


def test_toy_closed_spectrum_k1():
    # [PAPER] the two nonzero eigenvalues at k = 1 are 1 and i/sqrt(3)
    cf = toy_closed_spectrum(1)
    nonzero = sorted((z for z, _ in cf.nonzero_entries()), key=abs, reverse=True)
    assert nonzero[0] == pytest.approx(1.0)
    assert nonzero[1] == pytest.approx(1j / math.sqrt(3))


def test_toy_closed_spectrum_rejects_bad_k():
    with pytest.raises(ValueError):
        toy_closed_spectrum(0)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_invariant_spectrum_matches_closed_form(k):
    # [DERIVED] restriction to range(M^k) isolates the 2^k nonzero
    # eigenvalues exactly, free of kernel scatter
    vals, kdim = invariant_nonzero_spectrum(build_toy_diagonal(3**k), k)
    assert len(vals) == 2**k
    assert kdim == 3**k - 2**k
    full = Spectrum(np.concatenate([vals, np.zeros(kdim, dtype=complex)]), N=3**k)
    report = compare_spectra(full, toy_closed_spectrum(k))
    assert report.all_matched
    assert report.max_distance < 1e-10


def test_invariant_spectrum_validates_input():
    with pytest.raises(ValueError):
        invariant_nonzero_spectrum(np.ones((2, 3)), 1)
    with pytest.raises(ValueError):
        invariant_nonzero_spectrum(np.eye(3), 0)


# --------------------------------------------------------------- matching

def test_compare_spectra_detects_perturbation():
    cf = toy_closed_spectrum(2)
    vals = cf.expand().copy()
    vals[0] += 1e-4
    report = compare_spectra(Spectrum(vals, N=9), cf, tol=1e-8)
    assert report.unmatched == 1
    assert report.max_distance == pytest.approx(1e-4, rel=1e-3)


def test_compare_spectra_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        compare_spectra(Spectrum(np.ones(3), N=3), toy_closed_spectrum(2))


def test_kernel_dimension():
    s = Spectrum(np.array([1.0, 1e-9, 0.0]), N=3)
    assert kernel_dimension(s) == 2
    with pytest.raises(ValueError):
        kernel_dimension(s, threshold=0.0)
