"""Dispersion, group velocities, and the propagation bound."""

import numpy as np
import pytest

from spinwave.errors import ParameterError
from spinwave.spectrum import ChainParams, build_spectrum
from spinwave.velocity import (
    PAULI_ENERGY_SCALE,
    _finite_difference,
    build_dispersion,
    compare_velocities,
    group_velocities,
    hamiltonian_norm,
    lr_bound,
)

STD = dict(J=1.0, gamma=0.5, h0=0.5)


def test_dispersion_n4_single_bin_degenerate():
    spec = build_spectrum(ChainParams(N=4, **STD))
    table = build_dispersion(spec)
    assert list(table.kappa) == [1]
    assert table.omega_max[0] == table.omega_avg[0]
    assert table.counts[0] == 1


def test_dispersion_max_ge_avg():
    table = build_dispersion(build_spectrum(ChainParams(N=64, **STD)))
    assert np.all(table.omega_max >= table.omega_avg - 1e-15)


def test_dispersion_n8_against_enumeration():
    spec = build_spectrum(ChainParams(N=8, **STD))
    lam = spec.lambdas
    table = build_dispersion(spec)
    # independent brute force over every ordered off-diagonal pair
    bins = {}
    for k in range(1, 5):
        for l in range(1, 5):
            if k == l:
                continue
            bins.setdefault(abs(k - l), []).append(lam[k - 1] + lam[l - 1])
    for kap, values in bins.items():
        assert table.omega_max[kap - 1] == pytest.approx(max(values), abs=1e-14)
        assert table.omega_avg[kap - 1] == pytest.approx(np.mean(values), abs=1e-14)
    assert table.counts.sum() == 4 * 3 // 2


def test_dispersion_counts_cover_all_pairs():
    table = build_dispersion(build_spectrum(ChainParams(N=30, **STD)))
    assert table.counts.sum() == 15 * 14 // 2
    assert len(table.kappa) == 14


def test_velocity_peaks_reference_values():
    spec = build_spectrum(ChainParams(N=100, **STD))
    curve = group_velocities(build_dispersion(spec))
    assert curve.energy_scale == PAULI_ENERGY_SCALE
    assert abs(curve.peak_v_max - 1.5) / 1.5 < 0.10
    assert abs(curve.peak_v_avg - 0.55) / 0.55 < 0.10
    # implied per-site transit times
    assert 1.0 / curve.peak_v_max == pytest.approx(0.66, abs=0.07)
    assert 1.0 / curve.peak_v_avg == pytest.approx(1.8, abs=0.2)


def test_velocity_independent_of_drive():
    # the curve is a property of the chain: no pulse parameter enters
    a = group_velocities(build_dispersion(build_spectrum(ChainParams(N=40, **STD))))
    b = group_velocities(build_dispersion(build_spectrum(ChainParams(N=40, **STD))))
    assert np.array_equal(a.v_max, b.v_max)
    assert np.array_equal(a.v_avg, b.v_avg)


def test_finite_difference_richardson():
    # smooth dispersion: interior error drops ~4x when the grid is halved
    f = lambda k: np.sin(k) + 0.3 * np.cos(2 * k)
    fp = lambda k: np.cos(k) - 0.6 * np.sin(2 * k)
    errs = []
    for n in (64, 128):
        k = np.linspace(0.1, 2.9, n)
        dk = k[1] - k[0]
        v = _finite_difference(f(k), dk)
        errs.append(np.max(np.abs(v[1:-1] - fp(k)[1:-1])))
    assert errs[1] < errs[0] / 3.0


def test_norm_strategies():
    params = ChainParams(N=8, **STD)
    assert hamiltonian_norm(params, "user-supplied", 75.0) == 75.0
    qp = hamiltonian_norm(params, "quasiparticle-sum")
    dense = hamiltonian_norm(params, "dense-spectral")
    # the bandwidth sum bounds the exact operator norm from above; the
    # converse factor is ~2 plus the double weight of the self-paired
    # phi = pi mode in the k-grid sum (measured 2.296 here)
    assert 1.0 <= qp / dense <= 2.5
    with pytest.raises(ParameterError):
        hamiltonian_norm(ChainParams(N=14, **STD), "dense-spectral")
    with pytest.raises(ParameterError):
        hamiltonian_norm(params, "user-supplied")
    with pytest.raises(ParameterError):
        hamiltonian_norm(params, "no-such-strategy")


def test_norm_n2_base_quantity():
    # single block at phi = pi carries Lambda = 1.5
    assert hamiltonian_norm(ChainParams(N=2, **STD), "quasiparticle-sum") == pytest.approx(
        3.0, abs=1e-12
    )


def test_lr_bound_reference_value():
    result = lr_bound(75.0, 100)
    assert result.v_lr == pytest.approx(np.e * 100 * 75 / 2, rel=1e-15)
    assert abs(result.v_lr - 1.02e4) / 1.02e4 < 0.005


def test_lr_bound_zero_norm():
    assert lr_bound(0.0, 50).v_lr == 0.0


@pytest.mark.parametrize("N", [10, 100, 1000])
def test_lr_variational_minimum(N):
    result = lr_bound(3.0, N)
    grid = result.a_grid
    idx = int(np.argmin(result.v_a))
    target = 1.0 / N
    # minimum within one grid step of 1/N
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, len(grid) - 1)]
    assert lo <= target <= hi
    # convexity around the minimum
    second = np.diff(result.v_a[idx - 5 : idx + 6], 2)
    assert np.all(second > 0)


def test_compare_velocities_ratio():
    spec = build_spectrum(ChainParams(N=100, **STD))
    curve = group_velocities(build_dispersion(spec))
    lr = lr_bound(75.0, 100)
    cmp = compare_velocities(curve, lr)
    assert cmp.ratio_max > 1.0
    assert abs(cmp.ratio_max - 6.8e3) / 6.8e3 < 0.15
    assert np.all(cmp.ratio_table > 1.0)


def test_compare_velocities_n2_reference_bound():
    # invert the reference two-site bound for the norm, reproduce it exactly
    norm = 4.07 / np.e
    result = lr_bound(norm, 2)
    assert result.v_lr == pytest.approx(4.07, rel=0.005)
