"""Dispersion tables, group velocities, and the rigorous propagation bound.

The traveling components of the response carry pair frequencies
ω(k, l) = Λ_k + Λ_l and integer wavenumber index κ = |k - l|, i.e.
K = 2πκ/N radians per site.  For each κ more than one ω occurs; the
table records the maximum and the mean over the contributing pairs, and
the group-velocity curves are dω/dK by finite differences on those two
branches.

Group velocities are conventionally quoted on the Pauli-operator energy
scale, which is twice the quasiparticle-pair scale the rest of the
package works in (the two Hamiltonian normalizations share eigenvectors
and differ by a factor 2 in energy); ``group_velocities`` therefore
applies ``energy_scale=PAULI_ENERGY_SCALE`` (2.0) by default and
records the choice in the output.  Pass ``energy_scale=1.0`` for
velocities in the response-kernel units.

The propagation bound is v = e N ||H|| / 2, the minimum over a > 0 of
(N/2) ||H|| exp(aN)/(aN); the minimizer sits at a = 1/N.  The norm
||H|| is a strategy: the quasiparticle bandwidth sum (default), the
exact dense operator norm at desk scale, or a user-supplied value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .spectrum import ChainParams, Spectrum, bandwidth_sum

PAULI_ENERGY_SCALE = 2.0


@dataclass(frozen=True)
class DispersionTable:
    """Per-κ maximum and mean pair frequency (quasiparticle units)."""

    N: int
    kappa: np.ndarray = field(repr=False)
    K: np.ndarray = field(repr=False)
    omega_max: np.ndarray = field(repr=False)
    omega_avg: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class GroupVelocityCurve:
    N: int
    energy_scale: float
    kappa: np.ndarray = field(repr=False)
    K: np.ndarray = field(repr=False)
    v_max: np.ndarray = field(repr=False)
    v_avg: np.ndarray = field(repr=False)

    @property
    def peak_v_max(self) -> float:
        return float(np.max(np.abs(self.v_max)))

    @property
    def peak_v_avg(self) -> float:
        return float(np.max(np.abs(self.v_avg)))


@dataclass(frozen=True)
class LRBoundResult:
    N: int
    norm_H: float
    norm_strategy: str
    v_lr: float
    a_grid: np.ndarray = field(repr=False)
    v_a: np.ndarray = field(repr=False)
    a_star: float = 0.0


def build_dispersion(spectrum: Spectrum) -> DispersionTable:
    """Group ω(k, l) = Λ_k + Λ_l by κ = |k - l| over unordered pairs."""
    lam = spectrum.lambdas
    m = len(lam)
    n = spectrum.params.N
    kappas = np.arange(1, m)
    omega_max = np.empty(m - 1)
    omega_avg = np.empty(m - 1)
    counts = np.empty(m - 1, dtype=int)
    for kap in kappas:
        om = lam[: m - kap] + lam[kap:]
        omega_max[kap - 1] = om.max()
        omega_avg[kap - 1] = om.mean()
        counts[kap - 1] = len(om)
    if counts.sum() != m * (m - 1) // 2:
        raise ParameterError("dispersion binning lost pairs")
    return DispersionTable(
        N=n,
        kappa=kappas,
        K=2.0 * np.pi * kappas / n,
        omega_max=omega_max,
        omega_avg=omega_avg,
        counts=counts,
    )


def _finite_difference(values: np.ndarray, dk: float) -> np.ndarray:
    """Central differences, first-order one-sided at the endpoints."""
    v = np.empty_like(values)
    v[1:-1] = (values[2:] - values[:-2]) / (2.0 * dk)
    v[0] = (values[1] - values[0]) / dk
    v[-1] = (values[-1] - values[-2]) / dk
    return v


def group_velocities(
    table: DispersionTable, energy_scale: float = PAULI_ENERGY_SCALE
) -> GroupVelocityCurve:
    """dω/dK on both branches; dK = 2π/N per unit κ step."""
    dk = 2.0 * np.pi / table.N
    return GroupVelocityCurve(
        N=table.N,
        energy_scale=energy_scale,
        kappa=table.kappa.copy(),
        K=table.K.copy(),
        v_max=_finite_difference(energy_scale * table.omega_max, dk),
        v_avg=_finite_difference(energy_scale * table.omega_avg, dk),
    )


def hamiltonian_norm(
    params: ChainParams,
    strategy: str = "quasiparticle-sum",
    value: float | None = None,
) -> float:
    """||H|| under the chosen strategy.

    ``quasiparticle-sum``: Σ_k 2Λ_k, the bandwidth sum (spectral-range
    bound).  ``dense-spectral``: exact operator norm from the dense
    oracle, N <= 12.  ``user-supplied``: pass-through of `value`.
    """
    if strategy == "quasiparticle-sum":
        return bandwidth_sum(params)
    if strategy == "dense-spectral":
        if params.N > 12:
            raise ParameterError("dense-spectral norm is capped at N <= 12")
        from .oracle import build_dense_chain, dense_eigenvalues

        eigs = dense_eigenvalues(build_dense_chain(params))
        return float(np.max(np.abs(eigs)))
    if strategy == "user-supplied":
        if value is None or not np.isfinite(value):
            raise ParameterError("user-supplied norm strategy needs a finite value")
        return float(value)
    raise ParameterError(f"unknown norm strategy {strategy!r}")


def lr_bound(
    norm_h: float, N: int, n_grid: int = 501, strategy: str = "user-supplied"
) -> LRBoundResult:
    """Propagation bound e N ||H|| / 2 with its variational curve.

    Samples v(a) = (N/2) ||H|| exp(aN)/(aN) on a log grid spanning two
    decades around a = 1/N; the sampled minimum must sit at 1/N.
    `strategy` is a provenance tag recorded alongside the norm.
    """
    if norm_h < 0:
        raise ParameterError("norm must be nonnegative")
    v_lr = float(np.e * N * norm_h / 2.0)
    a_grid = np.logspace(-1.0, 1.0, n_grid) / N
    x = a_grid * N
    v_a = 0.5 * N * norm_h * np.exp(x) / x
    a_star = float(a_grid[np.argmin(v_a)]) if norm_h > 0 else float(1.0 / N)
    return LRBoundResult(
        N=N,
        norm_H=float(norm_h),
        norm_strategy=strategy,
        v_lr=v_lr,
        a_grid=a_grid,
        v_a=v_a,
        a_star=a_star,
    )


@dataclass(frozen=True)
class VelocityComparison:
    v_lr: float
    peak_v_max: float
    peak_v_avg: float
    ratio_max: float
    ratio_avg: float
    kappa: np.ndarray = field(repr=False)
    ratio_table: np.ndarray = field(repr=False)


def compare_velocities(curve: GroupVelocityCurve, lr: LRBoundResult) -> VelocityComparison:
    """Ratio of the bound to the observed group speeds, per κ and peak."""
    if not (curve.peak_v_max < lr.v_lr):
        raise ParameterError(
            f"group speed {curve.peak_v_max} is not below the propagation "
            f"bound {lr.v_lr}; inputs are inconsistent"
        )
    with np.errstate(divide="ignore"):
        table = lr.v_lr / np.abs(curve.v_max)
    return VelocityComparison(
        v_lr=lr.v_lr,
        peak_v_max=curve.peak_v_max,
        peak_v_avg=curve.peak_v_avg,
        ratio_max=lr.v_lr / curve.peak_v_max,
        ratio_avg=lr.v_lr / curve.peak_v_avg,
        kappa=curve.kappa.copy(),
        ratio_table=table,
    )
