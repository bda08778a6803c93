"""Site/time scans, pulse trains, and the amplitude-forwarding protocol.

Everything here composes the first-order kernel: scans evaluate it on
grids (optionally chunked across a small thread pool, capped by the
SPINWAVE_THREADS environment variable), pulse trains sum time-shifted
copies of it, and the transport protocol solves one linear equation per
hop to replicate an amplitude at a neighboring site.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, TransportNodeError
from .kernel import PulseSpec, ResponseKernel

RESONANCE_TOL = 1e-9
TRANSPORT_NODE_TOL = 1e-12


def thread_count() -> int:
    """Worker cap from SPINWAVE_THREADS (default 1, i.e. serial)."""
    raw = os.environ.get("SPINWAVE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ParameterError(f"SPINWAVE_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


@dataclass(frozen=True)
class ScanGrid:
    """Ordered site and sample-time axes of a scan."""

    sites: np.ndarray
    times: np.ndarray
    dt: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "sites", np.asarray(self.sites, dtype=int))
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ParameterError("scan times must be strictly increasing")

    def validate_sites(self, N: int):
        if np.any(self.sites < 1) or np.any(self.sites > N):
            raise ParameterError(f"scan sites must lie in 1..{N}")


@dataclass(frozen=True)
class SpinTrace:
    """Sampled ⟨Sz_n(t)⟩ deviations with a parameter snapshot."""

    grid: ScanGrid
    values: np.ndarray = field(repr=False)
    provenance: dict = field(repr=False)

    def __post_init__(self):
        if self.values.shape != (len(self.grid.sites), len(self.grid.times)):
            raise ParameterError("trace values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("trace contains non-finite values")


def _provenance(kernel: ResponseKernel, include_c_offset: bool) -> dict:
    return {
        "chain": kernel.params.as_dict(),
        "pulse": kernel.pulse.as_dict(),
        "ground_sector": kernel.ground_sector,
        "momentum_grid": kernel.spectrum.convention,
        "include_c_offset": include_c_offset,
        "kernel_hash": kernel.kernel_hash,
    }


def _evaluate_absolute(
    kernel: ResponseKernel,
    sites: np.ndarray,
    times: np.ndarray,
    include_c_offset: bool,
) -> np.ndarray:
    """Kernel response on absolute times; zero before the pulse starts."""
    rel = times - kernel.pulse.t_start
    live = rel >= 0.0
    out = np.zeros((len(sites), len(times)))
    if np.any(live):
        out[:, live] = kernel.evaluate(sites, rel[live], include_c_offset)
    return out


def scan(
    kernel: ResponseKernel,
    grid: ScanGrid,
    include_c_offset: bool = True,
    threads: int | None = None,
) -> SpinTrace:
    """Full (sites x times) trace; site-chunked across the thread pool.

    Output ordering is fixed by the grid regardless of execution order.
    """
    grid.validate_sites(kernel.params.N)
    workers = thread_count() if threads is None else max(1, threads)
    sites, times = grid.sites, grid.times
    if workers == 1 or len(sites) < 2 * workers:
        values = _evaluate_absolute(kernel, sites, times, include_c_offset)
    else:
        chunks = np.array_split(sites, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda ch: _evaluate_absolute(kernel, ch, times, include_c_offset),
                    chunks,
                )
            )
        values = np.vstack(parts)
    return SpinTrace(grid=grid, values=values, provenance=_provenance(kernel, include_c_offset))


def profile_at_time(
    kernel: ResponseKernel,
    t: float,
    sites=None,
    include_c_offset: bool = True,
) -> SpinTrace:
    """One row: the spatial profile of the deviation at fixed time."""
    if sites is None:
        sites = np.arange(1, kernel.params.N + 1)
    grid = ScanGrid(sites=np.asarray(sites), times=np.array([t]))
    return scan(kernel, grid, include_c_offset)


def timeseries_at_site(
    kernel: ResponseKernel,
    site: int,
    times,
    include_c_offset: bool = True,
) -> SpinTrace:
    """One column: the deviation at a fixed site over the sample times."""
    grid = ScanGrid(sites=np.array([site]), times=np.asarray(times, dtype=float))
    return scan(kernel, grid, include_c_offset)


# -- pulse trains -----------------------------------------------------


@dataclass(frozen=True)
class PulseTrain:
    """n_pulses identical pulses spaced t0 apart (t0 well past relaxation)."""

    n_pulses: int
    t0: float
    base: PulseSpec

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ParameterError(f"train.n_pulses must be >= 1, got {self.n_pulses}")
        if not (self.t0 > 10.0 * self.base.tau_H):
            raise ParameterError(
                f"train.t0 must exceed 10 tau_H = {10 * self.base.tau_H}, got {self.t0}"
            )


def dirichlet_factor(omega, t0: float, n_pulses: int):
    """Coherence factor sin(P ω t0 / 2) / sin(ω t0 / 2) for P pulses.

    At resonance (ω t0 ≈ 2πm) the ratio is evaluated by its limit
    P cos(P ω t0 / 2)/cos(ω t0 / 2); returns (factor, resonant_mask).
    """
    omega = np.asarray(omega, dtype=float)
    x = 0.5 * omega * t0
    s = np.sin(x)
    resonant = np.abs(s) < RESONANCE_TOL
    safe = np.where(resonant, 1.0, s)
    factor = np.sin(n_pulses * x) / safe
    limit = n_pulses * np.cos(n_pulses * x) / np.cos(x)
    return np.where(resonant, limit, factor), resonant


@dataclass(frozen=True)
class TrainResponse:
    total: float
    transient_term: float
    coherent_term: float
    resonant_modes: int


def pulse_train_terms(
    kernel: ResponseKernel,
    train: PulseTrain,
    site: int,
    t: float,
    eq14_literal: bool = False,
) -> TrainResponse:
    """Post-train response split into its relaxing and coherent parts.

    Valid for t > n_pulses·t0 (all pulses emitted, measured from the
    first pulse).  The coherent term factorizes through the Dirichlet
    ratio; summed with the relaxing term it reproduces the superposition
    of time-shifted single-pulse responses exactly.  With
    ``eq14_literal=True`` the relaxing term instead follows a legacy
    closed form (bare decay exponents and a non-decaying offset), which
    is *not* superposition-consistent; it is kept for comparison only.
    """
    if not (t > train.n_pulses * train.t0):
        raise ParameterError(
            f"pulse-train evaluation requires t > n_pulses*t0 = "
            f"{train.n_pulses * train.t0}, got {t}"
        )
    P = train.n_pulses
    t0 = train.t0
    pulse = train.base
    offset = site - pulse.source_site

    factor, resonant = dirichlet_factor(kernel.omega, t0, P)
    t_shift = t - 0.5 * (P - 1) * t0
    spatial = kernel._spatial_offsets(np.array([offset]))[0]
    osc = -kernel.B * np.cos(kernel.omega * t_shift) - kernel.A * np.sin(
        kernel.omega * t_shift
    )
    coherent = float(2.0 * pulse.h1 * np.dot(spatial, factor * osc))

    if eq14_literal:
        transient = _eq14_literal_term(kernel, train, t)
    else:
        rel_times = t - t0 * np.arange(P)
        decay = kernel.B[:, None] * np.exp(
            -rel_times[None, :] / pulse.tau_H
        )
        transient = float(2.0 * pulse.h1 * np.dot(spatial, decay.sum(axis=1)))

    return TrainResponse(
        total=transient + coherent,
        transient_term=transient,
        coherent_term=coherent,
        resonant_modes=int(np.count_nonzero(resonant)),
    )


def _eq14_literal_term(kernel: ResponseKernel, train: PulseTrain, t: float) -> float:
    """Legacy closed form of the relaxing term, reproduced verbatim.

    Site-uniform, decay exponents carry no 1/tau_H, and the leading
    piece relaxes to a constant instead of zero.  Summed over the full
    ordered (k, l) frequency table.
    """
    lam = kernel.spectrum.lambdas
    omega = (lam[:, None] + lam[None, :]).ravel()
    tau = train.base.tau_H
    dd = 1.0 / tau**2 + omega**2
    total = 0.0
    for p in range(train.n_pulses):
        dt_p = t - p * train.t0
        damp = np.exp(-dt_p)
        total += float(
            np.sum(
                (omega * (1.0 - np.cos(omega * dt_p) * damp)
                 - np.sin(omega * dt_p) * damp / tau) / dd
            )
        )
    return total


def pulse_train_response(
    kernel: ResponseKernel,
    train: PulseTrain,
    site: int,
    t: float,
    eq14_literal: bool = False,
) -> float:
    return pulse_train_terms(kernel, train, site, t, eq14_literal).total


# -- amplitude transport ----------------------------------------------


@dataclass(frozen=True)
class AppliedPulse:
    site: int
    t_start: float
    h1: float


def total_response(
    kernel: ResponseKernel, pulses: list[AppliedPulse], site: int, t: float
) -> float:
    """Superposed response of every applied pulse at (site, t)."""
    out = 0.0
    for p in pulses:
        rel = t - p.t_start
        if rel < 0.0:
            continue
        out += float(
            kernel.evaluate_offsets([site - p.site], [rel], h1=p.h1)[0, 0]
        )
    return out


def solve_transport_field(
    kernel: ResponseKernel,
    applied: list[AppliedPulse],
    target_amplitude: float,
    site: int,
    t_apply: float,
    settle: float = 1.0,
) -> float:
    """Field h1' for a new pulse at `site` (starting t_apply) such that the
    total response at (site, t_apply + settle) equals target_amplitude.

    The response is linear in the drive, so this is one scalar solve
    against the unit-field response `settle` after application.  On a
    node of the wave (unit response below 1e-12) the solve is
    ill-conditioned and raises TransportNodeError: pick another time.
    """
    if settle <= 0.0:
        raise ParameterError("settle time must be positive")
    unit = float(kernel.evaluate_offsets([0], [settle], h1=1.0)[0, 0])
    if abs(unit) < TRANSPORT_NODE_TOL:
        raise TransportNodeError(
            f"unit-field response at offset 0, t={settle} is {unit:.3e}; "
            "the wave has a node here, choose a different application time"
        )
    existing = total_response(kernel, applied, site, t_apply + settle)
    return (target_amplitude - existing) / unit


@dataclass(frozen=True)
class TransportHop:
    site: int
    t_apply: float
    h1_applied: float
    achieved: float
    target: float


def run_transport_protocol(
    kernel: ResponseKernel,
    n_hops: int,
    t_pick: float,
    hop_spacing: float,
    settle: float = 1.0,
) -> list[TransportHop]:
    """Forward the source-site amplitude across n_hops neighboring sites.

    The amplitude of the initial pulse at its own site at time t_pick is
    the transported target; hop i applies a corrective pulse at site
    source - i at time t_pick + i·hop_spacing and pins the total
    response there (after `settle`) back to the target.
    """
    N = kernel.params.N
    src = kernel.pulse.source_site
    pulses = [AppliedPulse(site=src, t_start=kernel.pulse.t_start, h1=kernel.pulse.h1)]
    target = total_response(kernel, pulses, src, t_pick)
    hops = []
    for i in range(1, n_hops + 1):
        site = (src - i - 1) % N + 1
        t_apply = t_pick + i * hop_spacing
        h_new = solve_transport_field(kernel, pulses, target, site, t_apply, settle)
        pulses.append(AppliedPulse(site=site, t_start=t_apply, h1=h_new))
        achieved = total_response(kernel, pulses, site, t_apply + settle)
        hops.append(
            TransportHop(
                site=site,
                t_apply=t_apply,
                h1_applied=h_new,
                achieved=achieved,
                target=target,
            )
        )
    return hops
