"""First-order response of the ring to a local, exponentially relaxing pulse.

A pulse h1 e^{-t/tau_H} Sz acting on one site connects the free-fermion
ground state to a discrete set of excitations.  Expanding the site-local
number operator over momentum modes gives, for every reachable excited
state m with energy gap ω and net created momentum Φ, a product of
transition elements

    M_m(n) = w_m exp(iΦ (n - s)),     w_m >= 0,

so the deviation of ⟨Sz_n(t)⟩ is a sum of damped standing and traveling
waves

    δ_n(t) = 2 h1 Σ_m c_m w_m cos(K_m (n - s))
                 [B_m (e^{-t/τ_H} - cos ω_m t) - A_m sin ω_m t],

with A = (1/τ_H)/D, B = -ω/D, D = 1/τ_H² + ω².  The mode families are:

  * one standing component per momentum block (pair-state flip, K = 0);
  * four traveling components per block pair (k, l): wavenumbers
    ±(φ_k - φ_l) and ±(φ_k + φ_l);
  * when the ground state carries odd fermion parity, hops between the
    unpaired φ = 0 / φ = π modes and the blocks, plus the 0 ↔ π hop.

The ground state lives in one of the two fermion-parity sectors; the
kernel picks the true one (``ground_sector="auto"``) by comparing the
exact sector energies, which also fixes the momentum grid: antiperiodic
for the even sector, periodic with the two unpaired modes for the odd.
The expansion is validated end to end against the dense oracle.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectrum import Spectrum, build_spectrum, sector_ground_energies

# Mode-axis chunking budget for grid evaluation (elements per temporal
# block, ~128 MB of doubles); keeps large-N kernels within memory while
# numpy's pairwise reductions bound rounding within each chunk.
_CHUNK_ELEMENTS = 2**24


@dataclass(frozen=True)
class PulseSpec:
    """One local excitation: field strength, relaxation time, site, start."""

    h1: float
    tau_H: float
    source_site: int
    t_start: float = 0.0

    def __post_init__(self):
        if not (self.tau_H > 0):
            raise ParameterError(
                f"pulse.tau_H must be positive (the drive decays as "
                f"exp(-t/tau_H)), got {self.tau_H}"
            )
        if not np.isfinite(self.h1):
            raise ParameterError("pulse.h1 must be finite")

    def validate_site(self, N: int):
        if not (1 <= self.source_site <= N):
            raise ParameterError(
                f"pulse.source_site must be in 1..{N}, got {self.source_site}"
            )

    def as_dict(self) -> dict:
        return {
            "h1": self.h1,
            "tau_H": self.tau_H,
            "source_site": self.source_site,
            "t_start": self.t_start,
        }


def response_amplitudes(omega: float, tau_H: float):
    """In-phase / quadrature response weights (A, B) at gap omega."""
    if not (tau_H > 0):
        raise ParameterError("tau_H must be positive")
    denom = 1.0 / tau_H**2 + np.asarray(omega, dtype=float) ** 2
    a = (1.0 / tau_H) / denom
    b = -np.asarray(omega, dtype=float) / denom
    return a, b


@dataclass(frozen=True)
class ModePairEntry:
    """Reporting view of one (k, l) cell of the response table."""

    k: int
    l: int
    omega_kl: float
    K_kl: float
    v2_kl: complex
    A_kl: float
    B_kl: float


@dataclass(frozen=True)
class COffsetSpec:
    """Shape of the relaxing offset: e^{-t/tau_H} transient, constant limit."""

    asymptotic_constant: float
    relaxation_time: float
    peak_amplitude: float


class ResponseKernel:
    """Precomputed mode table driving all first-order evaluations.

    Immutable after construction; safe to share across threads.  Mode
    arrays: ``omega`` (gaps), ``K`` (wavenumbers), ``w`` (weights without
    the h1 factor), ``c`` (1 for standing, 2 for ± traveling pairs), and
    the per-mode amplitudes ``A``, ``B``.
    """

    def __init__(self, spectrum: Spectrum, pulse: PulseSpec, ground_sector: str = "auto"):
        params = spectrum.params
        pulse.validate_site(params.N)
        self.params = params
        self.pulse = pulse

        sectors = sector_ground_energies(params)
        if ground_sector == "auto":
            ground_sector = sectors["ground_sector"]
        if ground_sector not in ("even", "odd"):
            raise ParameterError(f"unknown ground_sector {ground_sector!r}")
        self.ground_sector = ground_sector
        self.sector_energies = sectors

        grid = "antiperiodic" if ground_sector == "even" else "periodic"
        if spectrum.convention == grid:
            self.spectrum = spectrum
        else:
            self.spectrum = build_spectrum(params, grid)

        self._build_modes()
        self._hash = self._compute_hash()

    # -- construction -------------------------------------------------

    def _build_modes(self):
        N = self.params.N
        levels = self.spectrum.levels
        h0 = self.params.h0 / self.params.J

        if self.ground_sector == "even":
            pair_levels = levels
            specials = []
        else:
            # Periodic grid: the last block (φ = π) is the self-paired mode.
            # The odd-sector ground always holds exactly one unpaired
            # fermion, in the π mode (the parity constraint pins that
            # configuration for every field: flipping a pair block or
            # moving the fermion to φ = 0 costs a strictly positive gap).
            pair_levels = levels[:-1]
            specials = [(0.0, 1.0 - h0, False), (np.pi, -1.0 - h0, True)]

        phi = np.array([lv.phi_k for lv in pair_levels])
        lam = np.array([0.5 * (lv.eps2 - lv.eps1) for lv in pair_levels]) / self.params.J
        a1 = np.array([lv.alpha1 for lv in pair_levels])
        a2 = np.array([lv.alpha2 for lv in pair_levels])
        b2 = np.array([lv.beta2 for lv in pair_levels])
        self._pair_phi, self._pair_lam = phi, lam
        self._pair_a1, self._pair_a2 = a1, a2
        self._specials = specials

        inv_n2 = 1.0 / N**2
        omegas, Ks, ws, cs = [], [], [], []

        # standing pair-flip component per block
        omegas.append(2.0 * lam)
        Ks.append(np.zeros_like(lam))
        ws.append(4.0 * (np.abs(a2) * np.abs(b2)) ** 2 * inv_n2)
        cs.append(np.ones_like(lam))

        # two-block traveling components, difference and sum wavenumbers
        M = len(pair_levels)
        for i in range(M - 1):
            j = slice(i + 1, M)
            om = lam[i] + lam[j]
            gp = a1[i] * a2[j] + a2[i] * a1[j]
            gm = a1[i] * a2[j] - a2[i] * a1[j]
            omegas.extend([om, om])
            Ks.extend([phi[i] - phi[j], phi[i] + phi[j]])
            ws.extend([np.abs(gp) ** 2 * inv_n2, np.abs(gm) ** 2 * inv_n2])
            twos = np.full(om.shape, 2.0)
            cs.extend([twos, twos])

        # block <-> unpaired-mode hops (odd sector only): a hole hop out
        # of an occupied mode costs Λ_b - d_x, a particle hop into an
        # empty one costs Λ_b + d_x (both strictly positive)
        for phi_x, d_x, occupied in specials:
            weight = np.abs(a1) ** 2 if occupied else np.abs(a2) ** 2
            omegas.append(lam - d_x if occupied else lam + d_x)
            Ks.append(phi - phi_x)
            ws.append(weight * inv_n2)
            cs.append(np.full(lam.shape, 2.0))
        if len(specials) == 2:
            # hop of the unpaired fermion from π to 0: gap d_0 - d_π = 2
            d0, dpi = specials[0][1], specials[1][1]
            omegas.append(np.array([d0 - dpi]))
            Ks.append(np.array([np.pi]))
            ws.append(np.array([inv_n2]))
            cs.append(np.array([1.0]))

        J = self.params.J
        self.omega = J * np.concatenate(omegas)
        self.K = np.concatenate(Ks)
        self.w = np.concatenate(ws)
        self.c = np.concatenate(cs)
        self.A, self.B = response_amplitudes(self.omega, self.pulse.tau_H)
        self.n_modes = len(self.omega)

        self.c_offset = COffsetSpec(
            asymptotic_constant=0.0,
            relaxation_time=self.pulse.tau_H,
            peak_amplitude=float(
                2.0 * self.pulse.h1 * np.sum(self.c * self.w * self.B)
            ),
        )

    def _compute_hash(self) -> str:
        blob = repr(
            (
                sorted(self.params.as_dict().items()),
                sorted(self.pulse.as_dict().items()),
                self.ground_sector,
                self.spectrum.convention,
            )
        ).encode()
        return hashlib.sha256(blob).hexdigest()

    # -- evaluation ---------------------------------------------------

    @property
    def kernel_hash(self) -> str:
        return self._hash

    def ground_magnetization(self) -> float:
        """Exact per-site ⟨Sz⟩ of the kernel's ground sector."""
        occ = 2.0 * np.sum(np.abs(self._pair_a2) ** 2)
        occ += sum(1.0 for _, _, occupied in self._specials if occupied)
        return float(occ / self.params.N - 0.5)

    def _mode_chunks(self, n_times: int):
        """Mode-axis slices keeping each temporal block under ~128 MB."""
        step = max(1, _CHUNK_ELEMENTS // max(1, n_times))
        for start in range(0, self.n_modes, step):
            yield slice(start, min(start + step, self.n_modes))

    def _spatial_offsets(self, offsets: np.ndarray, modes=slice(None)) -> np.ndarray:
        """cos(K d) weighted by c·w for site offsets d from the source."""
        d = np.asarray(offsets, dtype=float)[:, None]
        return (self.c[modes] * self.w[modes]) * np.cos(self.K[modes] * d)

    def _temporal(
        self, times: np.ndarray, include_c_offset: bool, modes=slice(None)
    ) -> np.ndarray:
        """Per-mode time factor; shape (n_modes_in_slice, len(times))."""
        t = np.asarray(times, dtype=float)[None, :]
        b = self.B[modes, None]
        a = self.A[modes, None]
        osc = -b * np.cos(self.omega[modes, None] * t) - a * np.sin(
            self.omega[modes, None] * t
        )
        if include_c_offset:
            osc = osc + b * np.exp(-t / self.pulse.tau_H)
        return osc

    def evaluate(
        self,
        sites,
        times,
        include_c_offset: bool = True,
        h1: float | None = None,
    ) -> np.ndarray:
        """Deviation of ⟨Sz_n(t)⟩, shape (len(sites), len(times)).

        Times are measured from the pulse start and must be >= 0.  With
        ``include_c_offset=False`` the relaxing transient and the
        site-uniform standing components (K = 0) are dropped, leaving
        the traveling-wave part only.
        """
        offsets = np.atleast_1d(np.asarray(sites)) - self.pulse.source_site
        return self.evaluate_offsets(offsets, times, include_c_offset, h1)

    def evaluate_offsets(
        self,
        offsets,
        times,
        include_c_offset: bool = True,
        h1: float | None = None,
    ) -> np.ndarray:
        """Like evaluate(), but indexed by site offset from the source.

        The ring is translation invariant, so a pulse applied anywhere is
        this kernel's response shifted; offset-based evaluation is what
        the amplitude-forwarding protocol composes.
        """
        offsets = np.atleast_1d(np.asarray(offsets))
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if np.any(times < 0):
            raise ParameterError("evaluation times are measured from pulse start; t >= 0")
        h1 = self.pulse.h1 if h1 is None else h1
        out = np.zeros((len(offsets), len(times)))
        for modes in self._mode_chunks(len(times)):
            spatial = self._spatial_offsets(offsets, modes)
            if not include_c_offset:
                spatial = spatial * (np.abs(self.K[modes]) > 1e-15)
            out += spatial @ self._temporal(times, include_c_offset, modes)
        return 2.0 * h1 * out

    def transient(self, sites, times) -> np.ndarray:
        """The relaxing-offset part alone (its t -> inf limit is 0)."""
        offsets = (
            np.atleast_1d(np.asarray(sites)) - self.pulse.source_site
        )
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.zeros((len(offsets), len(times)))
        for modes in self._mode_chunks(len(times)):
            spatial = self._spatial_offsets(offsets, modes)
            decay = self.B[modes, None] * np.exp(
                -times[None, :] / self.pulse.tau_H
            )
            out += spatial @ decay
        return 2.0 * self.pulse.h1 * out

    # -- reporting ----------------------------------------------------

    def pair_table(self):
        """Ordered (k, l) response-table cells over the block grid.

        Yields one ModePairEntry per ordered pair; the full table has
        (N/2)² cells on the kernel's momentum grid.
        """
        levels = self.spectrum.levels
        n = self.params.N
        s = self.pulse.source_site
        h1 = self.pulse.h1
        lam = np.array([0.5 * (lv.eps2 - lv.eps1) for lv in levels])
        for lk in levels:
            for ll in levels:
                omega = lam[lk.k - 1] + lam[ll.k - 1]
                K = lk.phi_k - ll.phi_k
                if lk.k == ll.k:
                    v2 = 2.0 * h1 / n * np.conj(lk.beta2) * lk.alpha2
                else:
                    gp = lk.alpha1 * ll.alpha2 + lk.alpha2 * ll.alpha1
                    v2 = h1 / n * gp * np.exp(-1j * K * s)
                a, b = response_amplitudes(omega, self.pulse.tau_H)
                yield ModePairEntry(
                    k=lk.k, l=ll.k, omega_kl=float(omega), K_kl=float(K),
                    v2_kl=complex(v2), A_kl=float(a), B_kl=float(b),
                )


def build_kernel(
    spectrum: Spectrum, pulse: PulseSpec, ground_sector: str = "auto"
) -> ResponseKernel:
    return ResponseKernel(spectrum, pulse, ground_sector)


def derive_v2_elements(spectrum: Spectrum, pulse: PulseSpec) -> np.ndarray:
    """Complex transition-element table over the (N/2)² ordered cells.

    Magnitudes scale as h1/N; only the phase tracks the source site.
    """
    kernel = build_kernel(spectrum, pulse)
    m = spectrum.params.N // 2
    table = np.empty((m, m), dtype=complex)
    for entry in kernel.pair_table():
        table[entry.k - 1, entry.l - 1] = entry.v2_kl
    return table


def zeroth_order(spectrum: Spectrum) -> float:
    """Ground-state ⟨Sz⟩ per site from the block amplitudes (site-free).

    Each genuine (φ, -φ) pair contributes 2|alpha2|²/N.  On the periodic
    grid the φ = π block is a single self-paired mode holding the odd
    sector's one unpaired fermion (counted once, not twice as the plain
    pair-sum would), and the φ = 0 mode stays empty.
    """
    levels = spectrum.levels
    n = spectrum.params.N
    if spectrum.convention == "periodic":
        occ = 2.0 * sum(abs(lv.alpha2) ** 2 for lv in levels[:-1]) + 1.0
    else:
        occ = 2.0 * sum(abs(lv.alpha2) ** 2 for lv in levels)
    return float(occ / n - 0.5)


def first_order_response(
    kernel: ResponseKernel,
    site: int,
    t: float,
    include_c_offset: bool = True,
) -> float:
    """Deviation of ⟨Sz_site⟩ at time t (measured from pulse start)."""
    return float(kernel.evaluate([site], [t], include_c_offset)[0, 0])


def second_order_strengths(pulse: PulseSpec, spectrum: Spectrum):
    """Order-of-magnitude bounds (S1, S2, S3) on the neglected terms.

    Uses the smallest nonzero excitation gap (worst-case resonance
    denominator).  These are magnitude estimates, not response values.
    """
    if pulse.h1 == 0.0:
        return (0.0, 0.0, 0.0)
    lam = spectrum.lambdas
    gaps = 2.0 * lam[lam > 1e-12]
    if len(gaps) == 0:
        raise ParameterError("no nonzero excitation gap in the spectrum")
    d_eps = float(np.min(gaps))
    denom = 1.0 / pulse.tau_H**2 + d_eps**2
    s1 = pulse.h1**2 * pulse.tau_H**2
    s2 = pulse.h1**2 / denom**2
    s3 = pulse.h1**2 / (pulse.tau_H * denom)
    return (s1, s2, s3)
