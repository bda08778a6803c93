"""Ground-truth dynamics on the full 2^N state space at small N.

Builds the ring Hamiltonian with dense/sparse Pauli kronecker products
(spin operators S = σ/2, so the many-body spectrum coincides with the
analytic free-fermion blocks), prepares the exact ground state, and
integrates the time-dependent Schrödinger equation for the pulsed chain
with classical fourth-order stepping and step-halving error control.
Everything here is deliberately elementary: no matrix exponentials,
state-space capped at N <= 12.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ParameterError
from .kernel import PulseSpec
from .spectrum import ChainParams

MAX_SITES = 12

# Default integration tolerances
LOCAL_ERROR_TOL = 1e-10
POST_PULSE_DT = 0.002
PULSE_DT_FRACTION = 20.0  # dt = tau_H / 20 while the pulse is alive
PULSE_WINDOW = 40.0       # pulse considered alive for t < 40 tau_H


def _pauli():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return sx, sy, sz


def _site_op(op: np.ndarray, site: int, N: int) -> sp.csr_matrix:
    """Embed a single-site operator at 1-indexed `site` on an N-site ring."""
    out = sp.identity(1, dtype=complex, format="csr")
    for j in range(1, N + 1):
        blk = sp.csr_matrix(op) if j == site else sp.identity(2, dtype=complex)
        out = sp.kron(out, blk, format="csr")
    return out


@dataclass
class DenseChain:
    """Ring Hamiltonian, per-site Sz observables, and the drive operator."""

    params: ChainParams
    source_site: int
    H0: sp.csr_matrix = field(repr=False)
    sz_diags: np.ndarray = field(repr=False)  # (N, 2^N) real diagonals
    v_diag: np.ndarray = field(repr=False)    # diagonal of Sz at source


@dataclass
class EvolvedState:
    vector: np.ndarray
    time: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def build_dense_chain(params: ChainParams, source_site: int | None = None) -> DenseChain:
    """Assemble H0 and the Sz observables; periodic bond (N, 1) included."""
    N = params.N
    if N > MAX_SITES:
        raise ParameterError(f"dense oracle is capped at N <= {MAX_SITES}, got {N}")
    if source_site is None:
        source_site = N
    if not (1 <= source_site <= N):
        raise ParameterError(f"source_site must be in 1..{N}, got {source_site}")

    sx, sy, sz = _pauli()
    Sx, Sy, Sz = 0.5 * sx, 0.5 * sy, 0.5 * sz
    J, gamma, h0 = params.J, params.gamma, params.h0

    dim = 2**N
    H = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(1, N + 1):
        j = i % N + 1  # ring neighbor, includes the (N, 1) bond
        H = H + J * (1.0 + gamma) * (_site_op(Sx, i, N) @ _site_op(Sx, j, N))
        H = H + J * (1.0 - gamma) * (_site_op(Sy, i, N) @ _site_op(Sy, j, N))
    field_diag = np.zeros(dim)
    sz_diags = np.empty((N, dim))
    for i in range(1, N + 1):
        diag = _site_op(Sz, i, N).diagonal().real
        sz_diags[i - 1] = diag
        field_diag += diag
    H = H - h0 * sp.diags(field_diag)
    H = H.tocsr()

    herm = abs(H - H.getH()).max()
    if herm > 1e-12:
        raise ParameterError(f"assembled H0 is not Hermitian: deviation {herm:.3e}")

    return DenseChain(
        params=params,
        source_site=source_site,
        H0=H,
        sz_diags=sz_diags,
        v_diag=sz_diags[source_site - 1].copy(),
    )


def dense_eigenvalues(chain: DenseChain) -> np.ndarray:
    """Full sorted spectrum of H0 (small N only)."""
    return np.linalg.eigvalsh(chain.H0.toarray())


def ground_state(chain: DenseChain, degeneracy_gap: float = 1e-10):
    """Lowest eigenvector of H0.

    Returns (state, info); info carries the energy, the gap to the next
    level and, when the ground space is near-degenerate (gap below
    `degeneracy_gap`), both candidate vectors.
    """
    N = chain.params.N
    if N <= 10:
        w, v = np.linalg.eigh(chain.H0.toarray())
        e0, e1 = w[0], w[1]
        vec0, vec1 = v[:, 0], v[:, 1]
    else:
        w, v = spla.eigsh(chain.H0, k=2, which="SA", tol=0)
        order = np.argsort(w)
        e0, e1 = w[order[0]], w[order[1]]
        vec0, vec1 = v[:, order[0]], v[:, order[1]]

    info = {"energy": float(e0), "gap": float(e1 - e0)}
    if e1 - e0 < degeneracy_gap:
        info["degenerate_partner"] = vec1
    state = EvolvedState(vector=vec0.astype(complex), time=0.0)
    return state, info


def _rhs(chain: DenseChain, pulse: PulseSpec, t: float, psi: np.ndarray) -> np.ndarray:
    out = chain.H0 @ psi
    rel = t - pulse.t_start
    amp = pulse.h1 * np.exp(-rel / pulse.tau_H) if rel >= 0.0 else 0.0
    if amp != 0.0:
        out = out + amp * (chain.v_diag * psi)
    return -1j * out


def _rk4_step(chain, pulse, t, psi, dt):
    k1 = _rhs(chain, pulse, t, psi)
    k2 = _rhs(chain, pulse, t + 0.5 * dt, psi + 0.5 * dt * k1)
    k3 = _rhs(chain, pulse, t + 0.5 * dt, psi + 0.5 * dt * k2)
    k4 = _rhs(chain, pulse, t + dt, psi + dt * k3)
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve(
    chain: DenseChain,
    state: EvolvedState,
    pulse: PulseSpec,
    t_end: float,
    dt: float | None = None,
    local_error_tol: float = LOCAL_ERROR_TOL,
) -> EvolvedState:
    """Integrate i dψ/dt = (H0 + h1 e^{-t/τ_H} Sz_source) ψ up to t_end.

    Classical RK4 with step-doubling error control: each step is also
    taken as two half steps; if the Richardson estimate exceeds
    `local_error_tol` the step is rejected and halved.  Step sizes
    follow the pulse: τ_H/20 while the drive is alive, `dt` afterwards.
    """
    psi = state.vector.copy()
    t = state.time
    if t_end <= t:
        return EvolvedState(vector=psi, time=t)
    dt_post = POST_PULSE_DT if dt is None else dt
    if dt_post > 0.01:
        raise ParameterError(
            f"post-pulse step must satisfy dt <= 0.01, got {dt_post}"
        )
    dt_pulse = min(pulse.tau_H / PULSE_DT_FRACTION, dt_post)
    t_pulse_end = pulse.t_start + pulse.tau_H * PULSE_WINDOW

    while t < t_end - 1e-15:
        h = dt_pulse if pulse.t_start <= t < t_pulse_end else dt_post
        h = min(h, t_end - t)
        while True:
            full = _rk4_step(chain, pulse, t, psi, h)
            half = _rk4_step(chain, pulse, t, psi, 0.5 * h)
            two_halves = _rk4_step(chain, pulse, t + 0.5 * h, half, 0.5 * h)
            err = np.linalg.norm(full - two_halves) / 15.0
            if err <= local_error_tol or h < 1e-12:
                psi = two_halves
                t += h
                break
            h *= 0.5
    return EvolvedState(vector=psi, time=t)


def measure_sz_profile(chain: DenseChain, state: EvolvedState) -> np.ndarray:
    """Expectation of each Sz_n; Sz is diagonal in the computational basis."""
    prob = np.abs(state.vector) ** 2
    return chain.sz_diags @ prob


def measure_energy(chain: DenseChain, state: EvolvedState) -> float:
    return float(np.real(np.vdot(state.vector, chain.H0 @ state.vector)))


def sz_deviation_trace(
    chain: DenseChain,
    pulse: PulseSpec,
    times: np.ndarray,
    dt: float | None = None,
):
    """Per-site deviation ⟨Sz_n(t)⟩ - ⟨Sz_n⟩_ground on a sample-time grid.

    Returns (values[len(times), N], info) with the ground-state data in
    info.  Sample times must be nondecreasing and start at >= 0.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ParameterError("sample times must be nondecreasing")
    state, info = ground_state(chain)
    baseline = measure_sz_profile(chain, state)
    values = np.empty((len(times), chain.params.N))
    for i, t in enumerate(times):
        state = evolve(chain, state, pulse, t, dt=dt)
        values[i] = measure_sz_profile(chain, state) - baseline
    info["baseline"] = baseline
    info["final_norm"] = state.norm
    return values, info
