"""Sector-resolved spectra, error-channel tomography, and temperature
thresholds for the four-spin plaquette pipeline.

The plaquette's final state is decomposed in the sixteen flip/parity
basis states built from the two maximally correlated states
``(|0000> +- |1111>)/sqrt(2)`` by flipping subsets of spins.  Flip
patterns that differ by the full complement are the same physical error
class (the all-spin flip is the conserved check), leaving eight classes
across two check sectors.  Class weights map onto an error channel of
single and correlated phase flips on the four logical neighbors of the
plaquette; the channel's headline figure is the weighted total
phase-flip error used for fault-tolerance budgeting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import linalg
from .evolve import Schedule, linear_rampdown, schedule_unitary
from .models import (
    build_chain_1d,
    build_plaquette_3d,
    plaquette_field_term,
    plaquette_ring_term,
    stabilizer_3d_local,
    stabilizers_1d,
)
from .pauli import OperatorSum, operator_matvec, to_dense
from .thermal import DensityMatrix, gibbs_state

__all__ = [
    "CLASS_REPS",
    "CLASS_LABELS",
    "ErrorChannelReport",
    "ThresholdBracketError",
    "SectorSpectrumTable",
    "tomography_basis",
    "plaquette_hamiltonian",
    "sector_projectors",
    "ghz_fidelity",
    "error_tomography",
    "total_phase_flip_error",
    "spectrum_scan",
    "spectrum_path",
    "run_point",
    "no_evolution_point",
    "threshold_temperature",
    "chain_sector_gap",
]

# Flip-pattern class representatives (4-bit masks, spin mu on bit mu-1),
# each standing for {e, ~e}: identity, four singles, two adjacent pairs
# on the neighbor ring 1-2-3-4, one diagonal pair.
CLASS_REPS = (0, 1, 2, 4, 7, 3, 6, 5)
CLASS_LABELS = {
    0: "none",
    1: "z1",
    2: "z2",
    4: "z3",
    7: "z4",
    3: "zz_adjacent_12",
    6: "zz_adjacent_23",
    5: "zz_diagonal_13",
}
_SINGLE_REPS = (1, 2, 4, 7)
_ADJACENT_REPS = (3, 6)
_DIAGONAL_REP = 5


class ThresholdBracketError(ValueError):
    """The error stays below target across the bracket (threshold above it)."""


def _class_rep(e: int) -> int:
    return min(e & 0xF, (~e) & 0xF)


def ghz_states() -> tuple[np.ndarray, np.ndarray]:
    """The two parity-split maximally correlated four-spin states."""
    plus = np.zeros(16, dtype=complex)
    minus = np.zeros(16, dtype=complex)
    plus[0] = plus[15] = 1.0 / math.sqrt(2.0)
    minus[0] = 1.0 / math.sqrt(2.0)
    minus[15] = -1.0 / math.sqrt(2.0)
    return plus, minus


_BASIS_CACHE: Optional[tuple[np.ndarray, tuple[tuple[int, int], ...]]] = None


def tomography_basis() -> tuple[np.ndarray, tuple[tuple[int, int], ...]]:
    """Orthonormal 16-column basis with (class rep, sector) column labels.

    Column for (e, s) is the state ``(|e> + s|~e>)/sqrt(2)``; columns run
    over CLASS_REPS, + sector before - sector for each class.
    """
    global _BASIS_CACHE
    if _BASIS_CACHE is None:
        cols = []
        labels = []
        for rep in CLASS_REPS:
            for sector in (1, -1):
                v = np.zeros(16, dtype=complex)
                v[rep] = 1.0 / math.sqrt(2.0)
                v[(~rep) & 0xF] = sector / math.sqrt(2.0)
                cols.append(v)
                labels.append((rep, sector))
        _BASIS_CACHE = (np.stack(cols, axis=1), tuple(labels))
    return _BASIS_CACHE


def sector_projectors() -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the +1 and -1 eigenspaces of the plaquette check."""
    w = to_dense(stabilizer_3d_local())
    eye = np.eye(16)
    return 0.5 * (eye + w), 0.5 * (eye - w)


def ghz_fidelity(rho: DensityMatrix) -> float:
    plus, _ = ghz_states()
    return float(np.real(plus.conj() @ rho.matrix @ plus))


@dataclass(frozen=True)
class ErrorChannelReport:
    """Error-channel weights extracted from one plaquette state.

    ``raw`` holds the sixteen basis weights keyed by (class rep, sector)
    before the minus-sector reassignment; ``class_probs`` holds the eight
    per-class weights after minus-sector weight is reassigned to the
    class with one extra single flip (spread uniformly over the four
    neighbors).  fidelity + 4 p_z + 2 p_c1 + p_c2 telescopes to 1.
    """

    fidelity: float
    p_z: float
    p_c1: float
    p_c2: float
    e_zeta: float
    w_minus: float
    class_probs: dict[int, float]
    raw: dict[tuple[int, int], float]


def total_phase_flip_error(p_z: float, p_c1: float, p_c2: float) -> float:
    """Weighted total phase-flip error of the extracted channel."""
    return p_z + 4.0 * p_c1 + 2.0 * p_c2


def error_tomography(rho: DensityMatrix) -> ErrorChannelReport:
    """Decompose a four-spin state into the eight error classes.

    The minus-sector weight of each class is reassigned to that class
    combined with one extra single flip, spread uniformly over the four
    neighbors (the minus outcome signals one unlocatable phase flip).
    """
    if rho.matrix.shape != (16, 16):
        raise ValueError("tomography expects a four-spin state")
    basis, labels = tomography_basis()
    weights = np.real(np.einsum("ji,jk,ki->i", basis.conj(), rho.matrix, basis))
    if weights.min() < -1e-8:
        raise ValueError(f"state has negative basis weight {weights.min():.3e}")
    weights = np.clip(weights, 0.0, None)
    raw = {label: float(w) for label, w in zip(labels, weights)}
    class_probs = {rep: raw[(rep, 1)] for rep in CLASS_REPS}
    for rep in CLASS_REPS:
        spill = raw[(rep, -1)] / 4.0
        for mu in range(4):
            class_probs[_class_rep(rep ^ (1 << mu))] += spill
    fidelity = class_probs[0]
    p_z = sum(class_probs[r] for r in _SINGLE_REPS) / 4.0
    p_c1 = sum(class_probs[r] for r in _ADJACENT_REPS) / 2.0
    p_c2 = class_probs[_DIAGONAL_REP]
    w_minus = float(sum(raw[(rep, -1)] for rep in CLASS_REPS))
    return ErrorChannelReport(
        fidelity=float(fidelity),
        p_z=float(p_z),
        p_c1=float(p_c1),
        p_c2=float(p_c2),
        e_zeta=float(total_phase_flip_error(p_z, p_c1, p_c2)),
        w_minus=w_minus,
        class_probs={k: float(v) for k, v in class_probs.items()},
        raw=raw,
    )


@dataclass(frozen=True)
class SectorSpectrumTable:
    """Spectra along a coupling grid or schedule, with check-sector labels.

    ``gap_sector`` is the gap between the two lowest +1-sector levels at
    each grid point; ``gap_global`` ignores sectors.
    """

    axis_name: str
    axis: np.ndarray
    energies: np.ndarray
    sectors: np.ndarray
    gap_global: np.ndarray
    gap_sector: np.ndarray
    couplings: Optional[np.ndarray] = None

    @property
    def n_points(self) -> int:
        return self.axis.shape[0]

    @property
    def n_levels(self) -> int:
        return self.energies.shape[1]

    def min_gap_sector(self) -> float:
        return float(self.gap_sector.min())

    def rows(self) -> Iterable[tuple]:
        for i in range(self.n_points):
            for level in range(self.n_levels):
                yield (
                    float(self.axis[i]),
                    level,
                    float(self.energies[i, level]),
                    int(self.sectors[i, level]),
                    float(self.gap_global[i]),
                    float(self.gap_sector[i]),
                )


def _sector_labels(spectrum: linalg.Spectrum, w_dense: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    """Check-sector label per level, resolving degenerate blocks.

    Levels whose expectation is not clean (mixed degenerate blocks) are
    re-resolved by diagonalizing the check within the block; the check
    commutes with the Hamiltonian, so this always separates exactly.
    """
    values = spectrum.values
    vectors = spectrum.vectors
    scale = max(1.0, float(np.abs(values).max()))
    labels = np.zeros(values.shape[0], dtype=int)
    start = 0
    while start < len(values):
        stop = start + 1
        while stop < len(values) and values[stop] - values[stop - 1] <= rtol * scale:
            stop += 1
        block = vectors[:, start:stop]
        m = block.conj().T @ w_dense @ block
        if stop - start == 1:
            expect = float(np.real(m[0, 0]))
        else:
            sub_vals, sub_vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
            vectors[:, start:stop] = block @ sub_vecs
            expect = None
            for i, v in enumerate(sub_vals):
                labels[start + i] = 1 if v > 0 else -1
        if expect is not None:
            labels[start] = 1 if expect > 0 else -1
            if abs(expect) < 1.0 - 1e-6:
                raise ValueError("level has mixed check sector outside a degenerate block")
        start = stop
    return labels


def plaquette_hamiltonian(J: float, lam, static: Optional[OperatorSum] = None) -> OperatorSum:
    """Ring-plus-fields plaquette, with the ring replaceable by ``static``."""
    if static is None:
        return build_plaquette_3d(J, lam)[1]
    if static.n_qubits != 4:
        raise ValueError("replacement static part must act on four spins")
    return static + plaquette_field_term(lam)


def _labeled_plaquette_spectrum(
    J: float, lam, static: Optional[OperatorSum] = None
) -> tuple[np.ndarray, np.ndarray]:
    spec = linalg.eigh(to_dense(plaquette_hamiltonian(J, lam, static)))
    w = to_dense(stabilizer_3d_local())
    labels = _sector_labels(spec, w)
    return spec.values, labels


def _gaps(values: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    plus = values[labels == 1]
    return float(values[1] - values[0]), float(plus[1] - plus[0])


def spectrum_scan(J: float, lambda_grid, static: Optional[OperatorSum] = None) -> SectorSpectrumTable:
    """Plaquette spectra over a grid of uniform coupling strengths."""
    grid = np.asarray(list(lambda_grid), dtype=float)
    if grid.size == 0:
        raise ValueError("empty coupling grid")
    if np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise ValueError("couplings must be finite and >= 0")
    energies = np.zeros((grid.size, 16))
    sectors = np.zeros((grid.size, 16), dtype=int)
    gap_g = np.zeros(grid.size)
    gap_s = np.zeros(grid.size)
    for i, lam in enumerate(grid):
        values, labels = _labeled_plaquette_spectrum(J, float(lam), static)
        energies[i] = values
        sectors[i] = labels
        gap_g[i], gap_s[i] = _gaps(values, labels)
    return SectorSpectrumTable("lambda", grid, energies, sectors, gap_g, gap_s)


def spectrum_path(
    schedule: Schedule,
    J: float = 1.0,
    samples: int = 201,
    static: Optional[OperatorSum] = None,
) -> SectorSpectrumTable:
    """Plaquette spectra sampled along a schedule's coupling path."""
    if samples < 2:
        raise ValueError("need at least two samples")
    ts = np.linspace(0.0, schedule.duration, samples)
    lams = schedule.coupling_matrix(ts)
    energies = np.zeros((samples, 16))
    sectors = np.zeros((samples, 16), dtype=int)
    gap_g = np.zeros(samples)
    gap_s = np.zeros(samples)
    for i in range(samples):
        values, labels = _labeled_plaquette_spectrum(J, lams[i], static)
        energies[i] = values
        sectors[i] = labels
        gap_g[i], gap_s[i] = _gaps(values, labels)
    return SectorSpectrumTable("time", ts, energies, sectors, gap_g, gap_s, couplings=lams)


_UNITARY_CACHE: dict[tuple, np.ndarray] = {}


def _rampdown_unitary(
    lambda0: float, tau: float, J: float, tol: float, static: Optional[OperatorSum] = None
) -> np.ndarray:
    """Cached propagator of the uniform rampdown (independent of T)."""
    key = (float(lambda0), float(tau), float(J), float(tol), static)
    if key not in _UNITARY_CACHE:
        schedule = linear_rampdown(lambda0, tau)
        builder = lambda lam: plaquette_hamiltonian(J, lam, static)
        _UNITARY_CACHE[key] = schedule_unitary(builder, schedule, tol)
    return _UNITARY_CACHE[key]


def run_point(
    T: float,
    lambda0: float,
    tau: float,
    J: float = 1.0,
    tol: float = 1e-8,
    static: Optional[OperatorSum] = None,
) -> ErrorChannelReport:
    """Cool at the initial coupling, ramp it down, read out error classes."""
    rho0 = gibbs_state(plaquette_hamiltonian(J, lambda0, static), T)
    u = _rampdown_unitary(lambda0, tau, J, tol, static)
    rho_tau = u @ rho0.matrix @ u.conj().T
    rho_tau = 0.5 * (rho_tau + rho_tau.conj().T)
    final = DensityMatrix.from_matrix(rho_tau, check=True, atol=max(1e-10, 4.0 * tol))
    return error_tomography(final)


def no_evolution_point(
    T: float, lambda0: float, J: float = 1.0, static: Optional[OperatorSum] = None
) -> ErrorChannelReport:
    """Error classes of the cooled state read out with no rampdown at all."""
    return error_tomography(gibbs_state(plaquette_hamiltonian(J, lambda0, static), T))


def threshold_temperature(
    lambda0: float,
    tau: Optional[float],
    J: float = 1.0,
    target: float = 0.03,
    bracket: tuple[float, float] = (1e-3, 3.0),
    tol: float = 1e-8,
    e_tol: float = 1e-4,
    static: Optional[OperatorSum] = None,
) -> Optional[float]:
    """Highest temperature with total phase-flip error at the target.

    ``tau=None`` evaluates the no-evolution pipeline.  The error is
    checked to be nondecreasing on a coarse sample of the bracket first.
    Returns None when the error exceeds the target over the whole
    bracket (threshold, if any, below the bracket); raises when the
    bracket does not straddle the target from below.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0 <= lo < hi):
        raise ValueError("bracket must satisfy 0 <= lo < hi")

    def err(T: float) -> float:
        if tau is None:
            return no_evolution_point(T, lambda0, J, static).e_zeta
        return run_point(T, lambda0, tau, J, tol, static).e_zeta

    probes = np.geomspace(max(lo, 1e-12), hi, 9)
    probes[0], probes[-1] = lo, hi
    samples = [err(float(T)) for T in probes]
    # flat stretches at low T sit on the diabatic floor; only dips beyond
    # integrator noise count as genuine non-monotonicity
    slack = 1e-6
    for a, b in zip(samples, samples[1:]):
        if b < a - slack:
            raise ValueError("error is not monotone over the bracket")
    if samples[0] > target:
        return None
    if samples[-1] < target:
        raise ThresholdBracketError("error stays below target across the bracket")
    t_lo, t_hi = lo, hi
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        if err(mid) <= target:
            t_lo = mid
        else:
            t_hi = mid
        if t_hi - t_lo <= 1e-9 * max(1.0, t_hi):
            break
    t_star = 0.5 * (t_lo + t_hi)
    if abs(err(t_star) - target) > e_tol:
        raise linalg.ConvergenceError("bisection did not pin the target error")
    return float(t_star)


def chain_sector_gap(N: int, J: float, lam: float, n_levels: int = 2, seed: int = 7) -> np.ndarray:
    """Lowest levels of the 1D chain inside the all-checks +1 sector.

    Projects a random block onto the joint +1 eigenspace of the N
    conserved checks (dimension 2**N), restricts the Hamiltonian there,
    and diagonalizes the restriction.  Matrix-free, so N = 6 (4096-dim)
    stays cheap.
    """
    inst, ham = build_chain_1d(N, J, lam)
    stabs = stabilizers_1d(inst)
    dim = 1 << inst.n_qubits
    r = 1 << N
    rng = np.random.default_rng(seed)
    block = rng.standard_normal((dim, r + 10))
    for stab in stabs:
        mv = operator_matvec(stab)
        block = 0.5 * (block + mv(block))
    u, s, _ = np.linalg.svd(block, full_matrices=False)
    rank = int(np.sum(s > 1e-8 * s[0]))
    if rank != r:
        raise linalg.ConvergenceError(f"projected basis rank {rank}, expected {r}")
    basis = u[:, :r]
    hmv = operator_matvec(ham)
    h_small = basis.conj().T @ hmv(basis)
    values = np.linalg.eigvalsh(0.5 * (h_small + h_small.conj().T))
    return values[:n_levels]
