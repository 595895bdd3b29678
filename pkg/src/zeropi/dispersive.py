"""Disorder effects: exact junction-disorder spectra and the dispersive
reduction of capacitance/inductance disorder.

Junction disorder (delta_E_J, delta_C_J) keeps the chi oscillator decoupled
and is handled exactly by the 2D grid solver.  Disorder in C and E_L couples
(phi, theta) to the chi oscillator; in the dispersive regime that coupling
only shifts levels: chi_l (ac Stark, per chi photon) and kappa_l (Lamb).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .analysis import SweepResult, _run_sweep
from .params import CircuitParams, DisorderParams, derived_scales
from .solver import DEFAULT_SEED, DEFAULT_TOL, EigenSolution

__all__ = [
    "Couplings",
    "DispersiveResult",
    "coupling_elements",
    "dispersive_shifts",
    "dispersive_analysis",
    "junction_disorder_sweep",
    "cj_disorder_check",
]

# dispersive validity: pairs with |detuning| < RESONANCE_FACTOR * |g| are
# flagged and excluded from the perturbative sums
RESONANCE_FACTOR = 10.0


@dataclass(frozen=True)
class Couplings:
    """Magnitudes of the chi-oscillator coupling matrix elements.

    ``g_phi[l, lp]`` comes from inductive disorder via <l|phi|lp>;
    ``g_theta[l, lp]`` from cross-capacitance disorder via <l|d/dtheta|lp>.
    Both inherit |g(l,lp)| = |g(lp,l)| from Hermiticity between real
    eigenvectors.
    """

    g_phi: np.ndarray
    g_theta: np.ndarray

    def magnitude_squared(self) -> np.ndarray:
        return self.g_phi**2 + self.g_theta**2


@dataclass(frozen=True)
class DispersiveResult:
    """Dispersive-regime summary for the chi oscillator at occupancy zero."""

    omega_chi: float
    couplings: Couplings
    detunings: np.ndarray
    stark: np.ndarray
    lamb: np.ndarray
    resonant_pairs: list
    tail_estimate: np.ndarray


def _theta_derivative(psi: np.ndarray, grid) -> np.ndarray:
    """Centered first derivative along theta (periodic), matching the
    Hamiltonian stencil so the operator is exactly antisymmetric."""
    stacked = psi.reshape(grid.n_phi, grid.n_theta)
    deriv = (np.roll(stacked, -1, axis=1) - np.roll(stacked, 1, axis=1)) / (
        2.0 * grid.dtheta
    )
    return deriv.reshape(psi.shape)


def coupling_elements(
    solution: EigenSolution,
    params: CircuitParams,
    disorder: DisorderParams,
) -> Couplings:
    """Coupling magnitudes g_phi, g_theta between the computed levels.

    g_theta(l,lp) = E_CSigma*(dC/C)*(32 E_L/E_C)^(1/4) * |<l|d_theta|lp>|,
    g_phi(l,lp)   = delta_E_L*(8 E_C/E_L)^(1/4) * |<l|phi|lp>|,
    with the theta derivative taken by the same centered difference as the
    Hamiltonian stencil and <l|phi|lp> by diagonal quadrature.
    """
    grid = solution.grid
    weight = grid.dphi * grid.dtheta
    psi = solution.wavefunctions  # (n, k), L2-normalized columns

    phi_diag = np.repeat(grid.phi_values(), grid.n_theta)
    phi_elements = (psi * phi_diag[:, None]).T @ psi * weight

    dpsi = np.column_stack(
        [_theta_derivative(psi[:, j], grid) for j in range(psi.shape[1])]
    )
    dtheta_elements = psi.T @ dpsi * weight

    pref_theta = (
        params.e_c_sigma
        * disorder.delta_c_rel
        * (32.0 * params.e_l / params.e_c) ** 0.25
    )
    pref_phi = disorder.delta_e_l * (8.0 * params.e_c / params.e_l) ** 0.25
    return Couplings(
        g_phi=np.abs(pref_phi * phi_elements),
        g_theta=np.abs(pref_theta * dtheta_elements),
    )


def dispersive_shifts(
    energies: np.ndarray,
    couplings: Couplings,
    omega_chi: float,
    resonance_factor: float = RESONANCE_FACTOR,
) -> DispersiveResult:
    """Stark and Lamb shifts from second-order perturbation theory.

    chi_l = sum_lp |g_l,lp|^2 (1/Delta_l,lp - 1/Delta_lp,l) and
    kappa_l = sum_lp |g_l,lp|^2 / Delta_l,lp with detunings
    Delta_l,lp = E_l - E_lp - omega_chi.  Pairs too close to resonance are
    flagged and excluded from the sums.  Sums run over the computed levels
    only; ``tail_estimate`` reports each level's largest retained
    top-of-stack term as a proxy for the omitted tail.
    """
    energies = np.asarray(energies, dtype=float)
    k = len(energies)
    g2 = couplings.magnitude_squared()
    if g2.shape != (k, k):
        raise ValueError(f"coupling shape {g2.shape} does not match k={k}")

    detunings = energies[:, None] - energies[None, :] - omega_chi
    g_abs = np.sqrt(g2)
    resonant = np.abs(detunings) < resonance_factor * g_abs
    resonant_pairs = [tuple(idx) for idx in np.argwhere(resonant)]

    # a pair contributes through both Delta_l,lp and Delta_lp,l; exclude it
    # entirely if either detuning is resonant
    excluded = resonant | resonant.T
    safe = np.where(excluded, np.inf, detunings)

    kappa = np.sum(g2 / safe, axis=1)
    stark = np.sum(g2 * (1.0 / safe - 1.0 / safe.T), axis=1)

    contrib = np.abs(np.where(excluded, 0.0, g2 / safe))
    tail = contrib[:, -1] if k > 0 else np.zeros(0)
    return DispersiveResult(
        omega_chi=float(omega_chi),
        couplings=couplings,
        detunings=detunings,
        stark=stark,
        lamb=kappa,
        resonant_pairs=resonant_pairs,
        tail_estimate=tail,
    )


def dispersive_analysis(
    solution: EigenSolution,
    params: CircuitParams,
    disorder: DisorderParams,
    resonance_factor: float = RESONANCE_FACTOR,
) -> DispersiveResult:
    """Couplings plus shifts for a solved symmetric-circuit spectrum."""
    couplings = coupling_elements(solution, params, disorder)
    omega_chi = derived_scales(params).omega_chi
    return dispersive_shifts(solution.energies, couplings, omega_chi,
                             resonance_factor=resonance_factor)


def junction_disorder_sweep(
    params: CircuitParams,
    delta_ej_values,
    k: int = 6,
    quality: str = "standard",
    refined: bool = False,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    base_disorder: DisorderParams | None = None,
) -> SweepResult:
    """Exact 2D spectra and D for a list of Josephson-energy deviations."""
    base = base_disorder if base_disorder is not None else DisorderParams()
    values = [float(v) for v in delta_ej_values]
    if any(abs(v) >= params.e_j for v in values):
        raise ValueError("junction disorder requires |delta_e_j| < e_j")
    jobs = [
        (params, replace(base, delta_e_j=v), k, quality, refined, tol, seed, v)
        for v in values
    ]
    return _run_sweep("delta_e_j", jobs, workers)


def cj_disorder_check(
    params: CircuitParams,
    delta_cj_rel_values,
    k: int = 6,
    quality: str = "standard",
    refined: bool = False,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    base_disorder: DisorderParams | None = None,
) -> SweepResult:
    """D versus junction-capacitance disorder (mixed-derivative stencil)."""
    base = base_disorder if base_disorder is not None else DisorderParams()
    values = [float(v) for v in delta_cj_rel_values]
    if any(abs(v) > 1.0 for v in values):
        raise ValueError("junction-capacitance disorder requires "
                         "|delta_c_j/c_j| <= 1")
    jobs = [
        (params, replace(base, delta_c_j_rel=v), k, quality, refined, tol,
         seed, v)
        for v in values
    ]
    return _run_sweep("delta_c_j_rel", jobs, workers)
