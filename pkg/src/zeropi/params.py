"""Circuit parameters, coordinate transformations and potential energies.

The 0-pi circuit is a four-node ring of two Josephson junctions and two
superinductors, with cross-capacitors connecting opposite nodes.  After the
normal-coordinate transformation the symmetric device reduces to two coupled
degrees of freedom (phi, theta) plus a decoupled harmonic chi mode.  All
spectral computations in this package use hbar*omega_p = 1 units, where
omega_p = sqrt(8*E_J*E_CJ)/hbar is the junction plasma frequency; physical
units enter only through :func:`physical_units`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants

__all__ = [
    "CircuitParams",
    "DisorderParams",
    "NormalCoords",
    "DerivedScales",
    "RegimeReport",
    "node_to_normal",
    "normal_to_node",
    "potential_symmetric",
    "potential_disordered",
    "potential_toy",
    "derived_scales",
    "physical_units",
    "regime_check",
]

# relative tolerance for the capacitance-decomposition consistency check
_DECOMP_RTOL = 1e-6


@dataclass(frozen=True)
class CircuitParams:
    """Energy scales of the symmetric 0-pi device.

    Attributes
    ----------
    e_j:
        Josephson energy of each junction.
    e_l:
        Inductive energy of each superinductor, E_L = Phi_0^2 / L.
    e_c_sigma:
        Charging energy of the sum capacitance, E_CSigma = e^2 / 2 C_Sigma
        with C_Sigma = C_J + C.
    e_c:
        Charging energy of one cross-capacitor, E_C = e^2 / 2 C.
    e_cj:
        Junction charging energy, E_CJ = e^2 / 2 C_J.
    phi_ext:
        Dimensionless external flux Phi_ext / Phi_0 threading the loop.

    All energies share one unit system (conventionally hbar*omega_p = 1).
    """

    e_j: float
    e_l: float
    e_c_sigma: float
    e_c: float
    e_cj: float
    phi_ext: float = 0.0

    def __post_init__(self) -> None:
        for name in ("e_j", "e_l", "e_c_sigma", "e_c", "e_cj"):
            value = getattr(self, name)
            if not (value > 0.0) or not math.isfinite(value):
                raise ValueError(f"{name} must be strictly positive, got {value}")
        if not math.isfinite(self.phi_ext):
            raise ValueError("phi_ext must be finite")

    @classmethod
    def from_ratios(
        cls,
        wp_over_e_l: float,
        wp_over_e_c_sigma: float,
        wp_over_e_j: float,
        phi_ext: float = 0.0,
    ) -> "CircuitParams":
        """Build parameters from inverse ratios hbar*omega_p / E_X.

        This is the convention used when junction area is varied at fixed
        oxide thickness: omega_p stays constant, so E_CJ is slaved to the
        Josephson energy via E_CJ * E_J = 1/8 (hbar*omega_p = 1 units).  The
        cross-capacitor energy follows from C_Sigma = C_J + C.
        """
        for name, value in (
            ("wp_over_e_l", wp_over_e_l),
            ("wp_over_e_c_sigma", wp_over_e_c_sigma),
            ("wp_over_e_j", wp_over_e_j),
        ):
            if not (value > 0.0):
                raise ValueError(f"{name} must be strictly positive, got {value}")
        e_j = 1.0 / wp_over_e_j
        e_cj = wp_over_e_j / 8.0
        e_c_sigma = 1.0 / wp_over_e_c_sigma
        e_l = 1.0 / wp_over_e_l
        e_c = _cross_capacitor_energy(e_c_sigma, e_cj)
        return cls(e_j=e_j, e_l=e_l, e_c_sigma=e_c_sigma, e_c=e_c, e_cj=e_cj,
                   phi_ext=phi_ext)

    @classmethod
    def from_energies(
        cls,
        e_j: float,
        e_l: float,
        e_c_sigma: float,
        e_cj: float,
        e_c: float | None = None,
        phi_ext: float = 0.0,
    ) -> "CircuitParams":
        """Build parameters from raw energies.

        When ``e_c`` is omitted it is derived from the capacitance
        decomposition 1/E_C = 1/E_CSigma - 1/E_CJ.  When given explicitly,
        the decomposition is validated instead.
        """
        if e_c is None:
            e_c = _cross_capacitor_energy(e_c_sigma, e_cj)
        else:
            lhs = 1.0 / e_c_sigma
            rhs = 1.0 / e_c + 1.0 / e_cj
            if abs(lhs - rhs) > _DECOMP_RTOL * abs(lhs):
                raise ValueError(
                    "capacitance decomposition violated: "
                    f"1/e_c_sigma = {lhs:g} but 1/e_c + 1/e_cj = {rhs:g}"
                )
        return cls(e_j=e_j, e_l=e_l, e_c_sigma=e_c_sigma, e_c=e_c, e_cj=e_cj,
                   phi_ext=phi_ext)

    def with_flux(self, phi_ext: float) -> "CircuitParams":
        return replace(self, phi_ext=phi_ext)


def _cross_capacitor_energy(e_c_sigma: float, e_cj: float) -> float:
    # C = C_Sigma - C_J requires C_Sigma > C_J, i.e. E_CSigma < E_CJ
    inv = 1.0 / e_c_sigma - 1.0 / e_cj
    if inv <= 0.0:
        raise ValueError(
            "cannot derive cross-capacitor energy: requires e_c_sigma < e_cj "
            f"(got e_c_sigma={e_c_sigma:g}, e_cj={e_cj:g})"
        )
    return 1.0 / inv


@dataclass(frozen=True)
class DisorderParams:
    """Pairwise deviations of nominally identical circuit elements.

    ``delta_e_j`` and ``delta_e_l`` are absolute energy deviations
    (half-differences of the two elements); the capacitive deviations are
    relative, delta_C_J / C_J and delta_C / C.
    """

    delta_e_j: float = 0.0
    delta_c_j_rel: float = 0.0
    delta_c_rel: float = 0.0
    delta_e_l: float = 0.0

    def __post_init__(self) -> None:
        # the 100% endpoint is admitted so full-disorder sweeps can reach it
        if abs(self.delta_c_j_rel) > 1.0:
            raise ValueError("`|delta_c_j_rel| <= 1` required: each physical "
                             "junction capacitance must stay non-negative")
        if abs(self.delta_c_rel) > 1.0:
            raise ValueError("`|delta_c_rel| <= 1` required: each physical "
                             "cross capacitance must stay non-negative")

    @property
    def is_symmetric(self) -> bool:
        return (self.delta_e_j == 0.0 and self.delta_c_j_rel == 0.0
                and self.delta_c_rel == 0.0 and self.delta_e_l == 0.0)


@dataclass(frozen=True)
class NormalCoords:
    """Normal coordinates (phi, theta, chi, Sigma) of the four-node ring.

    Sigma decouples by gauge invariance and is carried for completeness.
    """

    phi: float
    theta: float
    chi: float
    sigma: float


@dataclass(frozen=True)
class DerivedScales:
    """Characteristic frequencies, in energy units (hbar = 1)."""

    omega_p: float
    omega_chi: float


@dataclass(frozen=True)
class RegimeReport:
    """Ratios controlling ground-state degeneracy and the regime flag."""

    ratios: dict
    threshold: float
    in_regime: bool


def node_to_normal(phi1, phi2, phi3, phi4) -> NormalCoords:
    """Map the four node phases to normal coordinates.

    The transformation diagonalizes the kinetic (capacitance) form:
    2*phi = (p2-p3)+(p4-p1), 2*chi = (p2-p3)-(p4-p1),
    2*theta = (p2-p1)-(p4-p3), 2*Sigma = p1+p2+p3+p4.  The factor of two on
    Sigma (a decoupled gauge variable, normalization is pure convention) is
    what makes :func:`normal_to_node` the exact inverse.
    """
    phi = 0.5 * ((phi2 - phi3) + (phi4 - phi1))
    chi = 0.5 * ((phi2 - phi3) - (phi4 - phi1))
    theta = 0.5 * ((phi2 - phi1) - (phi4 - phi3))
    sigma = 0.5 * (phi1 + phi2 + phi3 + phi4)
    return NormalCoords(phi=phi, theta=theta, chi=chi, sigma=sigma)


def normal_to_node(coords: NormalCoords) -> tuple:
    """Inverse of :func:`node_to_normal`; returns (phi1, phi2, phi3, phi4)."""
    s, t, p, c = coords.sigma, coords.theta, coords.phi, coords.chi
    phi1 = 0.5 * (s - t - p + c)
    phi2 = 0.5 * (s + t + p + c)
    phi3 = 0.5 * (s + t - p - c)
    phi4 = 0.5 * (s - t + p - c)
    return phi1, phi2, phi3, phi4


def potential_symmetric(params: CircuitParams, phi, theta):
    """Potential energy of the symmetric device on the (phi, theta) plane.

    V = -2*E_J*cos(theta)*cos(phi - phi_ext/2) + E_L*phi**2 + 2*E_J.
    The constant 2*E_J shift makes the spectrum strictly positive.
    Accepts scalars or broadcastable arrays.
    """
    return (
        -2.0 * params.e_j * np.cos(theta) * np.cos(phi - params.phi_ext / 2.0)
        + params.e_l * np.asarray(phi) ** 2
        + 2.0 * params.e_j
    )


def potential_disordered(params: CircuitParams, disorder: DisorderParams,
                         phi, theta, chi=0.0):
    """Full potential including element disorder and the chi coordinate.

    Adds to the symmetric potential the junction-asymmetry term
    2*delta_E_J*sin(theta)*sin(phi - phi_ext/2), the chi-oscillator term
    E_L*chi**2 and the inductive-disorder coupling 2*delta_E_L*phi*chi.
    """
    chi = np.asarray(chi)
    return (
        potential_symmetric(params, phi, theta)
        + 2.0 * disorder.delta_e_j * np.sin(theta) * np.sin(phi - params.phi_ext / 2.0)
        + params.e_l * chi**2
        + 2.0 * disorder.delta_e_l * np.asarray(phi) * chi
    )


def potential_toy(params: CircuitParams, phi, theta):
    """Separable double-well x oscillator potential used as a test oracle.

    V' = -2*E_J*|cos(theta)| + E_L*phi**2 + 2*E_J.  Unlike the real device
    potential, the ridge minima are not staggered, so the problem factorizes
    into independent 1D problems along phi and theta.
    """
    return (
        -2.0 * params.e_j * np.abs(np.cos(theta))
        + params.e_l * np.asarray(phi) ** 2
        + 2.0 * params.e_j
    )


def derived_scales(params: CircuitParams) -> DerivedScales:
    """Plasma frequency and chi-oscillator frequency, as energies (hbar=1)."""
    omega_p = math.sqrt(8.0 * params.e_j * params.e_cj)
    omega_chi = math.sqrt(8.0 * params.e_l * params.e_c)
    return DerivedScales(omega_p=omega_p, omega_chi=omega_chi)


def physical_units(params: CircuitParams, f_p: float) -> dict:
    """Convert dimensionless device parameters to SI element values.

    ``params`` must be expressed in hbar*omega_p = 1 units; ``f_p`` is the
    plasma frequency omega_p / 2*pi in Hz, so one energy unit equals h*f_p
    joules.  Returns the superinductance L = Phi_0^2 / E_L in henries and
    the cross capacitance C = e^2 / (2 E_C) in farads.
    """
    if not f_p > 0.0:
        raise ValueError(f"plasma frequency must be positive, got {f_p}")
    energy_unit = constants.h * f_p  # J per (hbar*omega_p)
    phi0 = constants.hbar / (2.0 * constants.e)  # reduced flux quantum
    e_l_joule = params.e_l * energy_unit
    e_c_joule = params.e_c * energy_unit
    inductance = phi0**2 / e_l_joule
    capacitance = constants.e**2 / (2.0 * e_c_joule)
    return {"L": inductance, "C": capacitance}


def regime_check(params: CircuitParams, threshold: float = 10.0) -> RegimeReport:
    """Check the parameter hierarchy required for robust degeneracy.

    Degeneracy needs E_L, E_CSigma both far below E_J and E_CJ; the report
    carries the four ratios and a flag that is true iff all of them exceed
    ``threshold``.
    """
    ratios = {
        "e_j/e_l": params.e_j / params.e_l,
        "e_j/e_c_sigma": params.e_j / params.e_c_sigma,
        "e_cj/e_l": params.e_cj / params.e_l,
        "e_cj/e_c_sigma": params.e_cj / params.e_c_sigma,
    }
    in_regime = all(r > threshold for r in ratios.values())
    return RegimeReport(ratios=ratios, threshold=threshold, in_regime=in_regime)
