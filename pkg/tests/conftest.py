"""Shared fixtures.

The two reference parameter sets with near-degenerate ground doublets are
expensive to solve (minutes at standard quality with the two-grid error
estimate), so their solutions are computed once per session and shared by
the analysis, dispersive and acceptance tests.
"""

from __future__ import annotations

import numpy as np
import pytest

from zeropi import CircuitParams, solve_refined

# offset-limited doublet: larger E_L, tiny E_CSigma
FIG4A_RATIOS = (9.9e2, 1e4, 8.3)
# tunneling-limited doublet: tiny E_L, larger E_CSigma
FIG4B_RATIOS = (1e4, 2.2e3, 7.9)
# flux-sweep reference set
FIG5_RATIOS = (1e3, 1e3, 3.95)


@pytest.fixture(scope="session")
def fig4a_params() -> CircuitParams:
    return CircuitParams.from_ratios(*FIG4A_RATIOS)


@pytest.fixture(scope="session")
def fig4b_params() -> CircuitParams:
    return CircuitParams.from_ratios(*FIG4B_RATIOS)


@pytest.fixture(scope="session")
def fig5_params() -> CircuitParams:
    return CircuitParams.from_ratios(*FIG5_RATIOS)


@pytest.fixture(scope="session")
def fig4a_solution(fig4a_params):
    return solve_refined(fig4a_params, None, k=4, quality="standard")


@pytest.fixture(scope="session")
def fig4b_solution(fig4b_params):
    return solve_refined(fig4b_params, None, k=8, quality="standard")


@pytest.fixture(scope="session")
def cheap_params() -> CircuitParams:
    """Fast-to-solve parameters (phi_max floor applies, small grids)."""
    return CircuitParams.from_energies(
        e_j=0.3, e_l=0.5, e_c_sigma=0.2, e_cj=0.8
    )


def doublet_structure(energies: np.ndarray, ratio: float = 0.25) -> bool:
    """True when levels 0-3 form two clearly separated doublets."""
    e = np.asarray(energies)
    return (
        e[1] - e[0] < ratio * (e[2] - e[0])
        and e[3] - e[2] < ratio * (e[2] - e[1])
    )
