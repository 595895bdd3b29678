import math

import numpy as np
import pytest

from zeropi import (
    CircuitParams,
    EigenSolution,
    Grid2D,
    SweepPoint,
    SweepResult,
    degeneracy,
    export_wavefunction,
    fit_ejstar,
    flux_sweep,
    ridge_masses,
    solve_refined,
)
from zeropi.solver import lowest_eigenpairs
from zeropi.grid import assemble, default_grid


def synthetic_solution(energies, energies_coarse=None, grid=None):
    energies = np.asarray(energies, dtype=float)
    k = len(energies)
    grid = grid or Grid2D(phi_max=6.0, n_phi=5, n_theta=4)
    psi = np.zeros((grid.size, k))
    psi[:k, :k] = np.eye(k) / math.sqrt(grid.dphi * grid.dtheta)
    return EigenSolution(
        energies=energies,
        wavefunctions=psi,
        residual_norms=np.zeros(k),
        grid=grid,
        disc_error=(np.abs(energies - np.asarray(energies_coarse))
                    if energies_coarse is not None else None),
        energies_coarse=(np.asarray(energies_coarse, dtype=float)
                         if energies_coarse is not None else None),
    )


class TestDegeneracy:
    def test_three_decade_example(self):
        report = degeneracy(synthetic_solution([0.0, 0.001, 1.0]))
        assert report.d_value == pytest.approx(3.0)
        assert report.splitting == pytest.approx(0.001)
        assert report.gap == pytest.approx(1.0)

    def test_shift_invariance(self):
        base = degeneracy(synthetic_solution([0.1, 0.2, 0.9]))
        shifted = degeneracy(synthetic_solution([5.1, 5.2, 5.9]))
        assert shifted.d_value == pytest.approx(base.d_value)

    def test_requires_three_levels(self):
        with pytest.raises(ValueError, match="3 converged levels"):
            degeneracy(synthetic_solution([0.0, 1.0]))

    def test_ordering_violation(self):
        with pytest.raises(ValueError, match="ordering"):
            degeneracy(synthetic_solution([1.0, 1.0, 2.0]))

    def test_trust_from_two_grid_splitting(self):
        # splitting 1e-3 stable across grids -> trusted
        fine = [0.0, 1e-3, 1.0]
        coarse = [0.01, 0.01 + 1.00001e-3, 1.01]
        assert degeneracy(synthetic_solution(fine, coarse)).trusted
        # splitting moved by 50% between grids -> untrusted
        coarse_bad = [0.01, 0.01 + 1.5e-3, 1.01]
        assert not degeneracy(synthetic_solution(fine, coarse_bad)).trusted

    def test_single_grid_never_trusted(self):
        assert not degeneracy(synthetic_solution([0.0, 1e-3, 1.0])).trusted


@pytest.fixture(scope="module")
def cheap_regime_params():
    # mildly degenerate but fast: small grids, floor phi_max
    return CircuitParams.from_ratios(1e2, 1e2, 3.95)


class TestFluxSweep:
    def test_point_per_flux_with_reports(self, cheap_regime_params):
        fluxes = [0.0, 1.0, math.pi]
        sweep = flux_sweep(cheap_regime_params, fluxes, k=4,
                           quality="coarse", refined=False)
        assert len(sweep.points) == len(fluxes)
        assert [p.axis_value for p in sweep.points] == fluxes
        for point in sweep.points:
            assert point.status in ("ok", "untrusted")
            assert point.report is not None
            assert len(point.energies) == 4

    def test_flux_periodicity_of_spectrum(self, cheap_regime_params):
        sweep = flux_sweep(cheap_regime_params, [0.7, 0.7 + 2.0 * math.pi],
                           k=4, quality="coarse", refined=False)
        e0, e1 = (p.energies for p in sweep.points)
        spacings0, spacings1 = np.diff(e0), np.diff(e1)
        assert spacings1 == pytest.approx(spacings0, rel=1e-6)
        assert e1 == pytest.approx(e0, rel=1e-8)

    def test_flux_evenness_of_spectrum(self, cheap_regime_params):
        sweep = flux_sweep(cheap_regime_params, [-0.9, 0.9], k=4,
                           quality="coarse", refined=False)
        e_minus, e_plus = (p.energies for p in sweep.points)
        assert e_minus == pytest.approx(e_plus, rel=1e-8)

    def test_rejects_nonfinite_flux(self, cheap_regime_params):
        with pytest.raises(ValueError):
            flux_sweep(cheap_regime_params, [0.0, math.nan], k=3)

    def test_workers_give_identical_results(self, cheap_regime_params):
        fluxes = [0.0, 1.5]
        seq = flux_sweep(cheap_regime_params, fluxes, k=3, quality="coarse",
                         refined=False, workers=1)
        par = flux_sweep(cheap_regime_params, fluxes, k=3, quality="coarse",
                         refined=False, workers=2)
        for a, b in zip(seq.points, par.points):
            assert np.array_equal(a.energies, b.energies)


class TestFitEjstar:
    @staticmethod
    def grid_table(points):
        table = SweepResult(axis_name="(e_l, e_c_sigma)")
        for e_l, e_cs, e_j_star in points:
            table.points.append(SweepPoint(
                axis_value=(e_l, e_cs), status="ok", e_j_star=e_j_star,
                d_max=2.0,
            ))
        return table

    def test_exact_linear_input_recovered(self):
        intercept, slope = 0.2, -0.05
        points = []
        for e_l in (1e-4, 1e-3, 1e-2):
            for e_cs in (1e-4, 1e-3, 1e-2):
                x = math.log10(e_cs / e_l)
                points.append((e_l, e_cs, intercept + slope * x))
        fit = fit_ejstar(self.grid_table(points))
        assert fit.intercept == pytest.approx(intercept, abs=1e-12)
        assert fit.slope == pytest.approx(slope, abs=1e-12)
        assert fit.n_points == 9

    def test_two_distinct_ratios_interpolated_exactly(self):
        # six points concentrated on two abscissas: least squares passes
        # through both exactly when the input is linear
        points = [(1e-3, 1e-3, 0.17)] * 3 + [(1e-3, 1e-2, 0.06)] * 3
        fit = fit_ejstar(self.grid_table(points))
        assert fit.intercept == pytest.approx(0.17, abs=1e-12)
        assert fit.slope == pytest.approx(0.06 - 0.17, abs=1e-12)

    def test_requires_six_trusted_points(self):
        table = self.grid_table([(1e-3, 1e-3, 0.17)] * 6)
        table.points[0].status = "untrusted"
        with pytest.raises(ValueError, match=">= 6 trusted"):
            fit_ejstar(table)

    def test_rank_deficient_design(self):
        with pytest.raises(ValueError, match="rank-deficient"):
            fit_ejstar(self.grid_table([(1e-3, 1e-3, 0.17)] * 6))


@pytest.fixture(scope="module")
def solution():
    params = CircuitParams.from_energies(e_j=0.3, e_l=0.5, e_c_sigma=0.2,
                                         e_cj=0.8)
    grid = Grid2D(phi_max=6.0, n_phi=41, n_theta=24)
    return lowest_eigenpairs(assemble(params, None, grid), 3)


class TestWavefunctionExport:
    def test_table_layout(self, solution):
        table = export_wavefunction(solution, 0)
        grid = solution.grid
        assert table.shape == (grid.size, 3)
        # phi-major ordering: first n_theta rows share the lowest phi
        assert np.all(table[:grid.n_theta, 0] == -grid.phi_max)
        assert table[:grid.n_theta, 1] == pytest.approx(grid.theta_values())

    def test_normalization_and_sign(self, solution):
        grid = solution.grid
        for level in range(3):
            table = export_wavefunction(solution, level)
            amp = table[:, 2]
            assert np.sum(amp**2) * grid.dphi * grid.dtheta == pytest.approx(1.0)
            assert amp[np.argmax(np.abs(amp))] > 0

    def test_level_out_of_range(self, solution):
        with pytest.raises(IndexError):
            export_wavefunction(solution, 3)


class TestRidgeDiagnostics:
    def test_offset_limited_states_localize_in_single_ridges(self, fig4a_solution):
        m0_0, mpi_0 = ridge_masses(fig4a_solution, 0)
        m0_1, mpi_1 = ridge_masses(fig4a_solution, 1)
        assert max(m0_0, mpi_0) > 0.9
        assert max(m0_1, mpi_1) > 0.9
        # the two doublet members occupy opposite ridges
        assert (m0_0 > mpi_0) != (m0_1 > mpi_1)

    def test_tunneling_limited_states_split_evenly(self, fig4b_solution):
        for level in (0, 1):
            m0, mpi = ridge_masses(fig4b_solution, level)
            fraction = m0 / (m0 + mpi)
            assert 0.45 < fraction < 0.55

    def test_masses_bounded_by_total(self, fig4b_solution):
        m0, mpi = ridge_masses(fig4b_solution, 0)
        assert 0.0 <= m0 and 0.0 <= mpi
        assert m0 + mpi <= 1.0 + 1e-12
