"""Sweep classification: moderateness, negligibility, association, regularity."""

import numpy as np
import pytest

from onewave import expr as ex
from onewave.asymptotics import (DataBuilder, SweepPlan, check_association,
                                 check_ginf, check_negligible, fit_exponent,
                                 run_sweep, spectral_extend)
from onewave.grid import Grid, GridFunction
from onewave.regularization import (RoughCoefficient, RoughTransport,
                                    regularized_family)
from onewave.symbols import GenSymbolFamily, HyperbolicSymbol, SymbolExpr

TWO_PI = 2.0 * np.pi
EPS6 = [0.1 * 0.2 ** i for i in range(6)]


def const_family(eps_grid=EPS6):
    a1 = SymbolExpr(ex.CoordXi(0), 1.0, 1)
    sym = HyperbolicSymbol(a1=a1, x_independent_outside=0.0)
    return GenSymbolFamily(lambda eps: sym, eps_grid)


def smooth_g(grid):
    x = grid.x_axis()
    return GridFunction(grid, np.sin(x) + 0.5 * np.sin(10 * x))


class TestRunSweep:
    def test_eps_independent_has_flat_exponents(self, grid256):
        plan = SweepPlan(family=const_family(), data=DataBuilder(
            kind="fixed", g=smooth_g(grid256)), grid=grid256, horizon=0.5,
            orders=((0, (0,)), (0, (1,)), (1, (0,)), (2, (1,))))
        rep = run_sweep(plan)
        assert not rep.incomplete
        for fit in rep.fits.values():
            assert abs(fit["N_hat"]) <= 0.05
        assert all(rep.energy_ok)

    def test_scaling_data_shifts_exponent(self, grid256):
        base = SweepPlan(family=const_family(), data=DataBuilder(
            kind="fixed", g=smooth_g(grid256)), grid=grid256, horizon=0.5)
        scaled = SweepPlan(family=const_family(), data=DataBuilder(
            kind="scaled_power", g=smooth_g(grid256), power=2.0),
            grid=grid256, horizon=0.5)
        n0 = run_sweep(base).fits[(0, (0,))]["N_hat"]
        n2 = run_sweep(scaled).fits[(0, (0,))]["N_hat"]
        assert n2 - n0 == pytest.approx(-2.0, abs=0.05)

    def test_regression_stability_without_largest_eps(self, grid256):
        speed = RoughCoefficient("piecewise_constant", TWO_PI,
                                 breakpoints=[2.0, 4.3], values=[2.0, 1.0])
        eps = list(np.geomspace(1e-1, 1e-6, 6))
        fam = regularized_family(RoughTransport(speeds=(speed,)), 1, eps)
        fam_short = regularized_family(RoughTransport(speeds=(speed,)), 1,
                                       eps[1:])
        data = DataBuilder(kind="fixed", g=smooth_g(grid256))
        full = run_sweep(SweepPlan(family=fam, data=data, grid=grid256,
                                   horizon=1.0, orders=((0, (1,)),)))
        short = run_sweep(SweepPlan(family=fam_short, data=data, grid=grid256,
                                    horizon=1.0, orders=((0, (1,)),)))
        delta = abs(full.fits[(0, (1,))]["N_hat"] -
                    short.fits[(0, (1,))]["N_hat"])
        assert delta <= 0.1

    def test_gronwall_cross_check_recorded(self, grid256):
        plan = SweepPlan(family=const_family(), data=DataBuilder(
            kind="fixed", g=smooth_g(grid256)), grid=grid256, horizon=0.5,
            cascade_max_order=1, measure_seminorms=True)
        rep = run_sweep(plan)
        assert all(rep.energy_ok)
        assert (1,) in rep.predicted_exponents

    def test_fit_exponent_of_vanishing_sequence(self):
        n, _, _ = fit_exponent([0.1, 0.01, 0.001], [0.0, 0.0, 0.0])
        assert n is None

    def test_jobs_parallel_matches_serial(self, grid256):
        data = DataBuilder(kind="fixed", g=smooth_g(grid256))
        serial = run_sweep(SweepPlan(family=const_family(), data=data,
                                     grid=grid256, horizon=0.5, jobs=1))
        parallel = run_sweep(SweepPlan(family=const_family(), data=data,
                                       grid=grid256, horizon=0.5, jobs=4))
        assert serial.norms == parallel.norms


class TestNegligible:
    def test_zero_data(self, grid256):
        plan = SweepPlan(family=const_family(), data=DataBuilder(kind="fixed"),
                         grid=grid256, horizon=0.5)
        rep = check_negligible(plan)
        assert rep["is_negligible"]

    def test_exponentially_small_data(self, grid256):
        plan = SweepPlan(family=const_family(), data=DataBuilder(
            kind="scaled_exp", g=smooth_g(grid256)), grid=grid256, horizon=0.5)
        rep = check_negligible(plan)
        assert rep["is_negligible"]
        assert rep["max_passed_q"] >= 10

    def test_linear_scaling_fails_at_q2(self, grid256):
        plan = SweepPlan(family=const_family(), data=DataBuilder(
            kind="scaled_power", g=smooth_g(grid256), power=1.0),
            grid=grid256, horizon=0.5)
        rep = check_negligible(plan)
        assert not rep["is_negligible"]
        assert rep["max_passed_q"] == 1


class TestAssociation:
    def test_band_limited_data_identical(self, grid256):
        # mollification is the identity below the plateau, so the sweep
        # members coincide with the classical solution
        eps_grid = [0.02 * 0.6 ** i for i in range(6)]
        plan = SweepPlan(family=const_family(eps_grid), data=DataBuilder(
            kind="mollified", g=smooth_g(grid256)), grid=grid256, horizon=1.0)
        from onewave.cauchy import CauchyProblem, solve_fixed_eps
        classical = solve_fixed_eps(
            CauchyProblem(symbol=const_family(eps_grid).member(0.02),
                          initial=smooth_g(grid256), horizon=1.0),
            seed=0, measure_seminorms=False).final()

        def probe(x):
            return np.cos(x)

        def reference(phi):
            vals = np.asarray(phi(grid256.x_axis()))
            return complex(grid256.cell_volume *
                           np.sum(classical.values * np.conjugate(vals)))

        rep = check_association(plan, [probe], reference)
        assert max(rep["terminal_residuals"]) <= 1e-10
        assert rep["monotone_tail"]

    def test_delta_pairing_converges(self, grid256):
        eps_grid = [0.3 * 0.55 ** i for i in range(6)]
        delta = GridFunction.delta(grid256, (64,))
        x0 = grid256.x_axis()[64]
        plan = SweepPlan(family=const_family(eps_grid), data=DataBuilder(
            kind="mollified", g=delta), grid=grid256, horizon=1.0)
        probes = []
        for center, width in ((x0 + 1.0, 1.2), (x0 + 1.5, 1.8),
                              (x0 + 0.6, 0.9)):
            tree = ex.SmoothBump(ex.CoordX(0), center, width)
            probes.append(lambda X, t=tree:
                          np.asarray(t.eval(0.0, (X,), (np.zeros_like(X),))))

        def reference(phi):
            return complex(phi(np.array([x0 + 1.0]))[0])

        rep = check_association(plan, probes, reference)
        assert rep["monotone_tail"]
        res = np.array(rep["residuals"])
        assert np.all(res[-1] <= res[0])

    def test_refined_solve_reference(self, grid32):
        from onewave.cauchy import DtPolicy
        eps_grid = [0.3 * 0.55 ** i for i in range(5)]
        x = grid32.x_axis()
        g0 = GridFunction(grid32, np.sin(x))
        plan = SweepPlan(family=const_family(eps_grid), data=DataBuilder(
            kind="mollified", g=g0), grid=grid32, horizon=0.5,
            dt_policy=DtPolicy(dt=0.005))
        rep = check_association(plan, [lambda X: np.cos(X)], "solve",
                                resolution_factor=4)
        assert rep["reference"] == "refined-solve"
        assert max(rep["terminal_residuals"]) <= 1e-8


class TestSpectralExtend:
    def test_band_limited_exact(self, grid32):
        x = grid32.x_axis()
        coarse = GridFunction(grid32, np.exp(3j * x))
        fine = Grid(1, 128, TWO_PI)
        ext = spectral_extend(coarse, fine)
        xf = fine.x_axis()
        assert np.max(np.abs(ext.values - np.exp(3j * xf))) <= 1e-12


class TestGinf:
    def test_smooth_symbol_smooth_data(self, grid256):
        plan = SweepPlan(
            family=const_family(), data=DataBuilder(kind="fixed",
                                                    g=smooth_g(grid256)),
            grid=grid256, horizon=0.5,
            orders=((0, (0,)), (0, (1,)), (0, (2,)), (0, (3,)), (0, (4,)),
                    (1, (0,)), (1, (3,)), (2, (2,))))
        rep = check_ginf(plan)
        assert rep["gate_passed"]
        assert rep["is_ginf"]
        assert rep["p_hat"] == pytest.approx(1.0, abs=0.1)

    def test_shrinking_scale_data_fails(self, grid256):
        eps_grid = [0.3 * 0.31 ** i for i in range(7)]
        x = grid256.x_axis()
        envelope = GridFunction(grid256, np.sin(x))
        plan = SweepPlan(
            family=const_family(eps_grid),
            data=DataBuilder(kind="oscillating", g=envelope, gamma=0.5),
            grid=grid256, horizon=0.5,
            orders=((0, (0,)), (0, (1,)), (0, (2,)), (0, (3,)), (0, (4,))))
        rep = check_ginf(plan)
        assert rep["gate_passed"]
        assert not rep["is_ginf"]

    def test_insufficient_orders_rejected(self, grid256):
        from onewave.errors import InsufficientOrders
        plan = SweepPlan(family=const_family(), data=DataBuilder(
            kind="fixed", g=smooth_g(grid256)), grid=grid256, horizon=0.5,
            orders=((0, (0,)), (0, (1,))))
        with pytest.raises(InsufficientOrders):
            check_ginf(plan)

    def test_slow_scale_violating_family_not_applicable(self, grid256):
        def member(eps):
            a1 = SymbolExpr(ex.mul(ex.Const(eps ** -0.5),
                                   ex.add(ex.Const(2.0),
                                          ex.Sin(ex.CoordX(0))),
                                   ex.CoordXi(0)), 1.0, 1)
            return HyperbolicSymbol(a1=a1)
        fam = GenSymbolFamily(member, [0.1 * 0.1 ** i for i in range(6)])
        plan = SweepPlan(
            family=fam, data=DataBuilder(kind="fixed", g=smooth_g(grid256)),
            grid=grid256, horizon=0.02,
            orders=((0, (0,)), (0, (1,)), (0, (2,)), (0, (3,)), (0, (4,))))
        rep = check_ginf(plan)
        assert rep["status"] == "not_applicable"
        assert not rep["gate_passed"]
        assert not rep["is_ginf"]
