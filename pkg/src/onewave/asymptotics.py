"""Epsilon sweeps and asymptotic classification of solution families.

A sweep solves the Cauchy problem for every eps on a geometric grid, tracks
max_t ||d_t^d d_x^alpha u_eps(t)|| for requested orders, and fits growth
exponents against log(1/eps).  Verdicts (moderate, negligible, regular,
slow-scale, associated) are finite-sweep regressions with explicit
thresholds; reports never claim asymptotic proof.

t-derivatives are obtained from the equation itself (substituted
recursively), never by finite differencing the trajectory, so dt-order error
cannot contaminate the fitted exponents.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cauchy import (CauchyProblem, DtPolicy, Forcing,
                     check_energy_estimate, derivative_cascade,
                     solve_fixed_eps)
from .config import DEFAULT_THRESHOLDS, Thresholds
from .errors import GridMismatch, InsufficientOrders
from .grid import Grid, GridFunction
from .quantization import PeriodicOperator
from .regularization import embed_data
from .symbols import (GenSymbolFamily, SampleBox, SymbolExpr,
                      classify_log_type, classify_slow_scale, multi_indices)

__all__ = [
    "DataBuilder", "SweepPlan", "SweepReport", "run_sweep",
    "check_negligible", "check_association", "check_ginf", "fit_exponent",
]


@dataclass
class DataBuilder:
    """Map eps -> (g_eps, f_eps) for the supported data families.

    kinds:
      fixed        eps-independent g (and optional forcing)
      mollified    g_eps = embed_data(g, eps)
      scaled       g_eps = scale(eps) * g, scale in {exp_neg_inv, power}
      oscillating  g_eps = g * cos(round((1/eps)^gamma) * 2 pi x / L)
    """

    kind: str = "fixed"
    g: GridFunction | None = None
    forcing: Forcing | None = None
    power: float = 1.0
    gamma: float = 0.5

    def build(self, eps: float, grid: Grid):
        if self.g is None:
            g = GridFunction.zeros(grid)
        elif self.g.grid != grid:
            raise GridMismatch("data builder grid mismatch")
        else:
            g = self.g
        f = self.forcing or Forcing.zero(grid)
        if self.kind == "fixed":
            return g.copy(), f
        if self.kind == "mollified":
            return embed_data(g, eps), f
        if self.kind == "scaled_exp":
            scale = math.exp(-1.0 / eps) if 1.0 / eps < 700 else 0.0
            return scale * g, f
        if self.kind == "scaled_power":
            return (eps ** self.power) * g, f
        if self.kind == "oscillating":
            k_eps = max(1, int(round((1.0 / eps) ** self.gamma)))
            mesh = grid.x_mesh()
            carrier = np.cos(k_eps * 2.0 * np.pi * mesh[0] / grid.length)
            return GridFunction(grid, g.values * carrier), f
        raise ValueError(f"unknown data builder kind {self.kind!r}")


@dataclass
class SweepPlan:
    family: GenSymbolFamily
    data: DataBuilder
    grid: Grid
    horizon: float
    orders: tuple = ((0, (0,)),)
    dt_policy: DtPolicy | None = None
    seed: int = 0
    jobs: int = 1
    cascade_max_order: int = 0
    measure_seminorms: bool = False
    seminorm_case: str = "a"

    def normalized_orders(self):
        out = []
        for d, alpha in self.orders:
            if isinstance(alpha, int):
                alpha = (alpha,) * 1 if self.grid.dim == 1 else None
            if alpha is None or len(alpha) != self.grid.dim:
                raise ValueError("tracked order multi-index mismatch")
            out.append((int(d), tuple(int(a) for a in alpha)))
        return out


def fit_exponent(eps, values):
    """Slope of log(value) against log(1/eps): value ~ eps^(-N_hat).

    Returns (N_hat, stderr, rel_residual); vanishing sequences report
    N_hat None.
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.all(values < 1e-280):
        return None, 0.0, 0.0
    mask = values > 1e-280
    if mask.sum() < 3:
        return None, 0.0, 0.0
    x = np.log(1.0 / eps[mask])
    y = np.log(values[mask])
    coeffs, cov = np.polyfit(x, y, 1, cov=True)
    fit = np.polyval(coeffs, x)
    resid = float(np.linalg.norm(y - fit)) / max(float(np.linalg.norm(y)), 1e-300)
    return float(coeffs[0]), float(np.sqrt(max(cov[0, 0], 0.0))), resid


def _t_derivative_norms(symbol, forcing, op_cache, snapshots, grid,
                        orders, d_max):
    """Norms of d_t^d d_x^alpha u at the stored snapshots via the equation.

    d_t^d u = -i sum_i C(d-1, i) op(d_t^i a) d_t^(d-1-i) u + d_t^(d-1) f.
    """
    from math import comb
    dim = grid.dim
    full = symbol.full()
    out = {order: 0.0 for order in orders}
    f_derivs = [forcing]
    for _ in range(d_max):
        f_derivs.append(f_derivs[-1].t_derivative())

    def op_t(i):
        key = ("t", i)
        if key not in op_cache:
            op_cache[key] = PeriodicOperator(
                SymbolExpr(full.derivative_root(i, (0,) * dim, (0,) * dim),
                           1.0, dim), grid)
        return op_cache[key]

    for t, snap in snapshots:
        layers = [snap.values]
        for d in range(1, d_max + 1):
            acc = np.zeros(grid.shape, dtype=complex)
            for i in range(d):
                acc = acc - 1j * comb(d - 1, i) * op_t(i).apply(t, layers[d - 1 - i])
            if not f_derivs[d - 1].is_zero:
                acc = acc + f_derivs[d - 1].value(t)
            layers.append(acc)
        for (d, alpha) in orders:
            gf = GridFunction(grid, layers[d])
            val = gf.spectral_derivative(alpha).norm() if sum(alpha) else gf.norm()
            out[(d, alpha)] = max(out[(d, alpha)], val)
    return out


@dataclass
class SweepReport:
    eps: list
    orders: list
    norms: dict
    fits: dict
    c_measured: list
    c_seminorm: list
    c_log_fit: dict
    energy_ok: list
    gronwall_bound_norms: dict
    predicted_exponents: dict
    incomplete: dict
    extras: dict = field(default_factory=dict)

    def max_exponent(self):
        vals = [f["N_hat"] for f in self.fits.values() if f["N_hat"] is not None]
        return max(vals) if vals else None

    def to_json(self) -> dict:
        def clean(v):
            if isinstance(v, (np.floating, np.integer)):
                return float(v)
            if isinstance(v, np.ndarray):
                return [clean(x) for x in v.tolist()]
            if isinstance(v, dict):
                return {str(k): clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, (bool, int, float, str)) or v is None:
                return v
            return str(v)

        return {
            "eps": clean(self.eps),
            "orders": [[d, list(alpha)] for d, alpha in self.orders],
            "norms": {str(k): clean(v) for k, v in self.norms.items()},
            "fits": {str(k): clean(v) for k, v in self.fits.items()},
            "c_measured": clean(self.c_measured),
            "c_seminorm": clean(self.c_seminorm),
            "c_log_fit": clean(self.c_log_fit),
            "energy_ok": clean(self.energy_ok),
            "predicted_exponents": {str(k): clean(v) for k, v in
                                    self.predicted_exponents.items()},
            "incomplete": clean(self.incomplete),
            "extras": clean(self.extras),
        }


def run_sweep(plan: SweepPlan, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> SweepReport:
    """Solve every eps, track derivative norms, fit exponents, and
    cross-check each run against its own Gronwall bound."""
    orders = plan.normalized_orders()
    d_max = max(d for d, _ in orders)
    eps_list = list(plan.family.eps_grid)

    def solve_one(eps):
        symbol = plan.family.member(eps)
        g_eps, f_eps = plan.data.build(eps, plan.grid)
        problem = CauchyProblem(symbol=symbol, initial=g_eps,
                                horizon=plan.horizon, forcing=f_eps)
        result = solve_fixed_eps(problem, plan.dt_policy, seed=plan.seed,
                                 measure_seminorms=plan.measure_seminorms,
                                 seminorm_case=plan.seminorm_case)
        op_cache = {}
        norms = _t_derivative_norms(symbol, f_eps, op_cache,
                                    result.snapshots, plan.grid, orders, d_max)
        energy = check_energy_estimate(result.ledger)
        cascade = {}
        if plan.cascade_max_order > 0:
            cascade = derivative_cascade(problem, result,
                                         max_order=plan.cascade_max_order,
                                         seed=plan.seed)
        return norms, result, energy, cascade

    results = {}
    incomplete = {}
    if plan.jobs > 1:
        with ThreadPoolExecutor(max_workers=plan.jobs) as pool:
            futures = {eps: pool.submit(solve_one, eps) for eps in eps_list}
            for eps, fut in futures.items():
                try:
                    results[eps] = fut.result()
                except Exception as err:  # record and continue
                    incomplete[eps] = f"{type(err).__name__}: {err}"
    else:
        for eps in eps_list:
            try:
                results[eps] = solve_one(eps)
            except Exception as err:
                incomplete[eps] = f"{type(err).__name__}: {err}"

    done = [eps for eps in eps_list if eps in results]
    norms = {order: [results[eps][0][order] for eps in done]
             for order in orders}
    fits = {}
    for order in orders:
        n_hat, stderr, resid = fit_exponent(done, norms[order])
        fits[order] = {"N_hat": n_hat, "stderr": stderr, "residual": resid,
                       "moderate": (n_hat is None or
                                    n_hat <= thresholds.moderate_exponent_cap)}
    c_measured = [results[eps][1].ledger.c_measured for eps in done]
    c_seminorm = [results[eps][1].ledger.C_eps_seminorm for eps in done]
    logs = np.log(1.0 / np.array(done)) if done else np.array([])
    c_log_fit = {}
    if len(done) >= 3:
        coeffs = np.polyfit(logs, np.array(c_measured), 1)
        fit = np.polyval(coeffs, logs)
        scale = max(float(np.linalg.norm(c_measured)), 1e-300)
        c_log_fit = {"coeff": float(coeffs[0]), "intercept": float(coeffs[1]),
                     "residual": float(np.linalg.norm(np.array(c_measured) - fit)) / scale}
    energy_ok = [bool(results[eps][2]["pointwise_ok"] and
                      results[eps][2]["gronwall_ok"]) for eps in done]

    gronwall_bound_norms = {}
    predicted = {}
    if plan.cascade_max_order > 0:
        for alpha in multi_indices(plan.grid.dim, plan.cascade_max_order):
            if sum(alpha) == 0:
                # base Gronwall bound in norm terms
                vals = [math.sqrt(results[eps][1].ledger.gronwall_bound()[-1])
                        for eps in done]
            else:
                vals = [math.sqrt(results[eps][3][alpha]["bound"][-1])
                        for eps in done]
            gronwall_bound_norms[alpha] = vals
            slope, _, _ = fit_exponent(done, vals)
            predicted[alpha] = slope

    return SweepReport(
        eps=done, orders=orders, norms=norms, fits=fits,
        c_measured=c_measured, c_seminorm=c_seminorm, c_log_fit=c_log_fit,
        energy_ok=energy_ok, gronwall_bound_norms=gronwall_bound_norms,
        predicted_exponents=predicted, incomplete=incomplete)


def check_negligible(plan: SweepPlan,
                     thresholds: Thresholds = DEFAULT_THRESHOLDS) -> dict:
    """q-decay check for superpolynomially small data.

    Normalizes at the largest sweep eps: for each q <= q_max the sequence
    max_t ||u_eps|| must stay below (eps/eps_0)^q times the first value
    (with the configured multiplicative slack), i.e. decay at least as fast
    as every tested power along the sweep.
    """
    plan.family.require_regression_sweep()
    report = run_sweep(plan, thresholds)
    order = report.orders[0]
    vals = np.array(report.norms[order])
    eps = np.array(report.eps)
    q_max = thresholds.q_max
    base = vals[0]
    per_q = {}
    max_passed = -1
    for q in range(q_max + 1):
        if base < 1e-280:
            ok = bool(np.all(vals < 1e-280 * thresholds.negligible_slack + 1e-300))
            ok = ok or bool(np.all(vals <= 1e-250))
        else:
            bound = base * (eps / eps[0]) ** q * thresholds.negligible_slack
            ok = bool(np.all(vals <= bound + 1e-300))
        per_q[q] = ok
        if ok and max_passed == q - 1:
            max_passed = q
    return {"is_negligible": max_passed >= q_max, "max_passed_q": max_passed,
            "per_q": per_q, "norms": vals.tolist(), "eps": eps.tolist(),
            "report": report}


def check_association(plan: SweepPlan, probes, reference,
                      thresholds: Thresholds = DEFAULT_THRESHOLDS,
                      resolution_factor: int = 4) -> dict:
    """Weak-pairing residuals of u_eps(T) against a reference solution.

    ``probes`` are callables phi(x mesh arrays); ``reference`` is either a
    callable probe -> exact pairing value, or the string "solve" for a
    resolution_factor-refined solve with data built at the smallest sweep
    eps (documented as an oracle, not ground truth).  Residuals must be
    non-increasing over the last three sweep points (up to the configured
    additive slack).
    """
    eps_list = list(plan.family.eps_grid)
    grid = plan.grid

    def pairing(u: GridFunction, phi_vals: np.ndarray) -> complex:
        return complex(u.grid.cell_volume *
                       np.sum(u.values * np.conjugate(phi_vals)))

    coarse_phis = [np.asarray(phi(*grid.x_mesh()), dtype=complex)
                   for phi in probes]

    if callable(reference):
        ref_pairings = [complex(reference(phi)) for phi in probes]
    else:
        fine = Grid(grid.dim, grid.points * resolution_factor, grid.length)
        eps_ref = min(eps_list)
        g_f, f_f = _rebuild_on(plan.data, fine, eps_ref)
        prob = CauchyProblem(symbol=plan.family.member(eps_ref),
                             initial=g_f, horizon=plan.horizon, forcing=f_f)
        # refine time along with space so the reference's step error sits
        # below the sweep's
        ref_policy = None
        if plan.dt_policy is not None and plan.dt_policy.dt is not None:
            ref_policy = DtPolicy(dt=plan.dt_policy.dt / resolution_factor)
        res = solve_fixed_eps(prob, ref_policy, seed=plan.seed,
                              measure_seminorms=False)
        fine_phis = [np.asarray(phi(*fine.x_mesh()), dtype=complex)
                     for phi in probes]
        ref_pairings = [pairing(res.final(), pv) for pv in fine_phis]

    residuals = []
    for eps in eps_list:
        g_eps, f_eps = plan.data.build(eps, grid)
        prob = CauchyProblem(symbol=plan.family.member(eps), initial=g_eps,
                             horizon=plan.horizon, forcing=f_eps)
        res = solve_fixed_eps(prob, plan.dt_policy, seed=plan.seed,
                              measure_seminorms=False)
        row = [abs(pairing(res.final(), pv) - rp)
               for pv, rp in zip(coarse_phis, ref_pairings)]
        residuals.append(row)
    residuals = np.array(residuals)
    slack = thresholds.association_trend_slack
    tail = residuals[-3:]
    monotone = bool(np.all(np.diff(tail, axis=0) <= slack))
    return {
        "eps": eps_list,
        "residuals": residuals.tolist(),
        "monotone_tail": monotone,
        "terminal_residuals": residuals[-1].tolist(),
        "reference": "exact" if callable(reference) else "refined-solve",
    }


def spectral_extend(coarse: GridFunction, fine: Grid) -> GridFunction:
    """Trigonometric-interpolant extension of a grid function to a finer grid."""
    coeffs = coarse.dft()
    out = np.zeros(fine.shape, dtype=complex)
    m = coarse.grid.points
    idx = np.fft.fftfreq(m, 1.0 / m).astype(int)
    if fine.dim == 1:
        out[idx] = coeffs
    else:
        out[np.ix_(idx, idx)] = coeffs
    return GridFunction.from_dft(fine, out)


def _rebuild_on(data: DataBuilder, fine: Grid, eps: float):
    """Build the data family on a refined grid via spectral extension."""
    g_fine = spectral_extend(data.g, fine) if data.g is not None else None
    f_fine = None
    if data.forcing is not None and not data.forcing.is_zero:
        src = data.forcing
        terms = [(prof, spectral_extend(GridFunction(src.grid, vals), fine).values)
                 for prof, vals in src.terms]
        f_fine = Forcing(fine, terms)
    rebuilt = DataBuilder(kind=data.kind, g=g_fine, forcing=f_fine,
                          power=data.power, gamma=data.gamma)
    return rebuilt.build(eps, fine)


def check_ginf(plan: SweepPlan, report: SweepReport | None = None,
               box: SampleBox | None = None,
               thresholds: Thresholds = DEFAULT_THRESHOLDS) -> dict:
    """Uniform-exponent regularity check.

    Gate: the symbol family must classify as slow scale with log-type
    growth; then is_ginf requires every tracked exponent to stay within
    p_hat + slack where p_hat = N_hat(0,0) + 1.  The gate can pass while the
    conclusion fails and vice versa; both facts are reported separately.
    """
    dim = plan.grid.dim
    box = box or SampleBox(x_lo=(0.0,) * dim, x_hi=(plan.grid.length,) * dim,
                           x_count=33, xi_max=min(plan.grid.max_abs_xi(), 256.0),
                           xi_uniform_count=9, t_max=plan.horizon)
    gate_slow = classify_slow_scale(plan.family, 0, 1, 1, box, thresholds)
    gate_log = classify_log_type(plan.family, 1.0, 0, 1, box, thresholds)
    gate_passed = gate_slow["is_slow_scale"] and gate_log["is_log_type"]
    if report is None:
        report = run_sweep(plan, thresholds)
    cap = thresholds.ginf_order_cap
    covered = [o for o in report.orders if o[0] + sum(o[1]) <= cap]
    if not any(o[0] + sum(o[1]) >= cap for o in report.orders):
        raise InsufficientOrders(
            f"report must track orders up to d + |alpha| = {cap}")
    base = report.fits[(0, (0,) * dim)]["N_hat"]
    base = 0.0 if base is None else base
    p_hat = base + 1.0
    worst = None
    conclusion = True
    for order in covered:
        n_hat = report.fits[order]["N_hat"]
        if n_hat is None:
            continue
        worst = n_hat if worst is None else max(worst, n_hat)
        if n_hat > p_hat + thresholds.ginf_slack:
            conclusion = False
    out = {
        "status": "ok" if gate_passed else "not_applicable",
        "gate_passed": gate_passed,
        "gate_slow_scale": gate_slow,
        "gate_log_type": {k: v for k, v in gate_log.items() if k != "q_values"},
        "is_ginf": bool(gate_passed and conclusion),
        "conclusion_observed": bool(conclusion),
        "p_hat": p_hat,
        "max_tracked_exponent": worst,
    }
    return out
