"""Discrete Kohn-Nirenberg quantization on periodic grids.

The operator acts as v(x_j) = sum_k s(t, x_j, xi_k) u_hat_k exp(i x_j xi_k)
(left quantization).  Symbols that split into sums of separable terms
f_m(x) g_m(xi) ride an FFT fast path costing O(R M^n log M); everything else
goes through a dense per-node symbol table costing O(M^(2n)), guarded at desk
scale.  The adjoint used in production is the exact conjugate transpose with
respect to the discrete L2 inner product; the oscillatory-integral machinery
below exists to verify it against the symbol-calculus remainder at desk
scale, not to replace it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .config import POWER_ITERS, POWER_RTOL, CV_CONSTANT
from .errors import BoxTooSmall, DimensionMismatch, TooLarge
from .grid import Grid, GridFunction
from .profiles import plateau
from .symbols import SampleBox, SymbolExpr, seminorm_Q

__all__ = [
    "PeriodicOperator", "apply_op", "op_matrix", "symbol_from_matrix",
    "power_iteration", "adjoint_defect_norm", "operator_norm",
    "OscIntConfig", "adjoint_symbol_remainder", "check_remainder_estimate",
]

DENSE_GUARD = 4096


class PeriodicOperator:
    """A quantized symbol bound to a grid, with per-time evaluation caches."""

    def __init__(self, symbol: SymbolExpr, grid: Grid, separable_cap: int = 64):
        if symbol.dim != grid.dim:
            raise DimensionMismatch(
                f"symbol dim {symbol.dim} != grid dim {grid.dim}")
        self.symbol = symbol
        self.grid = grid
        self.terms = ex.separable_terms(symbol.root, separable_cap)
        self._t_independent = not symbol.depends_t()
        self._cache_t = None
        self._cache = None

    @property
    def separable(self) -> bool:
        return self.terms is not None

    # -- symbol tables --------------------------------------------------------
    def _tables(self, t: float):
        key = 0.0 if self._t_independent else float(t)
        if self._cache_t == key and self._cache is not None:
            return self._cache
        g = self.grid
        if self.separable:
            xm = g.x_mesh()
            xim = g.xi_mesh()
            zeros_x = tuple(np.zeros(g.shape) for _ in range(g.dim))
            fx, gxi = [], []
            for x_part, xi_part in self.terms:
                fx.append(np.asarray(x_part.eval(key, xm, zeros_x), dtype=complex)
                          * np.ones(g.shape))
                gxi.append(np.asarray(xi_part.eval(key, zeros_x, xim), dtype=complex)
                           * np.ones(g.shape))
            tables = ("sep", fx, gxi)
        else:
            if g.size > DENSE_GUARD:
                raise TooLarge(
                    f"dense quantization path guarded at {DENSE_GUARD} nodes; "
                    f"grid has {g.size} (use a separable symbol)")
            pts = g.flat_points()
            xi_flat = np.stack([m.ravel() for m in g.xi_mesh()], axis=-1)
            x = tuple(pts[:, a][:, None] for a in range(g.dim))
            xi = tuple(xi_flat[:, a][None, :] for a in range(g.dim))
            table = np.asarray(self.symbol.root.eval(key, x, xi), dtype=complex)
            table = np.broadcast_to(table, (g.size, g.size)).copy()
            phase = pts @ xi_flat.T
            tables = ("dense", table * np.exp(1j * phase))
        self._cache_t = key
        self._cache = tables
        return tables

    # -- application -----------------------------------------------------------
    def apply(self, t: float, values: np.ndarray) -> np.ndarray:
        tables = self._tables(t)
        g = self.grid
        if tables[0] == "sep":
            _, fx, gxi = tables
            u_hat = np.fft.fftn(values)
            out = np.zeros(g.shape, dtype=complex)
            for f_m, g_m in zip(fx, gxi):
                out += f_m * np.fft.ifftn(g_m * u_hat)
            return out
        table = tables[1]
        u_hat = np.fft.fftn(values).ravel() / g.size
        return (table @ u_hat).reshape(g.shape)

    def apply_adjoint(self, t: float, values: np.ndarray) -> np.ndarray:
        """Exact conjugate transpose w.r.t. the discrete L2 inner product."""
        tables = self._tables(t)
        g = self.grid
        if tables[0] == "sep":
            _, fx, gxi = tables
            out = np.zeros(g.shape, dtype=complex)
            for f_m, g_m in zip(fx, gxi):
                out += np.fft.ifftn(np.conjugate(g_m) *
                                    np.fft.fftn(np.conjugate(f_m) * values))
            return out
        table = tables[1]
        return (table.conj().T @ values.ravel()).reshape(g.shape) / g.size

    def matrix(self, t: float = 0.0) -> np.ndarray:
        """Dense nodal-basis matrix (small-scale oracle)."""
        g = self.grid
        if g.size > DENSE_GUARD:
            raise TooLarge(f"matrix oracle guarded at {DENSE_GUARD} nodes")
        tables = self._tables(t)
        if tables[0] == "dense":
            pts = g.flat_points()
            xi_flat = np.stack([m.ravel() for m in g.xi_mesh()], axis=-1)
            E = np.exp(1j * pts @ xi_flat.T)
            return tables[1] @ E.conj().T / g.size
        eye = np.eye(g.size, dtype=complex)
        cols = [self.apply(t, eye[:, j].reshape(g.shape)).ravel()
                for j in range(g.size)]
        return np.stack(cols, axis=1)


def apply_op(s: SymbolExpr, t: float, u: GridFunction) -> GridFunction:
    """One-shot operator application (solver paths hold PeriodicOperator)."""
    u.check_finite()
    out = PeriodicOperator(s, u.grid).apply(t, u.values)
    result = GridFunction(u.grid, out)
    result.check_finite()
    return result


def op_matrix(s: SymbolExpr, t: float, grid: Grid) -> np.ndarray:
    return PeriodicOperator(s, grid).matrix(t)


def symbol_from_matrix(matrix: np.ndarray, grid: Grid) -> np.ndarray:
    """Recover the symbol table s(x_j, xi_k) from a nodal-basis matrix.

    Inverse of the quantization map: with E[j,k] = exp(i x_j.xi_k) and the
    analysis matrix F[k,l] = exp(-i xi_k.x_l)/N one has  matrix = (S*E) F and
    F^(-1) = E, hence S = (matrix @ E) / E elementwise.
    """
    pts = grid.flat_points()
    xi_flat = np.stack([m.ravel() for m in grid.xi_mesh()], axis=-1)
    E = np.exp(1j * pts @ xi_flat.T)
    return (matrix @ E) / E


def power_iteration(apply_hermitian, shape, rng, iters: int = POWER_ITERS,
                    rtol: float = POWER_RTOL):
    """Largest eigenvalue of a Hermitian PSD operator by power iteration.

    Returns (eigenvalue_estimate, converged, iterations_used); deterministic
    for a seeded generator.
    """
    v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    v /= np.linalg.norm(v.ravel())
    lam_prev = None
    lam = 0.0
    for it in range(1, iters + 1):
        w = apply_hermitian(v)
        lam = float(np.real(np.vdot(v.ravel(), w.ravel())))
        nw = np.linalg.norm(w.ravel())
        if nw == 0.0:
            return 0.0, True, it
        v = w / nw
        if lam_prev is not None and abs(lam - lam_prev) <= rtol * max(abs(lam), 1e-300):
            return max(lam, 0.0), True, it
        lam_prev = lam
    return max(lam, 0.0), False, iters


@dataclass
class NormEstimate:
    value: float
    converged: bool
    iterations: int

    def __float__(self):
        return self.value


def _rng_from(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(0 if seed is None else seed)


def band_projector(grid: Grid, fraction: float = 0.5):
    """Spectral projector onto modes with |xi| <= fraction * Nyquist.

    Discrete quantization aliases products near the unpaired Nyquist mode, so
    operator norms are measured on the resolved band the scenarios use
    (default half Nyquist); pass fraction=None for the raw grid operator.
    """
    if fraction is None:
        return lambda v: v
    xi = grid.xi_mesh()
    mag = np.sqrt(sum(np.asarray(c) ** 2 for c in xi))
    mask = mag <= fraction * grid.max_abs_xi() + 1e-12

    def project(v):
        return np.fft.ifftn(np.fft.fftn(v) * mask)

    return project


def adjoint_defect_norm(s: SymbolExpr, t: float, grid: Grid,
                        iters: int = POWER_ITERS, seed=None,
                        band_limit: float | None = 0.5) -> NormEstimate:
    """L2 operator norm of P(op(s) - op(s)^dagger)P via power iteration.

    B = A - A^dagger satisfies B^dagger = -B, and conjugating with the band
    projector P preserves that, so B*B needs two B applications per
    iteration.
    """
    op = PeriodicOperator(s, grid)
    proj = band_projector(grid, band_limit)

    def b_apply(v):
        pv = proj(v)
        return proj(op.apply(t, pv) - op.apply_adjoint(t, pv))

    def bhb(v):
        return -b_apply(b_apply(v))

    lam, ok, used = power_iteration(bhb, grid.shape, _rng_from(seed), iters)
    return NormEstimate(math.sqrt(max(lam, 0.0)), ok, used)


def operator_norm(s: SymbolExpr, t: float, grid: Grid,
                  iters: int = POWER_ITERS, seed=None,
                  with_seminorm_bound: bool = False,
                  box: SampleBox | None = None,
                  band_limit: float | None = 0.5) -> dict:
    """Power-iteration L2 norm of P op(s) P; optionally the order-0 semi-norm
    bound side Q^0_{0,f,f} with f = floor(n/2)+1 for constant calibration."""
    op = PeriodicOperator(s, grid)
    proj = band_projector(grid, band_limit)

    def aha(v):
        av = op.apply(t, proj(v))
        return proj(op.apply_adjoint(t, proj(av)))

    lam, ok, used = power_iteration(aha, grid.shape, _rng_from(seed), iters)
    out = {"norm": math.sqrt(max(lam, 0.0)), "converged": ok,
           "iterations": used}
    if with_seminorm_bound:
        f = grid.dim // 2 + 1
        box = box or SampleBox(x_lo=(0.0,) * grid.dim,
                               x_hi=(grid.length,) * grid.dim,
                               xi_max=grid.max_abs_xi())
        q = seminorm_Q(s, 0.0, 0, f, f, box)
        out["seminorm_side"] = q
        out["cv_bound"] = CV_CONSTANT[grid.dim] * q
    return out


# -- oscillatory-integral adjoint remainder (desk-scale verification) --------

@dataclass
class OscIntConfig:
    """Regularized oscillatory integral parameters.

    lam is the integration-by-parts order in y (needs 2*lam > n), l_order the
    parts order in eta (needs 2*l_order > n + |alpha| for the tested alpha).
    The (y, eta) integral is truncated to a box with smooth roll-off on the
    outer 40% of each axis; eta-convergence is oscillatory and is therefore
    checked by refinement stability rather than a shell estimate, while the
    y-tail (with its (1+|y|^2)^(-lam) decay) is monitored directly.
    """

    lam: int = 2
    l_order: int = 3
    theta_nodes: int = 7
    y_half: float = 14.0
    eta_half: float = 40.0
    y_points: int = 361
    eta_points: int = 361
    tail_tol: float = 0.05

    def validate(self, dim: int, alpha_total: int = 0):
        if 2 * self.lam <= dim:
            raise ValueError("OscIntConfig needs 2*lam > n")
        if 2 * self.l_order <= dim + alpha_total:
            raise ValueError("OscIntConfig needs 2*l_order > n + |alpha|")

    def refined(self, factor: float = 1.5) -> "OscIntConfig":
        return OscIntConfig(
            lam=self.lam, l_order=self.l_order,
            theta_nodes=2 * self.theta_nodes + 1,
            y_half=self.y_half * factor, eta_half=self.eta_half * factor,
            y_points=int(self.y_points * factor) | 1,
            eta_points=int(self.eta_points * factor) | 1,
            tail_tol=self.tail_tol)


def _axis_quad(half: float, points: int):
    nodes = np.linspace(-half, half, points)
    w = np.full(points, nodes[1] - nodes[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    window = plateau(nodes, 0.6 * half, half)
    return nodes, w * window, w


def _xi_laplacian(root: ex.Expr, dim: int) -> ex.Expr:
    return ex.add(*(root.d_xi(a).d_xi(a) for a in range(dim)))


def _remainder_integrand_trees(s: SymbolExpr, axis: int, lam: int,
                               extra_alpha, extra_beta):
    """Trees of Laplacian_xi^i applied to d_xi_j d_x_j conj(s), i = 0..lam,
    with optional extra derivatives for the estimate check."""
    root = ex.Conj(s.root)
    for a, cnt in enumerate(extra_alpha):
        for _ in range(cnt):
            root = root.d_xi(a)
    for a, cnt in enumerate(extra_beta):
        for _ in range(cnt):
            root = root.d_x(a)
    root = root.d_xi(axis).d_x(axis)
    trees = [root]
    for _ in range(lam):
        trees.append(_xi_laplacian(trees[-1], s.dim))
    return trees


def _r_theta(s: SymbolExpr, t: float, x, xi, theta: float,
             cfg: OscIntConfig, extra_alpha=None, extra_beta=None,
             tail_report=None):
    """r_theta summed over axes at one (t, x, xi, theta) point."""
    dim = s.dim
    extra_alpha = extra_alpha or (0,) * dim
    extra_beta = extra_beta or (0,) * dim
    y_nodes, y_w, y_raw = _axis_quad(cfg.y_half, cfg.y_points)
    e_nodes, e_w, _ = _axis_quad(cfg.eta_half, cfg.eta_points)
    if dim == 1:
        y_mesh = (y_nodes[:, None],)
        e_mesh = (e_nodes[None, :],)
        w_y = y_w[:, None]
        raw_w_y = y_raw[:, None]
        w_e = e_w[None, :] / (2.0 * np.pi)
        y_sq = y_mesh[0] ** 2
        phase = np.exp(-1j * y_nodes[:, None] * e_nodes[None, :])
    else:
        ya, yb = np.meshgrid(y_nodes, y_nodes, indexing="ij")
        ea, eb = np.meshgrid(e_nodes, e_nodes, indexing="ij")
        y_mesh = (ya.ravel()[:, None], yb.ravel()[:, None])
        e_mesh = (ea.ravel()[None, :], eb.ravel()[None, :])
        w_y = np.outer(y_w, y_w).ravel()[:, None]
        raw_w_y = np.outer(y_raw, y_raw).ravel()[:, None]
        w_e = (np.outer(e_w, e_w).ravel() / (2.0 * np.pi) ** 2)[None, :]
        y_sq = y_mesh[0] ** 2 + y_mesh[1] ** 2
        phase = np.exp(-1j * (y_mesh[0] * e_mesh[0] + y_mesh[1] * e_mesh[1]))
    damp = (1.0 + y_sq) ** (-cfg.lam)
    x_args = tuple(np.asarray(x[a]) + y_mesh[a] for a in range(dim))
    xi_args = tuple(np.asarray(xi[a]) + theta * e_mesh[a] for a in range(dim))
    total = 0.0 + 0.0j
    from math import comb
    for axis in range(dim):
        trees = _remainder_integrand_trees(s, axis, cfg.lam,
                                           extra_alpha, extra_beta)
        integrand = np.zeros(phase.shape, dtype=complex)
        for i in range(cfg.lam + 1):
            # (1 - Lap_eta)^lam = sum_i C(lam,i) (-Lap_eta)^i and
            # Lap_eta = theta^2 Lap_xi, so each term carries (-theta^2)^i.
            vals = np.asarray(trees[i].eval(t, x_args, xi_args))
            integrand = integrand + comb(cfg.lam, i) * (-theta * theta) ** i * vals
        weighted = phase * damp * integrand
        if tail_report is not None:
            # tail metric uses the raw trapezoid weights so the smooth
            # roll-off cannot hide boundary mass
            mag = np.abs(damp * integrand) * raw_w_y
            shell = np.broadcast_to(y_sq > (0.8 * cfg.y_half) ** 2, mag.shape)
            tail_report.append((float(np.sum(mag[shell])), float(np.sum(mag))))
        total += np.sum(weighted * w_y * w_e)
    return total


def adjoint_symbol_remainder(s: SymbolExpr, t: float, x, xi,
                             cfg: OscIntConfig | None = None) -> complex:
    """Symbol-level adjoint correction: op(s)^dagger has symbol
    conj(s) + remainder, with the remainder evaluated here by regularized
    tensor quadrature over (y, eta) and Gauss-Legendre in theta.

    Verified convention (matches the dense-matrix adjoint oracle): for
    s = c(x) xi the remainder equals -i c'(x).
    """
    cfg = cfg or OscIntConfig()
    cfg.validate(s.dim)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    nodes, weights = np.polynomial.legendre.leggauss(cfg.theta_nodes)
    thetas = 0.5 * (nodes + 1.0)
    tw = 0.5 * weights
    tails = []
    acc = 0.0 + 0.0j
    for theta, w in zip(thetas, tw):
        acc += w * _r_theta(s, t, tuple(x), tuple(xi), float(theta), cfg,
                            tail_report=tails)
    shell = sum(a for a, _ in tails)
    total = sum(b for _, b in tails)
    if total > 0 and shell / total > cfg.tail_tol:
        raise BoxTooSmall(
            f"y-shell fraction {shell / total:.3f} exceeds {cfg.tail_tol}")
    return complex(-1j * acc)


def check_remainder_estimate(s: SymbolExpr, alpha, beta,
                             cfg: OscIntConfig | None = None,
                             box: SampleBox | None = None,
                             t: float = 0.0,
                             x_probes=None, xi_probes=None) -> dict:
    """Compare weighted remainder derivatives against the semi-norm side.

    lhs = max over sampled (x, xi, theta) of
          |d_xi^alpha d_x^beta r_theta| * (1+|xi|)^{|alpha|};
    rhs = Q^1_{0, n+2+|alpha|, n+2+|alpha|+|beta|}(s).  The ratio is
    reported; theta-uniformity shows up as stability under refinement.
    """
    cfg = cfg or OscIntConfig()
    dim = s.dim
    alpha = tuple(int(v) for v in np.atleast_1d(alpha))
    beta = tuple(int(v) for v in np.atleast_1d(beta))
    a_tot, b_tot = sum(alpha), sum(beta)
    cfg.validate(dim, a_tot)
    box = box or SampleBox(x_lo=(0.0,) * dim, x_hi=(2 * math.pi,) * dim,
                           x_count=9, xi_max=64.0, xi_uniform_count=5)
    if x_probes is None:
        x_probes = box.x_points()[:: max(1, box.x_points().shape[0] // 7)]
    if xi_probes is None:
        ladder = [0.0, 1.0, 4.0, 16.0, 64.0]
        xi_probes = np.array([[v] + [0.0] * (dim - 1) for v in ladder])
    thetas = np.linspace(0.0, 1.0, 5)
    lhs = 0.0
    for xp in np.atleast_2d(x_probes):
        for xip in np.atleast_2d(xi_probes):
            weight = (1.0 + float(np.linalg.norm(xip))) ** a_tot
            for theta in thetas:
                val = _r_theta(s, t, tuple(xp), tuple(xip), float(theta), cfg,
                               extra_alpha=alpha, extra_beta=beta)
                lhs = max(lhs, abs(val) * weight)
    rhs = seminorm_Q(s, 1.0, 0, dim + 2 + a_tot, dim + 2 + a_tot + b_tot, box)
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return {"lhs": lhs, "rhs_seminorm": rhs, "ratio": ratio}
