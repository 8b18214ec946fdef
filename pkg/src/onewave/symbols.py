"""Operator symbols, their semi-norms and asymptotic classification.

A :class:`SymbolExpr` wraps a differentiable expression tree with its declared
growth order m and spatial dimension.  Semi-norm suprema over (x, xi) are
approximated by sampled maxima (uniform x grid, uniform + dyadic xi ladder)
and are therefore reported as lower bounds of the true suprema; every
downstream check uses the same sampling recipe so comparisons stay
consistent.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .config import DEFAULT_SAMPLING, DEFAULT_THRESHOLDS, MAX_DIFF_ORDER
from .errors import (EmptyBox, InsufficientSweep, NonFinite,
                     UnsupportedDerivativeOrder)

__all__ = [
    "SymbolExpr", "HyperbolicSymbol", "GenSymbolFamily", "SampleBox",
    "eval_symbol", "seminorm_c", "seminorm_q", "seminorm_Q",
    "classify_log_type", "classify_slow_scale", "multi_indices",
]


def _as_multi(idx, dim: int):
    if idx is None:
        return (0,) * dim
    if isinstance(idx, (int, np.integer)):
        if dim == 1:
            return (int(idx),)
        raise ValueError("multi-index must be a tuple in dimension > 1")
    idx = tuple(int(i) for i in idx)
    if len(idx) != dim:
        raise ValueError(f"multi-index length {len(idx)} != dim {dim}")
    if any(i < 0 for i in idx):
        raise ValueError("multi-index entries must be >= 0")
    return idx


def multi_indices(dim: int, max_total: int):
    """All multi-indices of length dim with |alpha| <= max_total."""
    out = []
    for total in range(max_total + 1):
        for combo in itertools.product(range(total + 1), repeat=dim):
            if sum(combo) == total:
                out.append(combo)
    return out


class SymbolExpr:
    """Expression tree plus declared order m and spatial dimension."""

    def __init__(self, root: ex.Expr, declared_order: float, dim: int):
        if dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        self.root = root
        self.declared_order = float(declared_order)
        self.dim = int(dim)
        self._deriv_cache = {}

    # -- construction helpers ----------------------------------------------
    @staticmethod
    def from_json(data: dict, mollifier_factory=None) -> "SymbolExpr":
        return SymbolExpr(ex.from_json(data["expr"], mollifier_factory),
                          data["declared_order"], data["dim"])

    def to_json(self) -> dict:
        return {"dim": self.dim, "declared_order": self.declared_order,
                "expr": self.root.to_json()}

    def conj(self) -> "SymbolExpr":
        return SymbolExpr(ex.Conj(self.root), self.declared_order, self.dim)

    def __add__(self, other: "SymbolExpr") -> "SymbolExpr":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch in symbol sum")
        order = max(self.declared_order, other.declared_order)
        return SymbolExpr(ex.add(self.root, other.root), order, self.dim)

    # -- dependence flags ----------------------------------------------------
    def depends_t(self):
        return self.root.depends_t()

    def depends_x(self):
        return self.root.depends_x()

    def depends_xi(self):
        return self.root.depends_xi()

    # -- differentiation -----------------------------------------------------
    def derivative_root(self, d: int, alpha, beta) -> ex.Expr:
        """Tree of d_t^d d_xi^alpha d_x^beta applied to this symbol."""
        alpha = _as_multi(alpha, self.dim)
        beta = _as_multi(beta, self.dim)
        key = (d, alpha, beta)
        cached = self._deriv_cache.get(key)
        if cached is not None:
            return cached
        node = self.root
        for _ in range(d):
            node = node.d_t()
        for axis, count in enumerate(alpha):
            for _ in range(count):
                node = node.d_xi(axis)
        for axis, count in enumerate(beta):
            for _ in range(count):
                node = node.d_x(axis)
        self._deriv_cache[key] = node
        return node

    def derivative(self, d: int, alpha, beta) -> "SymbolExpr":
        alpha_t = _as_multi(alpha, self.dim)
        order = self.declared_order - sum(alpha_t)
        return SymbolExpr(self.derivative_root(d, alpha, beta), order, self.dim)

    # -- evaluation ------------------------------------------------------------
    def eval(self, t, x, xi, d: int = 0, alpha=None, beta=None):
        """Vectorized evaluation of the (d, alpha, beta)-derivative.

        x and xi are tuples of arrays shaped to broadcast against each other.
        """
        node = self.derivative_root(d, alpha, beta)
        x = tuple(np.asarray(c) for c in (x if isinstance(x, (tuple, list)) else (x,)))
        xi = tuple(np.asarray(c) for c in (xi if isinstance(xi, (tuple, list)) else (xi,)))
        if len(x) != self.dim or len(xi) != self.dim:
            raise ValueError("coordinate tuple length must equal dim")
        out = node.eval(t, x, xi)
        shape = np.broadcast_shapes(*(c.shape for c in x + xi)) if x + xi else ()
        return np.broadcast_to(np.asarray(out), shape) if shape else out


def eval_symbol(s: SymbolExpr, t, x, xi, d: int = 0, alpha=None, beta=None):
    """Point evaluation of a mixed derivative; the user-facing entry point.

    Enforces the configured maximum differentiation order and finiteness.
    """
    alpha_t = _as_multi(alpha, s.dim)
    beta_t = _as_multi(beta, s.dim)
    if d > MAX_DIFF_ORDER or sum(alpha_t) > MAX_DIFF_ORDER or sum(beta_t) > MAX_DIFF_ORDER:
        raise UnsupportedDerivativeOrder(
            f"orders (d={d}, |alpha|={sum(alpha_t)}, |beta|={sum(beta_t)}) exceed "
            f"the configured maximum {MAX_DIFF_ORDER}")
    out = s.eval(t, x, xi, d, alpha_t, beta_t)
    arr = np.asarray(out)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise NonFinite("symbol evaluation produced a non-finite value")
    if arr.ndim == 0:
        return complex(arr)
    return arr


@dataclass
class SampleBox:
    """Sampling region for semi-norm maxima.

    x is sampled uniformly per axis with endpoints included (refining the
    count by powers of two only adds points, keeping the reported maximum
    monotone); xi combines a uniform low-frequency band with the dyadic
    ladder {0, +-2^j <= xi_max} along the grid directions, plus xi_max
    itself.
    """

    x_lo: tuple = (0.0,)
    x_hi: tuple = (2.0 * math.pi,)
    x_count: int = DEFAULT_SAMPLING.x_count
    xi_max: float = DEFAULT_SAMPLING.xi_max
    xi_uniform_count: int = DEFAULT_SAMPLING.xi_uniform_count
    xi_uniform_max: float = DEFAULT_SAMPLING.xi_uniform_max
    t_max: float = 1.0
    t_samples: int = DEFAULT_SAMPLING.t_samples

    def __post_init__(self):
        self.x_lo = tuple(float(v) for v in np.atleast_1d(self.x_lo))
        self.x_hi = tuple(float(v) for v in np.atleast_1d(self.x_hi))
        if len(self.x_lo) != len(self.x_hi):
            raise EmptyBox("x_lo and x_hi lengths differ")
        if self.x_count < 1 or self.xi_uniform_count < 1 or self.t_samples < 1:
            raise EmptyBox("sample counts must be positive")
        if self.xi_max <= 0:
            raise EmptyBox("xi_max must be positive")

    @property
    def dim(self):
        return len(self.x_lo)

    def x_points(self) -> np.ndarray:
        axes = [np.linspace(lo, hi, self.x_count)
                for lo, hi in zip(self.x_lo, self.x_hi)]
        if self.dim == 1:
            return axes[0][:, None]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def xi_points(self) -> np.ndarray:
        mags = set(np.linspace(0.0, self.xi_uniform_max, self.xi_uniform_count))
        j = 0
        while 2.0 ** j <= self.xi_max:
            mags.add(2.0 ** j)
            j += 1
        mags.add(self.xi_max)
        mags = np.array(sorted(mags))
        if self.dim == 1:
            vals = np.concatenate([-mags[::-1], mags])
            return np.unique(vals)[:, None]
        root2 = 1.0 / math.sqrt(2.0)
        dirs = np.array([(1, 0), (0, 1), (-1, 0), (0, -1),
                         (root2, root2), (-root2, -root2)])
        pts = (mags[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
        return np.unique(np.round(pts, 12), axis=0)

    def t_points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.t_samples)


def _eval_on_box(node: ex.Expr, t, xpts: np.ndarray, xipts: np.ndarray, dim: int):
    x = tuple(xpts[:, a][:, None] for a in range(dim))
    xi = tuple(xipts[:, a][None, :] for a in range(dim))
    out = np.asarray(node.eval(t, x, xi))
    return np.broadcast_to(out, (xpts.shape[0], xipts.shape[0]))


def seminorm_c(s: SymbolExpr, m: float, alpha, beta, box: SampleBox,
               t: float = 0.0) -> float:
    """Sampled maximum of (1+|xi|)^(-m+|alpha|) |d_xi^alpha d_x^beta s|.

    A lower bound of the true supremum, monotone nondecreasing under sample
    refinement of the box.
    """
    alpha_t = _as_multi(alpha, s.dim)
    beta_t = _as_multi(beta, s.dim)
    node = s.derivative_root(0, alpha_t, beta_t)
    xpts, xipts = box.x_points(), box.xi_points()
    if xpts.size == 0 or xipts.size == 0:
        raise EmptyBox("sampling box produced no points")
    vals = np.abs(_eval_on_box(node, t, xpts, xipts, s.dim))
    ximag = np.linalg.norm(xipts, axis=1)
    weight = (1.0 + ximag) ** (-m + sum(alpha_t))
    return float(np.max(vals * weight[None, :]))


def seminorm_q(s: SymbolExpr, m: float, k: int, l: int, box: SampleBox,
               t: float = 0.0) -> float:
    """max of seminorm_c over |alpha| <= k, |beta| <= l."""
    best = 0.0
    for alpha in multi_indices(s.dim, k):
        for beta in multi_indices(s.dim, l):
            best = max(best, seminorm_c(s, m, alpha, beta, box, t))
    return best


def seminorm_Q(s: SymbolExpr, m: float, j: int, k: int, l: int,
               box: SampleBox) -> float:
    """max over t-derivative orders i <= j and uniform t samples of
    seminorm_q applied to d_t^i s."""
    if not s.depends_t():
        return seminorm_q(s, m, k, l, box, t=0.0)
    best = 0.0
    for i in range(j + 1):
        si = SymbolExpr(s.derivative_root(i, None, None), s.declared_order, s.dim)
        for t in box.t_points():
            best = max(best, seminorm_q(si, m, k, l, box, t=float(t)))
    return best


@dataclass
class HyperbolicSymbol:
    """Order-1 symbol split a = a1 + a0 with a1 real-valued, a0 of order 0.

    ``x_independent_outside`` tags the radius beyond which the symbol is a
    pure frequency multiplier (measured from the domain midpoint on the
    torus).
    """

    a1: SymbolExpr
    a0: SymbolExpr | None = None
    x_independent_outside: float | None = None

    def __post_init__(self):
        if self.a0 is not None and self.a0.dim != self.a1.dim:
            raise ValueError("a1/a0 dimension mismatch")

    @property
    def dim(self):
        return self.a1.dim

    def full(self) -> SymbolExpr:
        if self.a0 is None:
            return self.a1
        return SymbolExpr(ex.add(self.a1.root, self.a0.root), 1.0, self.dim)

    def is_real(self, box: "SampleBox | None" = None) -> bool:
        """Sampled reality check of the full symbol (a1 is checked on
        construction paths; case analysis also needs a0 real)."""
        if self.a0 is None:
            return True
        box = box or SampleBox(x_hi=(2.0 * math.pi,) * self.dim if self.dim > 1
                               else (2.0 * math.pi,), x_count=33,
                               xi_uniform_count=9, xi_max=64.0)
        return check_real_valued(self.a0, box)

    def to_json(self) -> dict:
        out = {"a1": self.a1.to_json()}
        if self.a0 is not None:
            out["a0"] = self.a0.to_json()
        if self.x_independent_outside is not None:
            out["x_independent_outside"] = self.x_independent_outside
        return out


def check_real_valued(s: SymbolExpr, box: SampleBox, t_values=(0.0,)) -> bool:
    """Sampled reality check: |Im| <= 1e-14 * (1 + |value|) everywhere."""
    xpts, xipts = box.x_points(), box.xi_points()
    for t in t_values:
        vals = _eval_on_box(s.root, t, xpts, xipts, s.dim)
        if np.max(np.abs(vals.imag)) > 1e-14 * (1.0 + np.max(np.abs(vals))):
            return False
    return True


class GenSymbolFamily:
    """eps-indexed family of hyperbolic symbols sharing dim and orders."""

    def __init__(self, base, eps_grid, mollification_k: int | None = None):
        self.base = base
        self.eps_grid = tuple(sorted((float(e) for e in eps_grid), reverse=True))
        if not self.eps_grid:
            raise InsufficientSweep("empty eps grid")
        if any(e <= 0 or e > 1 for e in self.eps_grid):
            raise InsufficientSweep("eps grid entries must lie in (0, 1]")
        self.mollification_k = mollification_k
        self._members = {}
        first = self.member(self.eps_grid[0])
        last = self.member(self.eps_grid[-1])
        if first.dim != last.dim:
            raise ValueError("family members disagree on dimension")

    @staticmethod
    def geometric(base, eps0: float, ratio: float, count: int,
                  mollification_k=None) -> "GenSymbolFamily":
        if not 0 < ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        grid = [eps0 * ratio ** i for i in range(count)]
        return GenSymbolFamily(base, grid, mollification_k)

    def member(self, eps: float) -> HyperbolicSymbol:
        key = float(eps)
        if key not in self._members:
            self._members[key] = self.base(key)
        return self._members[key]

    def require_regression_sweep(self):
        if len(self.eps_grid) < 5 or self.eps_grid[0] / self.eps_grid[-1] < 1e3:
            raise InsufficientSweep(
                "regression verdicts need >= 5 eps points spanning >= 3 decades")


def _family_Q_values(fam: GenSymbolFamily, m, j, k, l, box):
    vals = []
    for eps in fam.eps_grid:
        member = fam.member(eps)
        vals.append(seminorm_Q(member.full(), m, j, k, l, box))
    return np.array(vals)


def classify_log_type(fam: GenSymbolFamily, m: float, k: int, l: int,
                      box: SampleBox, thresholds=DEFAULT_THRESHOLDS) -> dict:
    """Least-squares fit Q^m_{0,k,l}(a_eps) ~ c*log(1/eps) + b over the sweep.

    Verdict requires relative fit residual below the configured threshold
    and a nonnegative fitted coefficient.
    """
    fam.require_regression_sweep()
    q_vals = _family_Q_values(fam, m, 0, k, l, box)
    logs = np.log(1.0 / np.array(fam.eps_grid))
    coeffs = np.polyfit(logs, q_vals, 1)
    fit = np.polyval(coeffs, logs)
    scale = max(float(np.linalg.norm(q_vals)), 1e-300)
    residual = float(np.linalg.norm(q_vals - fit)) / scale
    c = float(coeffs[0])
    # "nonnegative" up to fit noise: 1% of the semi-norm level counts as zero
    c_floor = -0.01 * (float(np.mean(np.abs(q_vals))) + 1e-300)
    return {
        "is_log_type": bool(residual < thresholds.log_type_residual and c >= c_floor),
        "fitted_coeff": c,
        "intercept": float(coeffs[1]),
        "residual": residual,
        "q_values": q_vals.tolist(),
        "eps": list(fam.eps_grid),
    }


def classify_slow_scale(fam: GenSymbolFamily, j: int, k: int, l: int,
                        box: SampleBox, thresholds=DEFAULT_THRESHOLDS) -> dict:
    """Finite-sweep slow-scale test of Q^1_{j,k,l} along the family.

    Fits the power-law slope of log Q against log(1/eps) and subtracts the
    slope a pure log(1/eps) net measures on the same sweep (a slow-scale
    net by definition); the excess must satisfy p * excess <= 1 + slack for
    every power p up to the configured maximum.  Reports the largest p
    satisfied."""
    fam.require_regression_sweep()
    q_vals = _family_Q_values(fam, 1.0, j, k, l, box)
    logs = np.log(1.0 / np.array(fam.eps_grid))
    p_max = thresholds.slow_scale_p_max
    if np.all(q_vals < 1e-280):
        return {"is_slow_scale": True, "largest_p": p_max, "slope": 0.0,
                "excess": 0.0}
    y = np.log(np.maximum(q_vals, 1e-280))
    slope = float(np.polyfit(logs, y, 1)[0])
    log_ref = float(np.polyfit(logs, np.log(logs), 1)[0])
    excess = max(slope - log_ref, 0.0)
    largest = 0
    for p in range(1, p_max + 1):
        if p * excess <= 1.0 + thresholds.slow_scale_slope_slack:
            largest = p
        else:
            break
    return {"is_slow_scale": largest >= p_max, "largest_p": largest,
            "slope": slope, "excess": excess}
