"""Expression trees, semi-norms, and the asymptotic classifiers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onewave import expr as ex
from onewave.errors import (EmptyBox, InsufficientSweep, NonFinite,
                            UnsupportedDerivativeOrder)
from onewave.symbols import (GenSymbolFamily, HyperbolicSymbol, SampleBox,
                             SymbolExpr, classify_log_type,
                             classify_slow_scale, eval_symbol, seminorm_Q,
                             seminorm_c, seminorm_q)

TWO_PI = 2.0 * np.pi


def box_1d(**kw):
    defaults = dict(x_lo=(0.0,), x_hi=(TWO_PI,), xi_max=1000.0)
    defaults.update(kw)
    return SampleBox(**defaults)


class TestEvalSymbol:
    def test_linear_xi_derivative(self):
        s = SymbolExpr(ex.CoordXi(0), 1.0, 1)
        assert eval_symbol(s, 0.3, 1.1, 2.5, alpha=(1,)) == 1.0 + 0j

    def test_constant(self):
        s = SymbolExpr(ex.Const(5), 0.0, 1)
        assert eval_symbol(s, 0.0, 0.7, -3.0) == 5.0 + 0j

    def test_product_rule_closed_form(self):
        s = SymbolExpr(ex.mul(ex.Sin(ex.CoordX(0)), ex.CoordXi(0)), 1.0, 1)
        # d/dx [sin(x) xi] at x=0, xi=3 -> cos(0)*3
        assert eval_symbol(s, 0.0, 0.0, 3.0, beta=(1,)) == pytest.approx(3.0)

    def test_order_guard(self):
        s = SymbolExpr(ex.CoordXi(0), 1.0, 1)
        with pytest.raises(UnsupportedDerivativeOrder):
            eval_symbol(s, 0.0, 0.0, 1.0, alpha=(7,))

    def test_japanese_bracket_derivative(self):
        s = SymbolExpr(ex.JapaneseBracket(1.0), 1.0, 1)
        got = eval_symbol(s, 0.0, 0.0, 3.0, alpha=(1,))
        assert got == pytest.approx(3.0 / np.sqrt(10.0))

    @pytest.mark.filterwarnings("ignore:overflow")
    def test_nonfinite_detected(self):
        big = SymbolExpr(ex.Power(ex.CoordXi(0), 6), 6.0, 1)
        with pytest.raises(NonFinite):
            eval_symbol(big, 0.0, 0.0, 1e300)


# small strategy of random expression trees over (t, x, xi)
_leaves = st.sampled_from(["x", "xi", "t", "const", "bracket"])


def _make_leaf(tag, value):
    return {"x": ex.CoordX(0), "xi": ex.CoordXi(0), "t": ex.CoordT(),
            "const": ex.Const(value), "bracket": ex.JapaneseBracket(1.0)}[tag]


@st.composite
def trees(draw, depth=0):
    if depth >= 2 or draw(st.booleans()):
        tag = draw(_leaves)
        return _make_leaf(tag, draw(st.floats(-2, 2)))
    kind = draw(st.sampled_from(["sum", "prod", "sin", "cos", "bump"]))
    if kind in ("sum", "prod"):
        a = draw(trees(depth=depth + 1))
        b = draw(trees(depth=depth + 1))
        return ex.add(a, b) if kind == "sum" else ex.mul(a, b)
    child = draw(trees(depth=depth + 1))
    if kind == "sin":
        return ex.Sin(child)
    if kind == "cos":
        return ex.Cos(child)
    if isinstance(child, (ex.Const, ex.CoordX, ex.CoordT)):
        return ex.SmoothBump(child, 0.25, 2.0)
    return ex.Cos(child)


class TestTreeDifferentiation:
    @settings(max_examples=60, deadline=None)
    @given(tree=trees(), direction=st.sampled_from(["t", "x", "xi"]))
    def test_matches_central_difference(self, tree, direction):
        s = SymbolExpr(tree, 1.0, 1)
        t0, x0, xi0 = 0.37, 1.21, 0.83
        h = 1e-6
        d, alpha, beta = 0, (0,), (0,)
        if direction == "t":
            d = 1
            lo = s.eval(t0 - h, x0, xi0)
            hi = s.eval(t0 + h, x0, xi0)
        elif direction == "x":
            beta = (1,)
            lo = s.eval(t0, x0 - h, xi0)
            hi = s.eval(t0, x0 + h, xi0)
        else:
            alpha = (1,)
            lo = s.eval(t0, x0, xi0 - h)
            hi = s.eval(t0, x0, xi0 + h)
        fd = (np.asarray(hi) - np.asarray(lo)) / (2 * h)
        an = s.eval(t0, x0, xi0, d=d, alpha=alpha, beta=beta)
        scale = max(abs(complex(np.asarray(an).item())), 1.0)
        assert abs(complex(np.asarray(an).item()) -
                   complex(np.asarray(fd).item())) <= 1e-6 * scale

    def test_json_round_trip(self):
        tree = ex.add(ex.mul(ex.Sin(ex.CoordX(0)), ex.JapaneseBracket(1.0)),
                      ex.SmoothStep(ex.JapaneseBracket(2.0), 4.0, 8.0),
                      ex.Power(ex.CoordXi(0), 2))
        s = SymbolExpr(tree, 2.0, 1)
        back = SymbolExpr.from_json(s.to_json())
        pts = (0.3, 1.7, 2.2)
        assert eval_symbol(back, *pts) == pytest.approx(eval_symbol(s, *pts))


class TestSeminorms:
    def test_linear_symbol_value(self, xi_symbol):
        v = seminorm_c(xi_symbol, 1.0, (0,), (0,), box_1d())
        assert 0.99 <= v < 1.0

    def test_linear_symbol_xi_derivative_exact(self, xi_symbol):
        assert seminorm_c(xi_symbol, 1.0, (1,), (0,), box_1d()) == 1.0

    def test_sin_speed_derivative(self, variable_speed_symbol):
        v = seminorm_c(variable_speed_symbol, 1.0, (0,), (1,), box_1d())
        assert 0.99 <= v < 1.0
        # dense-grid maximization oracle at 10x resolution
        x = np.linspace(0, TWO_PI, 1290)
        xi = np.linspace(-1000, 1000, 4001)
        oracle = np.max(np.abs(np.cos(x))[:, None] * np.abs(xi)[None, :] /
                        (1 + np.abs(xi))[None, :])
        assert v == pytest.approx(oracle, abs=1e-3)

    def test_q_max_of_c(self, xi_symbol):
        assert seminorm_q(xi_symbol, 1.0, 1, 1, box_1d()) == 1.0

    def test_q_zero_symbol(self):
        z = SymbolExpr(ex.Const(0.0), 0.0, 1)
        assert seminorm_q(z, 0.0, 2, 2, box_1d()) == 0.0

    def test_q_monotone_in_orders(self, variable_speed_symbol):
        box = box_1d()
        q01 = seminorm_q(variable_speed_symbol, 1.0, 0, 1, box)
        q11 = seminorm_q(variable_speed_symbol, 1.0, 1, 1, box)
        assert q11 >= q01

    def test_Q_t_independent_collapses(self, variable_speed_symbol):
        box = box_1d()
        for j in (0, 1, 3):
            assert seminorm_Q(variable_speed_symbol, 1.0, j, 1, 1, box) == \
                seminorm_q(variable_speed_symbol, 1.0, 1, 1, box)

    def test_Q_t_linear(self):
        s = SymbolExpr(ex.mul(ex.CoordT(), ex.CoordXi(0)), 1.0, 1)
        v = seminorm_Q(s, 1.0, 1, 0, 0, box_1d(t_max=1.0))
        assert 0.99 <= v < 1.0

    def test_Q_sin_t_sin_x(self):
        s = SymbolExpr(ex.mul(ex.Sin(ex.CoordT()), ex.Sin(ex.CoordX(0))),
                       0.0, 1)
        v = seminorm_Q(s, 0.0, 2, 0, 0, box_1d(t_max=np.pi))
        assert v == pytest.approx(1.0, abs=1e-4)

    def test_monotone_in_box_refinement(self, variable_speed_symbol):
        coarse = seminorm_c(variable_speed_symbol, 1.0, (0,), (1,),
                            box_1d(x_count=65))
        fine = seminorm_c(variable_speed_symbol, 1.0, (0,), (1,),
                          box_1d(x_count=129))
        assert fine >= coarse

    def test_declared_order_bounded_under_xi_doubling(self, variable_speed_symbol):
        prev = seminorm_c(variable_speed_symbol, 1.0, (0,), (0,),
                          box_1d(xi_max=512.0))
        last = seminorm_c(variable_speed_symbol, 1.0, (0,), (0,),
                          box_1d(xi_max=1024.0))
        assert last / prev <= 1.05

    def test_empty_box_rejected(self):
        with pytest.raises(EmptyBox):
            SampleBox(x_lo=(0.0,), x_hi=(1.0,), x_count=0)


class TestRealityCheck:
    def test_real_a1_tagged(self, variable_speed_symbol):
        h = HyperbolicSymbol(a1=variable_speed_symbol)
        assert h.is_real()

    def test_complex_a0_flagged(self, variable_speed_symbol):
        a0 = SymbolExpr(ex.mul(ex.Const(1j), ex.Sin(ex.CoordX(0))), 0.0, 1)
        h = HyperbolicSymbol(a1=variable_speed_symbol, a0=a0)
        assert not h.is_real()


def _const_family(symbol, eps_grid):
    return GenSymbolFamily(lambda eps: HyperbolicSymbol(a1=symbol), eps_grid)


EPS6 = [0.1 * 0.2 ** i for i in range(6)]


class TestClassifiers:
    def test_log_type_constant_family(self, variable_speed_symbol):
        fam = _const_family(variable_speed_symbol, EPS6)
        verdict = classify_log_type(fam, 1.0, 0, 1, box_1d(xi_max=128.0))
        assert verdict["is_log_type"]
        # eps-independent family: fitted coefficient below 1% of the level
        level = np.mean(verdict["q_values"])
        assert abs(verdict["fitted_coeff"]) <= 0.01 * level

    def test_log_type_rejects_power_growth(self):
        def member(eps):
            a1 = SymbolExpr(ex.mul(ex.Const(1.0 / eps),
                                   ex.Sin(ex.CoordX(0)), ex.CoordXi(0)),
                            1.0, 1)
            return HyperbolicSymbol(a1=a1)
        fam = GenSymbolFamily(member, EPS6)
        verdict = classify_log_type(fam, 1.0, 0, 0, box_1d(xi_max=128.0))
        assert not verdict["is_log_type"]

    def test_slow_scale_constant_family(self, variable_speed_symbol):
        fam = _const_family(variable_speed_symbol, EPS6)
        verdict = classify_slow_scale(fam, 0, 0, 1, box_1d(xi_max=128.0))
        assert verdict["is_slow_scale"]

    def test_slow_scale_log_family(self):
        def member(eps):
            scale = np.log(1.0 / eps)
            a1 = SymbolExpr(ex.mul(ex.Const(scale), ex.Sin(ex.CoordX(0)),
                                   ex.CoordXi(0)), 1.0, 1)
            return HyperbolicSymbol(a1=a1)
        fam = GenSymbolFamily(member, EPS6)
        verdict = classify_slow_scale(fam, 0, 0, 0, box_1d(xi_max=128.0))
        assert verdict["is_slow_scale"]

    def test_slow_scale_fails_at_p3_for_sqrt_growth(self):
        def member(eps):
            a1 = SymbolExpr(ex.mul(ex.Const(eps ** -0.5), ex.Sin(ex.CoordX(0)),
                                   ex.CoordXi(0)), 1.0, 1)
            return HyperbolicSymbol(a1=a1)
        fam = GenSymbolFamily(member, [0.1 * 0.1 ** i for i in range(6)])
        verdict = classify_slow_scale(fam, 0, 0, 0, box_1d(xi_max=128.0))
        assert not verdict["is_slow_scale"]
        assert verdict["largest_p"] == 2

    def test_insufficient_sweep_rejected(self, variable_speed_symbol):
        fam = _const_family(variable_speed_symbol, [0.1, 0.05, 0.02])
        with pytest.raises(InsufficientSweep):
            classify_log_type(fam, 1.0, 0, 0, box_1d())
