import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arithfwd.curve import FlatCurve, PillarCurve, on_forwards
from arithfwd.forwards import (
    ALL_METHODS,
    ForwardQuote,
    arithmetic_forward,
    factor_table,
    geometric_forward,
    price,
    takada_det_forward,
    takada_oa,
    weighted_forward,
)
from arithfwd.g2pp import G2ppParams
from arithfwd.montecarlo import McConfig
from arithfwd.timegrid import build_grid

from conftest import TABLE1_PARAMS, TABLE2_PARAMS, random_params

DETERMINISTIC = G2ppParams(0.0, 0.5, 0.0, 0.5, 0.0)


def rel_error(quote, exact):
    return quote.value / exact - 1


class TestExactForward:
    def test_table1_first_row(self, flat5, grid_3m, t1_model):
        assert arithmetic_forward(t1_model, flat5, grid_3m).value == pytest.approx(0.04992, abs=2e-4)

    def test_table2_second_row(self, flat5, grid_6m, t2_model):
        assert arithmetic_forward(t2_model, flat5, grid_6m).value == pytest.approx(0.04763, abs=2e-4)

    def test_factor_identity(self, flat5, grid_6m, t2_model):
        q = arithmetic_forward(t2_model, flat5, grid_6m)
        assert weighted_forward(flat5, grid_6m, q.factor_curve.values) == pytest.approx(q.value, rel=1e-14)

    @pytest.mark.parametrize(
        "row, expected",
        [
            # Table 2, row 2: relative errors of murex, linear and piecewise against exact
            (1, (0.04980, 0.00711, 0.00170)),
        ],
    )
    def test_table2_relative_errors(self, flat5, grid_6m, row, expected):
        p = G2ppParams(*TABLE2_PARAMS[row])
        exact = arithmetic_forward(p, flat5, grid_6m).value
        for method, target in zip(("murex", "linear", "piecewise"), expected):
            err = rel_error(arithmetic_forward(p, flat5, grid_6m, method), exact)
            assert abs(err - target) <= max(0.25 * abs(target), 5e-4)

    @pytest.mark.parametrize("row", TABLE1_PARAMS + TABLE2_PARAMS)
    def test_error_ordering(self, flat5, row):
        p = G2ppParams(*row)
        for g in (build_grid(30, 120), build_grid(360, 540)):
            exact = arithmetic_forward(p, flat5, g).value
            errs = [rel_error(arithmetic_forward(p, flat5, g, m), exact) for m in ("murex", "linear", "piecewise")]
            assert errs[0] > errs[1] > errs[2] > 0

    def test_piecewise_with_explicit_midpoint(self, flat5, grid_6m, t2_model):
        a = arithmetic_forward(t2_model, flat5, grid_6m, "piecewise")
        b = arithmetic_forward(t2_model, flat5, grid_6m, "piecewise", midpoint=grid_6m.midpoint_index())
        assert a.value == b.value
        c = arithmetic_forward(t2_model, flat5, grid_6m, "piecewise", midpoint=60)
        assert c.factor_curve.midpoint == 60

    def test_unknown_method(self, flat5, grid_3m, t1_model):
        with pytest.raises(ValueError):
            arithmetic_forward(t1_model, flat5, grid_3m, "geometric")


class TestDeterministic:
    def test_all_arithmetic_methods_agree(self, pillar_curve, grid_6m):
        quotes = price(DETERMINISTIC, pillar_curve, grid_6m, ("exact", "murex", "linear", "piecewise"))
        values = [q.value for q in quotes]
        assert max(values) - min(values) <= 1e-15

    def test_takada_quotes_agree(self, pillar_curve, grid_6m):
        det = takada_det_forward(pillar_curve, grid_6m).value
        assert takada_oa(DETERMINISTIC, pillar_curve, grid_6m).value == pytest.approx(det, rel=1e-14)


class TestTakada:
    @pytest.mark.parametrize("rate", [0.05, 0.0, -0.01])
    def test_det_on_flat_curve_is_the_rate(self, rate, grid_3m):
        assert takada_det_forward(FlatCurve(rate), grid_3m).value == pytest.approx(rate, rel=1e-14, abs=1e-17)

    def test_det_is_log_of_geometric(self, pillar_curve, grid_6m):
        fg = geometric_forward(pillar_curve, grid_6m).value
        det = takada_det_forward(pillar_curve, grid_6m).value
        assert det == pytest.approx(math.log1p(grid_6m.total * fg) / grid_6m.total, rel=1e-13)

    def test_compounded_dominates_continuous(self, pillar_curve, grid_6m):
        F = on_forwards(pillar_curve, grid_6m)
        det = takada_det_forward(pillar_curve, grid_6m).value
        assert np.sum(grid_6m.fractions * F) >= grid_6m.total * det

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 1_000_000))
    def test_oa_below_det(self, seed):
        rng = np.random.default_rng(seed)
        p = random_params(rng)
        if p.deterministic:
            return
        curve = FlatCurve(rng.uniform(-0.01, 0.08))
        start = int(rng.integers(1, 1500))
        g = build_grid(start, start + int(rng.integers(2, 400)))
        assert takada_oa(p, curve, g).value < takada_det_forward(curve, g).value

    @pytest.mark.parametrize("row", TABLE2_PARAMS)
    def test_gauss_legendre_converged(self, flat5, grid_6m, row):
        p = G2ppParams(*row)
        a = takada_oa(p, flat5, grid_6m, 64).value
        b = takada_oa(p, flat5, grid_6m, 128).value
        assert abs(a - b) <= 1e-12 * abs(b)

    def test_pillar_kink_handled(self, t2_model):
        curve = PillarCurve([0.0, 0.5, 1.0, 2.0], [1.0, 0.98, 0.95, 0.89])
        g = build_grid(120, 300)  # straddles the 0.5y forward jump
        a = takada_oa(t2_model, curve, g, 16).value
        b = takada_oa(t2_model, curve, g, 128).value
        assert abs(a - b) <= 1e-12 * abs(b)

    def test_time_steps_floor(self, flat5, grid_3m, t1_model):
        with pytest.raises(ValueError):
            takada_oa(t1_model, flat5, grid_3m, 8)


class TestQuote:
    def test_mc_needs_std_error(self):
        with pytest.raises(ValueError):
            ForwardQuote(0.05, "mc", 30, 120)

    def test_non_mc_has_no_std_error(self):
        with pytest.raises(ValueError):
            ForwardQuote(0.05, "exact", 30, 120, std_error=1e-5)

    def test_non_finite(self):
        with pytest.raises(ArithmeticError):
            ForwardQuote(float("nan"), "exact", 30, 120)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            ForwardQuote(0.05, "simple", 30, 120)

    def test_json_schema(self, flat5, grid_3m, t1_model):
        quotes = price(t1_model, flat5, grid_3m, ALL_METHODS, cfg=McConfig(2000))
        for q in quotes:
            d = json.loads(json.dumps(q.to_dict()))
            assert set(d) == {"method", "value", "std_error", "Ts_days", "Te_days"}
            assert (d["Ts_days"], d["Te_days"]) == (30, 120)
            assert (d["std_error"] is None) == (d["method"] != "mc")
        assert [q.method for q in quotes] == list(ALL_METHODS)


class TestPrice:
    def test_unknown_method_named(self, flat5, grid_3m, t1_model):
        with pytest.raises(ValueError, match="bogus"):
            price(t1_model, flat5, grid_3m, ["exact", "bogus"])

    def test_mc_needs_config(self, flat5, grid_3m, t1_model):
        with pytest.raises(ValueError):
            price(t1_model, flat5, grid_3m, ["mc"])

    def test_mc_matches_exact(self, flat5, grid_3m, t1_model):
        exact, mc = price(t1_model, flat5, grid_3m, ["exact", "mc"], cfg=McConfig(20_000))
        assert abs(mc.value - exact.value) <= 3 * mc.std_error


class TestFactorTable:
    def test_shares_exact_values(self, flat5, grid_6m, t2_model):
        exact, lin, pw = factor_table(t2_model, flat5, grid_6m)
        m = grid_6m.midpoint_index()
        assert lin.values[0] == exact.values[0] == pw.values[0]
        assert pw.values[m - 1] == exact.values[m - 1]
        assert arithmetic_forward(t2_model, flat5, grid_6m, "linear").value == pytest.approx(
            weighted_forward(flat5, grid_6m, lin.values), rel=1e-15
        )
