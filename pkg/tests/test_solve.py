import numpy as np
import pytest

from hessmg.builder import GRID, ProblemData, build
from hessmg.data import EssSpec, Horizon, SourceSpec
from hessmg.lp import GE, LE, ModelInstance
from hessmg.solve import (EMBEDDED_SIMPLEX_LIMIT, SolveOptions, solve,
                          to_equality_form, verify)

BATTERY = EssSpec(
    name="battery", eta_c=0.83, eta_d=0.88, cost_energy=900.0,
    cost_power=1590.0, om_energy=3.0, om_power=30.0, e_cap_max=5.0,
    p_cap_max=10.0, crate_max=3.0, dod_min_frac=0.15, cycle_life=5000.0,
    resale_factor=0.85)


def _model(t_syn=1, ess=True):
    horizon = Horizon(t_syn=t_syn)
    k = horizon.n_steps
    data = ProblemData(
        horizon=horizon, sources=SourceSpec(),
        ess={"battery": BATTERY} if ess else {},
        price=np.tile(np.linspace(20.0, 120.0, horizon.steps_per_day), t_syn),
        demand_ch=np.full(k, 1.0), demand_wh=np.full(k, 0.2),
        pv_cf=np.tile(np.clip(np.sin(np.linspace(0, np.pi, horizon.steps_per_day)), 0, 1), t_syn))
    return data, build(data)


def test_equality_form_slack_bounds():
    m = ModelInstance()
    x = m.add_var("a", "x", lb=0.0, ub=2.0)
    m.add_row([(x, 1.0)], LE, 1.0, "le", "t")
    m.add_row([(x, 1.0)], GE, 0.5, "ge", "t")
    a, b, lo, hi, c, n = to_equality_form(m)
    assert n == 1 and a.shape == (2, 3)
    assert lo[1] == 0.0 and hi[1] == np.inf      # <= slack
    assert lo[2] == -np.inf and hi[2] == 0.0     # >= slack


class TestEngines:
    def test_auto_uses_embedded_for_small_models(self):
        _, model = _model(ess=False)
        assert model.n_vars + model.n_rows <= EMBEDDED_SIMPLEX_LIMIT
        sol = solve(model)
        assert sol.engine == "simplex" and sol.optimal

    def test_auto_hands_off_large_models(self):
        _, model = _model(t_syn=3)
        assert model.n_vars + model.n_rows > EMBEDDED_SIMPLEX_LIMIT
        sol = solve(model)
        assert sol.engine == "highs" and sol.optimal

    def test_engines_agree(self):
        _, model = _model(ess=False)
        a = solve(model, SolveOptions(engine="simplex"))
        b = solve(model, SolveOptions(engine="highs"))
        assert a.optimal and b.optimal
        assert a.objective == pytest.approx(b.objective, rel=1e-8)

    def test_engines_agree_with_storage(self):
        _, model = _model()
        a = solve(model, SolveOptions(engine="simplex"))
        b = solve(model, SolveOptions(engine="highs"))
        assert a.optimal and b.optimal
        assert a.objective == pytest.approx(b.objective, rel=1e-7)

    def test_unknown_engine(self):
        _, model = _model(ess=False)
        with pytest.raises(ValueError, match="engine"):
            solve(model, SolveOptions(engine="cplex"))

    def test_objective_includes_constant(self):
        _, model = _model(ess=False)
        sol = solve(model)
        raw = model.objective_vector() @ sol.x
        assert sol.objective == pytest.approx(raw + model.objective_constant, rel=1e-12)

    def test_residual_reported(self):
        _, model = _model()
        sol = solve(model, SolveOptions(engine="highs"))
        assert sol.max_residual < 1e-7


class TestVerify:
    def test_clean_solution(self):
        _, model = _model()
        sol = solve(model, SolveOptions(engine="highs"))
        report = verify(model, sol.x)
        assert report.max_violation < 1e-7
        assert set(report.family_violation) == {r.family for r in model.rows}

    def test_corrupted_soe_lands_in_dynamics_family(self):
        _, model = _model()
        sol = solve(model, SolveOptions(engine="highs"))
        x = sol.x.copy()
        x[model.var("E_soe", "battery", 10).column] += 0.5
        report = verify(model, x)
        assert report.family_violation["dynamics"] > 0.4
        assert report.worst_row["dynamics"].startswith("soe_dyn.battery")

    def test_bound_violation_detected(self):
        _, model = _model()
        sol = solve(model, SolveOptions(engine="highs"))
        x = sol.x.copy()
        x[model.var("E_max", "battery").column] = BATTERY.e_cap_max + 1.0
        assert verify(model, x).bound_violation >= 1.0

    def test_complementarity_of_import_export(self):
        _, model = _model()
        sol = solve(model, SolveOptions(engine="highs"))
        report = verify(model, sol.x)
        assert ("G", 0) in report.complementarity
        assert ("battery", 0) in report.complementarity
        assert report.max_complementarity < 1e-6

    def test_forced_simultaneous_flow_is_flagged(self):
        _, model = _model(ess=False)
        sol = solve(model, SolveOptions(engine="highs"))
        x = sol.x.copy()
        imp = model.var("P_src_plus", GRID, 0)
        exp = model.var("P_src_minus", GRID, 0)
        x[imp.column] = max(x[imp.column], 1.0)
        x[exp.column] = 1.0
        assert verify(model, x).complementarity[("G", 0)] >= 1.0
