import numpy as np
import pytest

from hessmg.builder import (GRID, PV, BuildError, ProblemData, build)
from hessmg.data import EssSpec, Horizon, SourceSpec, make_demo_dataset
from hessmg.scenario import build_scenario
from hessmg.solve import SolveOptions, solve

BATTERY = EssSpec(
    name="battery", eta_c=0.83, eta_d=0.88, cost_energy=900.0,
    cost_power=1590.0, om_energy=3.0, om_power=30.0, e_cap_max=5.0,
    p_cap_max=10.0, crate_max=3.0, dod_min_frac=0.15, cycle_life=5000.0,
    resale_factor=0.85)


def _data(n_days=1, price=50.0, ch=1.0, wh=0.0, cf=0.0, ess=None, sources=None):
    horizon = Horizon(t_syn=n_days)
    k = horizon.n_steps
    return ProblemData(
        horizon=horizon,
        sources=sources or SourceSpec(),
        ess=dict(ess or {}),
        price=np.full(k, float(price)),
        demand_ch=np.full(k, float(ch)),
        demand_wh=np.full(k, float(wh)),
        pv_cf=np.full(k, float(cf)))


def _row(model, name):
    matches = [r for r in model.rows if r.name == name]
    assert len(matches) == 1, name
    return matches[0]


def _coef(model, row, kind, entity, step=None):
    col = model.var(kind, entity, step).column
    return dict(zip(row.cols, row.coefs)).get(col, 0.0)


class TestStructure:
    def test_deterministic(self):
        a = build(_data(ess={"battery": BATTERY}))
        b = build(_data(ess={"battery": BATTERY}))
        assert a.structure() == b.structure()

    def test_variable_count(self):
        data = _data(ess={"battery": BATTERY})
        k = data.horizon.n_steps
        model = build(data)
        # sources: 2 capacities + peak + 3 per step; storage: 4 designs,
        # K+1 states, 4 per step
        assert model.n_vars == 3 + 3 * k + 4 + (k + 1) + 4 * k

    def test_row_families_present(self):
        model = build(_data(ess={"battery": BATTERY}))
        families = {r.family for r in model.rows}
        assert families == {"bounds", "balance", "dynamics", "mccormick",
                            "throughput", "peak", "capex"}

    def test_mismatched_series_length(self):
        with pytest.raises(BuildError, match="steps"):
            ProblemData(horizon=Horizon(t_syn=2), sources=SourceSpec(), ess={},
                        price=np.zeros(24), demand_ch=np.zeros(24),
                        demand_wh=np.zeros(24), pv_cf=np.zeros(24))

    def test_from_scenario_length_check(self):
        days = make_demo_dataset(seed=0, n_days=10)
        scenario = build_scenario(days, w=2, t_syn=3, seed=0)
        with pytest.raises(BuildError, match="days"):
            ProblemData.from_scenario(scenario, Horizon(t_syn=5), SourceSpec(), {})


class TestCoefficients:
    def test_pv_availability_row(self):
        data = _data(cf=0.5)
        model = build(data)
        row = _row(model, "pv_avail.k5")
        assert row.sense == "<=" and row.rhs == 0.0
        assert _coef(model, row, "P_pv", PV, 5) == 1.0
        # bus-side availability is eta_pv * cf * installed capacity
        assert _coef(model, row, "P_max_src", PV) == pytest.approx(-0.9 * 0.5)

    def test_balance_row(self):
        data = _data(ch=1.2, wh=0.3, ess={"battery": BATTERY})
        model = build(data)
        row = _row(model, "balance.k0")
        assert row.sense == "=="
        assert row.rhs == pytest.approx(1.5)
        assert _coef(model, row, "P_src_plus", GRID, 0) == pytest.approx(0.95)
        assert _coef(model, row, "P_src_minus", GRID, 0) == pytest.approx(-1 / 0.95)
        assert _coef(model, row, "P_pv", PV, 0) == 1.0
        assert _coef(model, row, "P_ess_plus", "battery", 0) == 1.0
        assert _coef(model, row, "P_ess_minus", "battery", 0) == -1.0

    def test_demand_conversion_efficiency(self):
        sources = SourceSpec(eta_demand=0.9)
        model = build(_data(ch=0.9, wh=0.0, sources=sources))
        assert _row(model, "balance.k3").rhs == pytest.approx(1.0)

    def test_dynamics_row(self):
        model = build(_data(ess={"battery": BATTERY}))
        row = _row(model, "soe_dyn.battery.k2")
        assert row.sense == "==" and row.rhs == 0.0
        assert _coef(model, row, "E_soe", "battery", 3) == 1.0
        assert _coef(model, row, "E_soe", "battery", 2) == -1.0
        # tau = 1 h: discharge drains 1/eta_d MWh per MW, charge stores eta_c
        assert _coef(model, row, "P_ess_plus", "battery", 2) == pytest.approx(1 / 0.88)
        assert _coef(model, row, "P_ess_minus", "battery", 2) == pytest.approx(-0.83)

    def test_subhourly_dynamics_scale_with_tau(self):
        horizon = Horizon(tau_minutes=15, t_syn=1)
        data = ProblemData(
            horizon=horizon, sources=SourceSpec(), ess={"battery": BATTERY},
            price=np.zeros(96), demand_ch=np.zeros(96), demand_wh=np.zeros(96),
            pv_cf=np.zeros(96))
        model = build(data)
        row = _row(model, "soe_dyn.battery.k0")
        assert _coef(model, row, "P_ess_plus", "battery", 0) == pytest.approx(0.25 / 0.88)
        assert _coef(model, row, "P_ess_minus", "battery", 0) == pytest.approx(-0.25 * 0.83)

    def test_depth_of_discharge_row(self):
        model = build(_data(ess={"battery": BATTERY}))
        row = _row(model, "soe_dod.battery.k7")
        assert row.sense == ">="
        assert _coef(model, row, "E_max", "battery") == pytest.approx(-0.15)

    def test_no_dod_row_when_floor_is_zero(self):
        import dataclasses
        free = dataclasses.replace(BATTERY, dod_min_frac=0.0)
        model = build(_data(ess={"battery": free}))
        assert not any(r.name.startswith("soe_dod") for r in model.rows)

    def test_mccormick_rows(self):
        model = build(_data(ess={"battery": BATTERY}))
        row = _row(model, "q_mcc2.battery.k4")
        assert row.sense == ">=" and row.rhs == pytest.approx(-5.0 * 3.0)
        assert _coef(model, row, "R_crate", "battery", 4) == pytest.approx(-5.0)
        assert _coef(model, row, "E_max", "battery") == pytest.approx(-3.0)
        up = _row(model, "q_epi_up.battery.k4")
        assert _coef(model, up, "E_soe", "battery", 5) == -1.0
        assert _coef(model, up, "E_soe", "battery", 4) == 1.0

    def test_static_grid_converter_bounds(self):
        model = build(_data())
        imp = model.var("P_src_plus", GRID, 0)
        exp = model.var("P_src_minus", GRID, 0)
        assert model.upper[imp.column] == pytest.approx(2.8 / 0.95)
        assert model.upper[exp.column] == pytest.approx(2.8 * 0.95)

    def test_apply_fixed_values(self):
        model = build(_data(ess={"battery": BATTERY}),
                      fixed={("E_max", "battery"): 2.0, ("P_max_src", PV): 0.0})
        col = model.var("E_max", "battery").column
        assert model.lower[col] == model.upper[col] == 2.0

    def test_initial_soe_row(self):
        model = build(_data(ess={"battery": BATTERY}), initial_soe_frac=0.5)
        row = _row(model, "soe_init.battery")
        assert row.sense == "=="
        assert _coef(model, row, "E_max", "battery") == -0.5


class TestSmallSolves:
    def test_grid_only_import_matches_conversion_loss(self):
        # constant 1 MW bus demand, no PV, no storage: every step imports
        # exactly demand / grid charging efficiency
        data = _data(ch=1.0, cf=0.0)
        sol = solve(build(data))
        assert sol.optimal
        for k in (0, 7, 23):
            assert sol.value(build(data), "P_src_plus", GRID, k) == pytest.approx(
                1.0526315789473684, abs=1e-7)

    def test_empty_storage_set_is_feasible(self):
        data = _data(ch=0.5, wh=0.2, cf=0.3)
        sol = solve(build(data))
        assert sol.optimal
        assert sol.max_residual < 1e-7

    def test_balance_holds_at_optimum(self):
        data = _data(ch=0.8, wh=0.1, cf=0.4, ess={"battery": BATTERY})
        model = build(data)
        sol = solve(model, SolveOptions(engine="highs"))
        assert sol.optimal
        act = model.row_activities(sol.x)
        for i, row in enumerate(model.rows):
            if row.family == "balance":
                assert act[i] == pytest.approx(row.rhs, abs=1e-7)
