"""Total-cost-of-ownership objective and the independent solution audit.

Money is k EUR throughout. The synthetic period (t_syn days) is scaled to a
calendar year by 365/t_syn before discounting; yearly operating cost is then
multiplied by the annuity factor sum_{y=1..Y} (1+r)^-y, and end-of-life
resale is discounted by (1+r)^-Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .builder import GRID, PV, ProblemData
from .lp import GE, ModelInstance

EUR_PER_KEUR = 1000.0


def npv_factor(rate: float, years: int) -> float:
    """Present value of 1 unit per year for `years` years at `rate`."""
    if rate == 0.0:
        return float(years)
    return sum((1.0 + rate) ** -y for y in range(1, years + 1))


def eol_discount(rate: float, years: int) -> float:
    return (1.0 + rate) ** -years


def annualization(horizon) -> float:
    """Scale from the synthetic period to one calendar year."""
    return 365.0 / horizon.t_syn


def objective_capex(model: ModelInstance, data: ProblemData):
    """Storage capex epigraphs (max of energy- and power-priced cost) + PV."""
    for name, ess in data.ess.items():
        cap = model.var("capex_epigraph", name)
        model.add_row([(cap, 1.0), (model.var("E_max", name), -ess.cost_energy)],
                      GE, 0.0, f"capex_energy.{name}", "capex")
        model.add_row([(cap, 1.0), (model.var("P_max_ess", name), -ess.cost_power)],
                      GE, 0.0, f"capex_power.{name}", "capex")
        model.add_objective_term(cap, 1.0)
    model.add_objective_term(model.var("P_max_src", PV), data.sources.pv.cost_per_mw)


def objective_opex(model: ModelInstance, data: ProblemData):
    """NPV-weighted yearly operating cost as linear coefficients.

    Yearly cost = annualized grid energy bill (exports credited at
    f_sell * price) + storage O&M (fixed on installed power, variable on
    annualized throughput) + PV O&M + grid connection tariff components.
    """
    h = data.horizon
    grid = data.sources.grid
    fac = npv_factor(h.discount_rate, h.years)
    ann = annualization(h)

    price_keur = data.price / EUR_PER_KEUR
    for k in range(h.n_steps):
        model.add_objective_term(model.var("P_src_plus", GRID, k),
                                 fac * ann * h.tau_hours * price_keur[k])
        model.add_objective_term(model.var("P_src_minus", GRID, k),
                                 -fac * ann * h.tau_hours * grid.f_sell * price_keur[k])
    for name, ess in data.ess.items():
        model.add_objective_term(model.var("P_max_ess", name), fac * ess.om_power)
        model.add_objective_term(model.var("Q_throughput", name),
                                 fac * ann * ess.om_energy)
    model.add_objective_term(model.var("P_max_src", PV),
                             fac * data.sources.pv.om_per_mw_yr)
    model.add_objective_term(model.var("P_max_src", GRID), fac * grid.var_per_mw)
    model.add_objective_term(model.var("P_peak", GRID), fac * grid.peak_per_mw)
    model.objective_constant += fac * (grid.conn_fixed + grid.tran_fixed)


def objective_resale(model: ModelInstance, data: ProblemData):
    """Subtract discounted end-of-life value of storage and PV.

    Storage resale scales with remaining cycle life: energy-priced value of
    the installed capacity minus the cycle-weighted value of the throughput
    consumed over the optimization period.
    """
    h = data.horizon
    disc = eol_discount(h.discount_rate, h.years)
    for name, ess in data.ess.items():
        model.add_objective_term(model.var("E_max", name),
                                 -disc * ess.resale_factor * ess.cost_energy)
        model.add_objective_term(model.var("Q_throughput", name),
                                 disc * ess.resale_factor * ess.cost_energy / ess.cycle_life)
    pv = data.sources.pv
    model.add_objective_term(model.var("P_max_src", PV),
                             -disc * pv.resale_factor * pv.cost_per_mw)


@dataclass
class CostBreakdown:
    """Audit of one solution into the result-table cost/energy columns."""

    total: float                 # kEUR
    capex: float                 # kEUR
    opex_npv: float              # kEUR
    eol_value: float             # kEUR
    energy_sold: float           # MWh over the synthetic period
    energy_purchased: float      # MWh over the synthetic period
    capex_per_ess: dict[str, float] = field(default_factory=dict)
    grid_connection: dict[str, float] = field(default_factory=dict)  # yearly, kEUR

    CSV_COLUMNS = ("total_cost_keur", "capex_keur", "opex_keur", "eol_value_keur",
                   "energy_sold_mwh", "energy_purchased_mwh")

    def as_csv_values(self):
        return (self.total, self.capex, self.opex_npv, self.eol_value,
                self.energy_sold, self.energy_purchased)

    def as_dict(self):
        return {
            "total_cost_keur": self.total,
            "capex_keur": self.capex,
            "opex_keur": self.opex_npv,
            "eol_value_keur": self.eol_value,
            "energy_sold_mwh": self.energy_sold,
            "energy_purchased_mwh": self.energy_purchased,
            "capex_per_ess_keur": dict(self.capex_per_ess),
            "grid_connection_yearly_keur": dict(self.grid_connection),
        }


class AuditError(AssertionError):
    """Recomputed objective disagrees with the solver objective."""


def audit(x, model: ModelInstance, data: ProblemData,
          solver_objective: float | None = None,
          rel_tol: float = 1e-6) -> CostBreakdown:
    """Recompute every cost term from primal values, bypassing the objective row.

    Peak offtake and per-storage capex are re-derived from the dispatch and
    sizing values rather than read from their epigraph variables. When
    `solver_objective` is given, a mismatch beyond `rel_tol` (relative)
    raises AuditError with per-term detail.
    """
    x = np.asarray(x)
    h = data.horizon
    grid, pv = data.sources.grid, data.sources.pv
    fac = npv_factor(h.discount_rate, h.years)
    ann = annualization(h)
    disc = eol_discount(h.discount_rate, h.years)

    def val(kind, entity, step=None):
        return x[model.var(kind, entity, step).column]

    imports = np.array([val("P_src_plus", GRID, k) for k in range(h.n_steps)])
    exports = np.array([val("P_src_minus", GRID, k) for k in range(h.n_steps)])
    price_keur = data.price / EUR_PER_KEUR

    energy_purchased = h.tau_hours * imports.sum()
    energy_sold = h.tau_hours * exports.sum()
    energy_bill = h.tau_hours * float(
        price_keur @ imports - grid.f_sell * (price_keur @ exports))

    p_grid_max = val("P_max_src", GRID)
    p_pv_max = val("P_max_src", PV)
    peak = float(imports.max()) if h.n_steps else 0.0
    connection = {
        "conn_fixed": grid.conn_fixed,
        "tran_fixed": grid.tran_fixed,
        "var": grid.var_per_mw * p_grid_max,
        "peak": grid.peak_per_mw * peak,
    }

    yearly = ann * energy_bill + sum(connection.values()) + pv.om_per_mw_yr * p_pv_max
    capex_per_ess = {}
    eol = disc * pv.resale_factor * pv.cost_per_mw * p_pv_max
    for name, ess in data.ess.items():
        e_max = val("E_max", name)
        p_max = val("P_max_ess", name)
        q_total = sum(val("q_aux", name, k) for k in range(h.n_steps))
        yearly += ess.om_power * p_max + ess.om_energy * ann * q_total
        capex_per_ess[name] = max(ess.cost_energy * e_max, ess.cost_power * p_max)
        eol += disc * ess.resale_factor * ess.cost_energy * (
            e_max - q_total / ess.cycle_life)

    capex = sum(capex_per_ess.values()) + pv.cost_per_mw * p_pv_max
    opex = fac * yearly
    total = capex + opex - eol
    breakdown = CostBreakdown(
        total=total, capex=capex, opex_npv=opex, eol_value=eol,
        energy_sold=energy_sold, energy_purchased=energy_purchased,
        capex_per_ess=capex_per_ess, grid_connection=connection)

    if solver_objective is not None:
        gap = abs(total - solver_objective)
        if gap > rel_tol * max(1.0, abs(solver_objective)):
            raise AuditError(
                "objective audit failure: "
                f"recomputed {total:.9g} vs solver {solver_objective:.9g} "
                f"(capex {capex:.6g}, opex {opex:.6g}, eol {eol:.6g})")
    return breakdown
