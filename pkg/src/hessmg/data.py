"""Input data model: time series, technology catalog, tariff parameters.

Internal unit conventions: power in MW, energy in MWh, money in k EUR.
Catalog files use EUR/kWh and EUR/kW, which are numerically identical to
k EUR/MWh and k EUR/MW, so only capacity fields need rescaling. Spot
prices are kept in EUR/MWh as they appear in market exports; the cost
model converts them to k EUR when assembling objective coefficients.
"""

from __future__ import annotations

import configparser
import csv
import datetime as dt
import warnings
from dataclasses import dataclass, field

import numpy as np

PRICE_HEADER = ("timestamp", "price_eur_per_mwh")
DEMAND_HEADER = ("timestamp", "ch_mw", "wh_mw")
PV_HEADER = ("timestamp", "pv_cf")


class DataFormatError(ValueError):
    """Malformed or inconsistent input file."""


class CatalogError(ValueError):
    """Missing or invalid technology catalog entry."""


class IncompleteDayWarning(UserWarning):
    """A partial day at the edge of a dataset was dropped."""


@dataclass(frozen=True)
class Horizon:
    """Temporal discretization and economic horizon of one study."""

    tau_minutes: int = 60
    t_syn: int = 30
    years: int = 20
    discount_rate: float = 0.04

    def __post_init__(self):
        if self.tau_minutes <= 0 or 1440 % self.tau_minutes != 0:
            raise ValueError(f"tau_minutes must divide 1440, got {self.tau_minutes}")
        if self.t_syn < 1:
            raise ValueError("t_syn must be >= 1")
        if self.years < 1:
            raise ValueError("years must be >= 1")
        if not 0.0 <= self.discount_rate < 1.0:
            raise ValueError("discount_rate must be in [0, 1)")

    @property
    def steps_per_day(self) -> int:
        return 1440 // self.tau_minutes

    @property
    def tau_hours(self) -> float:
        return self.tau_minutes / 60.0

    @property
    def n_steps(self) -> int:
        """Total step count K of the synthetic optimization period."""
        return self.t_syn * self.steps_per_day


@dataclass(frozen=True)
class EssSpec:
    """One storage technology: efficiencies, cost rates, ceilings, lifetime."""

    name: str
    eta_c: float                 # charging efficiency, bus -> store
    eta_d: float                 # discharging efficiency, store -> bus
    cost_energy: float           # capex, kEUR/MWh installed
    cost_power: float            # capex, kEUR/MW installed
    om_energy: float             # variable O&M, kEUR/MWh throughput
    om_power: float              # fixed O&M, kEUR/MW/yr
    e_cap_max: float             # max installable energy, MWh
    p_cap_max: float             # max installable power, MW
    crate_max: float             # max per-step energy swing / installed capacity
    dod_min_frac: float          # min state of energy as fraction of capacity
    cycle_life: float            # full equivalent cycles until end of life
    resale_factor: float         # fraction of remaining value recovered at EOL

    def __post_init__(self):
        for eff in ("eta_c", "eta_d"):
            v = getattr(self, eff)
            if not 0.0 < v <= 1.0:
                raise CatalogError(f"{self.name}: {eff} must be in (0, 1], got {v}")
        for pos in ("cost_energy", "cost_power", "om_energy", "om_power"):
            if getattr(self, pos) < 0:
                raise CatalogError(f"{self.name}: {pos} must be >= 0")
        for strict in ("e_cap_max", "p_cap_max", "crate_max"):
            if getattr(self, strict) <= 0:
                raise CatalogError(f"{self.name}: {strict} must be > 0")
        if not 0.0 <= self.dod_min_frac < 1.0:
            raise CatalogError(f"{self.name}: dod_min_frac must be in [0, 1)")
        if self.cycle_life <= 0:
            raise CatalogError(f"{self.name}: cycle_life must be > 0")
        if not 0.0 <= self.resale_factor <= 1.0:
            raise CatalogError(f"{self.name}: resale_factor must be in [0, 1]")


@dataclass(frozen=True)
class GridSpec:
    """Utility grid connection: converter efficiencies and tariff structure."""

    eta_c: float = 0.95          # AC/DC efficiency, grid -> bus
    eta_d: float = 0.95          # DC/AC efficiency, bus -> grid
    p_cap_max: float = 2.8       # max contractable capacity, MW
    conn_fixed: float = 1.2      # fixed connection fee, kEUR/yr
    tran_fixed: float = 1.8      # fixed transmission fee, kEUR/yr
    var_per_mw: float = 3.0      # capacity-dependent fee, kEUR/MW/yr
    peak_per_mw: float = 9.03    # peak-offtake fee, kEUR/MW/yr
    f_sell: float = 0.9          # fraction of spot price earned when exporting

    def __post_init__(self):
        if not 0.0 < self.f_sell <= 1.0:
            raise ValueError("f_sell must be in (0, 1]")
        for eff in ("eta_c", "eta_d"):
            if not 0.0 < getattr(self, eff) <= 1.0:
                raise ValueError(f"{eff} must be in (0, 1]")
        if self.p_cap_max <= 0:
            raise ValueError("p_cap_max must be > 0")
        for pos in ("conn_fixed", "tran_fixed", "var_per_mw", "peak_per_mw"):
            if getattr(self, pos) < 0:
                raise ValueError(f"{pos} must be >= 0")


@dataclass(frozen=True)
class PvSpec:
    """Photovoltaic generation: efficiency, costs, size ceiling."""

    eta: float = 0.9             # DC/DC converter efficiency, panel -> bus
    cost_per_mw: float = 300.0   # capex, kEUR/MW
    om_per_mw_yr: float = 15.0   # fixed O&M, kEUR/MW/yr
    p_cap_max: float = 5.0       # max installable, MW
    resale_factor: float = 0.75

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0, 1]")
        if self.p_cap_max <= 0:
            raise ValueError("p_cap_max must be > 0")
        if not 0.0 <= self.resale_factor <= 1.0:
            raise ValueError("resale_factor must be in [0, 1]")
        if self.cost_per_mw < 0 or self.om_per_mw_yr < 0:
            raise ValueError("costs must be >= 0")


@dataclass(frozen=True)
class SourceSpec:
    """Grid and PV source parameters, plus demand-side conversion efficiency."""

    grid: GridSpec = field(default_factory=GridSpec)
    pv: PvSpec = field(default_factory=PvSpec)
    eta_demand: float = 1.0      # conversion efficiency of the demand feeders

    def __post_init__(self):
        if not 0.0 < self.eta_demand <= 1.0:
            raise ValueError("eta_demand must be in (0, 1]")


@dataclass(frozen=True)
class HistoricalDay:
    """One calendar day of hourly (or sub-hourly) market and load profiles."""

    date: dt.date
    price: np.ndarray       # EUR/MWh per step, may be negative
    demand_ch: np.ndarray   # truck-charger demand, MW
    demand_wh: np.ndarray   # warehouse demand, MW
    pv_cf: np.ndarray       # PV capacity factor in [0, 1]

    def __post_init__(self):
        n = len(self.price)
        for name in ("demand_ch", "demand_wh", "pv_cf"):
            if len(getattr(self, name)) != n:
                raise DataFormatError(
                    f"{self.date}: {name} has {len(getattr(self, name))} entries, expected {n}")
        if np.any(self.demand_ch < 0) or np.any(self.demand_wh < 0):
            raise DataFormatError(f"{self.date}: negative demand")
        if np.any(self.pv_cf < 0) or np.any(self.pv_cf > 1):
            raise DataFormatError(f"{self.date}: capacity factor out of range")

    def __eq__(self, other):
        if not isinstance(other, HistoricalDay):
            return NotImplemented
        return self.date == other.date and all(
            np.array_equal(getattr(self, n), getattr(other, n))
            for n in ("price", "demand_ch", "demand_wh", "pv_cf"))


def _read_signal_file(path, header, n_values):
    """Parse a `timestamp,value...` CSV into {datetime: (v, ...)} rows."""
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if tuple(h.strip() for h in got) != header:
            raise DataFormatError(
                f"{path}: header mismatch, expected {','.join(header)}, got {','.join(got)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 1 + n_values:
                raise DataFormatError(f"{path}:{lineno}: expected {1 + n_values} columns")
            try:
                ts = dt.datetime.fromisoformat(row[0])
                vals = tuple(float(v) for v in row[1:])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: malformed row ({exc})") from None
            rows[ts] = vals
    return rows


def _group_days(timestamps, horizon, label):
    """Split sorted timestamps into complete days; flag gaps and edge stubs."""
    step = dt.timedelta(minutes=horizon.tau_minutes)
    spd = horizon.steps_per_day
    by_date = {}
    for ts in timestamps:
        by_date.setdefault(ts.date(), []).append(ts)
    complete = []
    dates = sorted(by_date)
    for i, day in enumerate(dates):
        stamps = sorted(by_date[day])
        expected = [dt.datetime.combine(day, dt.time()) + j * step for j in range(spd)]
        if stamps == expected:
            complete.append(day)
        elif i in (0, len(dates) - 1) and set(stamps) < set(expected):
            warnings.warn(
                f"{label}: dropping incomplete day {day} ({len(stamps)}/{spd} steps)",
                IncompleteDayWarning, stacklevel=3)
        else:
            raise DataFormatError(f"{label}: gap inside day {day}")
    return complete


def load_dataset(price_path, demand_path, pv_path, horizon: Horizon) -> list[HistoricalDay]:
    """Load the three signal CSVs into validated, date-sorted HistoricalDays.

    Incomplete days at either end of any file are dropped with a warning;
    only dates complete in all three files are returned.
    """
    price = _read_signal_file(price_path, PRICE_HEADER, 1)
    demand = _read_signal_file(demand_path, DEMAND_HEADER, 2)
    pv = _read_signal_file(pv_path, PV_HEADER, 1)

    ok_dates = None
    for rows, label in ((price, "prices"), (demand, "demand"), (pv, "pv")):
        days = set(_group_days(rows.keys(), horizon, label))
        ok_dates = days if ok_dates is None else ok_dates & days

    step = dt.timedelta(minutes=horizon.tau_minutes)
    spd = horizon.steps_per_day
    out = []
    for day in sorted(ok_dates):
        stamps = [dt.datetime.combine(day, dt.time()) + j * step for j in range(spd)]
        out.append(HistoricalDay(
            date=day,
            price=np.array([price[t][0] for t in stamps]),
            demand_ch=np.array([demand[t][0] for t in stamps]),
            demand_wh=np.array([demand[t][1] for t in stamps]),
            pv_cf=np.array([pv[t][0] for t in stamps]),
        ))
    return out


def save_dataset(days, price_path, demand_path, pv_path):
    """Write days back out in the load_dataset CSV layout (exact round-trip)."""
    def _write(path, header, per_step):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for day in days:
                for j in range(len(day.price)):
                    ts = dt.datetime.combine(day.date, dt.time()) + dt.timedelta(
                        minutes=j * (1440 // len(day.price)))
                    w.writerow([ts.isoformat()] + [f"{v:.17g}" for v in per_step(day, j)])

    _write(price_path, PRICE_HEADER, lambda d, j: [d.price[j]])
    _write(demand_path, DEMAND_HEADER, lambda d, j: [d.demand_ch[j], d.demand_wh[j]])
    _write(pv_path, PV_HEADER, lambda d, j: [d.pv_cf[j]])


# Catalog fields given in EUR/kWh, EUR/kW, kWh, kW; converted on load.
_CATALOG_FIELDS = {
    "eta_c": 1.0, "eta_d": 1.0,
    "cost_energy_eur_per_kwh": 1.0, "cost_power_eur_per_kw": 1.0,
    "om_energy_eur_per_kwh": 1.0, "om_power_eur_per_kw_yr": 1.0,
    "max_energy_kwh": 1e-3, "max_power_kw": 1e-3,
    "crate_max_per_step": 1.0, "dod_min_frac": 1.0,
    "cycle_life": 1.0, "resale_factor": 1.0,
}


def load_catalog(catalog_path) -> dict[str, EssSpec]:
    """Read the storage technology catalog (one INI section per technology)."""
    parser = configparser.ConfigParser()
    read = parser.read(catalog_path)
    if not read:
        raise CatalogError(f"cannot read catalog {catalog_path}")
    catalog = {}
    for name in parser.sections():
        section = parser[name]
        vals = {}
        for key, scale in _CATALOG_FIELDS.items():
            if key not in section:
                raise CatalogError(f"{name}: missing field {key}")
            try:
                vals[key] = float(section[key]) * scale
            except ValueError:
                raise CatalogError(f"{name}: field {key} is not a number") from None
        catalog[name] = EssSpec(
            name=name,
            eta_c=vals["eta_c"], eta_d=vals["eta_d"],
            cost_energy=vals["cost_energy_eur_per_kwh"],
            cost_power=vals["cost_power_eur_per_kw"],
            om_energy=vals["om_energy_eur_per_kwh"],
            om_power=vals["om_power_eur_per_kw_yr"],
            e_cap_max=vals["max_energy_kwh"],
            p_cap_max=vals["max_power_kw"],
            crate_max=vals["crate_max_per_step"],
            dod_min_frac=vals["dod_min_frac"],
            cycle_life=vals["cycle_life"],
            resale_factor=vals["resale_factor"],
        )
    if not catalog:
        raise CatalogError(f"{catalog_path}: no technology records")
    return catalog


def make_demo_dataset(seed: int, n_days: int, steps_per_day: int = 24) -> list[HistoricalDay]:
    """Generate a synthetic stand-in for the proprietary case-study data.

    Deterministic for a fixed seed. Prices show morning/evening peaks and
    stay strictly positive; charger demand follows a weekday pattern with
    shift peaks; PV is a diurnal bell with seasonal amplitude and clouds.
    """
    if n_days < 1:
        raise ValueError("n_days must be >= 1")
    rng = np.random.default_rng(seed)
    hours = np.arange(steps_per_day) * 24.0 / steps_per_day
    start = dt.date(2021, 1, 1)
    days = []
    for i in range(n_days):
        date = start + dt.timedelta(days=i)
        weekday = date.weekday() < 5
        season = 0.6 - 0.4 * np.cos(2 * np.pi * (i % 365) / 365.0)  # peak mid-year

        sun = np.sin(np.pi * (hours - 6.0) / 12.0)
        sun = np.where((hours >= 6.0) & (hours <= 18.0), np.maximum(sun, 0.0), 0.0)
        cloud = rng.uniform(0.55, 1.0)
        pv_cf = np.clip(sun * season * cloud * rng.uniform(0.9, 1.0, steps_per_day), 0.0, 1.0)

        base = rng.uniform(35.0, 70.0)
        peaks = 28.0 * np.exp(-0.5 * ((hours - 8.0) / 1.8) ** 2) \
            + 34.0 * np.exp(-0.5 * ((hours - 19.0) / 2.2) ** 2)
        midday_dip = 18.0 * season * np.exp(-0.5 * ((hours - 13.0) / 2.5) ** 2)
        price = base + peaks - midday_dip + rng.normal(0.0, 3.0, steps_per_day)
        price = np.maximum(price, 5.0)  # strictly positive floor, EUR/MWh

        # evening shift change peaks above the contractable grid capacity,
        # so serving the chargers requires local storage or PV
        shift = 1.6 * np.exp(-0.5 * ((hours - 7.0) / 1.5) ** 2) \
            + 3.1 * np.exp(-0.5 * ((hours - 18.0) / 2.0) ** 2)
        ch_level = 1.0 if weekday else 0.35
        demand_ch = np.maximum(
            ch_level * shift * rng.uniform(0.85, 1.15, steps_per_day), 0.0)
        wh_level = 0.30 if weekday else 0.18
        demand_wh = np.maximum(
            wh_level * (1.0 + 0.3 * np.sin(2 * np.pi * (hours - 9.0) / 24.0))
            * rng.uniform(0.9, 1.1, steps_per_day), 0.0)

        days.append(HistoricalDay(date, price, demand_ch, demand_wh, pv_cf))
    return days


def write_demo_files(days, out_dir):
    """Write a demo dataset as the three CSVs load_dataset expects."""
    import os
    os.makedirs(out_dir, exist_ok=True)
    paths = (os.path.join(out_dir, "prices.csv"),
             os.path.join(out_dir, "demand.csv"),
             os.path.join(out_dir, "pv.csv"))
    save_dataset(days, *paths)
    return paths
