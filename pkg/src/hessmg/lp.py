"""Sparse linear program container shared by the builder, solver and writers.

A model is a variable registry (named columns with bounds) plus constraint
rows held as sparse (column, coefficient) lists with a sense and right-hand
side, and one sparse objective row with a constant offset. Minimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

LE, EQ, GE = "<=", "==", ">="
_SENSES = (LE, EQ, GE)

INF = math.inf


class ModelError(ValueError):
    """Ill-formed model: bad coefficient, bounds, or duplicate variable."""


@dataclass(frozen=True)
class VariableRef:
    """Handle to one column: (kind, entity, step) with step=None for designs."""

    kind: str
    entity: str
    step: int | None
    column: int

    @property
    def name(self) -> str:
        if self.step is None:
            return f"{self.kind}.{self.entity}"
        return f"{self.kind}.{self.entity}.k{self.step}"


@dataclass
class Row:
    cols: list[int]
    coefs: list[float]
    sense: str
    rhs: float
    name: str
    family: str


class ModelInstance:
    """Sparse LP: bounded columns, sensed rows, sparse minimize objective."""

    def __init__(self):
        self._vars: dict[tuple, VariableRef] = {}
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.col_names: list[str] = []
        self.rows: list[Row] = []
        self.objective: dict[int, float] = {}
        self.objective_constant: float = 0.0

    # -- variables ---------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self.lower)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_var(self, kind, entity, step=None, lb=0.0, ub=INF) -> VariableRef:
        key = (kind, entity, step)
        if key in self._vars:
            raise ModelError(f"duplicate variable {key}")
        if math.isnan(lb) or math.isnan(ub) or lb > ub:
            raise ModelError(f"bad bounds [{lb}, {ub}] for {key}")
        ref = VariableRef(kind, entity, step, len(self.lower))
        self._vars[key] = ref
        self.lower.append(lb)
        self.upper.append(ub)
        self.col_names.append(ref.name)
        return ref

    def var(self, kind, entity, step=None) -> VariableRef:
        return self._vars[(kind, entity, step)]

    def has_var(self, kind, entity, step=None) -> bool:
        return (kind, entity, step) in self._vars

    def variables(self):
        return list(self._vars.values())

    def set_bounds(self, ref: VariableRef, lb, ub):
        if math.isnan(lb) or math.isnan(ub) or lb > ub:
            raise ModelError(f"bad bounds [{lb}, {ub}] for {ref.name}")
        self.lower[ref.column] = lb
        self.upper[ref.column] = ub

    # -- rows and objective ------------------------------------------------

    def add_row(self, terms, sense, rhs, name, family):
        """terms: iterable of (VariableRef | column, coefficient)."""
        if sense not in _SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        cols, coefs = [], []
        seen = {}
        for ref, coef in terms:
            col = ref.column if isinstance(ref, VariableRef) else int(ref)
            if not math.isfinite(coef):
                raise ModelError(f"non-finite coefficient in row {name}")
            if coef == 0.0:
                continue
            if col in seen:
                coefs[seen[col]] += coef
            else:
                seen[col] = len(cols)
                cols.append(col)
                coefs.append(coef)
        if not cols:
            raise ModelError(f"empty row {name}")
        if not math.isfinite(rhs):
            raise ModelError(f"non-finite rhs in row {name}")
        self.rows.append(Row(cols, coefs, sense, rhs, name, family))

    def add_objective_term(self, ref: VariableRef, coef: float):
        if not math.isfinite(coef):
            raise ModelError(f"non-finite objective coefficient for {ref.name}")
        self.objective[ref.column] = self.objective.get(ref.column, 0.0) + coef

    # -- dense/sparse views ------------------------------------------------

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.n_vars)
        for col, coef in self.objective.items():
            c[col] = coef
        return c

    def row_matrix(self) -> sp.csr_matrix:
        """All rows stacked in declaration order, regardless of sense."""
        data, indices, indptr = [], [], [0]
        for row in self.rows:
            indices.extend(row.cols)
            data.extend(row.coefs)
            indptr.append(len(indices))
        return sp.csr_matrix((data, indices, indptr),
                             shape=(self.n_rows, self.n_vars))

    def senses(self) -> list[str]:
        return [r.sense for r in self.rows]

    def rhs_vector(self) -> np.ndarray:
        return np.array([r.rhs for r in self.rows])

    def bounds_arrays(self):
        return np.array(self.lower), np.array(self.upper)

    def row_activities(self, x) -> np.ndarray:
        return self.row_matrix() @ np.asarray(x)

    def structure(self):
        """Hashable sparse structure, for equality and round-trip checks."""
        return (
            tuple(self.col_names),
            tuple(self.lower), tuple(self.upper),
            tuple((tuple(r.cols), tuple(r.coefs), r.sense, r.rhs, r.name, r.family)
                  for r in self.rows),
            tuple(sorted(self.objective.items())),
            self.objective_constant,
        )
