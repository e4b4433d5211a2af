"""Free-format MPS writer and reader.

The writer emits ROWS/COLUMNS/RHS/BOUNDS sections with one entry per line,
deterministically ordered, so exports are byte-stable. The reader parses
the same dialect back into a ModelInstance for round-trip checks and for
feeding files produced by other tools. A nonzero objective constant is
carried as the (negated) RHS entry of the objective row, the common solver
convention.
"""

from __future__ import annotations

from .lp import EQ, GE, INF, LE, ModelInstance

OBJ_ROW = "COST"
_SENSE_TO_TYPE = {LE: "L", GE: "G", EQ: "E"}
_TYPE_TO_SENSE = {v: k for k, v in _SENSE_TO_TYPE.items()}


class MpsFormatError(ValueError):
    """Unparseable MPS content."""


def _fmt(value: float) -> str:
    # 17 significant digits: values survive the text round-trip bit-exactly
    return f"{value:.17g}"


def write_mps(model: ModelInstance, path, name: str = "HESSMG"):
    """Write the model in free MPS format (minimization objective)."""
    lines = [f"NAME {name}", "ROWS", f" N {OBJ_ROW}"]
    for row in model.rows:
        lines.append(f" {_SENSE_TO_TYPE[row.sense]} {row.name}")

    by_col: dict[int, list[tuple[str, float]]] = {j: [] for j in range(model.n_vars)}
    for row in model.rows:
        for col, coef in zip(row.cols, row.coefs):
            by_col[col].append((row.name, coef))

    lines.append("COLUMNS")
    for j, col_name in enumerate(model.col_names):
        if j in model.objective and model.objective[j] != 0.0:
            lines.append(f" {col_name} {OBJ_ROW} {_fmt(model.objective[j])}")
        for row_name, coef in by_col[j]:
            lines.append(f" {col_name} {row_name} {_fmt(coef)}")

    lines.append("RHS")
    if model.objective_constant != 0.0:
        lines.append(f" RHS {OBJ_ROW} {_fmt(-model.objective_constant)}")
    for row in model.rows:
        if row.rhs != 0.0:
            lines.append(f" RHS {row.name} {_fmt(row.rhs)}")

    lines.append("BOUNDS")
    for j, col_name in enumerate(model.col_names):
        lo, hi = model.lower[j], model.upper[j]
        if lo == hi:
            lines.append(f" FX BND {col_name} {_fmt(lo)}")
            continue
        if lo == -INF and hi == INF:
            lines.append(f" FR BND {col_name}")
            continue
        if lo == -INF:
            lines.append(f" MI BND {col_name}")
        elif lo != 0.0:
            lines.append(f" LO BND {col_name} {_fmt(lo)}")
        if hi != INF:
            lines.append(f" UP BND {col_name} {_fmt(hi)}")

    lines.append("ENDATA")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mps(path) -> ModelInstance:
    """Parse a free-format MPS file written by write_mps (or compatible)."""
    model = ModelInstance()
    section = None
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    row_terms: dict[str, list] = {}
    row_rhs: dict[str, float] = {}
    col_index: dict[str, int] = {}
    obj_terms: dict[int, float] = {}
    obj_constant = 0.0

    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("*"):
                continue
            head = line.split()
            is_section = not line[0].isspace()
            if is_section:
                section = head[0].upper()
                if section == "ENDATA":
                    break
                if section not in ("NAME", "ROWS", "COLUMNS", "RHS",
                                   "RANGES", "BOUNDS", "OBJSENSE"):
                    raise MpsFormatError(f"{path}:{lineno}: unknown section {section}")
                continue
            if section == "ROWS":
                rtype, rname = head[0].upper(), head[1]
                if rtype == "N":
                    row_sense[rname] = "N"
                elif rtype in _TYPE_TO_SENSE:
                    row_sense[rname] = _TYPE_TO_SENSE[rtype]
                    row_order.append(rname)
                    row_terms[rname] = []
                    row_rhs[rname] = 0.0
                else:
                    raise MpsFormatError(f"{path}:{lineno}: bad row type {rtype}")
            elif section == "COLUMNS":
                if "MARKER" in line:
                    raise MpsFormatError(
                        f"{path}:{lineno}: integer markers are not supported")
                col_name = head[0]
                if col_name not in col_index:
                    col_index[col_name] = len(col_index)
                    model.add_var("col", col_name, None, lb=0.0, ub=INF)
                pairs = head[1:]
                if len(pairs) % 2:
                    raise MpsFormatError(f"{path}:{lineno}: odd COLUMNS entry")
                for rname, value in zip(pairs[::2], pairs[1::2]):
                    coef = float(value)
                    if row_sense.get(rname) == "N":
                        obj_terms[col_index[col_name]] = \
                            obj_terms.get(col_index[col_name], 0.0) + coef
                    elif rname in row_terms:
                        row_terms[rname].append((col_index[col_name], coef))
                    else:
                        raise MpsFormatError(f"{path}:{lineno}: unknown row {rname}")
            elif section == "RHS":
                pairs = head[1:]
                for rname, value in zip(pairs[::2], pairs[1::2]):
                    if row_sense.get(rname) == "N":
                        obj_constant = -float(value)
                    elif rname in row_rhs:
                        row_rhs[rname] = float(value)
                    else:
                        raise MpsFormatError(f"{path}:{lineno}: unknown row {rname}")
            elif section == "BOUNDS":
                btype = head[0].upper()
                col_name = head[2]
                if col_name not in col_index:
                    raise MpsFormatError(f"{path}:{lineno}: unknown column {col_name}")
                j = col_index[col_name]
                value = float(head[3]) if len(head) > 3 else None
                lo, hi = model.lower[j], model.upper[j]
                if btype == "UP":
                    hi = value
                elif btype == "LO":
                    lo = value
                elif btype == "FX":
                    lo = hi = value
                elif btype == "FR":
                    lo, hi = -INF, INF
                elif btype == "MI":
                    lo = -INF
                elif btype == "PL":
                    hi = INF
                elif btype == "BV" or btype in ("LI", "UI"):
                    raise MpsFormatError(
                        f"{path}:{lineno}: integer bound {btype} not supported")
                else:
                    raise MpsFormatError(f"{path}:{lineno}: bad bound type {btype}")
                model.lower[j], model.upper[j] = lo, hi
            elif section == "RANGES":
                raise MpsFormatError(f"{path}:{lineno}: RANGES not supported")
            elif section in ("NAME", "OBJSENSE"):
                continue
            else:
                raise MpsFormatError(f"{path}:{lineno}: content before any section")

    # column names were registered as ("col", name); rewrite to plain names
    model.col_names = list(col_index.keys())
    for rname in row_order:
        model.add_row(row_terms[rname], row_sense[rname], row_rhs[rname],
                      rname, family="mps")
    model.objective = obj_terms
    model.objective_constant = obj_constant
    return model


def signature(model: ModelInstance):
    """Sparse structure modulo row families and within-row term order
    (MPS carries neither: the COLUMNS section is column-major)."""
    return (
        tuple(model.col_names),
        tuple(model.lower), tuple(model.upper),
        tuple((tuple(sorted(zip(r.cols, r.coefs))), r.sense, r.rhs, r.name)
              for r in model.rows),
        tuple(sorted((j, c) for j, c in model.objective.items() if c != 0.0)),
        model.objective_constant,
    )
