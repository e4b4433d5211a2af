import math

import numpy as np
import pytest

from hessmg.builder import ProblemData, build
from hessmg.data import Horizon, SourceSpec, make_demo_dataset
from hessmg.lp import EQ, GE, INF, LE, ModelError, ModelInstance
from hessmg.mps import MpsFormatError, read_mps, signature, write_mps
from hessmg.scenario import build_scenario


def _tiny_model():
    m = ModelInstance()
    x = m.add_var("p", "x", lb=0.0, ub=4.0)
    y = m.add_var("p", "y", lb=-INF, ub=INF)
    m.add_row([(x, 1.0), (y, 1.0)], GE, 1.0, "cover", "demo")
    m.add_row([(x, 1.0), (y, -1.0)], EQ, 0.5, "link", "demo")
    m.add_objective_term(x, 2.0)
    m.add_objective_term(y, 3.0)
    m.objective_constant = 5.0
    return m


class TestModelInstance:
    def test_variable_registry(self):
        m = ModelInstance()
        ref = m.add_var("E_soe", "battery", 3, lb=0.0, ub=2.0)
        assert ref.name == "E_soe.battery.k3"
        assert m.var("E_soe", "battery", 3) is ref
        assert m.has_var("E_soe", "battery", 3)
        assert not m.has_var("E_soe", "battery", 4)
        assert m.n_vars == 1

    def test_duplicate_variable_rejected(self):
        m = ModelInstance()
        m.add_var("a", "x")
        with pytest.raises(ModelError, match="duplicate"):
            m.add_var("a", "x")

    def test_bad_bounds_rejected(self):
        m = ModelInstance()
        with pytest.raises(ModelError):
            m.add_var("a", "x", lb=2.0, ub=1.0)
        with pytest.raises(ModelError):
            m.add_var("a", "y", lb=math.nan)

    def test_row_merges_duplicate_columns(self):
        m = ModelInstance()
        x = m.add_var("a", "x")
        m.add_row([(x, 1.0), (x, 2.5)], LE, 1.0, "r", "t")
        assert m.rows[0].cols == [x.column]
        assert m.rows[0].coefs == [3.5]

    def test_zero_coefficients_dropped(self):
        m = ModelInstance()
        x = m.add_var("a", "x")
        y = m.add_var("a", "y")
        m.add_row([(x, 0.0), (y, 1.0)], LE, 1.0, "r", "t")
        assert m.rows[0].cols == [y.column]

    def test_empty_and_nonfinite_rows_rejected(self):
        m = ModelInstance()
        x = m.add_var("a", "x")
        with pytest.raises(ModelError, match="empty row"):
            m.add_row([(x, 0.0)], LE, 1.0, "r", "t")
        with pytest.raises(ModelError, match="non-finite"):
            m.add_row([(x, math.inf)], LE, 1.0, "r", "t")
        with pytest.raises(ModelError, match="non-finite"):
            m.add_row([(x, 1.0)], LE, math.nan, "r", "t")
        with pytest.raises(ModelError, match="sense"):
            m.add_row([(x, 1.0)], "<", 1.0, "r", "t")

    def test_objective_terms_accumulate(self):
        m = _tiny_model()
        m.add_objective_term(m.var("p", "x"), 1.0)
        c = m.objective_vector()
        assert c[m.var("p", "x").column] == 3.0

    def test_dense_views(self):
        m = _tiny_model()
        a = m.row_matrix().toarray()
        np.testing.assert_array_equal(a, [[1, 1], [1, -1]])
        assert m.senses() == [GE, EQ]
        np.testing.assert_array_equal(m.rhs_vector(), [1.0, 0.5])
        np.testing.assert_array_equal(m.row_activities([1.0, 2.0]), [3.0, -1.0])
        lo, hi = m.bounds_arrays()
        assert lo.tolist() == [0.0, -INF] and hi.tolist() == [4.0, INF]

    def test_structure_is_hashable_and_discriminates(self):
        a, b = _tiny_model(), _tiny_model()
        assert a.structure() == b.structure()
        hash(a.structure())
        b.objective_constant = 6.0
        assert a.structure() != b.structure()


GOLDEN_MPS = """NAME TINY
ROWS
 N COST
 G cover
 E link
COLUMNS
 p.x COST 2
 p.x cover 1
 p.x link 1
 p.y COST 3
 p.y cover 1
 p.y link -1
RHS
 RHS COST -5
 RHS cover 1
 RHS link 0.5
BOUNDS
 UP BND p.x 4
 FR BND p.y
ENDATA
"""


class TestMps:
    def test_golden_file_byte_exact(self, tmp_path):
        path = tmp_path / "tiny.mps"
        write_mps(_tiny_model(), path, name="TINY")
        assert path.read_text() == GOLDEN_MPS

    def test_tiny_round_trip(self, tmp_path):
        path = tmp_path / "tiny.mps"
        model = _tiny_model()
        write_mps(model, path, name="TINY")
        again = read_mps(path)
        assert signature(again) == signature(model)

    def test_rewrite_is_byte_identical(self, tmp_path):
        first = tmp_path / "a.mps"
        second = tmp_path / "b.mps"
        model = _tiny_model()
        write_mps(model, first, name="TINY")
        write_mps(read_mps(first), second, name="TINY")
        assert first.read_bytes() == second.read_bytes()

    def test_full_model_round_trip(self, tmp_path):
        days = make_demo_dataset(seed=0, n_days=20)
        horizon = Horizon(t_syn=2)
        scenario = build_scenario(days, w=2, t_syn=2, seed=0)
        ess = {"battery": _battery()}
        data = ProblemData.from_scenario(scenario, horizon, SourceSpec(), ess)
        model = build(data)
        path = tmp_path / "full.mps"
        write_mps(model, path)
        assert signature(read_mps(path)) == signature(model)

    def test_seventeen_digit_values_survive(self, tmp_path):
        m = ModelInstance()
        x = m.add_var("v", "x", lb=0.0, ub=0.1 + 0.2)  # 0.30000000000000004
        m.add_row([(x, 1.0 / 3.0)], LE, math.pi, "r", "t")
        m.add_objective_term(x, 2.0 ** -40)
        path = tmp_path / "prec.mps"
        write_mps(m, path)
        again = read_mps(path)
        assert again.upper[0] == 0.1 + 0.2
        assert again.rows[0].coefs[0] == 1.0 / 3.0
        assert again.rows[0].rhs == math.pi

    def test_reader_rejects_integer_sections(self, tmp_path):
        path = tmp_path / "bad.mps"
        path.write_text(GOLDEN_MPS.replace(" UP BND p.x 4", " BV BND p.x"))
        with pytest.raises(MpsFormatError, match="integer"):
            read_mps(path)

    def test_reader_rejects_ranges(self, tmp_path):
        path = tmp_path / "bad.mps"
        path.write_text(GOLDEN_MPS.replace("BOUNDS\n", "RANGES\n RHS cover 1\nBOUNDS\n"))
        with pytest.raises(MpsFormatError, match="RANGES"):
            read_mps(path)

    def test_reader_rejects_unknown_row(self, tmp_path):
        path = tmp_path / "bad.mps"
        path.write_text(GOLDEN_MPS.replace(" p.x cover 1", " p.x nosuch 1"))
        with pytest.raises(MpsFormatError, match="unknown row"):
            read_mps(path)


def _battery():
    from hessmg.data import EssSpec
    return EssSpec(
        name="battery", eta_c=0.83, eta_d=0.88, cost_energy=900.0,
        cost_power=1590.0, om_energy=3.0, om_power=30.0, cycle_life=5000.0,
        e_cap_max=5.0, p_cap_max=10.0, crate_max=3.0, dod_min_frac=0.15,
        resale_factor=0.85)
