import math

import pytest

from ricci_forge import models
from ricci_forge.analysis import scan
from ricci_forge.analysis.scan import ModelRef, Tolerances, check_grid, parse_axis, parse_grid
from ricci_forge.errors import UsageError

SMALL = "t=0.4:1.2:2,x=-1:1:2,y=-1:1:2,z=0:0:1"


class TestGridParsing:
    def test_axis(self):
        a = parse_axis("x=-1:1:3")
        assert a.values() == [-1.0, 0.0, 1.0] and str(a) == "x=-1:1:3"

    def test_single_point_axis(self):
        assert parse_axis("z=0.5:9:1").values() == [0.5]

    def test_defaults_fill_missing_axes(self):
        g = parse_grid("x=0:1:2", "t=1:2:2,x=5:6:7,y=0:0:1,z=0:0:1")
        assert g.axes[1].count == 2 and len(g.events()) == 4

    @pytest.mark.parametrize("bad", ["x=0:1", "w=0:1:2", "x=0:1:0", "x=a:1:2", "x=0:inf:2",
                                     "x=0:1:2,x=0:1:3"])
    def test_rejects(self, bad):
        with pytest.raises(UsageError):
            parse_grid(bad, "t=1:2:2,x=5:6:7,y=0:0:1,z=0:0:1")

    def test_missing_axes(self):
        with pytest.raises(UsageError):
            parse_grid("x=0:1:2")

    def test_round_trip(self):
        g = parse_grid(SMALL)
        assert parse_grid(str(g)) == g


class TestScan:
    def test_example2_passes(self, ex2):
        rep = scan(ex2, SMALL)
        assert rep.passed
        assert set(rep.checks) == {"det_negative", "vacuum", "det_closed_form", "signature_chain",
                                   "riemann_pattern", "kretschmann_zero"}
        assert rep.summary["riemann_patterns"] == ["0202,0303"]

    def test_example1_flat_check(self, ex1):
        rep = scan(ex1, SMALL)
        assert rep.checks["flat"]["pass"] and rep.summary["riemann_patterns"] == [""]

    def test_schwarzschild_closed_form_check(self):
        m = models.builtin("schwarzschild")
        rep = scan(m, "t=0:0:1,x=3:10:3,y=1:2:2,z=0:1:2")
        assert rep.checks["kretschmann_closed_form"]["pass"]

    def test_corrupted_model_fails_vacuum(self, ex2):
        rep = scan(models.corrupted(ex2, "v"), SMALL)
        assert not rep.checks["vacuum"]["pass"] and not rep.passed

    def test_singular_grid_rejected(self, ex3):
        with pytest.raises(UsageError, match="singular margin"):
            scan(ex3, "t=0.5:1:2,x=-1:1:3,y=0:0:1,z=0:0:1")

    def test_check_grid_with_custom_margins(self, ex3):
        check_grid(ex3, [(0.7, 0.1, 0, 0)], models.Margins(x_floor=0.05))
        with pytest.raises(UsageError):
            check_grid(ex3, [(0.7, 0.1, 0, 0)])

    def test_tighter_tolerance_can_fail(self, ex2):
        rep = scan(ex2, SMALL, Tolerances(ricci_tol=1e-30))
        assert not rep.checks["vacuum"]["pass"]

    def test_bad_tolerance(self):
        with pytest.raises(UsageError):
            Tolerances(det_tol=0.0)

    def test_workers_match_serial(self, ex3):
        grid = "t=0.4:1.2:2,x=0.5:2:2,y=-1:1:2,z=0:0:1"
        serial = scan(ex3, grid)
        par = scan(ex3, grid, workers=2, model_ref=ModelRef("example3"))
        assert [r.to_dict() for r in serial.records] == [r.to_dict() for r in par.records]

    def test_workers_without_ref_run_serially(self, ex3):
        grid = SMALL.replace("x=-1:1:2", "x=0.5:2:2")
        assert scan(ex3, grid, workers=2).to_dict() == scan(ex3, grid).to_dict()

    def test_to_dict_shape(self, ex1):
        d = scan(ex1, SMALL).to_dict()
        assert len(d["events"]) == 8 and d["grid_spec"] == SMALL
        assert not math.isnan(d["summary"]["max_ricci_rel"])
