import json

import pytest

from tensorroot import reference_data as rd
from tensorroot.reproduce import TARGETS, Report, round_sig, run, sig_figs_agree


class TestHelpers:
    @pytest.mark.parametrize("x, expected", [(2.477, 2.5), (4.257e-4, 4.3e-4), (0.0, 0.0), (-1.549, -1.5)])
    def test_round_sig(self, x, expected):
        assert round_sig(x) == expected

    def test_sig_figs(self):
        assert sig_figs_agree(2.4770, 2.48, figs=2)
        assert not sig_figs_agree(2.56, 2.48)

    def test_report(self):
        rep = Report()
        rep.add("t", "c", True, 1.0, 1.0, "exact")
        assert rep.ok
        rep.add("t", "d", False, 2.0, 1.0, "exact", note="n")
        assert not rep.ok
        assert rep.text().splitlines()[-1] == "SUMMARY 1/2 checks passed"
        assert json.loads(rep.to_json())["ok"] is False


class TestReferenceData:
    def test_all_named_sets_load(self):
        for name in ("newton_example", "stability_example", "kappa_sweep", "tbw_example", "grayscale_example",
                     "image_covariance_table", "timing"):
            assert "source" in rd.load(name)

    def test_shapes(self):
        assert rd.newton_example_tensor().shape == (3, 3, 3)
        a, b = rd.tbw_pair()
        assert a.shape == b.shape == (3, 3, 3)
        assert rd.grayscale_image().shape == (2, 2, 3)
        assert rd.image_covariance().shape == (3, 3)


class TestRun:
    @pytest.mark.parametrize(
        "target", ["db-table", "stability-table", "kappa-sweep", "tbw-example", "image-cov-table"]
    )
    def test_passing_targets(self, tmp_path, target):
        rep = run(target, tmp_path)
        assert rep.ok, rep.text()
        assert (tmp_path / "report.json").exists()

    def test_newton_table_cells(self, tmp_path):
        rep = run("newton-table", tmp_path)
        status = {c.cell: c.passed for c in rep.checks}
        assert status["iterations"]
        assert not status["final_residual"]

    def test_grayscale_example_fails_on_singular_covariance(self, tmp_path):
        rep = run("grayscale-example", tmp_path)
        assert not rep.ok
        cells = {c.cell: c for c in rep.checks}
        assert cells["channel_means"].passed
        assert cells["gray"].computed == "SingularCovarianceError"

    def test_unknown(self, tmp_path):
        with pytest.raises(ValueError):
            run("nope", tmp_path)

    def test_targets_listed(self):
        assert len(TARGETS) == 7
