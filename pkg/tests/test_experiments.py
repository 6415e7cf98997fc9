"""Sweep protocols: artifact layout, trends at reduced sizes, reproducibility."""

import csv
from pathlib import Path

import numpy as np
import pytest

from curvewind import experiments
from curvewind.experiments import UnknownExperiment, run_experiment


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestOrderSweep:
    def test_rows_and_artifacts(self, tmp_path):
        result = experiments.order_sweep(tmp_path, grid=(40, 40))
        assert len(result["rows"]) == 6          # two shapes, three orders
        header, rows = _read_csv(result["csv"])
        assert header[:2] == ["shape", "order"]
        assert len(rows) == 6
        for fig in result["figures"]:
            assert Path(fig).exists()

    def test_order_two_beats_order_zero(self, tmp_path):
        result = experiments.order_sweep(tmp_path, grid=(60, 60))
        by_shape = {}
        for shape, order, linf, *_ in result["rows"]:
            by_shape.setdefault(shape, {})[order] = linf
        for linfs in by_shape.values():
            assert linfs[2] < linfs[0]


class TestBetaSweep:
    def test_error_non_increasing(self, tmp_path):
        result = experiments.beta_sweep(tmp_path, grid=(40, 40),
                                        betas=(1.0, 4.0), orders=(0, 2),
                                        repeats=1)
        assert len(result["rows"]) == 4
        for order in (0, 2):
            linfs = [r[2] for r in result["rows"] if r[0] == order]
            assert linfs[1] <= linfs[0] * 1.05
        assert result["direct_seconds"] > 0


class TestSubdivSweep:
    def test_refinement_grows_curves_and_stays_accurate(self, tmp_path):
        # note: finer pieces do NOT have to shrink L-inf error — larger
        # leaves force exact evaluation in a wider near band, so the two
        # effects trade off; the guarantee is that error stays small
        result = experiments.subdiv_sweep(tmp_path, grid=(30, 30),
                                          fractions=(0.4, 0.1))
        counts = [r[1] for r in result["rows"]]
        linfs = [r[5] for r in result["rows"]]
        assert counts[1] > counts[0]
        assert max(linfs) < 0.05


class TestOverlap:
    def test_absolute_error_grows(self, tmp_path):
        result = experiments.overlap(tmp_path, grid=(40, 40), ks=(1, 4))
        abs_errs = [r[2] for r in result["rows"]]
        assert abs_errs[1] > abs_errs[0]
        assert result["slope"] > 0.0
        header, _ = _read_csv(result["csv"])
        assert "misclassified" in header


class TestDisagreement:
    def test_structure(self, tmp_path):
        result = experiments.disagreement(tmp_path, shapes=3,
                                          queries_per_shape=250)
        assert len(result["rows"]) == 3
        assert (tmp_path / "disagreement_points.csv").exists()
        assert (tmp_path / "disagreement.png").exists()
        for _, _, count, conf, off in result["rows"]:
            assert count >= 0 and conf >= 0.0 and off >= 0.0


class TestScaling:
    def test_rows_and_slopes(self, tmp_path):
        result = experiments.scaling(tmp_path, grid=(50, 50), sizes=(20, 80))
        assert len(result["rows"]) == 2
        assert set(result["slopes"]) == {"direct", "agglomerated"}
        for row in result["rows"]:
            assert row[3] > 0 and row[4] > 0     # both timings measured
            assert row[6] < 0.1                  # engine tracks direct


class TestDispatch:
    def test_unknown_name(self, tmp_path):
        with pytest.raises(UnknownExperiment):
            run_experiment("warp-sweep", tmp_path)

    def test_extra_overrides_dropped(self, tmp_path):
        result = run_experiment("disagreement", tmp_path, grid=(10, 10),
                                shapes=2, queries_per_shape=100, beta=4.0)
        assert len(result["rows"]) == 2

    def test_creates_out_dir(self, tmp_path):
        nested = tmp_path / "a" / "b"
        run_experiment("subdiv-sweep", nested, grid=(20, 20),
                       fractions=(0.4, 0.2))
        assert (nested / "subdiv_sweep.csv").exists()


class TestReproducibility:
    def test_non_timing_columns_identical(self, tmp_path):
        a = experiments.order_sweep(tmp_path / "a", seed=3, grid=(30, 30))
        b = experiments.order_sweep(tmp_path / "b", seed=3, grid=(30, 30))
        ha, rows_a = _read_csv(a["csv"])
        hb, rows_b = _read_csv(b["csv"])
        assert ha == hb
        keep = [i for i, name in enumerate(ha) if "seconds" not in name]
        for ra, rb in zip(rows_a, rows_b):
            assert [ra[i] for i in keep] == [rb[i] for i in keep]

    def test_seed_changes_geometry(self, tmp_path):
        a = experiments.order_sweep(tmp_path / "a", seed=0, grid=(20, 20))
        b = experiments.order_sweep(tmp_path / "b", seed=1, grid=(20, 20))
        blob_a = [r[2] for r in a["rows"] if r[0] == "blob"]
        blob_b = [r[2] for r in b["rows"] if r[0] == "blob"]
        assert blob_a != blob_b
