import numpy as np
import pytest

from figscripts import (
    FigureSchemaError,
    digest_arrays,
    read_klyshko,
    read_sweep,
    read_wigner,
)


class TestSweepReader:
    def test_reads_grid(self, cli_outputs):
        table = read_sweep(cli_outputs["sweep"])
        assert len(table.deltas) == 3
        assert len(table.etas) == 4
        assert table.grid("s_min").shape == (3, 4)

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "sweep.csv"
        bad.write_text("delta,eta\n0,0\n")
        with pytest.raises(FigureSchemaError, match="nbar_2q"):
            read_sweep(bad)

    def test_missing_smin_column_named(self, tmp_path):
        cols = "delta,eta,nbar_2q,nbar_1q_1,nbar_1q_2,R"
        bad = tmp_path / "sweep.csv"
        bad.write_text(cols + "\n0,0,0,0,0,0\n")
        with pytest.raises(FigureSchemaError, match="s_min"):
            read_sweep(bad)

    def test_unknown_grid_column_named(self, cli_outputs):
        table = read_sweep(cli_outputs["sweep"])
        with pytest.raises(FigureSchemaError, match="bogus"):
            table.grid("bogus")

    def test_partial_grid_rejected(self, tmp_path, cli_outputs):
        lines = cli_outputs["sweep"].read_text().splitlines()
        bad = tmp_path / "sweep.csv"
        bad.write_text("\n".join(lines[:-1]) + "\n")  # drop one row
        with pytest.raises(FigureSchemaError, match="grid"):
            read_sweep(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FigureSchemaError, match="not found"):
            read_sweep(tmp_path / "nope.csv")


class TestWignerReader:
    def test_reads_matrix_and_convention(self, cli_outputs):
        table = read_wigner(cli_outputs["wigner"])
        assert table.w.shape == (41, 41)
        assert "displaced-parity" in table.convention or "Tr[rho D" in table.convention
        assert not table.boundary_warning

    def test_missing_convention_rejected(self, tmp_path, cli_outputs):
        lines = [ln for ln in cli_outputs["wigner"].read_text().splitlines()
                 if not ln.startswith("#")]
        bad = tmp_path / "w.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(FigureSchemaError, match="convention"):
            read_wigner(bad)


class TestKlyshkoReader:
    def test_reads_undefined_as_nan(self, cli_outputs):
        table = read_klyshko(cli_outputs["klyshko"])
        assert np.isnan(table.k[0])  # K_0 never exists
        assert np.sum(~np.isnan(table.k)) > 3

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "k.csv"
        bad.write_text("n,P_n\n0,1.0\n")
        with pytest.raises(FigureSchemaError, match="K_n"):
            read_klyshko(bad)


class TestDigest:
    def test_digest_sensitive_to_values(self):
        a = np.arange(6, dtype=float)
        d1 = digest_arrays(a)
        a2 = a.copy()
        a2[3] += 1e-15
        assert digest_arrays(a2) != d1
        assert digest_arrays(a.copy()) == d1
