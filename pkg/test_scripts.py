import pandas as pd
import pytest

from scripts.check_examples import check_examples
from scripts.export_figures import export_figures


def test_check_examples_all_pass(capsys):
    assert check_examples()
    out = capsys.readouterr().out
    assert "❌" not in out


def test_export_figures(tmp_path):
    export_figures(str(tmp_path))
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "continuous_pdf_cdf.csv" in names
    assert "student_pmf.csv" in names
    assert "supply_chain_outputs.csv" in names

    pmf = pd.read_csv(tmp_path / "student_pmf.csv")
    assert pmf["pmf"][3] == pytest.approx(0.6256, abs=1e-9)
    outputs = pd.read_csv(tmp_path / "continuous_outputs.csv")
    assert len(outputs) == 101
