import csv
import io
import subprocess
import sys

import pytest

from greenqtl.cli import EXIT_CONFIG, EXIT_OK, main


def rows(path):
    return list(csv.reader(io.StringIO(path.read_text())))


def run(*args):
    return main([str(a) for a in args])


def test_simulate_reference(tmp_path, capsys):
    assert run("simulate", "--out", tmp_path) == EXIT_OK
    weight = float(capsys.readouterr().out.split(":")[1].split()[0])
    assert weight == pytest.approx(773, rel=0.10)
    table = rows(tmp_path / "series.csv")
    assert table[0][:5] == ["cycle", "Q", "D", "Q_over_D", "blade_area"]
    assert (tmp_path / "config.yaml").exists()


def test_simulate_zero_seed(tmp_path):
    assert run("simulate", "--out", tmp_path, "--set", "seed_biomass=0") == EXIT_OK
    table = rows(tmp_path / "series.csv")
    header = table[0]
    for r in table[1:]:
        for name in ("Q", "blade_area", "blade", "sheath", "internode", "cob", "tassel"):
            assert float(r[header.index(name)]) == 0.0


def test_simulate_overrides_are_validated(tmp_path, capsys):
    assert run("simulate", "--out", tmp_path, "--set", "height=3") == EXIT_CONFIG
    assert run("simulate", "--out", tmp_path, "--set", "cob_sink_var=2") == EXIT_CONFIG
    assert "cob_sink_var" in capsys.readouterr().err


def test_population_files(tmp_path):
    assert run("population", "--preset", "pleiotropy", "--out", tmp_path, "--size", 40) == EXIT_OK
    geno = rows(tmp_path / "genotypes.csv")
    assert len(geno) == 41 and len(geno[0]) == 58
    pheno = rows(tmp_path / "phenotypes.csv")
    assert pheno[0][-1] == "cob_weight" and len(pheno[0]) == 14
    assert len(rows(tmp_path / "map.csv")) == 58


def test_population_of_zero(tmp_path):
    assert run("population", "--out", tmp_path, "--size", 0) == EXIT_OK
    assert len(rows(tmp_path / "genotypes.csv")) == 1
    assert len(rows(tmp_path / "phenotypes.csv")) == 1


def test_qtl_writes_profiles(tmp_path):
    assert run("qtl", "--preset", "pleiotropy", "--out", tmp_path, "--trait", "blade_thickness") == EXIT_OK
    assert len(rows(tmp_path / "lod_blade_thickness.csv")) == 58
    summary = rows(tmp_path / "qtl_summary.csv")
    assert summary[1][0] == "blade_thickness" and summary[1][4] == "3 8"


def test_qtl_unknown_trait(tmp_path):
    assert run("qtl", "--out", tmp_path, "--trait", "height") == EXIT_CONFIG


def test_surface_small_grid_and_transpose(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("surface", "--out", a, "--grid", 2) == EXIT_OK
    assert run("surface", "--out", b, "--grid", 2, "--x", "cob_sink_var", "--y", "cob_sink") == EXIT_OK
    ra, rb = rows(a / "surface.csv"), rows(b / "surface.csv")
    assert ra[0] == ["x", "y", "cob_weight"] and len(ra) == 5
    wa = {(r[0], r[1]): r[2] for r in ra[1:]}
    wb = {(r[1], r[0]): r[2] for r in rb[1:]}
    assert wa == wb


def test_optimize_zero_generations(tmp_path):
    assert run("optimize", "--out", tmp_path, "--generations", 0, "--population-size", 5) == EXIT_OK
    hist = rows(tmp_path / "history.csv")
    assert len(hist) == 2
    ideo = rows(tmp_path / "ideotype.csv")
    assert float(ideo[-1][3]) == pytest.approx(float(hist[1][1]), rel=1e-12)


def test_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("population:\n  generations: 1\n")
    assert run("population", "--config", cfg, "--out", tmp_path) == EXIT_CONFIG


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "greenqtl.cli", "simulate", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "final cob weight" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "greenqtl.cli", "frobnicate"], capture_output=True)
    assert proc.returncode == 2
