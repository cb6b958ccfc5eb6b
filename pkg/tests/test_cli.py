import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from sqrtpool import gram, pool, rayleigh
from sqrtpool.cli import EXIT_INPUT, EXIT_OK, EXIT_VERIFY, main
from sqrtpool.panelfile import BUNDLED, PanelFileError, bundled_path, load_panel_file, parse_panel


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return path


def normal(mu, sigma):
    return {"family": "normal", "mu": mu, "sigma": sigma}


# -- panel files --------------------------------------------------------------


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_files_load(name):
    pf = load_panel_file(name)
    assert load_panel_file(bundled_path(name)) == pf
    for _, panel in pf.panels():
        assert len(panel) >= 1


def test_ecology_file_shape():
    pf = load_panel_file("ecology_ticks")
    assert len(pf.experts) == 24
    assert pf.condition_names() == ["1", "2", "3", "4"]
    assert all(len(pf.panel(c)) == 6 for c in pf.condition_names())
    assert {d.family for d in pf.experts} == {"lognormal"}


@pytest.mark.parametrize(
    "doc,match",
    [
        ([], "JSON object"),
        ({"experts": []}, "non-empty"),
        ({"experts": [{"label": "a"}]}, "density"),
        ({"experts": [{"label": "a", "density": {"family": "normal", "mu": 0}}]}, "experts\\[0\\]"),
        ({"experts": [{"label": "a", "density": normal(0, 1)}, {"label": "a", "density": normal(1, 1)}]}, "duplicate"),
        ({"experts": [{"density": normal(0, 1)}], "conditions": {"c": [3]}}, "invalid expert index"),
        ({"experts": [{"density": normal(0, 1)}], "conditions": {"c": []}}, "at least one"),
    ],
)
def test_parse_rejects(doc, match):
    with pytest.raises(PanelFileError, match=match):
        parse_panel(doc)


def test_condition_selection():
    pf = parse_panel(
        {"experts": [{"density": normal(0, 1)}, {"density": normal(1, 1)}], "conditions": {"x": [0], "y": [0, 1]}}
    )
    assert len(pf.panel("y")) == 2
    with pytest.raises(PanelFileError, match="choose a condition"):
        pf.panel()
    with pytest.raises(PanelFileError, match="unknown condition"):
        pf.panel("z")


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"experts": [\n  {"density": }\n]}')
    assert main(["pool", str(bad)]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "line 2 column" in err


def test_missing_file(capsys):
    assert main(["pool", "/nonexistent/panel.json"]) == EXIT_INPUT


# -- pool ---------------------------------------------------------------------


def test_pool_two_normals(tmp_path):
    out = tmp_path / "r.json"
    assert main(["pool", "two_normals", "--out", str(out)]) == EXIT_OK
    (cond,) = json.loads(out.read_text())["conditions"]
    assert [a["value"] for a in cond["alpha"]] == pytest.approx([0.27, 0.81], abs=0.01)
    assert cond["reduction_percent"] == pytest.approx(15.8, abs=0.5)
    assert cond["rank"] == 2 and cond["warnings"] == []


def test_pool_report_round_trip(tmp_path):
    out = tmp_path / "r.json"
    assert main(["pool", "ecology_ticks", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    pf = load_panel_file("ecology_ticks")
    for cond in report["conditions"]:
        panel = pf.panel(cond["name"])
        assert [a["label"] for a in cond["alpha"]] == list(panel.labels)
        alpha = np.array([a["value"] for a in cond["alpha"]])
        assert rayleigh(gram(panel), alpha) == pytest.approx(cond["information"], rel=1e-10)


def test_pool_duplicated_expert(capsys):
    assert main(["pool", "duplicated_expert"]) == EXIT_OK
    captured = capsys.readouterr()
    (cond,) = json.loads(captured.out)["conditions"]
    assert cond["rank"] == len(cond["alpha"]) - 1
    assert "warning" in captured.err


def test_infinite_information_is_input_error(tmp_path):
    f = write_json(tmp_path / "p.json", {"experts": [{"density": {"family": "beta", "a": 2, "b": 2}}]})
    assert main(["pool", str(f)]) == EXIT_INPUT


# -- curve --------------------------------------------------------------------


def test_curve_two_normals(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["curve", "two_normals", "--lo", "-10", "--hi", "10", "--n", "1001", "--out", str(out)]) == EXIT_OK
    text = out.read_text()
    assert text.endswith("\n") and "\r" not in text
    rows = list(csv.reader(text.splitlines()))
    assert rows[0][:2] == ["x", "pooled"] and len(rows[0]) == 4
    data = np.array(rows[1:], dtype=float)
    assert data.shape == (1001, 4)
    assert np.trapezoid(data[:, 1], data[:, 0]) == pytest.approx(1.0, abs=1e-4)
    # 17 significant digits survive the round trip
    pp = pool(load_panel_file("two_normals").panel())
    np.testing.assert_array_equal(data[:, 1], pp(data[:, 0]))


def test_curve_ecology_condition(tmp_path):
    out = tmp_path / "c.csv"
    gp = tmp_path / "c.gp"
    args = ["curve", "ecology_ticks", "--condition", "1", "--lo", "0", "--hi", "400", "--out", str(out), "--gnuplot", str(gp)]
    assert main(args) == EXIT_OK
    header = out.read_text().splitlines()[0].split(",")
    assert header[:2] == ["x", "pooled"] and len(header) == 8
    assert "plot" in gp.read_text()


@pytest.mark.parametrize("lo,hi", [("1", "1"), ("2", "-2")])
def test_curve_bad_range(tmp_path, lo, hi):
    assert main(["curve", "two_normals", "--lo", lo, "--hi", hi, "--out", str(tmp_path / "c.csv")]) == EXIT_INPUT


# -- gram ---------------------------------------------------------------------


def test_gram_singleton(tmp_path):
    f = write_json(tmp_path / "p.json", {"experts": [{"label": "s", "density": normal(0, 2)}]})
    prefix = tmp_path / "g"
    assert main(["gram", str(f), "--out", str(prefix)]) == EXIT_OK
    assert (tmp_path / "g.B.txt").read_text().splitlines() == ["m=1 kind=B", "1"]
    assert float((tmp_path / "g.A.txt").read_text().splitlines()[1]) == pytest.approx(1 / 16, rel=1e-15)


def test_gram_duplicated_pair_eigenvalues(tmp_path, capsys):
    f = write_json(tmp_path / "p.json", {"experts": [{"label": "a", "density": normal(0, 1)}, {"label": "b", "density": normal(0, 1)}]})
    assert main(["gram", str(f), "--out", str(tmp_path / "g")]) == EXIT_OK
    line = next(x for x in capsys.readouterr().out.splitlines() if x.startswith("eigenvalues B"))
    vals = [float(v) for v in line.split(":")[1].split()]
    np.testing.assert_allclose(vals, [2.0, 0.0], atol=1e-12)


def test_gram_two_normals_b_entry(tmp_path):
    assert main(["gram", "two_normals", "--out", str(tmp_path / "g")]) == EXIT_OK
    lines = (tmp_path / "g.B.txt").read_text().splitlines()
    b12 = float(lines[1].split()[1])
    from sqrtpool import b_entry

    pf = load_panel_file("two_normals")
    assert b12 == pytest.approx(b_entry(*pf.experts, method="quadrature"), abs=1e-8)


# -- verify -------------------------------------------------------------------


@pytest.mark.parametrize("name", ["two_normals", "three_betas", "duplicated_expert"])
def test_verify_bundled(name, capsys):
    assert main(["verify", name, "--seed", "1"]) == EXIT_OK
    assert "verification passed" in capsys.readouterr().out


def test_verify_corrupted_gram_fails(capsys):
    assert main(["verify", "two_normals", "--seed", "1", "--corrupt-gram"]) == EXIT_VERIFY
    assert "FAIL" in capsys.readouterr().out


def test_verify_deterministic(capsys):
    main(["verify", "three_betas", "--seed", "7", "--iterations", "500"])
    first = capsys.readouterr().out
    main(["verify", "three_betas", "--seed", "7", "--iterations", "500"])
    assert capsys.readouterr().out == first


def test_verify_requires_seed():
    with pytest.raises(SystemExit):
        main(["verify", "two_normals"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sqrtpool", "pool", "two_normals"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["conditions"][0]["name"] == "all"
