import json

import pytest

from semisym import cli, graphio


def run(capsys, argv):
    rc = cli.main(argv)
    out = capsys.readouterr().out
    return rc, out


def test_construct_nrc_25(tmp_path, capsys):
    out_path = tmp_path / "nrc25.g6"
    rc, out = run(capsys, ["construct", "--family", "nrc", "--n", "2", "--q", "5",
                           "--out", str(out_path)])
    assert rc == 0
    payload = json.loads(out)
    assert payload["num_vertices"] == 250
    g = graphio.read_graph(out_path)
    assert g.num_vertices == 250


def test_construct_rejects_bad_params(tmp_path, capsys):
    rc = cli.main(["construct", "--family", "basis", "--n", "2", "--q", "4",
                   "--out", str(tmp_path / "x.g6")])
    err = capsys.readouterr().err
    assert rc == 1
    assert "q = n+1" in err


def test_construct_cone(tmp_path, capsys):
    out_path = tmp_path / "cone.g6"
    rc, out = run(capsys, ["construct", "--family", "cone", "--n", "3",
                           "--q0", "2", "--h", "3", "--out", str(out_path)])
    assert rc == 0
    assert json.loads(out)["num_vertices"] == 8192


def test_analyze_nrc_25_expect_paper(tmp_path, capsys):
    out_path = tmp_path / "nrc25.g6"
    cli.main(["construct", "--family", "nrc", "--n", "2", "--q", "5",
              "--out", str(out_path)])
    capsys.readouterr()
    rc, out = run(capsys, ["analyze", str(out_path), "--expect", "paper"])
    assert rc == 0
    rep = json.loads(out)
    assert rep["results"]["girth"]["value"] == 8
    assert rep["results"]["semisymmetric"]["value"] is True
    assert rep["results"]["aut"]["group_order"]["value"] == 10000
    assert rep["expected"]["aut_order_equals_geometric"]["match"] is True
    assert rep["all_passed"] is True


def test_analyze_disconnected_reports_not_semisymmetric(tmp_path, capsys):
    # K on a line: disconnected graph, semisymmetric verdict false
    from semisym import graphalg, linrep, pg, pointsets
    sp = pg.space(2, 4)
    k = pointsets.custom_pointset(sp, [[1, 0, 0], [0, 1, 0], [1, 1, 0]])
    g = linrep.build_gamma(k)
    path = tmp_path / "disc.g6"
    graphio.write_graph(g, path)
    rc, out = run(capsys, ["analyze", str(path), "--checks",
                           "connectivity,aut"])
    rep = json.loads(out)
    assert rep["results"]["connected"]["value"] is False
    assert rep["results"]["num_components"]["value"] == 4
    assert rep["results"]["semisymmetric"]["value"] is False
    assert "not connected" in rep["results"]["semisymmetric_note"]


def test_analyze_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.g6"
    bad.write_text("C")  # truncated payload
    rc = cli.main(["analyze", str(bad)])
    err = capsys.readouterr().err
    assert rc == 1
    assert "byte offset" in err


def test_compare_lambda_vs_gamma(tmp_path, capsys):
    a = tmp_path / "a.g6"
    b = tmp_path / "b.g6"
    cli.main(["construct", "--family", "lambda", "--n", "2", "--q", "5", "--out", str(a)])
    cli.main(["construct", "--family", "nrc", "--n", "2", "--q", "5", "--out", str(b)])
    capsys.readouterr()
    rc, out = run(capsys, ["compare", str(a), str(b)])
    assert rc == 0
    assert json.loads(out)["isomorphic"] is True


def test_compare_relabeled_self(tmp_path, capsys):
    import numpy as np
    import random
    from semisym import linrep, pointsets
    rng = random.Random(4)
    g = linrep.build_gamma(pointsets.nrc_minus_point(2, 3))
    a = tmp_path / "a.g6"
    graphio.write_graph(g, a)
    n, n_pts = g.num_vertices, g.n_points
    perm = np.array(rng.sample(range(n_pts), n_pts) +
                    rng.sample(range(n_pts, n), n - n_pts))
    b = tmp_path / "b.g6"
    graphio.write_graph(g.relabel(perm), b)
    rc, out = run(capsys, ["compare", str(a), str(b)])
    assert json.loads(out)["isomorphic"] is True


def test_compare_non_isomorphic(tmp_path, capsys):
    # same orders: the frame graph (an arc, girth 8) vs the graph of a
    # 4-point set with 3 collinear points (girth 6)
    from semisym import linrep, pg, pointsets
    a = tmp_path / "a.g6"
    b = tmp_path / "b.g6"
    cli.main(["construct", "--family", "frame", "--n", "2", "--q", "4", "--out", str(a)])
    sp = pg.space(2, 4)
    k = pointsets.custom_pointset(
        sp, [[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]])
    graphio.write_graph(linrep.build_gamma(k), b)
    capsys.readouterr()
    rc, out = run(capsys, ["compare", str(a), str(b)])
    assert json.loads(out)["isomorphic"] is False


def test_catalog_lists_glynn_unconstructible(capsys):
    rc, out = run(capsys, ["catalog"])
    assert rc == 0
    entries = json.loads(out)
    glynn = [e for e in entries if e["family"] == "glynn"][0]
    assert glynn["constructible"] is False
    assert "not constructible" in glynn["notes"]
    families = {e["family"] for e in entries}
    assert {"basis", "frame", "nrc_minus_point", "casse_glynn", "cone"} <= families


def test_stabilizer_command(capsys):
    rc, out = run(capsys, ["stabilizer", "--family", "nrc", "--n", "2", "--q", "5"])
    assert rc == 0
    rep = json.loads(out)
    assert rep["order"]["value"] == 20
    assert rep["transitive_on_set"] is True
    assert [0, 0, 1] in rep["fixed_points"]


def test_exit_code_2_on_failed_expectation(tmp_path, capsys):
    # doctor a sidecar so the paper expectations cannot match: claim the
    # basis(2,3) graph is an nrc graph of the wrong order
    path = tmp_path / "g.g6"
    cli.main(["construct", "--family", "basis", "--n", "2", "--q", "3",
              "--out", str(path)])
    sidecar = json.loads((tmp_path / "g.g6.json").read_text())
    sidecar["meta"]["family"] = "nrc_minus_point"
    (tmp_path / "g.g6.json").write_text(json.dumps(sidecar))
    capsys.readouterr()
    rc, out = run(capsys, ["analyze", str(path), "--expect", "paper"])
    assert rc == 2
    rep = json.loads(out)
    assert rep["all_passed"] is False


def test_byte_reproducible_construction(tmp_path):
    a = tmp_path / "a.g6"
    b = tmp_path / "b.g6"
    cli.main(["construct", "--family", "nrc", "--n", "2", "--q", "5", "--out", str(a)])
    cli.main(["construct", "--family", "nrc", "--n", "2", "--q", "5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.g6.json").read_text() == (tmp_path / "b.g6.json").read_text()


def test_byte_reproducible_reports(tmp_path, capsys):
    path = tmp_path / "g.g6"
    cli.main(["construct", "--family", "basis", "--n", "2", "--q", "3", "--out", str(path)])
    capsys.readouterr()
    _, out1 = run(capsys, ["analyze", str(path), "--checks", "connectivity,girth,cycles"])
    _, out2 = run(capsys, ["analyze", str(path), "--checks", "connectivity,girth,cycles"])
    assert out1 == out2
