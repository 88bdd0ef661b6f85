import csv
import io
import json

import numpy as np
import pytest

from netdep.cli import main
from netdep.errors import DataError, ParseError
from netdep.loaders import load_attributes, load_edge_list, write_attributes, write_edge_list
from netdep.simgen import make_rng, sample_sbm_3block

P3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def test_edge_list_path_graph(write):
    a = load_edge_list(write("g.txt", "0 1\n1 2"))
    assert np.array_equal(a.weights, P3)


def test_edge_list_comments_and_one_indexed(write):
    a = load_edge_list(write("g.txt", "# header\n1 2  # first\n\n2 3\n"), one_indexed=True)
    assert np.array_equal(a.weights, P3)


def test_edge_list_binarize(write):
    a = load_edge_list(write("g.txt", "0 1 3\n"), binarize=True)
    assert a.weights[0, 1] == 1 and a.weights[1, 0] == 1


def test_edge_list_duplicates_summed(write):
    a = load_edge_list(write("g.txt", "0 1\n0 1\n"))
    assert a.weights[0, 1] == 2


def test_edge_list_parse_error_names_line(write):
    with pytest.raises(ParseError) as info:
        load_edge_list(write("g.txt", "0 1\n1 x\n"))
    assert info.value.line == 2 and "line 2" in str(info.value)
    with pytest.raises(ParseError):
        load_edge_list(write("g.txt", "0 1 2 3\n"))


def test_edge_list_id_out_of_range(write):
    with pytest.raises(DataError, match="out of range"):
        load_edge_list(write("g.txt", "0 5\n"), n=3)


def test_attributes_aligned_by_id(write):
    x = load_attributes(write("a.csv", "id,x\n2,0.3\n0,0.1\n1,0.2\n"))
    assert x.shape == (3, 1)
    np.testing.assert_array_equal(x[:, 0], [0.1, 0.2, 0.3])


@pytest.mark.parametrize("text, needle", [
    ("id,x\n0,1\n2,3\n", "node id 1"),
    ("id,x\n0,1\n1,abc\n", "row 3"),
    ("id,x\n0,1\n0,2\n", "duplicate"),
    ("id,x\n0,1,2\n", "row 2"),
])
def test_attribute_errors(write, text, needle):
    with pytest.raises(DataError, match=needle):
        load_attributes(write("a.csv", text))


def test_attribute_count_mismatch(write):
    with pytest.raises(DataError):
        load_attributes(write("a.csv", "id,x\n0,1\n1,2\n"), n=3)


def test_writers_round_trip(tmp_path):
    s = sample_sbm_3block(30, make_rng(0))
    write_edge_list(tmp_path / "g.edges", s.a)
    write_attributes(tmp_path / "g.csv", s.x)
    a = load_edge_list(tmp_path / "g.edges", n=30)
    assert np.array_equal(a.weights, s.a)
    assert np.array_equal(load_attributes(tmp_path / "g.csv"), s.x)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_cmd_test_constant_attribute(write, capsys):
    g = write("g.txt", "0 1\n1 2\n")
    x = write("a.csv", "id,x\n0,1\n1,1\n2,1\n")
    code, out, _ = run(capsys, ["test", g, x, "--perms", "20"])
    assert code == 0
    report = json.loads(out)
    assert report["statistic"] == 0 and report["p_value"] == 1
    assert set(report) >= {"method", "embedding", "statistic", "p_value", "t_star", "q",
                           "k_star", "l_star", "permutations", "seed", "per_t"}


@pytest.fixture(scope="module")
def sbm_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("sbm")
    s = sample_sbm_3block(100, make_rng(1))
    write_edge_list(d / "g.edges", s.a)
    write_attributes(d / "g.csv", s.x)
    return str(d / "g.edges"), str(d / "g.csv")


def test_cmd_test_detects_planted_blocks(tmp_path, capsys):
    rng = make_rng(0)
    z = np.repeat([0, 1], 40)
    p = np.where(z[:, None] == z[None, :], 0.5, 0.05)
    a = np.triu(rng.random((80, 80)) < p, 1).astype(float)
    write_edge_list(tmp_path / "g.edges", a + a.T)
    write_attributes(tmp_path / "g.csv", z + 0.1 * rng.normal(size=80))
    code, out, _ = run(capsys, ["test", str(tmp_path / "g.edges"), str(tmp_path / "g.csv"),
                                "--perms", "100"])
    report = json.loads(out)
    assert code == 0 and report["p_value"] == pytest.approx(1 / 101)
    assert len(report["per_t"]) == 11


def test_cmd_test_byte_identical_across_threads(sbm_files, capsys):
    outs = [run(capsys, ["test", *sbm_files, "--perms", "30", "--seed", "3", "--threads", t])[1]
            for t in ("1", "2", "1")]
    assert outs[0] == outs[1] == outs[2]


def test_cmd_test_writes_out_file(sbm_files, tmp_path, capsys):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, ["test", *sbm_files, "--perms", "5", "--method", "dcorr",
                                "--out", str(dest)])
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["method"] == "dcorr"


def test_embed_path_graph(write, capsys):
    g = write("g.txt", "0 1\n1 2\n")
    code, out, _ = run(capsys, ["embed", g, "--t", "1", "--q", "1"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["id", "u1"]
    coords = np.array([float(r[1]) for r in rows[1:]])
    np.testing.assert_allclose(coords, [0.5, np.sqrt(2) / 2, 0.5], atol=1e-12)


def test_embed_t0_is_eigenvectors(write, capsys):
    g = write("g.txt", "0 1\n1 2\n")
    _, out, _ = run(capsys, ["embed", g, "--t", "0", "--q", "3"])
    u = np.array([[float(v) for v in r[1:]] for r in list(csv.reader(io.StringIO(out)))[1:]])
    np.testing.assert_allclose(u.T @ u, np.eye(3), atol=1e-12)


def test_embed_q_too_large_exits_4(write, capsys):
    g = write("g.txt", "0 1\n1 2\n")
    code, _, err = run(capsys, ["embed", g, "--q", "4"])
    assert code == 4 and "q" in err


def test_missing_file_exits_2(tmp_path, capsys):
    code, _, _ = run(capsys, ["embed", str(tmp_path / "nope.txt")])
    assert code == 2


def test_bad_flag_exits_4(capsys):
    with pytest.raises(SystemExit) as info:
        main(["test", "g", "a", "--perms", "many"])
    assert info.value.code == 4


def test_parse_error_exits_2(write, capsys):
    code, _, err = run(capsys, ["embed", write("g.txt", "0 1\nbad\n")])
    assert code == 2 and "line 2" in err


def test_simulate_writes_loadable_files(tmp_path, capsys):
    prefix = tmp_path / "draw"
    code, _, _ = run(capsys, ["simulate", "sbm-beta", "--param", "0.3", "--n", "40",
                              "--seed", "2", "--out", str(prefix)])
    assert code == 0
    x = load_attributes(f"{prefix}.csv")
    a = load_edge_list(f"{prefix}.edges", n=x.shape[0])
    assert a.n == 40 and np.array_equal(a.weights, a.weights.T)


def test_power_smoke_one_row_per_grid_point(capsys):
    code, out, _ = run(capsys, ["power", "sbm-beta", "--grid", "0.3,0.5", "--n", "30",
                                "--reps", "1", "--perms", "1", "--tmax", "2"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["param"] for r in rows] == ["0.3", "0.5"]
    assert all(0 <= float(r["power"]) <= 1 and r["m"] == "1" and r["r"] == "1" for r in rows)


def test_power_rows_reproducible_one_at_a_time(capsys):
    argv = ["power", "rdpg", "--n", "30", "--reps", "3", "--perms", "9", "--tmax", "2",
            "--method", "dcorr,hhg"]
    _, both, _ = run(capsys, argv + ["--grid", "1,20"])
    _, single, _ = run(capsys, argv + ["--grid", "20"])
    assert both.splitlines()[3:] == single.splitlines()[1:]


def test_power_unknown_scenario_exits_4(capsys):
    with pytest.raises(SystemExit) as info:
        main(["power", "er", "--grid", "0.1"])
    assert info.value.code == 4
