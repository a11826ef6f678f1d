import csv
import io
import json
import os

import pytest

from pcfgeom.cli import main
from pcfgeom.render import MARKER, read_ppm

ORIGIN_LINE_SUPPORTS = [
    {"p0_1_0:p0_1_0", "p2_2_0:p2_2_1", "p2_2_1:p2_2_0"},    # y = -x through (i, -i)
    {"p0_1_0:p0_1_0", "p0_2_0:p2_2_0", "p2_2_1:p0_2_0"},
    {"p0_1_0:p0_1_0", "p0_2_0:p2_2_1", "p2_2_0:p0_2_0"},
]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    old = os.getcwd()
    os.chdir(d)
    assert main(["catalog", "--bound", "4", "--precision", "1e-40", "-o", "cat.json", "--workers", "1"]) == 0
    yield d
    os.chdir(old)


def _csv_rows(path):
    text = open(path, encoding="utf-8").read()
    first, rest = text.split("\n", 1)
    assert first.startswith("# ")
    return json.loads(first[2:]), list(csv.DictReader(io.StringIO(rest)))


def test_catalog_contains_simple_values(workdir):
    data = json.load(open("cat.json"))
    mids = [complex(float(p["mid"][0]), float(p["mid"][1])) for p in data["params"]]
    for z in (0, -1, -2, 1j, -1j):
        assert min(abs(m - z) for m in mids) < 1e-30
    assert data["meta"]["version"] and data["meta"]["config"]["bound"] == 4


def test_lines_csv_has_origin_lines(workdir):
    assert main(["lines", "--catalog", "cat.json", "--k", "3", "--nonspecial-only", "-o", "lines.csv"]) == 0
    meta, rows = _csv_rows("lines.csv")
    assert meta["catalog"] == {"bound": 4, "precision": "1e-40", "size": 17}
    supports = [set(r["support"].split()) for r in rows]
    for s in ORIGIN_LINE_SUPPORTS:
        assert s in supports
    assert all(r["classification"] == "NonSpecial" for r in rows)


def test_render_marks_catalog(workdir):
    args = ["render", "--catalog", "cat.json", "--region", "-2.2,0.8,-1.5,1.5", "--res", "120",
            "-o", "fig.ppm", "--overlay", "pcf"]
    assert main(args) == 0
    w, h, arr = read_ppm(open("fig.ppm", "rb").read())
    assert (w, h) == (120, 120)
    assert (arr == MARKER).all(axis=2).any()


def test_render_svg(workdir):
    assert main(["render", "--catalog", "cat.json", "--res", "60", "--overlay", "pcf",
                 "--format", "svg", "-o", "fig.svg"]) == 0
    text = open("fig.svg").read()
    assert text.count("<circle") == 17


def test_other_commands(workdir, capsys):
    assert main(["conic", "--points", "0,-1;-1,-2;-2,0", "--catalog", "cat.json", "-o", "conic.json"]) == 0
    out = json.load(open("conic.json"))
    assert out["curve"]["special_count"] == 6
    assert main(["heights", "--values", "-1,1,1/2", "--green", "2", "-o", "h.json"]) == 0
    h = json.load(open("h.json"))
    assert h["meta"]["command"] == "heights"
    assert main(["equidist", "--z", "2", "--n", "2..4", "-o", "eq.csv"]) == 0
    meta, rows = _csv_rows("eq.csv")
    assert [r["n"] for r in rows] == ["2", "3", "4"]
    assert main(["reallines", "--catalog", "cat.json", "-o", "rl.json"]) == 0
    assert len(json.load(open("rl.json"))["lines"]) == 2


def test_exit_codes(workdir, capsys):
    assert main(["lines", "--catalog", "missing.json"]) == 5
    open("bad.json", "w").write("{not json")
    assert main(["lines", "--catalog", "bad.json"]) == 4
    assert main(["lines", "--catalog", "cat.json", "--k", "2"]) == 2
    assert main(["fit", "--catalog", "cat.json", "--points", "0,0,1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["lines", "--unknown-flag"])
    assert exc.value.code == 2
    assert main(["catalog", "--bound", "3", "--precision-ceiling", "64", "--precision", "1e-200",
                 "-o", "tiny.json"]) == 3


@pytest.mark.parametrize("argv", [
    ["catalog", "--bound", "3", "-o", "{out}.json", "--workers", "1"],
    ["lines", "--catalog", "cat.json", "-o", "{out}.csv"],
    ["reallines", "--catalog", "cat.json", "-o", "{out}.json"],
    ["fit", "--catalog", "cat.json", "--points", "0,0;i,-i", "-o", "{out}.json"],
    ["conic", "--points", "0,-1;-1,-2;-2,0", "--catalog", "cat.json", "-o", "{out}.csv"],
    ["heights", "--values", "1,1/2", "--green", "2,1+2i", "-o", "{out}.json"],
    ["equidist", "--z", "2,10", "--n", "2..5", "-o", "{out}.csv"],
])
def test_byte_identical_reruns(workdir, argv):
    out = "det_" + argv[0]
    argv = [a.format(out=out) for a in argv]
    path = argv[argv.index("-o") + 1]
    assert main(argv) == 0
    first = open(path, "rb").read()
    os.remove(path)
    assert main(argv) == 0
    assert open(path, "rb").read() == first
