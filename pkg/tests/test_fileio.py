import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ridge_split import decompose, fileio
from ridge_split.calculus import ExprFunction, Rect
from ridge_split.errors import FormatError, IngestError

SQ = Rect(-1.0, 1.0, -1.0, 1.0)


@pytest.fixture(scope="module")
def dec():
    return decompose("sin(x) + exp(y) + (x+y)^2", [(1, 0), (0, 1), (1, 1)], SQ, grid_n=129)


# -- encodings -------------------------------------------------------------------

def test_parse_pairs():
    assert fileio.parse_pairs("1,0;0,1;1,1") == [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    assert fileio.parse_pairs(" -1.5, 2 ; 3e-1,4 ") == [(-1.5, 2.0), (0.3, 4.0)]


@pytest.mark.parametrize("text", ["", "1,0;;0,1", "1,0;0", "1,0,2", "a,b", "1,inf", "1,0;"])
def test_parse_pairs_rejects(text):
    with pytest.raises(FormatError):
        fileio.parse_pairs(text)


def test_parse_domain():
    assert fileio.parse_domain("-1,1,-2,2") == Rect(-1.0, 1.0, -2.0, 2.0)
    for bad in ("1,0,0,1", "0,1,0", "0,1,0,x"):
        with pytest.raises(FormatError):
            fileio.parse_domain(bad)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(v):
    text = fileio.format_float(v)
    back = json.loads(text)
    assert back == v
    assert np.signbit(float(back)) == np.signbit(v)
    assert fileio.format_float(float(back)) == text


def test_negative_zero_survives_json():
    text = fileio.format_float(-0.0)
    back = json.loads(text)
    assert isinstance(back, float) and np.signbit(back)


# -- decomposition files ----------------------------------------------------------

def test_write_read_write_is_byte_identical(dec, tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    fileio.write_decomposition(p1, dec)
    back = fileio.read_decomposition(p1)
    fileio.write_decomposition(p2, back)
    assert p1.read_bytes() == p2.read_bytes()


def test_read_back_is_bit_faithful(dec, tmp_path):
    path = tmp_path / "d.json"
    fileio.write_decomposition(path, dec)
    back = fileio.read_decomposition(path)
    for p, q in zip(dec.profiles, back.profiles):
        np.testing.assert_array_equal(p.values, q.values)
        assert (p.t_min, p.t_max, p.step, p.base_point) == (q.t_min, q.t_max, q.step,
                                                             q.base_point)
    X, Y = SQ.mesh(37)
    np.testing.assert_array_equal(dec(X, Y), back(X, Y))
    assert back.reconstruction_sup_error == dec.reconstruction_sup_error
    assert back.source_expression == dec.source_expression
    assert back.metadata == json.loads(json.dumps(dec.metadata))


def test_file_fields(dec):
    doc = json.loads(fileio.decomposition_to_text(dec))
    assert doc["format_version"] == 1
    assert doc["directions"] == [[1, 0], [0, 1], [1, 1]]
    assert doc["domain"] == [-1, 1, -1, 1]
    assert [p["direction_index"] for p in doc["profiles"]] == [0, 1, 2]
    assert all(len(p["values"]) == 129 for p in doc["profiles"])


def _mutate(dec, fn):
    doc = json.loads(fileio.decomposition_to_text(dec))
    fn(doc)
    return json.dumps(doc)


@pytest.mark.parametrize("mutation", [
    lambda d: d["profiles"][0]["values"].pop(),
    lambda d: d.pop("directions"),
    lambda d: d["profiles"].pop(),
    lambda d: d.update(format_version=7),
    lambda d: d["profiles"][1].update(direction_index=0),
    lambda d: d["profiles"][0]["values"].__setitem__(3, "x"),
    lambda d: d.update(domain=[1, 0, 0, 1]),
    lambda d: d.update(directions=[[1, 0], [2, 0], [1, 1]]),
    lambda d: d["profiles"][0].update(step=-1.0),
])
def test_corrupt_documents_raise_format_error(dec, mutation):
    with pytest.raises(FormatError):
        fileio.decomposition_from_text(_mutate(dec, mutation))


def test_truncated_file(dec, tmp_path):
    text = fileio.decomposition_to_text(dec)
    path = tmp_path / "t.json"
    path.write_text(text[: len(text) // 2])
    with pytest.raises(FormatError):
        fileio.read_decomposition(path)
    with pytest.raises(FormatError):
        fileio.read_decomposition(tmp_path / "missing.json")


# -- sample ingestion ----------------------------------------------------------------

def _grid_rows(n=101, f=lambda x, y: np.sin(x + y)):
    xs = np.linspace(-1, 1, n)
    X, Y = np.meshgrid(xs, xs)
    return X.ravel(), Y.ravel(), f(X, Y).ravel()


def _write(path, rows, header="x,y,f"):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for x, y, v in zip(*rows):
            fh.write(f"{fileio.format_float(x)},{fileio.format_float(y)},"
                     f"{fileio.format_float(v)}\n")


def test_ingest_complete_grid_in_any_order(tmp_path):
    x, y, f = _grid_rows()
    order = np.random.default_rng(0).permutation(len(x))
    path = tmp_path / "g.csv"
    _write(path, (x[order], y[order], f[order]))
    G = fileio.ingest_samples(path)
    assert G.values.shape == (101, 101)
    k = 1234
    assert G(x[k], y[k]) == f[k]  # exact at nodes
    assert G(0.013, -0.4) == pytest.approx(np.sin(0.013 - 0.4), abs=1e-4)


def test_write_samples_round_trip(tmp_path):
    X, Y = SQ.mesh(33)
    path = tmp_path / "s.csv"
    fileio.write_samples(path, X, Y, X * Y)
    G = fileio.ingest_samples(path)
    np.testing.assert_array_equal(G.values, X * Y)


def test_missing_row_is_named(tmp_path):
    x, y, f = _grid_rows(41)
    ys = np.unique(y)
    keep = y != ys[7]
    # keep the x and y axes complete by leaving one point of the row in place
    keep[np.flatnonzero(y == ys[7])[0]] = True
    path = tmp_path / "g.csv"
    _write(path, (x[keep], y[keep], f[keep]))
    with pytest.raises(IngestError, match="missing point") as info:
        fileio.ingest_samples(path)
    assert repr(ys[7]) in str(info.value)


def test_spacing_jitter_is_rejected(tmp_path):
    n = 41
    xs = np.linspace(-1, 1, n)
    xs[10] += 1e-3 * (xs[1] - xs[0])
    X, Y = np.meshgrid(xs, np.linspace(-1, 1, n))
    path = tmp_path / "g.csv"
    _write(path, (X.ravel(), Y.ravel(), np.sin(X + Y).ravel()))
    with pytest.raises(IngestError, match="not uniform"):
        fileio.ingest_samples(path)


def test_too_small_grid(tmp_path):
    path = tmp_path / "g.csv"
    _write(path, _grid_rows(20))
    with pytest.raises(IngestError, match="at least 33x33"):
        fileio.ingest_samples(path)


def test_bad_header_and_fields(tmp_path):
    path = tmp_path / "g.csv"
    _write(path, _grid_rows(33), header="a,b,c")
    with pytest.raises(IngestError, match="header"):
        fileio.ingest_samples(path)
    path.write_text("x,y,f\n0,0,1\n0,1,oops\n")
    with pytest.raises(IngestError, match="non-numeric"):
        fileio.ingest_samples(path)
    path.write_text("x,y,f\n0,0\n")
    with pytest.raises(IngestError, match="3 fields"):
        fileio.ingest_samples(path)


def test_duplicate_point(tmp_path):
    x, y, f = _grid_rows(33)
    path = tmp_path / "g.csv"
    _write(path, (np.append(x, x[0]), np.append(y, y[0]), np.append(f, f[0])))
    with pytest.raises(IngestError, match="duplicate"):
        fileio.ingest_samples(path)


# -- plot data -------------------------------------------------------------------------

def test_plot_data_files(dec, tmp_path):
    F = ExprFunction.from_text(dec.source_expression)
    files = fileio.write_plot_data(tmp_path / "plots", dec, F, grid_n=21)
    assert [p.split("/")[-1] for p in files] == [
        "profile_0.txt", "profile_1.txt", "profile_2.txt", "reconstruction.txt"]
    prof = np.loadtxt(files[0])
    assert prof.shape == (129, 2)
    np.testing.assert_array_equal(prof[:, 1], dec.profiles[0].values)
    rec = np.loadtxt(files[-1])
    assert rec.shape == (21 * 21, 5)
    np.testing.assert_allclose(rec[:, 2] - rec[:, 3], rec[:, 4], atol=1e-15)
    assert np.max(np.abs(rec[:, 4])) <= 1e-6
