import struct

import numpy as np
import pytest

from l1pk.errors import FormatError
from l1pk.experiments import SyntheticSpec, gen_sparse_problem
from l1pk.io import (parse_dims, read_hot1, read_kv, read_problem_dir, read_trace_csv,
                     write_hot1, write_kv, write_problem_dir, write_trace_csv)
from l1pk.solvers import SolverConfig, solve
from l1pk.transforms import make_dft


def test_roundtrip_real_bitwise(tmp_path, rng):
    T = rng.standard_normal((3, 2, 4, 5))
    write_hot1(tmp_path / "t.hot1", T)
    back = read_hot1(tmp_path / "t.hot1")
    assert back.dtype == np.float64 and back.shape == T.shape
    assert back.tobytes() == T.tobytes()


def test_roundtrip_complex_bitwise(tmp_path, rng):
    T = rng.standard_normal((2, 3, 2)) + 1j * rng.standard_normal((2, 3, 2))
    write_hot1(tmp_path / "c.hot1", T)
    raw = (tmp_path / "c.hot1").read_bytes()
    assert raw[4] == 3 and raw[5 + 12] == 1
    back = read_hot1(tmp_path / "c.hot1")
    assert back.dtype == np.complex128
    np.testing.assert_array_equal(back, T)


def test_layout_is_column_major(tmp_path):
    T = np.arange(6.0).reshape(2, 3)
    write_hot1(tmp_path / "m.hot1", T)
    raw = (tmp_path / "m.hot1").read_bytes()
    assert raw[:4] == b"HOT1"
    assert struct.unpack("<2I", raw[5:13]) == (2, 3)
    payload = np.frombuffer(raw[14:], "<f8")
    np.testing.assert_array_equal(payload, T.ravel(order="F"))


def test_bad_files(tmp_path, rng):
    good = tmp_path / "g.hot1"
    write_hot1(good, rng.standard_normal((2, 2)))
    raw = good.read_bytes()
    cases = {
        "magic.hot1": b"XXXX" + raw[4:],
        "short.hot1": raw[:-3],
        "long.hot1": raw + b"\0" * 8,
        "code.hot1": raw[:13] + b"\x07" + raw[14:],
        "zero.hot1": raw[:5] + struct.pack("<I", 0) + raw[9:],
        "huge.hot1": b"HOT1\x02" + struct.pack("<2I", 2 ** 32 - 1, 2 ** 32 - 1) + b"\0",
        "order.hot1": b"HOT1\x00\x00",
    }
    for name, data in cases.items():
        path = tmp_path / name
        path.write_bytes(data)
        with pytest.raises(FormatError, match=name):
            read_hot1(path)


def test_kv_roundtrip(tmp_path):
    write_kv(tmp_path / "c.txt", {"p": 2, "lambda": 0.001})
    (tmp_path / "c.txt").open("a").write("# comment\n\nmode = sparse  # trailing\n")
    assert read_kv(tmp_path / "c.txt") == {"p": "2", "lambda": "0.001", "mode": "sparse"}
    (tmp_path / "bad.txt").write_text("just words\n")
    with pytest.raises(FormatError):
        read_kv(tmp_path / "bad.txt")


def test_parse_dims():
    assert parse_dims("20,2,8,8") == (20, 2, 8, 8)
    for bad in ("", "a,b", "3,0"):
        with pytest.raises(FormatError):
            parse_dims(bad)


def test_trace_csv(tmp_path):
    L = make_dft((3, 2))
    prob = gen_sparse_problem(SyntheticSpec((4, 2, 3, 2), 3, seed=0), L)
    _, tr = solve(prob, SolverConfig(t=0.3, max_iters=5, tol=0.0, blocks=2))
    write_trace_csv(tmp_path / "t.csv", tr, timing=False)
    text = (tmp_path / "t.csv").read_text().splitlines()
    assert text[0] == "iter,re,rel_change,objective,bregman,elapsed_ms,block"
    rows = read_trace_csv(tmp_path / "t.csv")
    assert [r["iter"] for r in rows] == ["0", "1", "2", "3", "4", "5"]
    assert rows[0]["rel_change"] == "" and rows[0]["block"] == ""
    assert rows[1]["block"] == "0;1" and all(r["elapsed_ms"] == "" for r in rows)
    assert float(rows[-1]["re"]) == tr.re[-1]
    prob.ground_truth = None
    _, tr = solve(prob, SolverConfig(t=0.3, max_iters=2, tol=0.0))
    write_trace_csv(tmp_path / "n.csv", tr)
    rows = read_trace_csv(tmp_path / "n.csv")
    assert all(r["re"] == "" and r["bregman"] == "" for r in rows)
    assert rows[-1]["elapsed_ms"] != ""


def test_problem_dir_roundtrip(tmp_path):
    L = make_dft((3, 2))
    prob = gen_sparse_problem(SyntheticSpec((4, 2, 3, 2), 3, seed=0), L)
    write_problem_dir(tmp_path / "p", prob, {"transform": "dft", "seed": 0})
    back, manifest = read_problem_dir(tmp_path / "p")
    np.testing.assert_array_equal(back.A, prob.A)
    np.testing.assert_array_equal(back.ground_truth, prob.ground_truth)
    assert manifest["a_dims"] == "4,2,3,2" and back.mode == "sparse"
