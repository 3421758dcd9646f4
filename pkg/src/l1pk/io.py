"""HOT1 tensor files, trace CSVs, flat key-value files and problem directories.

HOT1 layout: the magic ``HOT1``, one unsigned byte ``m``, ``m``
little-endian uint32 dims, one unsigned byte scalar code (0 = float64,
1 = complex128 as interleaved re/im), then the payload in little-endian
column-major order.
"""

import csv
import math
import os
import struct

import numpy as np

from .errors import FormatError

MAGIC = b"HOT1"
MAX_ORDER = 8
TRACE_HEADER = ("iter", "re", "rel_change", "objective", "bregman", "elapsed_ms", "block")


def write_hot1(path, T):
    T = np.asarray(T)
    if not 1 <= T.ndim <= MAX_ORDER:
        raise FormatError(f"{path}: HOT1 supports orders 1..{MAX_ORDER}, got {T.ndim}")
    if any(d < 1 or d >= 2 ** 32 for d in T.shape):
        raise FormatError(f"{path}: dims {T.shape} not representable")
    if np.iscomplexobj(T):
        code, dtype = 1, "<c16"
    else:
        code, dtype = 0, "<f8"
    header = MAGIC + struct.pack(f"<B{T.ndim}IB", T.ndim, *T.shape, code)
    payload = np.asarray(T, dtype=dtype).ravel(order="F").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_hot1(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 6 or data[:4] != MAGIC:
        raise FormatError(f"{path}: not a HOT1 file (bad magic)")
    m = data[4]
    if not 1 <= m <= MAX_ORDER:
        raise FormatError(f"{path}: unsupported order {m}")
    head = 5 + 4 * m + 1
    if len(data) < head:
        raise FormatError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{m}I", data, 5)
    code = data[head - 1]
    if code not in (0, 1):
        raise FormatError(f"{path}: unknown scalar code {code}")
    if any(d == 0 for d in dims):
        raise FormatError(f"{path}: zero dimension in {dims}")
    count = math.prod(dims)
    itemsize = 16 if code else 8
    expected = count * itemsize
    if expected > 2 ** 48:
        raise FormatError(f"{path}: dims {dims} overflow")
    if len(data) - head != expected:
        raise FormatError(
            f"{path}: payload has {len(data) - head} bytes, expected {expected}"
        )
    arr = np.frombuffer(data, dtype="<c16" if code else "<f8", offset=head, count=count)
    native = np.complex128 if code else np.float64
    return arr.astype(native).reshape(dims, order="F")


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def write_trace_csv(path, trace, timing=True):
    """Write one row per trace record; ``timing=False`` leaves ``elapsed_ms`` empty."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for r in trace.records:
            block = "" if r.block is None else ";".join(str(i) for i in r.block)
            w.writerow([
                r.iteration, _fmt(r.re), _fmt(r.rel_change), _fmt(r.objective),
                _fmt(r.bregman), _fmt(r.elapsed_ms) if timing else "", block,
            ])


def read_trace_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != TRACE_HEADER:
        raise FormatError(f"{path}: missing trace header")
    return [dict(zip(TRACE_HEADER, row)) for row in rows[1:]]


def read_kv(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out


def write_kv(path, mapping):
    with open(path, "w") as fh:
        for key, value in mapping.items():
            fh.write(f"{key} = {value}\n")


def dims_str(dims):
    return ",".join(str(int(d)) for d in dims)


def parse_dims(text):
    try:
        dims = tuple(int(s) for s in str(text).split(",") if s.strip())
    except ValueError:
        raise FormatError(f"bad dims {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise FormatError(f"bad dims {text!r}")
    return dims


def write_problem_dir(directory, problem, manifest):
    """Write ``A.hot1``, ``B.hot1``, optional ``X_true.hot1`` and ``manifest.txt``."""
    os.makedirs(directory, exist_ok=True)
    write_hot1(os.path.join(directory, "A.hot1"), problem.A)
    write_hot1(os.path.join(directory, "B.hot1"), problem.B)
    if problem.ground_truth is not None:
        write_hot1(os.path.join(directory, "X_true.hot1"), problem.ground_truth)
    info = {"a_dims": dims_str(problem.A.shape), "x_dims": dims_str(problem.x_shape),
            "mode": problem.mode}
    info.update(manifest)
    write_kv(os.path.join(directory, "manifest.txt"), info)


def read_problem_dir(directory, transform_selector=None, mode=None):
    """Load a problem directory written by :func:`write_problem_dir`."""
    from .solvers import RecoveryProblem
    from .transforms import make_transform

    manifest_path = os.path.join(directory, "manifest.txt")
    manifest = read_kv(manifest_path) if os.path.exists(manifest_path) else {}
    A = read_hot1(os.path.join(directory, "A.hot1"))
    B = read_hot1(os.path.join(directory, "B.hot1"))
    truth_path = os.path.join(directory, "X_true.hot1")
    truth = read_hot1(truth_path) if os.path.exists(truth_path) else None
    selector = transform_selector or manifest.get("transform", "dft")
    L = make_transform(selector, A.shape[2:])
    return RecoveryProblem(A, B, L, mode or manifest.get("mode", "sparse"), truth), manifest
