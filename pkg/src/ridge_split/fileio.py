"""Text encodings, the decomposition file format, and sample-grid ingestion.

Decomposition files are JSON documents. Every float is written with 17
significant digits, so a double survives the trip bit for bit. Key order is
fixed, so write -> read -> write reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

from .calculus import GridFunction, Rect, SampledProfile
from .decompose import Decomposition
from .errors import CalculusError, DirectionError, FormatError, IngestError
from .geometry import validate_directions

FORMAT_VERSION = 1
MIN_GRID_SIDE = 33


# -- flag encodings ----------------------------------------------------------

def _float(text: str, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise FormatError(f"{what}: {text!r} is not a number") from None
    if not math.isfinite(v):
        raise FormatError(f"{what}: {text!r} is not finite")
    return v


def parse_pairs(text: str, what: str = "directions") -> list[tuple[float, float]]:
    """"a,b;a,b;..." -> [(a, b), ...]."""
    if not text or not text.strip():
        raise FormatError(f"{what}: empty encoding")
    pairs = []
    for i, chunk in enumerate(text.split(";")):
        parts = chunk.split(",")
        if not chunk.strip() or len(parts) != 2:
            raise FormatError(f"{what}: entry {i} ({chunk!r}) must be two comma-separated numbers")
        pairs.append((_float(parts[0], what), _float(parts[1], what)))
    return pairs


def parse_floats(text: str, what: str, count: int | None = None) -> list[float]:
    parts = text.split(",") if text and text.strip() else []
    if not parts or (count is not None and len(parts) != count):
        raise FormatError(f"{what}: expected {count or 'some'} comma-separated numbers")
    return [_float(p, what) for p in parts]


def parse_domain(text: str) -> Rect:
    vals = parse_floats(text, "domain", 4)
    try:
        return Rect.of(vals)
    except CalculusError as err:
        raise FormatError(str(err)) from None


def format_float(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise FormatError(f"cannot serialize non-finite value {v!r}")
    if v == 0.0 and math.copysign(1.0, v) < 0:
        return "-0.0"  # "-0" would come back as the integer 0
    return format(v, ".17g")


# -- decomposition files -----------------------------------------------------

def _emit(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_emit(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(_emit(v) for v in seq) + "]"
        if not seq:
            return "[]"
        items = [pad + "  " + _emit(v, indent + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    return json.dumps(str(obj))


def decomposition_to_text(dec: Decomposition) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "method": dec.method,
        "domain": list(dec.domain),
        "directions": [[d.a, d.b] for d in dec.directions],
        "reconstruction_sup_error": dec.reconstruction_sup_error,
        "separation_defect": dec.separation_defect,
    }
    if dec.source_expression is not None:
        doc["source_expression"] = dec.source_expression
    doc["metadata"] = dec.metadata
    doc["profiles"] = [
        {
            "direction_index": i,
            "t_min": p.t_min,
            "t_max": p.t_max,
            "step": p.step,
            "base_point": p.base_point,
            "interpolation": p.interpolation,
            "values": p.values,
        }
        for i, p in enumerate(dec.profiles)
    ]
    return _emit(doc) + "\n"


def write_decomposition(path, dec: Decomposition) -> None:
    Path(path).write_text(decomposition_to_text(dec), encoding="utf-8")


def _field(doc: dict, key: str, kind=None):
    if key not in doc:
        raise FormatError(f"decomposition file lacks field {key!r}")
    val = doc[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise FormatError(f"field {key!r} must be a number")
        return float(val)
    if kind is not None and not isinstance(val, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return val


def decomposition_from_text(text: str) -> Decomposition:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"decomposition file is not valid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise FormatError("decomposition file must hold a JSON object")
    version = _field(doc, "format_version", int)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version}")
    try:
        ds = validate_directions(_field(doc, "directions", list))
        domain = Rect.of(_field(doc, "domain", list))
    except (DirectionError, CalculusError, TypeError, ValueError) as err:
        raise FormatError(f"bad directions or domain: {err}") from None
    records = _field(doc, "profiles", list)
    if len(records) != len(ds):
        raise FormatError(f"{len(records)} profiles for {len(ds)} directions")
    profiles = [None] * len(ds)
    for rec in records:
        if not isinstance(rec, dict):
            raise FormatError("profile records must be objects")
        i = _field(rec, "direction_index", int)
        if not 0 <= i < len(ds) or profiles[i] is not None:
            raise FormatError(f"bad or repeated direction_index {i}")
        values = _field(rec, "values", list)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            raise FormatError(f"profile {i}: values must be numbers")
        try:
            profiles[i] = SampledProfile(
                _field(rec, "t_min", float), _field(rec, "t_max", float),
                _field(rec, "step", float), np.array(values, dtype=float),
                _field(rec, "base_point", float), rec.get("interpolation", "linear"))
        except CalculusError as err:
            raise FormatError(f"profile {i}: {err}") from None
    method = _field(doc, "method", str)
    source = doc.get("source_expression")
    return Decomposition(ds, tuple(profiles), domain, method,
                         _field(doc, "reconstruction_sup_error", float),
                         _field(doc, "separation_defect", float),
                         doc.get("metadata", {}), source)


def read_decomposition(path) -> Decomposition:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise FormatError(f"cannot read {path}: {err}") from None
    return decomposition_from_text(text)


# -- sample grids --------------------------------------------------------------

def write_samples(path, X, Y, F) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("x,y,f\n")
        for x, y, f in zip(np.ravel(X), np.ravel(Y), np.ravel(F)):
            fh.write(f"{format_float(x)},{format_float(y)},{format_float(f)}\n")


def _uniform_axis(vals: np.ndarray, name: str) -> None:
    gaps = np.diff(vals)
    ref = (vals[-1] - vals[0]) / (len(vals) - 1)
    worst = np.max(np.abs(gaps - ref)) / ref
    if worst > 1e-9:
        raise IngestError(f"{name} spacing is not uniform (relative deviation {worst:.2e})")


def ingest_samples(path, smoothness: int | None = 2) -> GridFunction:
    """Read an "x,y,f" table forming a complete uniform grid (rows in any order)."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as err:
        raise IngestError(f"cannot read {path}: {err}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["x", "y", "f"]:
            raise IngestError('samples file must start with the header "x,y,f"')
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise IngestError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise IngestError(f"line {lineno}: non-numeric field in {row}") from None
    if not rows:
        raise IngestError("samples file has no data rows")
    data = np.array(rows)
    if not np.all(np.isfinite(data)):
        raise IngestError("samples contain non-finite values")
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    if len(xs) < MIN_GRID_SIDE or len(ys) < MIN_GRID_SIDE:
        raise IngestError(
            f"grid is {len(xs)}x{len(ys)}; at least {MIN_GRID_SIDE}x{MIN_GRID_SIDE} is required")
    _uniform_axis(xs, "x")
    _uniform_axis(ys, "y")
    i = np.searchsorted(xs, data[:, 0])
    j = np.searchsorted(ys, data[:, 1])
    values = np.full((len(ys), len(xs)), np.nan)
    seen = np.zeros(values.shape, bool)
    dup = seen.copy()
    for a, b, f in zip(j, i, data[:, 2]):
        if seen[a, b]:
            dup[a, b] = True
        seen[a, b] = True
        values[a, b] = f
    if np.any(dup):
        a, b = np.argwhere(dup)[0]
        raise IngestError(f"duplicate sample at ({xs[b]!r}, {ys[a]!r})")
    if not np.all(seen):
        a, b = np.argwhere(~seen)[0]
        raise IngestError(
            f"grid is incomplete: missing point ({xs[b]!r}, {ys[a]!r}) "
            f"and {int((~seen).sum()) - 1} more")
    return GridFunction(xs, ys, values, smoothness)


# -- plot data -----------------------------------------------------------------

def write_plot_data(directory, dec: Decomposition, F, grid_n: int = 101) -> list[str]:
    """Two-column (t, value) files per profile plus one (x, y, F, rec, err) file."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for i, p in enumerate(dec.profiles):
        path = os.path.join(directory, f"profile_{i}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            for t, v in zip(p.nodes, p.values):
                fh.write(f"{format_float(t)} {format_float(v)}\n")
        written.append(path)
    X, Y = dec.domain.mesh(grid_n)
    fx = F(X, Y)
    rec = dec(X, Y)
    path = os.path.join(directory, "reconstruction.txt")
    with open(path, "w", encoding="utf-8") as fh:
        for row in zip(X.ravel(), Y.ravel(), fx.ravel(), rec.ravel(), (fx - rec).ravel()):
            fh.write(" ".join(format_float(v) for v in row) + "\n")
    written.append(path)
    return written
