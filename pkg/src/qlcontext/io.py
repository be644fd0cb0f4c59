"""Readers and writers for count tables, probability files, ensemble specs and reports.

Floats are written with ``repr`` precision, which round-trips every double
exactly; counts are written as integers.  Writes are atomic.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

import numpy as np

from .core import ContextualData, OutcomeSpace, Provenance
from .ensemble import CountTable, EnsembleSpec
from .errors import ParseError, SchemaError

COUNTS_JSON = "counts-json"
COUNTS_CSV = "counts-csv"
PROBABILITIES_JSON = "probabilities-json"
REPORT_JSON = "report-json"
FORMATS = (COUNTS_JSON, COUNTS_CSV, PROBABILITIES_JSON, REPORT_JSON)

CSV_COLUMNS = ("context", "observable", "outcome", "count")
CSV_CONTEXTS = ("context", "filtration_y1", "filtration_y2")

PathLike = Union[str, os.PathLike]


def atomic_write(path: PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def checksum(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


def complex_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def parse_complex_matrix(value, location: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(location, "expected a 2x2 matrix of [re, im] pairs") from None
    if arr.shape == (2, 2):
        return arr.astype(complex)
    if arr.shape != (2, 2, 2):
        raise SchemaError(location, f"expected a 2x2 matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


# ---------------------------------------------------------------- counts


def counts_to_dict(table: CountTable) -> dict:
    q = table.n_a_given_y
    d = {
        "context_id": table.context_id,
        "space": table.space.to_dict(),
        "counts": {
            "context": {"a": list(table.n_a), "b": list(table.n_b)},
            "filtration_y1": {"a": [q[0][0], q[1][0]]},
            "filtration_y2": {"a": [q[0][1], q[1][1]]},
        },
    }
    if table.seed is not None:
        d["seed"] = table.seed
    return d


def _count_pair(obj: dict, key: str, location: str) -> tuple[int, int]:
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(location, f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, list) or len(value) != 2:
        raise SchemaError(f"{location}.{key}", "expected a list of two counts")
    for i, c in enumerate(value):
        if isinstance(c, bool) or not isinstance(c, int):
            raise SchemaError(f"{location}.{key}[{i}]", f"count must be an integer, got {c!r}")
        if c < 0:
            raise SchemaError(f"{location}.{key}[{i}]", f"count must be nonnegative, got {c}")
    return value[0], value[1]


def space_from_dict(d: dict, location: str = "space") -> OutcomeSpace:
    if d is None:
        return OutcomeSpace()
    if not isinstance(d, dict):
        raise SchemaError(location, "expected an object")
    try:
        return OutcomeSpace.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise SchemaError(location, str(exc)) from None


def counts_from_dict(d: dict) -> CountTable:
    if not isinstance(d, dict) or "counts" not in d:
        raise SchemaError("counts", "missing field 'counts'")
    c = d["counts"]
    for key in CSV_CONTEXTS:
        if not isinstance(c, dict) or key not in c:
            raise SchemaError(f"counts.{key}", "missing context block")
    n_a = _count_pair(c["context"], "a", "counts.context")
    n_b = _count_pair(c["context"], "b", "counts.context")
    f1 = _count_pair(c["filtration_y1"], "a", "counts.filtration_y1")
    f2 = _count_pair(c["filtration_y2"], "a", "counts.filtration_y2")
    seed = d.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise SchemaError("seed", f"seed must be an integer, got {seed!r}")
    return CountTable(
        n_a, n_b, ((f1[0], f2[0]), (f1[1], f2[1])),
        seed=seed,
        context_id=str(d.get("context_id", "C")),
        space=space_from_dict(d.get("space")),
    )


def counts_to_csv(table: CountTable) -> str:
    s = table.space
    q = table.n_a_given_y
    rows = [
        ("context", "a", s.a_labels[0], table.n_a[0]),
        ("context", "a", s.a_labels[1], table.n_a[1]),
        ("context", "b", s.b_labels[0], table.n_b[0]),
        ("context", "b", s.b_labels[1], table.n_b[1]),
        ("filtration_y1", "a", s.a_labels[0], q[0][0]),
        ("filtration_y1", "a", s.a_labels[1], q[1][0]),
        ("filtration_y2", "a", s.a_labels[0], q[0][1]),
        ("filtration_y2", "a", s.a_labels[1], q[1][1]),
    ]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def counts_from_csv(text: str, space: OutcomeSpace | None = None) -> CountTable:
    """Parse the long-format counts CSV.

    Outcome labels are taken from ``space`` when given, otherwise from the order
    in which they first appear (a-values then default to (1, -1)).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV file") from None
    header = [h.strip() for h in header]
    if tuple(header) != CSV_COLUMNS:
        raise SchemaError("row 1", f"header must be {','.join(CSV_COLUMNS)}, got {','.join(header)}")
    records = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise SchemaError(f"row {line_no}", f"expected 4 columns, got {len(row)}")
        ctx, obs, outcome, raw = (cell.strip() for cell in row)
        if ctx not in CSV_CONTEXTS:
            raise SchemaError(f"row {line_no}", f"unknown context {ctx!r}")
        if obs not in ("a", "b") or (obs == "b" and ctx != "context"):
            raise SchemaError(f"row {line_no}", f"observable {obs!r} not allowed under {ctx!r}")
        try:
            count = int(raw)
        except ValueError:
            raise SchemaError(f"row {line_no}", f"count must be an integer, got {raw!r}") from None
        if count < 0:
            raise SchemaError(f"row {line_no}", f"count must be nonnegative, got {count}")
        records.append((line_no, ctx, obs, outcome, count))

    def labels(obs):
        seen = []
        for _, _, o, lab, _ in records:
            if o == obs and lab not in seen:
                seen.append(lab)
        return seen

    if space is None:
        a_labels, b_labels = labels("a"), labels("b")
        if len(a_labels) != 2 or len(b_labels) != 2:
            raise SchemaError("outcome", f"need two a-outcomes and two b-outcomes, got {a_labels} and {b_labels}")
        space = OutcomeSpace(tuple(a_labels), tuple(b_labels))
    cells: dict[tuple[str, str, int], int] = {}
    for line_no, ctx, obs, lab, count in records:
        names = space.a_labels if obs == "a" else space.b_labels
        if lab not in names:
            raise SchemaError(f"row {line_no}", f"unknown outcome {lab!r} for observable {obs}")
        key = (ctx, obs, names.index(lab))
        if key in cells:
            raise SchemaError(f"row {line_no}", f"duplicate entry for {ctx}/{obs}/{lab}")
        cells[key] = count
    wanted = [(c, "a", i) for c in CSV_CONTEXTS for i in (0, 1)] + [("context", "b", i) for i in (0, 1)]
    for key in wanted:
        if key not in cells:
            raise SchemaError("rows", f"missing count for {key[0]}/{key[1]}/outcome {key[2] + 1}")
    return CountTable(
        (cells["context", "a", 0], cells["context", "a", 1]),
        (cells["context", "b", 0], cells["context", "b", 1]),
        (
            (cells["filtration_y1", "a", 0], cells["filtration_y2", "a", 0]),
            (cells["filtration_y1", "a", 1], cells["filtration_y2", "a", 1]),
        ),
        space=space,
    )


# ---------------------------------------------------------- probabilities


def data_to_dict(data: ContextualData) -> dict:
    return {
        "context_id": data.context_id,
        "provenance": data.provenance.value,
        "space": data.space.to_dict(),
        "pa": data.pa.tolist(),
        "pb": data.pb.tolist(),
        "P": data.P.tolist(),
    }


def _float_array(d: dict, key: str, shape: tuple, location: str) -> np.ndarray:
    if key not in d:
        raise SchemaError(location, f"missing field {key!r}")
    try:
        arr = np.array(d[key], dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{location}.{key}", "expected numbers") from None
    if arr.shape != shape:
        raise SchemaError(f"{location}.{key}", f"expected shape {list(shape)}, got {list(arr.shape)}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{location}.{key}", "values must be finite")
    return arr


def data_from_dict(d: dict, location: str = "$") -> ContextualData:
    if not isinstance(d, dict):
        raise SchemaError(location, "expected an object")
    try:
        provenance = Provenance(d.get("provenance", "analytic"))
    except ValueError:
        raise SchemaError(f"{location}.provenance", f"unknown provenance {d.get('provenance')!r}") from None
    return ContextualData.from_arrays(
        _float_array(d, "pa", (2,), location),
        _float_array(d, "pb", (2,), location),
        _float_array(d, "P", (2, 2), location),
        str(d.get("context_id", "C")),
        space_from_dict(d.get("space"), f"{location}.space"),
        provenance,
    )


def spec_from_dict(d: dict) -> EnsembleSpec:
    try:
        return EnsembleSpec.from_dict(d)
    except KeyError as exc:
        raise SchemaError(str(exc.args[0]), "missing field") from None
    except (TypeError, ValueError) as exc:
        raise SchemaError("spec", str(exc)) from None


# ------------------------------------------------------------------ input


def read_json(path: PathLike) -> tuple[Any, bytes]:
    raw = read_bytes(path)
    try:
        return json.loads(raw.decode("utf-8")), raw
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None


def detect_format(path: PathLike, obj: Any = None) -> str:
    if str(path).lower().endswith(".csv"):
        return COUNTS_CSV
    if isinstance(obj, dict):
        if "report" in obj or obj.get("schema", "").startswith("qlcontext.report"):
            return REPORT_JSON
        if "counts" in obj:
            return COUNTS_JSON
        if "pa" in obj:
            return PROBABILITIES_JSON
    raise SchemaError("$", "cannot tell the input format; pass it explicitly")


def load_input(path: PathLike, fmt: str | None = None) -> Union[CountTable, ContextualData]:
    """Read counts or probabilities from disk.

    Reports written by ``analyze`` are accepted as input too: the counts they
    embed are returned when present, otherwise their contextual data.
    """
    if fmt is not None and fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == COUNTS_CSV or (fmt is None and str(path).lower().endswith(".csv")):
        raw = read_bytes(path)
        try:
            text = raw.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
        return counts_from_csv(text)
    obj, _ = read_json(path)
    fmt = fmt or detect_format(path, obj)
    if fmt == COUNTS_JSON:
        return counts_from_dict(obj)
    if fmt == PROBABILITIES_JSON:
        return data_from_dict(obj)
    if fmt == REPORT_JSON:
        if obj.get("counts") is not None:
            return counts_from_dict(obj["counts"])
        return data_from_dict(obj.get("data"), "data")
    raise SchemaError("$", f"format {fmt!r} cannot be loaded as analysis input")
