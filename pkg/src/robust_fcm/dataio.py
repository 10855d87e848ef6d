"""Loading and saving datasets, PGM images and run results."""

from __future__ import annotations

import csv
import datetime as _dt
import json
import math
import os
import re

import numpy as np

from .core import Dataset, ModelConfig, RunResult

RESULT_SCHEMA_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message, row=None, col=None):
        where = "" if row is None else f" (row {row}" + ("" if col is None else f", column {col}") + ")"
        super().__init__(message + where)
        self.row = row
        self.col = col


class RaggedRows(ParseError):
    pass


class NonNumericFeature(ParseError):
    pass


class UnsupportedFormat(ValueError):
    pass


class TruncatedFile(ValueError):
    pass


class IoError(OSError):
    pass


def load_csv(path, label_column: int | None = None, header: bool = False) -> Dataset:
    """Read a comma-separated numeric table.

    ``label_column`` (e.g. ``-1`` for the last column) holds class names,
    mapped to 0..K-1 in order of first appearance. Every other cell must be
    a finite decimal number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        try:
            rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
        except csv.Error as exc:
            raise ParseError(str(exc)) from exc
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise ParseError("no data rows")
    width = len(rows[0])
    features, names = [], []
    for i, row in enumerate(rows, start=1 + int(header)):
        if len(row) != width:
            raise RaggedRows(f"expected {width} fields, got {len(row)}", row=i)
        cells = list(row)
        if label_column is not None:
            names.append(cells.pop(label_column).strip())
        vals = []
        for j, cell in enumerate(cells, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericFeature(f"non-numeric feature {cell.strip()!r}", row=i, col=j) from None
            if not math.isfinite(v):
                raise NonNumericFeature(f"non-finite feature {cell.strip()!r}", row=i, col=j)
            vals.append(v)
        features.append(vals)
    if not features[0]:
        raise ParseError("no feature columns")
    labels = None
    if label_column is not None:
        codes: dict[str, int] = {}
        labels = np.array([codes.setdefault(n, len(codes)) for n in names], dtype=np.int64)
    return Dataset(np.array(features, dtype=float), labels=labels)


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(buf: bytes, count: int):
    pos = 0
    out = []
    for _ in range(count):
        m = _TOKEN.match(buf, pos)
        if m is None:
            raise TruncatedFile("incomplete PGM header")
        out.append(m.group(1))
        pos = m.end()
    return out, pos


def load_pgm(path) -> Dataset:
    """Read a grayscale P2 or P5 PGM (maxval <= 255) as a one-feature image dataset."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic = buf[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormat(f"unsupported netpbm magic {magic!r}; only P2/P5 grayscale")
    (_, w, h, maxval), pos = _header_tokens(buf, 4)
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise UnsupportedFormat("malformed PGM header") from None
    if not 0 < maxval <= 255:
        raise UnsupportedFormat(f"maxval {maxval} not supported")
    n = w * h
    if magic == b"P5":
        raster = buf[pos + 1 : pos + 1 + n]
        if len(raster) < n:
            raise TruncatedFile(f"expected {n} pixels, found {len(raster)}")
        pix = np.frombuffer(raster, dtype=np.uint8)
    else:
        toks = buf[pos:].split()
        if len(toks) < n:
            raise TruncatedFile(f"expected {n} pixels, found {len(toks)}")
        pix = np.array([int(t) for t in toks[:n]])
    return Dataset(pix.astype(float), grid=(h, w))


def save_pgm(path, image) -> None:
    """Write a binary P5 PGM. Values are rounded and clipped to 0..255."""
    if isinstance(image, Dataset):
        arr = image.image()
    else:
        arr = np.asarray(image)
    pix = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    h, w = pix.shape
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(pix.tobytes())
    except OSError as exc:
        raise IoError(str(exc)) from exc


def label_image(labels, grid, n_clusters: int) -> np.ndarray:
    """Cluster ids as evenly spaced gray levels on 0..255."""
    levels = np.rint(np.linspace(0, 255, n_clusters)).astype(np.uint8)
    return levels[np.asarray(labels)].reshape(grid)


def synth_two_class_image(size: int = 64) -> Dataset:
    """Two-class test image: left half intensity 0, right half 128, with labels."""
    img = np.zeros((size, size))
    img[:, size // 2 :] = 128.0
    labels = (img > 0).astype(np.int64).ravel()
    return Dataset(img.ravel(), labels=labels, grid=(size, size))


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def result_record(result: RunResult, metrics: dict | None = None) -> dict:
    return {
        "schema_version": RESULT_SCHEMA_VERSION,
        "config": result.config_echo.to_dict(),
        "seed": int(result.seed_echo),
        "iterations": int(result.iterations_used),
        "converged": bool(result.converged),
        "objective_trace": [float(v) for v in result.final_state.objective_trace],
        "metrics": dict(metrics or {}),
        "hard_labels": [int(v) for v in result.hard_labels],
    }


def _now() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp for byte-reproducible outputs
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch else _dt.datetime.now(_dt.timezone.utc)
    return when.isoformat(timespec="seconds")


def save_result(path, result: RunResult, metrics: dict | None = None, timestamp: str | None = None) -> dict:
    """Write a run result as JSON (sorted keys, UTF-8) and return the record.

    The ``timestamp`` field is the current UTC time unless given, or unless
    ``SOURCE_DATE_EPOCH`` is set in the environment.
    """
    rec = result_record(result, metrics)
    rec["timestamp"] = timestamp or _now()
    write_json(path, rec)
    return rec


def write_json(path, record: dict) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise IoError(f"directory does not exist: {parent}")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(record, fh, sort_keys=True, indent=1, default=_jsonable)
            fh.write("\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_result(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        rec = json.load(fh)
    if rec.get("schema_version") != RESULT_SCHEMA_VERSION:
        raise ValueError(f"unsupported result schema {rec.get('schema_version')!r}")
    rec["config"] = ModelConfig.from_dict(rec["config"])
    return rec
