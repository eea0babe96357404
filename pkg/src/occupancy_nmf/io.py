"""File formats shared by the CLI stages.

CSVs are comma separated, UTF-8, with a header row and numbers written to 17
significant digits. JSON documents carry ``"schema": 1``. Every write goes
to a temporary file in the target directory and is renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .nmf import Factorization, NmfConfig

SCHEMA = 1


def fmt(x) -> str:
    return format(float(x), ".17g")


def atomic_write(path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_matrix(path, A, header) -> None:
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    if A.shape[1] != len(header):
        raise ValueError(f"{len(header)} header names for {A.shape[1]} columns")
    atomic_write(path, csv_text(header, ([fmt(x) for x in row] for row in A)))


def read_matrix(path) -> tuple[list[str], np.ndarray]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise InputError(f"file not found: {path}", path=str(path)) from None
    if not rows:
        raise InputError(f"{path} is empty", path=str(path))
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        A = np.array([[float(x) for x in r] for r in body], dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}", path=str(path)) from None
    if A.size and A.shape[1] != len(header):
        raise InputError(f"{path}: rows do not match header width", path=str(path))
    return header, A.reshape(len(body), len(header))


def _clean(obj):
    # NaN/inf are not valid JSON
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def write_json(path, payload: dict) -> None:
    doc = {"schema": SCHEMA, **_clean(payload)}
    atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"file not found: {path}", path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}", path=str(path)) from None
    if doc.get("schema") != SCHEMA:
        raise InputError(f"{path}: unsupported schema {doc.get('schema')!r}", path=str(path))
    return doc


def component_names(k: int) -> list[str]:
    return [f"component_{j + 1}" for j in range(k)]


def save_factorization(directory, fact: Factorization, day_labels, step_minutes: float, extra=None) -> None:
    directory = Path(directory)
    write_matrix(directory / "W.csv", fact.W, component_names(fact.k))
    write_matrix(directory / "H.csv", fact.H, list(day_labels))
    payload = {
        "config": fact.config.to_dict() if fact.config else None,
        "objective_trace": list(fact.objective_trace),
        "iterations": fact.iterations,
        "converged": fact.converged,
        "n": fact.W.shape[0],
        "m": fact.H.shape[1],
        "k": fact.k,
        "step_minutes": step_minutes,
        "day_labels": list(day_labels),
    }
    payload.update(extra or {})
    write_json(directory / "fit.json", payload)


def load_factorization(directory) -> tuple[Factorization, dict]:
    directory = Path(directory)
    meta = read_json(directory / "fit.json")
    _, W = read_matrix(directory / "W.csv")
    labels, H = read_matrix(directory / "H.csv")
    if W.shape[1] != H.shape[0]:
        raise InputError(f"W.csv has {W.shape[1]} components but H.csv has {H.shape[0]} rows")
    config = NmfConfig(**meta["config"]) if meta.get("config") else None
    fact = Factorization(
        W=W,
        H=H,
        objective_trace=tuple(meta.get("objective_trace", ())),
        iterations=meta.get("iterations", 0),
        converged=meta.get("converged", False),
        config=config,
    )
    meta.setdefault("day_labels", labels)
    return fact, meta
