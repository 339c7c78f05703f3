import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.apps import apps

from .inequalities import BellInequality, InequalityError
from .polytope import VertexSet, vertex_rows
from .scenario import Behavior, BehaviorError, Scenario, to_rational

FLOAT_DIGITS = 12


# --------------------------------------------------------------------------- #
# Formatting
# --------------------------------------------------------------------------- #

def format_number(value):
    """
    Render a number for JSON output.

    Fractions become "p/q" strings (integers stay "p"), floats are rounded to a
    fixed number of digits so reruns produce identical files.

    Args:
        value: Fraction, int, float or numpy scalar

    Returns:
        str or float
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    return round(value, FLOAT_DIGITS) + 0.0


def to_jsonable(payload):
    """Recursively convert Fractions, numpy values and tuples for `json.dumps`."""
    if isinstance(payload, dict):
        return {str(k): to_jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(v) for v in payload]
    if isinstance(payload, np.ndarray):
        return [to_jsonable(v) for v in payload.tolist()]
    if isinstance(payload, (Fraction, float, int, np.floating, np.integer, np.bool_)):
        return format_number(payload)
    return payload


def dumps(payload) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)


def digits(values) -> str:
    return "".join(str(int(v)) for v in values)


# --------------------------------------------------------------------------- #
# Behavior and inequality files
# --------------------------------------------------------------------------- #

def behavior_to_dict(behavior: Behavior) -> dict:
    return {
        "scenario": behavior.scenario.as_dict(),
        "mode": behavior.numeric_mode,
        "p": [[format_number(v) for v in row] for row in behavior.table.tolist()],
    }


def behavior_from_dict(payload: dict) -> Behavior:
    """
    Read the behavior JSON layout: scenario, mode and the d^N x M^N table "p".

    Raises:
        BehaviorError: if a key is missing or the table does not validate.
    """
    try:
        sc = payload["scenario"]
        scenario = Scenario(int(sc["N"]), int(sc["M"]), int(sc["d"]))
        mode = payload.get("mode", "rational")
        rows = payload["p"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BehaviorError(f"behavior JSON is missing or has a bad field: {exc}") from exc
    if mode == "rational":
        try:
            entries = [[to_rational(v) for v in row] for row in rows]
        except (ValueError, ZeroDivisionError) as exc:
            raise BehaviorError(f"behavior JSON has a malformed entry: {exc}") from exc
    elif mode == "float":
        entries = [[float(v) for v in row] for row in rows]
    else:
        raise BehaviorError(f"unknown numeric mode {mode!r}")
    return Behavior(scenario, entries, mode)


def _read_json(path, error_class):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise error_class(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise error_class(f"{path} is not valid JSON: {exc}") from exc


def load_behavior(path) -> Behavior:
    return behavior_from_dict(_read_json(path, BehaviorError))


def load_inequality(path) -> BellInequality:
    payload = _read_json(path, InequalityError)
    if not isinstance(payload, dict):
        raise InequalityError(f"{path} must hold an object with 'scenario' and 'terms'")
    return BellInequality.from_dict(payload)


def write_vertex_csv(vertices: VertexSet, stream) -> int:
    """
    Write one row per table entry of every vertex.

    Args:
        vertices: VertexSet to export
        stream: Text stream (a command's stdout or an open file)

    Returns:
        int: Number of data rows written
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["vertex", "a", "x", "p"])
    rows = vertex_rows(vertices)
    for vid, a, x, value in rows:
        writer.writerow([vid, a, x, format_number(value)])
    return len(rows)


# --------------------------------------------------------------------------- #
# Persistence
# --------------------------------------------------------------------------- #

def batch_insert_runs(dataset, batch_size=100, verbose=False):
    """
    Batch inserts certification runs into the database using bulk operations.

    Args:
        dataset (list): List of dictionaries with CertificationRun fields
            (command, parameters, result, passed)
        batch_size (int): Rows per bulk_create call (default: 100)
        verbose (bool): Enable progress output if True

    Returns:
        int: Total number of records processed
    """
    CertificationRun = apps.get_model('certify', 'CertificationRun')

    for i in range(0, len(dataset), batch_size):
        batch_chunk = dataset[i:i + batch_size]
        runs = [
            CertificationRun(
                command=data["command"],
                parameters=to_jsonable(data.get("parameters", {})),
                result=to_jsonable(data.get("result", {})),
                passed=data.get("passed", True),
            )
            for data in batch_chunk
        ]
        CertificationRun.objects.bulk_create(runs)
        if verbose:
            print(f"Completed batch: {i} to {i + batch_size}")
    if verbose:
        print(f"Processed {len(dataset)} certification runs")
    return len(dataset)
