"""File formats: grid field containers, trajectory tables, JSON reports.

Everything here is deterministic: keys are sorted, floats are written with
17 significant digits (enough to round-trip float64 exactly), and nothing
records wall-clock state.  Rerunning the same computation must reproduce
the same bytes.

Grid container layout: a single JSON object with a ``grid`` header
(active_axes, shape, spacing, origin) and a ``fields`` map from field name
to the flattened sample list in row-major (C) order over the grid shape.
Non-finite samples (masked quantum-potential points) are stored as null.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .dynamics import Trajectory
from .errors import ContractError
from .grids import GridSpec

__all__ = [
    "GRID_FORMAT",
    "save_grid_fields",
    "load_grid_fields",
    "save_trajectory_csv",
    "load_trajectory_csv",
    "save_slice_csv",
    "write_json_report",
    "format_float",
]

GRID_FORMAT = "dirachydro-grid-v1"

TRAJECTORY_COLUMNS = ("s", "t", "x", "y", "z", "u0", "u1", "u2", "u3",
                      "sx", "sy", "sz")


def format_float(value):
    """17 significant digits; round-trips float64 bit-exactly."""
    return f"{float(value):.17g}"


def _jsonable_samples(values):
    flat = np.asarray(np.ma.filled(values, np.nan), dtype=np.float64).ravel()
    return [None if not math.isfinite(v) else v for v in flat.tolist()]


def save_grid_fields(path, spec, fields):
    """Write named real grid fields with their grid header as JSON."""
    payload_fields = {}
    for name, values in fields.items():
        arr = np.asarray(np.ma.filled(values, np.nan))
        if np.iscomplexobj(arr):
            raise ContractError(f"field {name!r} is complex; export parts separately")
        if arr.shape != spec.shape:
            raise ContractError(
                f"field {name!r} has shape {arr.shape}, grid is {spec.shape}"
            )
        payload_fields[name] = _jsonable_samples(arr)
    payload = {
        "format": GRID_FORMAT,
        "grid": {
            "active_axes": list(spec.active_axes),
            "shape": list(spec.shape),
            "spacing": list(spec.spacing),
            "origin": list(spec.origin),
        },
        "order": "row-major",
        "fields": payload_fields,
    }
    write_json_report(path, payload)


def load_grid_fields(path):
    """Read a grid container; returns (GridSpec, dict of arrays).

    Null samples come back as NaN.
    """
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != GRID_FORMAT:
        raise ContractError(f"not a {GRID_FORMAT} file: {path}")
    g = payload["grid"]
    spec = GridSpec(
        active_axes=tuple(g["active_axes"]),
        shape=tuple(g["shape"]),
        spacing=tuple(g["spacing"]),
        origin=tuple(g["origin"]),
    )
    fields = {}
    for name, flat in payload["fields"].items():
        arr = np.array(
            [np.nan if v is None else float(v) for v in flat], dtype=np.float64
        )
        if arr.size != int(np.prod(spec.shape)):
            raise ContractError(f"field {name!r} sample count does not match grid")
        fields[name] = arr.reshape(spec.shape)
    return spec, fields


def save_trajectory_csv(path, trajectory, extra_columns=None):
    """Trajectory table: s, event, four-velocity, rest-frame spin.

    ``extra_columns`` maps column name to a per-sample array (breakdown
    terms and the like); extras are appended after the fixed columns in
    the given order.
    """
    n = trajectory.s.shape[0]
    columns = list(TRAJECTORY_COLUMNS)
    data = [
        trajectory.s,
        trajectory.x[:, 0], trajectory.x[:, 1],
        trajectory.x[:, 2], trajectory.x[:, 3],
        trajectory.u[:, 0], trajectory.u[:, 1],
        trajectory.u[:, 2], trajectory.u[:, 3],
        trajectory.s_rest[:, 0], trajectory.s_rest[:, 1], trajectory.s_rest[:, 2],
    ]
    if extra_columns:
        for name, values in extra_columns.items():
            values = np.asarray(values, dtype=np.float64)
            if values.shape != (n,):
                raise ContractError(
                    f"extra column {name!r} has shape {values.shape}, need ({n},)"
                )
            columns.append(name)
            data.append(values)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for i in range(n):
            writer.writerow([format_float(col[i]) for col in data])


def load_trajectory_csv(path):
    """Read a trajectory table back into a Trajectory plus extras dict."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    if tuple(header[: len(TRAJECTORY_COLUMNS)]) != TRAJECTORY_COLUMNS:
        raise ContractError(f"unexpected trajectory columns: {header}")
    table = np.array(rows, dtype=np.float64)
    if table.ndim != 2 or table.shape[1] != len(header):
        raise ContractError("ragged trajectory table")
    trajectory = Trajectory(
        s=table[:, 0],
        x=table[:, 1:5],
        u=table[:, 5:9],
        s_rest=table[:, 9:12],
    )
    extras = {
        name: table[:, 12 + k]
        for k, name in enumerate(header[len(TRAJECTORY_COLUMNS):])
    }
    return trajectory, extras


def save_slice_csv(path, spec, fields, fixed=None):
    """Export a 1D or 2D slice of grid fields as CSV.

    ``fixed`` maps grid-axis position (index into the active axes) to the
    sample index held fixed there; the remaining one or two axes become
    coordinate columns (named t/x/y/z by spacetime axis), followed by one
    column per field in the given order.
    """
    fixed = dict(fixed or {})
    for ga in fixed:
        if not 0 <= ga < spec.ndim:
            raise ContractError(f"fixed axis {ga} outside grid of {spec.ndim} axes")
    free = [ga for ga in range(spec.ndim) if ga not in fixed]
    if len(free) not in (1, 2):
        raise ContractError(f"slice must keep 1 or 2 axes free, got {len(free)}")

    index = tuple(
        slice(None) if ga in free else int(fixed[ga]) for ga in range(spec.ndim)
    )
    coords = spec.axis_coordinates()
    names = [spec.axis_names[ga] for ga in free]
    sliced = {}
    for name, values in fields.items():
        arr = np.asarray(np.ma.filled(values, np.nan), dtype=np.float64)
        if arr.shape != spec.shape:
            raise ContractError(
                f"field {name!r} has shape {arr.shape}, grid is {spec.shape}"
            )
        sliced[name] = arr[index]

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + list(sliced))
        if len(free) == 1:
            axis_values = coords[free[0]]
            for i, c in enumerate(axis_values):
                writer.writerow(
                    [format_float(c)]
                    + [format_float(sliced[name][i]) for name in sliced]
                )
        else:
            a_values = coords[free[0]]
            b_values = coords[free[1]]
            for i, a in enumerate(a_values):
                for j, b in enumerate(b_values):
                    writer.writerow(
                        [format_float(a), format_float(b)]
                        + [format_float(sliced[name][i, j]) for name in sliced]
                    )


def write_json_report(path, payload):
    """Sorted-keys, indented JSON with a trailing newline; NaN-free."""
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
