"""Reading and writing games, play series, trajectories and per-subspace tables.

All writers go through :func:`atomic_write`, which writes to a temporary file
in the target directory and renames it into place. Floats are written with
``repr`` so every CSV re-parses to bit-identical values.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections import OrderedDict
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, InsufficientData
from .game import PayoffBimatrix
from .spectral import PairTable, pair_code, parse_pair, subspace_pairs
from .tsmetrics import PlaySeries, Session, Trajectory


def atomic_write(path, data: str | bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": "", "encoding": "utf-8"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(v) -> str:
    return repr(float(v))


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------------------------
# games


def load_game(path) -> PayoffBimatrix:
    with open(path, encoding="utf-8") as fh:
        return PayoffBimatrix.from_dict(json.load(fh))


def dump_game(game: PayoffBimatrix, path) -> Path:
    return atomic_write(path, json.dumps(game.to_dict(), indent=1) + "\n")


# ----------------------------------------------------------------------------
# play series

PLAY_HEADER = ("session", "round", "a_choice", "b_choice")


def play_series_to_csv(series: PlaySeries) -> str:
    rows = []
    for s in series.sessions:
        for r, (a, b) in enumerate(zip(s.a, s.b), start=1):
            rows.append((s.session_id, r, int(a), int(b)))
    return _csv_text(PLAY_HEADER, rows)


def parse_play_series(text: str, n_a: int = 4, n_b: int = 4, protocol: str = "fixed-pair") -> PlaySeries:
    """Parse ``session,round,a_choice,b_choice`` rows (1-based choices).

    Rows of a session need not be contiguous but their round numbers must be
    strictly increasing. Sessions keep their order of first appearance.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != PLAY_HEADER:
        raise ValueError(f"expected header {','.join(PLAY_HEADER)}")
    data: OrderedDict[str, list[tuple[int, int, int]]] = OrderedDict()
    for line_no, row in enumerate(reader, start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 4:
            raise ValueError(f"line {line_no}: expected 4 fields")
        sid = row[0].strip()
        rnd, a, b = (int(v) for v in row[1:])
        rows = data.setdefault(sid, [])
        if rows and rnd <= rows[-1][0]:
            raise ValueError(f"line {line_no}: rounds of session {sid!r} must strictly increase")
        rows.append((rnd, a, b))
    if not data:
        raise InsufficientData("play series has no rounds")
    sessions = tuple(
        Session(sid, np.array([r[1] for r in rows]), np.array([r[2] for r in rows]))
        for sid, rows in data.items()
    )
    return PlaySeries(sessions, n_a, n_b, protocol)


def load_play_series(path, n_a: int = 4, n_b: int = 4, protocol: str = "fixed-pair") -> PlaySeries:
    return parse_play_series(Path(path).read_text(encoding="utf-8"), n_a, n_b, protocol)


def dump_play_series(series: PlaySeries, path) -> Path:
    return atomic_write(path, play_series_to_csv(series))


# ----------------------------------------------------------------------------
# trajectories


def trajectory_to_csv(traj: Trajectory) -> str:
    header = ["t"] + [f"x{i}" for i in range(1, traj.dim + 1)]
    rows = ([_fmt(t)] + [_fmt(v) for v in x] for t, x in zip(traj.times, traj.states))
    return _csv_text(header, rows)


def parse_trajectory(text: str) -> Trajectory:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[0] != "t" or header[1:] != [f"x{i}" for i in range(1, len(header))]:
        raise ValueError("expected header t,x1..xs")
    rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    if rows.size == 0:
        raise InsufficientData("trajectory has no samples")
    return Trajectory(rows[:, 0], rows[:, 1:])


def dump_trajectory(traj: Trajectory, path) -> Path:
    return atomic_write(path, trajectory_to_csv(traj))


def load_trajectory(path) -> Trajectory:
    return parse_trajectory(Path(path).read_text(encoding="utf-8"))


# ----------------------------------------------------------------------------
# per-subspace tables


def pair_columns_to_csv(columns: Mapping[str, Sequence[float]], dim: int = 8) -> str:
    """One row per subspace pair (code in the first column), one column per entry of ``columns``."""
    codes = [pair_code(m, n, dim) for m, n in subspace_pairs(dim)]
    cols = {k: np.asarray(getattr(v, "values", v), dtype=float) for k, v in columns.items()}
    for k, v in cols.items():
        if len(v) != len(codes):
            raise DimensionError(f"column {k!r} has {len(v)} values, expected {len(codes)}")
    rows = ([c] + [_fmt(v[i]) for v in cols.values()] for i, c in enumerate(codes))
    return _csv_text(["pair", *cols], rows)


def parse_pair_columns(text: str) -> tuple[list[str], dict[str, np.ndarray]]:
    """Inverse of :func:`pair_columns_to_csv`: pair codes and a dict of columns."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[0] != "pair" or len(header) < 2:
        raise ValueError("expected a 'pair' column followed by value columns")
    codes, rows = [], []
    for row in reader:
        if not row:
            continue
        parse_pair(row[0])
        codes.append(row[0])
        rows.append([float(v) for v in row[1:]])
    arr = np.array(rows, dtype=float).reshape(len(rows), len(header) - 1)
    return codes, {h: arr[:, k] for k, h in enumerate(header[1:])}


def l_table_to_csv(table: PairTable) -> str:
    return pair_columns_to_csv({"L": table.values}, table.dim)


def load_pair_column(path, column: str | None = None) -> np.ndarray:
    """Values of one column (the first by default) of a per-subspace CSV."""
    _, cols = parse_pair_columns(Path(path).read_text(encoding="utf-8"))
    if column is None:
        return next(iter(cols.values()))
    if column not in cols:
        raise KeyError(f"column {column!r} not in {list(cols)}")
    return cols[column]


def dump_json(obj, path) -> Path:
    return atomic_write(path, json.dumps(obj, indent=1, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def complex_pairs(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]
