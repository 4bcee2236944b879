"""Checksum-pinned reference data shipped with the package.

The files under ``data/`` are transcriptions of published tables for the
O'Neill 4x4 game. Each file's SHA-256 is pinned here; a loader refuses a
file whose digest differs, so a silent edit cannot change a reproduction
result. Any deliberate correction must bump :data:`FIXTURE_VERSION` and the
pinned digest together.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import FixtureError
from .game import PayoffBimatrix
from .spectral import EigencycleSet, EigenPair, subspace_pairs, pair_code

FIXTURE_VERSION = 1

CHECKSUMS = {
    "oneill.json": "19d43377bfa12bb8165ff4147516f46f7ac627866fbaf9b4528c6bc3b3513573",
    "matching_pennies.json": "d2e358d81a4b7c759b7578f4101f094aed8ef959336cc880e3ed4c6490b56de8",
    "oneill_table2.json": "27a94df8d949568c3864a2d6a362d72621d7d3e545da1708181ae0cfa32fdba5",
    "table4_angular_momentum.csv": "c0126ff4b11d30602f36c8f854c4e6094de335f861ef4b0b4c76a00fc1ab5056",
}


@dataclass(frozen=True)
class Treatment:
    name: str
    rounds: int
    protocol: str


#: The six experimental treatments behind the angular-momentum table.
TREATMENTS = (
    Treatment("O", 2625, "fixed-pair"),
    Treatment("B", 1950, "random-match"),
    Treatment("IT", 3000, "fixed-pair"),
    Treatment("TI", 3000, "fixed-pair"),
    Treatment("II", 2376, "fixed-pair"),
    Treatment("TT", 2376, "fixed-pair"),
)
TREATMENT_NAMES = tuple(t.name for t in TREATMENTS)


def fixture_path(name: str):
    return resources.files(__package__).joinpath("data").joinpath(name)


@lru_cache(maxsize=None)
def read_fixture(name: str) -> bytes:
    """Raw bytes of a shipped fixture after verifying its pinned digest."""
    if name not in CHECKSUMS:
        raise FixtureError(f"unknown fixture {name!r}")
    try:
        raw = fixture_path(name).read_bytes()
    except OSError as exc:
        raise FixtureError(f"fixture {name!r} is missing: {exc}") from exc
    return verify_digest(name, raw)


def verify_digest(name: str, raw: bytes) -> bytes:
    digest = hashlib.sha256(raw).hexdigest()
    if digest != CHECKSUMS[name]:
        raise FixtureError(f"fixture {name!r} checksum {digest} does not match the pinned value")
    return raw


def oneill_game() -> PayoffBimatrix:
    return PayoffBimatrix.from_dict(json.loads(read_fixture("oneill.json")))


def matching_pennies_game() -> PayoffBimatrix:
    return PayoffBimatrix.from_dict(json.loads(read_fixture("matching_pennies.json")))


@dataclass(frozen=True, eq=False)
class EigenTable:
    """Published eigen system of the O'Neill game and its eigencycle block."""

    eigs: tuple[EigenPair, ...]
    sigma: np.ndarray  # shape (28, 8), rows in subspace_pairs order, columns as ``tags``
    version: int

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(e.tag for e in self.eigs)

    def column(self, tag: str) -> EigencycleSet:
        k = self.tags.index(tag)
        return EigencycleSet(self.sigma[:, k].copy(), 8, tag)

    def eigenpair(self, tag: str) -> EigenPair:
        return self.eigs[self.tags.index(tag)]


@lru_cache(maxsize=None)
def table2() -> EigenTable:
    d = json.loads(read_fixture("oneill_table2.json"))
    eigs = []
    for col in d["columns"]:
        lam = complex(*col["eigenvalue"])
        xi = np.array([complex(re, im) for re, im in col["eigenvector"]])
        eigs.append(EigenPair(lam, xi, col["tag"]))
    codes = [pair_code(m, n) for m, n in subspace_pairs(8)]
    if set(codes) != set(d["eigencycles"]):
        raise FixtureError("eigencycle block does not cover the 28 subspaces")
    sigma = np.array([d["eigencycles"][c] for c in codes], dtype=float)
    if sigma.shape != (28, len(eigs)):
        raise FixtureError(f"eigencycle block has shape {sigma.shape}")
    return EigenTable(tuple(eigs), sigma, int(d["fixture_version"]))


@dataclass(frozen=True, eq=False)
class LTable:
    """Per-subspace experimental angular momentum, one column per treatment."""

    codes: tuple[str, ...]
    columns: tuple[str, ...]
    values: np.ndarray  # shape (28, n_columns)

    def column(self, name: str) -> np.ndarray:
        key = name if name.startswith("L_") else f"L_{name}"
        return self.values[:, self.columns.index(key)].copy()

    def rows(self, codes) -> np.ndarray:
        idx = [self.codes.index(c) for c in codes]
        return self.values[idx]


def parse_l_table(text: str) -> LTable:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if not header or header[0] != "pair":
        raise FixtureError("table must start with a 'pair' column")
    codes, rows = [], []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise FixtureError(f"row {row[0]!r} has {len(row)} fields, expected {len(header)}")
        codes.append(row[0])
        rows.append([float(v) for v in row[1:]])
    return LTable(tuple(codes), tuple(header[1:]), np.array(rows, dtype=float))


@lru_cache(maxsize=None)
def l_table() -> LTable:
    t = parse_l_table(read_fixture("table4_angular_momentum.csv").decode())
    expected = tuple(pair_code(m, n) for m, n in subspace_pairs(8))
    if t.codes != expected:
        raise FixtureError("angular momentum table rows are not in subspace order")
    return t
