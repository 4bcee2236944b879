"""Two-population matrix games and their replicator vector field.

States are flat arrays ``x = (x_A, x_B)`` of length ``n_a + n_b``: the first
``n_a`` entries are population A's strategy shares, the rest are B's.
Payoffs are held as exact rationals and converted to floats on demand, so
that derivative matrices of integer games stay exact when evaluated at a
rational state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, InvalidState, NoInteriorEquilibrium

#: States whose violation of the simplex constraints is below this are repaired.
CLAMP_TOL = 1e-9


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    # repr() gives the shortest decimal that round-trips, e.g. 0.1 -> "0.1"
    return Fraction(repr(float(v)))


def _fraction_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(_to_fraction(v) for v in row) for row in rows)


@dataclass(frozen=True)
class PayoffBimatrix:
    """Payoffs of a two-population game.

    ``a_payoff[i][j]`` is A's payoff for playing ``i`` against B's ``j``;
    ``b_payoff[j][i]`` is B's payoff for playing ``j`` against A's ``i``.
    """

    a_payoff: tuple[tuple[Fraction, ...], ...]
    b_payoff: tuple[tuple[Fraction, ...], ...]
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n_a = len(self.a_payoff)
        if n_a == 0:
            raise DimensionError("empty payoff matrix")
        n_b = len(self.a_payoff[0])
        if any(len(r) != n_b for r in self.a_payoff):
            raise DimensionError("a_payoff rows have unequal length")
        if len(self.b_payoff) != n_b or any(len(r) != n_a for r in self.b_payoff):
            raise DimensionError(f"b_payoff must be {n_b}x{n_a}")
        if self.labels is not None and len(self.labels) != n_a + n_b:
            raise DimensionError(f"expected {n_a + n_b} labels, got {len(self.labels)}")

    @classmethod
    def from_arrays(cls, a_payoff, b_payoff=None, labels: Sequence[str] | None = None):
        """Build a game from nested sequences; ``b_payoff`` defaults to ``-a_payoff.T``."""
        a = _fraction_matrix(a_payoff)
        if not a or any(len(r) != len(a[0]) for r in a):
            raise DimensionError("a_payoff must be a non-empty rectangular matrix")
        if b_payoff is None:
            b = tuple(tuple(-a[i][j] for i in range(len(a))) for j in range(len(a[0])))
        else:
            b = _fraction_matrix(b_payoff)
        return cls(a, b, tuple(labels) if labels is not None else None)

    @classmethod
    def from_dict(cls, d: dict) -> "PayoffBimatrix":
        game = cls.from_arrays(d["a_payoff"], d.get("b_payoff"), d.get("labels"))
        if "n_a" in d and d["n_a"] != game.n_a or "n_b" in d and d["n_b"] != game.n_b:
            raise DimensionError("declared n_a/n_b do not match a_payoff shape")
        return game

    def to_dict(self) -> dict:
        def enc(v: Fraction):
            return v.numerator if v.denominator == 1 else str(v)

        d = {
            "n_a": self.n_a,
            "n_b": self.n_b,
            "a_payoff": [[enc(v) for v in row] for row in self.a_payoff],
            "b_payoff": [[enc(v) for v in row] for row in self.b_payoff],
        }
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    @property
    def n_a(self) -> int:
        return len(self.a_payoff)

    @property
    def n_b(self) -> int:
        return len(self.a_payoff[0])

    @property
    def dim(self) -> int:
        return self.n_a + self.n_b

    @property
    def zero_sum(self) -> bool:
        return all(
            self.b_payoff[j][i] == -self.a_payoff[i][j]
            for i in range(self.n_a)
            for j in range(self.n_b)
        )

    @cached_property
    def a(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.a_payoff])

    @cached_property
    def b(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.b_payoff])

    @cached_property
    def a_exact(self) -> np.ndarray:
        return np.array(self.a_payoff, dtype=object)

    @cached_property
    def b_exact(self) -> np.ndarray:
        return np.array(self.b_payoff, dtype=object)

    def matrices(self, exact: bool = False) -> tuple[np.ndarray, np.ndarray]:
        return (self.a_exact, self.b_exact) if exact else (self.a, self.b)


class PayoffProfile(NamedTuple):
    u: np.ndarray
    u_bar_a: float
    u_bar_b: float


def _is_exact(x: np.ndarray) -> bool:
    return x.dtype == object


def check_state(game: PayoffBimatrix, x, tol: float = CLAMP_TOL) -> np.ndarray:
    """Validate a state, repairing numerical drift up to ``tol``.

    Negative entries no smaller than ``-tol`` are clamped to zero and each
    population is renormalised. Anything further off raises InvalidState.
    Exact (object dtype) states are checked strictly and returned unchanged.
    """
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != game.dim:
        raise DimensionError(f"state has shape {x.shape}, game needs ({game.dim},)")
    if _is_exact(x):
        xa, xb = x[: game.n_a], x[game.n_a :]
        if min(x) < 0 or sum(xa) != 1 or sum(xb) != 1:
            raise InvalidState("exact state is not on the simplex product")
        return x
    x = x.astype(float)
    if not np.all(np.isfinite(x)):
        raise InvalidState("state has non-finite entries")
    if x.min() < -tol:
        raise InvalidState(f"state entry {x.min():.3e} is negative")
    out = np.clip(x, 0.0, None)
    for sl in (slice(0, game.n_a), slice(game.n_a, None)):
        total = out[sl].sum()
        if abs(total - 1.0) > tol:
            raise InvalidState(f"population shares sum to {total!r}")
        out[sl] /= total
    return out


def split(game: PayoffBimatrix, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return x[: game.n_a], x[game.n_a :]


def expected_payoffs(game: PayoffBimatrix, s) -> PayoffProfile:
    """Expected payoff of every pure strategy against the opposing population."""
    s = check_state(game, s)
    a, b = game.matrices(_is_exact(s))
    x, y = split(game, s)
    ua = a @ y
    ub = b @ x
    return PayoffProfile(np.concatenate([ua, ub]), x @ ua, y @ ub)


def replicator_velocity(game: PayoffBimatrix, s) -> np.ndarray:
    """Two-population replicator field ``v_j = x_j (U_j - mean payoff of j's population)``."""
    s = np.asarray(s)
    if s.ndim != 1 or s.shape[0] != game.dim:
        raise DimensionError(f"state has shape {s.shape}, game needs ({game.dim},)")
    return _velocity(game, s)


def _velocity(game: PayoffBimatrix, s: np.ndarray) -> np.ndarray:
    # no validation: also used on off-simplex points by finite differences
    a, b = game.matrices(_is_exact(s))
    x, y = split(game, s)
    ua = a @ y
    ub = b @ x
    return np.concatenate([x * (ua - x @ ua), y * (ub - y @ ub)])


def _solve_exact(m: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of ``m z = rhs`` by Gauss-Jordan over the rationals, else None."""
    rows = [list(r) + [v] for r, v in zip(m, rhs)]
    n_rows, n_cols = len(rows), len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    if any(all(v == 0 for v in row[:-1]) and row[-1] != 0 for row in rows):
        return None  # inconsistent
    if len(pivots) < n_cols:
        return None  # not unique
    z = [Fraction(0)] * n_cols
    for i, c in enumerate(pivots):
        z[c] = rows[i][-1]
    return z


def _indifference_mix(payoff: tuple[tuple[Fraction, ...], ...]) -> list[Fraction] | None:
    # Opponent mix q making every row of `payoff` earn the same value v:
    # payoff @ q - v = 0, sum(q) = 1; unknowns (q, v).
    n_rows, n_cols = len(payoff), len(payoff[0])
    m = [list(row) + [Fraction(-1)] for row in payoff]
    m.append([Fraction(1)] * n_cols + [Fraction(0)])
    rhs = [Fraction(0)] * n_rows + [Fraction(1)]
    z = _solve_exact(m, rhs)
    return None if z is None else z[:n_cols]


def interior_rest_point(game: PayoffBimatrix, exact: bool = False) -> np.ndarray:
    """Fully mixed rest point of the replicator field.

    Solves the indifference conditions of both populations exactly. Raises
    NoInteriorEquilibrium when they have no unique solution or the solution
    leaves the interior of either simplex.
    """
    y = _indifference_mix(game.a_payoff)
    x = _indifference_mix(game.b_payoff)
    if x is None or y is None:
        raise NoInteriorEquilibrium("indifference system has no unique solution")
    if min(x) <= 0 or min(y) <= 0:
        raise NoInteriorEquilibrium("indifference solution is not fully mixed")
    point = np.array(x + y, dtype=object)
    if np.any(_velocity(game, point) != 0):
        raise NoInteriorEquilibrium("indifference solution is not a rest point")
    if exact:
        return point
    return point.astype(float)
