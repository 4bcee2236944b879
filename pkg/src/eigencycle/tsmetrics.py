"""Cycle measurements on discrete play series and sampled trajectories.

The angular momentum of a path in subspace ``(m, n)`` about an origin ``O``
is the mean over transitions of the 2-D cross product

    (x(t) - O) x (x(t+1) - x(t)),

i.e. twice the signed area swept per step; counterclockwise motion is
positive. A full counterclockwise tour of a unit square accumulates 2
regardless of ``O``. Multi-session data are never joined across session
boundaries: each session contributes its own transitions and the mean is
taken over all of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InsufficientData
from .spectral import PairTable, subspace_pairs

PROTOCOLS = ("fixed-pair", "random-match")


@dataclass(frozen=True, eq=False)
class Session:
    session_id: str
    a: np.ndarray  # 1-based A choices per round
    b: np.ndarray  # 1-based B choices per round

    def __len__(self) -> int:
        return len(self.a)


@dataclass(frozen=True, eq=False)
class PlaySeries:
    sessions: tuple[Session, ...]
    n_a: int
    n_b: int
    protocol: str = "fixed-pair"

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        for s in self.sessions:
            if len(s.a) == 0 or len(s.a) != len(s.b):
                raise ValueError(f"session {s.session_id!r} is empty or ragged")
            if s.a.min() < 1 or s.a.max() > self.n_a or s.b.min() < 1 or s.b.max() > self.n_b:
                raise ValueError(f"session {s.session_id!r} has choices out of range")

    @classmethod
    def from_rounds(cls, rounds: Iterable[tuple[int, int]], n_a: int, n_b: int,
                    session_id: str = "1", protocol: str = "fixed-pair") -> "PlaySeries":
        arr = np.asarray(list(rounds), dtype=int).reshape(-1, 2)
        return cls((Session(session_id, arr[:, 0], arr[:, 1]),), n_a, n_b, protocol)

    @property
    def n_rounds(self) -> int:
        return sum(len(s) for s in self.sessions)

    @property
    def dim(self) -> int:
        return self.n_a + self.n_b

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlaySeries):
            return NotImplemented
        return (
            (self.n_a, self.n_b, self.protocol) == (other.n_a, other.n_b, other.protocol)
            and len(self.sessions) == len(other.sessions)
            and all(
                s.session_id == o.session_id and np.array_equal(s.a, o.a) and np.array_equal(s.b, o.b)
                for s, o in zip(self.sessions, other.sessions)
            )
        )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled path; ``breaks`` lists the row indices where a new segment starts."""

    times: np.ndarray
    states: np.ndarray
    breaks: tuple[int, ...] = field(default=())
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.states.ndim != 2 or len(self.times) != len(self.states):
            raise DimensionError("times and states must have matching lengths")

    def segments(self) -> list[slice]:
        edges = [0, *self.breaks, len(self.states)]
        return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def n_transitions(self) -> int:
        return sum(max(0, sl.stop - sl.start - 1) for sl in self.segments())


def concatenate(trajectories: Sequence[Trajectory]) -> Trajectory:
    """Stack trajectories as separate segments (no transition between them)."""
    times, states, breaks, offset = [], [], [], 0
    for tr in trajectories:
        breaks.extend(offset + b for b in ([0] if offset else []) + list(tr.breaks))
        times.append(tr.times)
        states.append(tr.states)
        offset += len(tr.states)
    return Trajectory(np.concatenate(times), np.vstack(states), tuple(breaks))


def encode_states(series: PlaySeries) -> Trajectory:
    """One-hot embedding of each round's profile ``(a, b)`` as ``e_a (+) e_b``."""
    s = series.dim
    states = np.zeros((series.n_rounds, s))
    times = np.zeros(series.n_rounds)
    breaks, row = [], 0
    for k, sess in enumerate(series.sessions):
        n = len(sess)
        idx = np.arange(row, row + n)
        states[idx, sess.a - 1] = 1.0
        states[idx, series.n_a + sess.b - 1] = 1.0
        times[idx] = np.arange(1, n + 1)
        if k:
            breaks.append(row)
        row += n
    return Trajectory(times, states, tuple(breaks))


def _as_trajectory(data) -> Trajectory:
    if isinstance(data, PlaySeries):
        return encode_states(data)
    if isinstance(data, Trajectory):
        return data
    states = np.atleast_2d(np.asarray(data, dtype=float))
    return Trajectory(np.arange(len(states), dtype=float), states)


def _cross_terms(traj: Trajectory, origin, pairs: Sequence[tuple[int, int]] | None = None):
    """Per-transition cross products, one list entry per segment, shape (steps, n_pairs)."""
    origin = np.asarray(origin, dtype=float)
    if origin.shape != (traj.dim,):
        raise DimensionError(f"origin has shape {origin.shape}, trajectory dim is {traj.dim}")
    if pairs is None:
        pairs = subspace_pairs(traj.dim)
    mi = np.array([m - 1 for m, _ in pairs])
    ni = np.array([n - 1 for _, n in pairs])
    out = []
    for sl in traj.segments():
        x = traj.states[sl]
        if len(x) < 2:
            continue
        r = x[:-1] - origin
        d = np.diff(x, axis=0)
        out.append(r[:, mi] * d[:, ni] - r[:, ni] * d[:, mi])
    return out


def _check_pair(pair: tuple[int, int], s: int) -> tuple[int, int]:
    m, n = pair
    if not 1 <= m <= s or not 1 <= n <= s:
        raise DimensionError(f"pair {pair} outside 1..{s}")
    return m, n


def angular_momentum(traj, origin, pair: tuple[int, int]) -> float:
    """Mean angular momentum per transition in subspace ``pair`` (1-based)."""
    traj = _as_trajectory(traj)
    pair = _check_pair(pair, traj.dim)
    terms = _cross_terms(traj, origin, [pair])
    if not terms:
        raise InsufficientData("need at least one segment with two or more states")
    allc = np.concatenate(terms)[:, 0]
    return float(allc.sum() / len(allc))


def accumulated_angular_momentum(traj, origin, pair: tuple[int, int]) -> np.ndarray:
    """Running (un-normalised) sum of the cross products; last entry is ``(N - 1) * L``."""
    traj = _as_trajectory(traj)
    pair = _check_pair(pair, traj.dim)
    terms = _cross_terms(traj, origin, [pair])
    if not terms:
        raise InsufficientData("need at least one segment with two or more states")
    return np.cumsum(np.concatenate(terms)[:, 0])


def angular_momentum_matrix(traj, origin) -> np.ndarray:
    """Antisymmetric ``s x s`` matrix of mean angular momenta over all ordered pairs."""
    traj = _as_trajectory(traj)
    origin = np.asarray(origin, dtype=float)
    total = np.zeros((traj.dim, traj.dim))
    count = 0
    for sl in traj.segments():
        x = traj.states[sl]
        if len(x) < 2:
            continue
        r = x[:-1] - origin
        d = np.diff(x, axis=0)
        total += r.T @ d - d.T @ r
        count += len(d)
    if count == 0:
        raise InsufficientData("need at least one segment with two or more states")
    return total / count


def _long_run_se(terms: list[np.ndarray]) -> np.ndarray:
    # Transition terms of i.i.d. play are 1-dependent (neighbours share a state),
    # so the variance of the mean uses lag-0 and lag-1 autocovariances.
    allc = np.concatenate(terms)
    n = len(allc)
    if n < 2:
        return np.full(allc.shape[1], np.nan)
    mean = allc.mean(axis=0)
    g0 = ((allc - mean) ** 2).sum(axis=0) / n
    g1 = sum(((c[1:] - mean) * (c[:-1] - mean)).sum(axis=0) for c in terms) / n
    lrv = g0 + 2 * g1
    lrv = np.where(lrv > 0, lrv, g0)
    return np.sqrt(lrv / n)


@dataclass(frozen=True, eq=False)
class AngularMomentumTable(PairTable):
    values: np.ndarray
    dim: int
    origin: np.ndarray
    se: np.ndarray | None = None
    n_transitions: int = 0


def angular_momentum_table(data, origin) -> AngularMomentumTable:
    """Angular momentum in every subspace, with 1-dependent standard errors."""
    traj = _as_trajectory(data)
    terms = _cross_terms(traj, origin)
    if not terms:
        raise InsufficientData("need at least one segment with two or more states")
    allc = np.concatenate(terms)
    return AngularMomentumTable(
        allc.mean(axis=0), traj.dim, np.asarray(origin, dtype=float), _long_run_se(terms), len(allc)
    )


def instantaneous_angular_momentum(states, velocities, origin) -> np.ndarray:
    """``(x - O)_m v_n - (x - O)_n v_m`` for every sample and pair, shape (T, n_pairs)."""
    x = np.atleast_2d(np.asarray(states, dtype=float)) - np.asarray(origin, dtype=float)
    v = np.atleast_2d(np.asarray(velocities, dtype=float))
    s = x.shape[1]
    iu = np.triu_indices(s, 1)
    return x[:, iu[0]] * v[:, iu[1]] - x[:, iu[1]] * v[:, iu[0]]


# ----------------------------------------------------------------------------
# net transit


@dataclass(frozen=True, eq=False)
class NetTransitMatrix:
    """Net probability current ``T[m, n] = rho_m A[m, n] - rho_n A[n, m]`` (0-based arrays)."""

    t: np.ndarray
    rho: np.ndarray
    a: np.ndarray
    counts: np.ndarray
    labels: tuple[str, ...] = ()

    def value(self, m: int, n: int) -> float:
        """Entry for 1-based states ``m``, ``n``."""
        return float(self.t[m - 1, n - 1])


def net_transit_from_counts(counts, labels: Sequence[str] = ()) -> NetTransitMatrix:
    """Net transit from a matrix of transition counts ``counts[m, n]`` (from m to n)."""
    counts = np.asarray(counts, dtype=float)
    visits = counts.sum(axis=1)
    if visits.sum() == 0:
        raise InsufficientData("need at least one transition")
    rho = visits / visits.sum()
    a = np.divide(counts, visits[:, None], out=np.zeros_like(counts), where=visits[:, None] > 0)
    flow = rho[:, None] * a
    return NetTransitMatrix(flow - flow.T, rho, a, counts, tuple(labels))


def net_transit_from_sequences(sequences: Iterable[Sequence[int]], n_states: int,
                               labels: Sequence[str] = ()) -> NetTransitMatrix:
    """Net transit of one or more 1-based state sequences, never bridging between them."""
    counts = np.zeros((n_states, n_states))
    for seq in sequences:
        seq = np.asarray(seq, dtype=int)
        if len(seq) and (seq.min() < 1 or seq.max() > n_states):
            raise ValueError(f"states must lie in 1..{n_states}")
        if len(seq) >= 2:
            np.add.at(counts, (seq[:-1] - 1, seq[1:] - 1), 1.0)
    return net_transit_from_counts(counts, labels)


NET_TRANSIT_MODES = ("dimension", "cross", "joint")


def net_transit(series: PlaySeries, states: str = "dimension") -> NetTransitMatrix:
    """Net transit of a play series.

    ``states="dimension"`` uses the ``n_a + n_b`` strategy dimensions as
    states: each population's choice sequence is a chain of its own and the
    two sets of transition counts are summed, so no current flows between
    the populations. ``states="cross"`` also uses the strategy dimensions but
    counts a transition from each of the two active dimensions of a round to
    each of the two active dimensions of the next round (four per round),
    which exposes currents between A and B strategies. ``states="joint"``
    uses the ``n_a * n_b`` pure profiles, profile ``(a, b)`` being state
    ``(a - 1) * n_b + b``.
    """
    dim_labels = [f"A{i}" for i in range(1, series.n_a + 1)] + [f"B{j}" for j in range(1, series.n_b + 1)]
    if states == "dimension":
        seqs = [s.a for s in series.sessions] + [series.n_a + s.b for s in series.sessions]
        return net_transit_from_sequences(seqs, series.dim, dim_labels)
    if states == "cross":
        counts = np.zeros((series.dim, series.dim))
        for s in series.sessions:
            active = [s.a - 1, series.n_a + s.b - 1]
            for src in active:
                for dst in active:
                    np.add.at(counts, (src[:-1], dst[1:]), 1.0)
        return net_transit_from_counts(counts, dim_labels)
    if states == "joint":
        seqs = [(s.a - 1) * series.n_b + s.b for s in series.sessions]
        labels = [f"A{i}B{j}" for i in range(1, series.n_a + 1) for j in range(1, series.n_b + 1)]
        return net_transit_from_sequences(seqs, series.n_a * series.n_b, labels)
    raise ValueError(f"unknown state space {states!r}; expected one of {NET_TRANSIT_MODES}")
