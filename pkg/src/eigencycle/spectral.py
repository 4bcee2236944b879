"""Linearisation at a rest point, complex eigen system and eigencycle sets.

Subspace pairs are 1-based ``(m, n)`` with ``m < n``, enumerated with ``m``
ascending and then ``n`` ascending, so that for an 8-dimensional state the
pair codes run ``12, 13, ..., 18, 23, ..., 78``.

The eigencycle of components ``eta_m, eta_n`` of one eigenvector is

    sigma(m, n) = pi * (Re eta_m * Im eta_n - Re eta_n * Im eta_m)
                = pi * Im(conj(eta_m) * eta_n),

the signed area of the 1:1 Lissajous ellipse the pair traces under
``Re(xi * exp(i w t))``. It is invariant under rotation of the eigenvector's
phase and scales with ``|c|**2`` under ``xi -> c * xi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NumericalError, ResidualTooLarge
from .game import PayoffBimatrix, _is_exact, _velocity, check_state, split

FD_STEP = 1e-5
RESIDUAL_TOL = 1e-9
CLUSTER_TOL = 1e-6


# ----------------------------------------------------------------------------
# subspaces


def subspace_pairs(s: int) -> list[tuple[int, int]]:
    """All 1-based pairs ``m < n`` of an ``s``-dimensional space, in table order."""
    return [(m + 1, n + 1) for m, n in combinations(range(s), 2)]


def pair_code(m: int, n: int, s: int = 8) -> str:
    return f"{m}{n}" if s < 10 else f"{m},{n}"


def parse_pair(code: str) -> tuple[int, int]:
    code = str(code).strip()
    if "," in code:
        m, n = code.split(",")
    elif len(code) == 2:
        m, n = code
    else:
        raise ValueError(f"cannot parse subspace code {code!r}")
    m, n = int(m), int(n)
    if not 1 <= m < n:
        raise ValueError(f"subspace code {code!r} needs 1 <= m < n")
    return m, n


def pair_index(m: int, n: int, s: int) -> int:
    """Position of pair ``(m, n)`` (1-based, ``m < n``) in :func:`subspace_pairs`."""
    i, j = m - 1, n - 1
    return i * s - i * (i + 1) // 2 + (j - i - 1)


# ----------------------------------------------------------------------------
# Jacobian


@dataclass(frozen=True)
class JacobianMatrix:
    j: np.ndarray
    base_point: np.ndarray
    exact: np.ndarray | None = None  # object array of Fractions, closed form at a rational point


def _closed_form(game: PayoffBimatrix, p: np.ndarray) -> np.ndarray:
    a, b = game.matrices(_is_exact(p))
    x, y = split(game, p)
    n_a = game.n_a
    ua = a @ y
    ub = b @ x
    jac = np.zeros((game.dim, game.dim), dtype=p.dtype)
    jac[:n_a, :n_a] = np.diag(ua - x @ ua) - np.outer(x, ua)
    jac[:n_a, n_a:] = x[:, None] * (a - (x @ a)[None, :])
    jac[n_a:, n_a:] = np.diag(ub - y @ ub) - np.outer(y, ub)
    jac[n_a:, :n_a] = y[:, None] * (b - (y @ b)[None, :])
    return jac


def _finite_difference(game: PayoffBimatrix, p: np.ndarray, h: float) -> np.ndarray:
    p = p.astype(float)
    cols = []
    for e in np.eye(game.dim):
        cols.append((_velocity(game, p + h * e) - _velocity(game, p - h * e)) / (2 * h))
    return np.array(cols).T


def jacobian_at(game: PayoffBimatrix, p, mode: str = "closed_form", h: float = FD_STEP) -> JacobianMatrix:
    """Derivative of the replicator field at ``p`` in the ambient ``n_a + n_b`` coordinates.

    ``mode`` is ``"closed_form"`` (analytic partials; exact when ``p`` holds
    Fractions) or ``"finite_difference"`` (central differences, step ``h``).
    """
    p = check_state(game, p)
    if mode == "closed_form":
        jac = _closed_form(game, p)
        if _is_exact(p):
            return JacobianMatrix(jac.astype(float), p.astype(float), jac)
        return JacobianMatrix(jac, p)
    if mode == "finite_difference":
        return JacobianMatrix(_finite_difference(game, p, h), p.astype(float))
    raise ValueError(f"unknown mode {mode!r}")


# ----------------------------------------------------------------------------
# eigen system


@dataclass(frozen=True, eq=False)
class EigenPair:
    lam: complex
    xi: np.ndarray
    tag: str = ""

    def residual(self, j) -> float:
        j = j.j if isinstance(j, JacobianMatrix) else np.asarray(j)
        return float(np.linalg.norm(j @ self.xi - self.lam * self.xi) / np.linalg.norm(self.xi))

    @property
    def is_complex(self) -> bool:
        return abs(self.lam.imag) > CLUSTER_TOL


def canonicalize(v: np.ndarray) -> np.ndarray:
    """Unit 2-norm, phase rotated so the first largest-modulus entry is real positive."""
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        return v
    v = v / norm
    mod = np.abs(v)
    k = int(np.argmax(mod >= mod.max() - 1e-9))
    return v * (np.conj(v[k]) / mod[k])


def _lambda_tag(lam: complex) -> str:
    def fmt(v: float) -> str:
        t = f"{v:.6g}"
        return t.replace("0.", ".", 1) if t.startswith(("0.", "-0.")) else t

    re_, im = lam.real, lam.imag
    if abs(im) <= CLUSTER_TOL:
        return fmt(re_)
    if abs(re_) <= CLUSTER_TOL:
        return fmt(im) + "i"
    return f"{fmt(re_)}{'+' if im > 0 else ''}{fmt(im)}i"


def _cluster(values: np.ndarray) -> list[list[int]]:
    order = sorted(range(len(values)), key=lambda i: (-values[i].imag, -values[i].real))
    clusters: list[list[int]] = []
    for i in order:
        for c in clusters:
            ref = values[c[0]]
            if abs(values[i] - ref) <= CLUSTER_TOL * max(1.0, abs(ref)):
                c.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def _eigenspace_basis(j: np.ndarray, lam: complex, k: int) -> np.ndarray:
    """Deterministic orthonormal basis (columns) of the ``k``-dim null space of ``j - lam``."""
    s = j.shape[0]
    m = j - lam * np.eye(s)
    if lam.imag == 0:
        m = m.real
    _, sv, vh = np.linalg.svd(m)
    scale = max(1.0, np.linalg.norm(j, 2))
    if sv[s - k] > 1e-7 * scale:
        raise NumericalError(
            f"eigenvalue {lam:.6g} has geometric multiplicity < {k} (defective matrix)"
        )
    q = vh[s - k :].conj().T  # s x k
    if k == 1:
        return q
    # Gram-Schmidt of the projected unit vectors: depends only on the subspace
    proj = q @ q.conj().T
    basis: list[np.ndarray] = []
    for i in range(s):
        v = proj[:, i].astype(complex)
        for b in basis:
            v = v - (b.conj() @ v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            basis.append(v / nv)
        if len(basis) == k:
            break
    return np.array(basis).T


def eigen_decompose(j) -> list[EigenPair]:
    """Eigenvalues and canonical eigenvectors of a real square matrix.

    Pairs are sorted by imaginary part, then real part, both descending.
    Degenerate eigenvalues get a deterministic orthonormal basis of their
    eigenspace; eigenvectors of ``conj(lam)`` are exact conjugates of those of
    ``lam``. Degenerate members are tagged ``<lam>_1``, ``<lam>_2``, ...
    """
    jm = j.j if isinstance(j, JacobianMatrix) else np.asarray(j, dtype=float)
    if jm.ndim != 2 or jm.shape[0] != jm.shape[1]:
        raise DimensionError(f"matrix must be square, got {jm.shape}")
    if not np.all(np.isfinite(jm)):
        raise NumericalError("matrix has non-finite entries")
    try:
        values = np.linalg.eigvals(jm)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc)) from exc

    pairs: list[EigenPair] = []
    done_conj: dict[int, list[EigenPair]] = {}
    clusters = _cluster(values)
    for ci, c in enumerate(clusters):
        lam = complex(np.mean(values[c]))
        k = len(c)
        if abs(lam.imag) <= CLUSTER_TOL * max(1.0, abs(lam)):
            lam = complex(lam.real, 0.0)
        if lam.imag < 0:
            # conjugate of an already-processed upper-half cluster
            partner = next(
                (pi for pi, pc in done_conj.items()
                 if abs(pc[0].lam.conjugate() - lam) <= CLUSTER_TOL * max(1.0, abs(lam))
                 and len(pc) == k),
                None,
            )
            if partner is not None:
                src = done_conj.pop(partner)
                for p in src:
                    tag = _lambda_tag(p.lam.conjugate()) + (p.tag[p.tag.rfind("_"):] if k > 1 else "")
                    pairs.append(EigenPair(p.lam.conjugate(), np.conj(p.xi), tag))
                continue
        basis = _eigenspace_basis(jm, lam, k)
        group = []
        for idx in range(k):
            tag = _lambda_tag(lam) + (f"_{idx + 1}" if k > 1 else "")
            group.append(EigenPair(lam, canonicalize(basis[:, idx]), tag))
        if lam.imag > 0:
            done_conj[ci] = group
        pairs.extend(group)

    for p in pairs:
        if p.residual(jm) > RESIDUAL_TOL * max(1.0, np.linalg.norm(jm, 2)):
            raise NumericalError(f"eigenpair {p.tag} residual {p.residual(jm):.2e}")
    pairs.sort(key=lambda p: (-round(p.lam.imag, 9), -round(p.lam.real, 9)))
    return pairs


def degenerate_group(eigs: Sequence[EigenPair], lam: complex, tol: float = CLUSTER_TOL) -> list[EigenPair]:
    return [e for e in eigs if abs(e.lam - lam) <= tol * max(1.0, abs(lam))]


def align_basis(group: Sequence[EigenPair], reference) -> list[EigenPair]:
    """Re-express a degenerate eigenspace basis as close as possible to ``reference``.

    ``reference`` holds one vector per row (e.g. the published basis of the
    same eigenvalue, or EigenPairs). Each row is projected onto the span of ``group`` and the
    projections are orthonormalised symmetrically (the unitary closest to
    them), which maximises the total overlap with the reference.
    """
    ref = np.atleast_2d(np.array([getattr(r, "xi", r) for r in reference], dtype=complex))
    if len(group) != ref.shape[0]:
        raise DimensionError(f"{len(group)} basis vectors but {ref.shape[0]} reference vectors")
    q = np.array([g.xi for g in group]).T
    if q.shape[0] != ref.shape[1]:
        raise DimensionError("reference vectors have the wrong length")
    projected = q @ (q.conj().T @ ref.T)
    u, _, vh = np.linalg.svd(projected, full_matrices=False)
    w = u @ vh
    lam = group[0].lam
    base = _lambda_tag(lam)
    return [EigenPair(lam, canonicalize(w[:, i]), f"{base}_{i + 1}") for i in range(w.shape[1])]


def align_conjugate_pairs(eigs: Sequence[EigenPair], lam: complex, reference) -> list[EigenPair]:
    """Replace the bases of ``lam`` and ``conj(lam)`` in ``eigs`` by the aligned ones."""
    up = degenerate_group(eigs, lam)
    aligned = align_basis(up, reference)
    lam_c = complex(lam).conjugate()
    down = [
        EigenPair(lam_c, np.conj(a.xi), _lambda_tag(lam_c) + a.tag[a.tag.rfind("_"):])
        for a in aligned
    ]
    out, it_up, it_down = [], iter(aligned), iter(down)
    for e in eigs:
        if any(e is u for u in up):
            out.append(next(it_up))
        elif abs(e.lam - lam_c) <= CLUSTER_TOL * max(1.0, abs(lam_c)):
            out.append(next(it_down))
        else:
            out.append(e)
    return out


# ----------------------------------------------------------------------------
# eigencycles


class PairTable:
    """Per-subspace values stored in :func:`subspace_pairs` order.

    Subclasses provide ``values`` (one entry per pair) and ``dim``.
    """

    values: np.ndarray
    dim: int

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return subspace_pairs(self.dim)

    @property
    def codes(self) -> list[str]:
        return [pair_code(m, n, self.dim) for m, n in self.pairs]

    def value(self, m: int, n: int) -> float:
        """Entry for any ordered 1-based pair, extended antisymmetrically."""
        if m == n:
            return 0.0
        if m > n:
            return -self.value(n, m)
        return float(self.values[pair_index(m, n, self.dim)])

    def __getitem__(self, code: str) -> float:
        return self.value(*parse_pair(code))

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        out[np.triu_indices(self.dim, 1)] = self.values
        return out - out.T

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.codes, map(float, self.values)))

    def support(self, tol: float = 1e-12) -> list[str]:
        return [c for c, v in zip(self.codes, self.values) if abs(v) > tol]


@dataclass(frozen=True, eq=False)
class EigencycleSet(PairTable):
    """Signed eigencycle values over all subspace pairs of one eigenvector."""

    values: np.ndarray
    dim: int
    label: str = ""

    def __post_init__(self):
        if len(self.values) != self.dim * (self.dim - 1) // 2:
            raise DimensionError("values do not match the pair count of dim")

    def __neg__(self) -> "EigencycleSet":
        return EigencycleSet(-self.values, self.dim, self.label)

    def __add__(self, other: "EigencycleSet") -> "EigencycleSet":
        _check_compatible(self, other)
        return EigencycleSet(self.values + other.values, self.dim)

    def __sub__(self, other: "EigencycleSet") -> "EigencycleSet":
        _check_compatible(self, other)
        return EigencycleSet(self.values - other.values, self.dim)

    def scaled(self, k: float, label: str | None = None) -> "EigencycleSet":
        return EigencycleSet(k * self.values, self.dim, self.label if label is None else label)

    def unit(self) -> "EigencycleSet":
        """Rescaled to unit 2-norm over the pair entries (zero set unchanged)."""
        norm = np.linalg.norm(self.values)
        return self if norm == 0 else self.scaled(1.0 / norm)


def _check_compatible(a: EigencycleSet, b: EigencycleSet) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"eigencycle sets have dims {a.dim} and {b.dim}")


def eigencycle_matrix(xi) -> np.ndarray:
    """Antisymmetric matrix ``pi * Im(conj(eta_m) * eta_n)`` over all ordered pairs."""
    xi = np.asarray(xi, dtype=complex)
    return np.pi * np.imag(np.outer(np.conj(xi), xi))


def eigencycle_set(e: EigenPair | Iterable[complex], label: str | None = None) -> EigencycleSet:
    xi = e.xi if isinstance(e, EigenPair) else np.asarray(list(e), dtype=complex)
    s = len(xi)
    m = eigencycle_matrix(xi)
    iu = np.triu_indices(s, 1)
    if label is None:
        label = e.tag if isinstance(e, EigenPair) else ""
    return EigencycleSet(m[iu], s, label)


def eigenspace_eigencycles(vectors: Sequence[EigenPair] | np.ndarray, label: str = "") -> EigencycleSet:
    """Sum of the eigencycle sets of an orthonormal basis, computed basis-free.

    Equal to ``pi * Im`` of the orthogonal projector onto the span; any
    unitary re-mixing of the basis gives the same set.
    """
    if isinstance(vectors, np.ndarray):
        q = np.atleast_2d(vectors).T
    else:
        q = np.array([v.xi for v in vectors]).T
    u, sv, _ = np.linalg.svd(q, full_matrices=False)
    u = u[:, sv > 1e-10 * sv.max()]
    proj = u @ u.conj().T
    s = q.shape[0]
    m = np.pi * np.imag(proj.T)
    iu = np.triu_indices(s, 1)
    return EigencycleSet(m[iu], s, label)


def alpha_beta_bases(s1: EigencycleSet, s2: EigencycleSet) -> tuple[EigencycleSet, EigencycleSet]:
    """``alpha = (s2 + s1) / 2`` and ``beta = (s2 - s1) / 2`` for a degenerate pair."""
    _check_compatible(s1, s2)
    alpha = EigencycleSet((s2.values + s1.values) / 2, s1.dim, "alpha")
    beta = EigencycleSet((s2.values - s1.values) / 2, s1.dim, "beta")
    return alpha, beta


@dataclass(frozen=True)
class ScaleSignFit:
    scale: float
    sign: int
    max_abs_error: float
    fitted: np.ndarray


def fit_scale_sign(computed, reference) -> ScaleSignFit:
    """Least-squares positive scale and global sign mapping ``computed`` onto ``reference``."""
    c = np.asarray(getattr(computed, "values", computed), dtype=float)
    r = np.asarray(getattr(reference, "values", reference), dtype=float)
    if c.shape != r.shape:
        raise DimensionError(f"shapes {c.shape} and {r.shape} differ")
    cc = c @ c
    best = None
    for sign in (1, -1):
        k = max(0.0, sign * (c @ r) / cc) if cc > 0 else 0.0
        fitted = sign * k * c
        err = float(np.max(np.abs(fitted - r))) if len(r) else 0.0
        if best is None or err < best.max_abs_error:
            best = ScaleSignFit(k, sign, err, fitted)
    return best


# ----------------------------------------------------------------------------
# modal coefficients


@dataclass(frozen=True)
class ModalCoefficients:
    c: np.ndarray
    residual: float


def modal_decompose(eigs: Sequence[EigenPair], deviation, tol: float = RESIDUAL_TOL) -> ModalCoefficients:
    """Expand a state deviation in the eigenbasis, ``deviation = sum_k c_k xi_k``."""
    d = np.asarray(deviation, dtype=complex)
    v = np.array([e.xi for e in eigs]).T
    if v.shape[0] != d.shape[0]:
        raise DimensionError(f"deviation length {d.shape[0]} vs eigenvector length {v.shape[0]}")
    c, *_ = np.linalg.lstsq(v, d, rcond=None)
    residual = float(np.linalg.norm(v @ c - d))
    if residual > tol:
        raise ResidualTooLarge(residual, tol)
    return ModalCoefficients(c, residual)
