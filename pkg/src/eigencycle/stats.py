"""Least squares, rank correlation and t-tests with Student-t p-values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special
from scipy.stats import rankdata

from .errors import DegenerateInput, SingularDesign


def student_t_sf(t, dof) -> np.ndarray:
    """Upper tail probability P(T > t) of Student's t distribution."""
    return special.stdtr(dof, -np.asarray(t, dtype=float))


def two_tailed_p(t, dof) -> float:
    return float(min(1.0, 2.0 * student_t_sf(abs(t), dof)))


def student_t_ppf(q, dof) -> float:
    return float(special.stdtrit(dof, q))


class Coefficient(NamedTuple):
    name: str
    estimate: float
    std_err: float
    t: float
    p: float
    conf95_lo: float
    conf95_hi: float


@dataclass(frozen=True)
class RegressionResult:
    coefficients: tuple[Coefficient, ...]
    r_squared: float
    n: int
    dof: int
    residuals: np.ndarray

    def __getitem__(self, name: str) -> Coefficient:
        for c in self.coefficients:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.coefficients]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dof": self.dof,
            "r_squared": self.r_squared,
            "coefficients": [c._asdict() for c in self.coefficients],
        }

    def table(self) -> str:
        """Aligned plain-text summary."""
        lines = [f"{'':>12} {'Coef.':>11} {'Std.Err.':>11} {'t':>9} {'P>|t|':>10} {'[0.025':>11} {'0.975]':>11}"]
        for c in self.coefficients:
            lines.append(
                f"{c.name:>12} {c.estimate:>11.5f} {c.std_err:>11.5f} {c.t:>9.3f} {c.p:>10.4g}"
                f" {c.conf95_lo:>11.5f} {c.conf95_hi:>11.5f}"
            )
        lines.append(f"R-squared {self.r_squared:.4f}   N = {self.n}")
        return "\n".join(lines)


def ols(y, x, names: Sequence[str] | None = None, intercept: bool = True) -> RegressionResult:
    """Ordinary least squares of ``y`` on the columns of ``x``.

    With ``intercept`` a constant column named ``const`` is prepended.
    ``R^2`` is centred when an intercept is present and uncentred otherwise.
    """
    y = np.asarray(y, dtype=float).ravel()
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != len(y):
        raise ValueError(f"x has {x.shape[0]} rows, y has {len(y)}")
    if names is None:
        names = [f"x{i + 1}" for i in range(x.shape[1])]
    names = list(names)
    if len(names) != x.shape[1]:
        raise ValueError("one name per column of x is required")
    if intercept:
        x = np.column_stack([np.ones(len(y)), x])
        names = ["const", *names]
    n, p = x.shape
    if n <= p:
        raise SingularDesign(f"need more observations ({n}) than coefficients ({p})")
    if np.linalg.matrix_rank(x) < p:
        raise SingularDesign("design matrix is rank deficient")
    q, r = np.linalg.qr(x)
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - x @ beta
    dof = n - p
    s2 = resid @ resid / dof
    r_inv = np.linalg.inv(r)
    se = np.sqrt(s2 * np.sum(r_inv ** 2, axis=1))
    tcrit = student_t_ppf(0.975, dof)
    coefs = []
    for name, b, e in zip(names, beta, se):
        t = b / e if e > 0 else np.copysign(np.inf, b) if b else 0.0
        p_val = two_tailed_p(t, dof) if np.isfinite(t) else 0.0
        coefs.append(Coefficient(name, float(b), float(e), float(t), p_val, float(b - tcrit * e), float(b + tcrit * e)))
    tss = np.sum((y - y.mean()) ** 2) if intercept else y @ y
    r2 = 1.0 - (resid @ resid) / tss if tss > 0 else 1.0
    return RegressionResult(tuple(coefs), float(min(1.0, max(0.0, r2))), n, dof, resid)


@dataclass(frozen=True)
class RankCorrelation:
    rho: float
    p_two_tailed: float
    n: int


def spearman(x, y) -> RankCorrelation:
    """Spearman correlation on mid-ranks with the t-approximation p-value."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if len(x) != len(y):
        raise ValueError("x and y must have equal length")
    n = len(x)
    if n < 3:
        raise DegenerateInput("need at least 3 observations")
    rx, ry = rankdata(x), rankdata(y)
    rx -= rx.mean()
    ry -= ry.mean()
    den = np.sqrt((rx @ rx) * (ry @ ry))
    if den == 0:
        raise DegenerateInput("ranks have zero variance")
    rho = float(np.clip((rx @ ry) / den, -1.0, 1.0))
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * np.sqrt((n - 2) / (1 - rho ** 2))
        p = two_tailed_p(t, n - 2)
    return RankCorrelation(rho, p, n)


def spearman_matrix(columns: np.ndarray) -> np.ndarray:
    """Pairwise Spearman rho between the columns of a 2-D array."""
    columns = np.asarray(columns, dtype=float)
    k = columns.shape[1]
    out = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = spearman(columns[:, i], columns[:, j]).rho
    return out


class TTestResult(NamedTuple):
    t: float
    p: float
    n: int


def t_test_one_sample(x, mu0: float = 0.0) -> TTestResult:
    """Two-tailed one-sample t-test of ``mean(x) == mu0``."""
    x = np.asarray(x, dtype=float).ravel()
    n = len(x)
    if n < 2:
        raise DegenerateInput("need at least 2 observations")
    sd = x.std(ddof=1)
    if sd == 0:
        raise DegenerateInput("sample has zero variance")
    t = (x.mean() - mu0) / (sd / np.sqrt(n))
    return TTestResult(float(t), two_tailed_p(t, n - 1), n)
