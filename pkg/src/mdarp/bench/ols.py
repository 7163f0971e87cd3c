"""Ordinary least squares with classical t tests."""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from ..instance import SPATIAL_MODES, TEMPORAL_MODES


class RankDeficiencyError(ValueError):
    def __init__(self, columns: list[str]):
        self.columns = columns
        super().__init__("design matrix is rank deficient; collinear columns: " + ", ".join(columns))


@dataclass
class OlsFit:
    names: list[str]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r2: float
    adj_r2: float
    residual_se: float
    n_obs: int

    def table(self) -> pd.DataFrame:
        return pd.DataFrame({"coef": self.coefficients, "se": self.standard_errors,
                             "t": self.t_stats, "p": self.p_values}, index=self.names)

    def to_markdown(self) -> str:
        lines = ["| Multiple R | R^2 | Adjusted R^2 | Standard Error | Observations |",
                 "|---|---|---|---|---|",
                 f"| {np.sqrt(self.r2):.4g} | {self.r2:.4g} | {self.adj_r2:.4g} | "
                 f"{self.residual_se:.4g} | {self.n_obs} |", "",
                 "| Variable | Coefficient | Standard Error | t Stat | P-value |",
                 "|---|---|---|---|---|"]
        for name, c, se, t, p in zip(self.names, self.coefficients, self.standard_errors,
                                     self.t_stats, self.p_values):
            lines.append(f"| {name} | {c:.3e} | {se:.3e} | {t:.2f} | {p:.3e}{_stars(p)} |")
        return "\n".join(lines) + "\n"


def _stars(p: float) -> str:
    return " ***" if p < 0.01 else " **" if p < 0.05 else " *" if p < 0.1 else ""


def _collinear(X: np.ndarray, names: list[str]) -> list[str]:
    # greedily keep columns that raise the rank; the rest are in the span of earlier ones
    bad, kept = [], []
    for j in range(X.shape[1]):
        trial = X[:, kept + [j]]
        if np.linalg.matrix_rank(trial) < len(kept) + 1:
            bad.append(names[j])
        else:
            kept.append(j)
    return bad


def ols_fit(X, y, names: list[str] | None = None) -> OlsFit:
    """Least squares fit of ``y`` on the columns of ``X`` (include the intercept column yourself).

    R^2 is centered when a constant column is present, uncentered otherwise.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    names = list(names) if names is not None else [f"x{j}" for j in range(p)]
    if len(names) != p:
        raise ValueError(f"{len(names)} names for {p} columns")
    if y.shape[0] != n:
        raise ValueError(f"y has {y.shape[0]} rows, X has {n}")
    if n < p:
        raise ValueError(f"need at least as many rows ({n}) as columns ({p})")
    if np.linalg.matrix_rank(X) < p:
        raise RankDeficiencyError(_collinear(X, names))

    Q, R = np.linalg.qr(X)
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    dof = n - p
    sigma2 = ssr / dof if dof > 0 else float("nan")
    Rinv = np.linalg.inv(R)
    se = np.sqrt(np.maximum(sigma2 * np.sum(Rinv**2, axis=1), 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, np.sign(beta) * np.inf)
    pv = 2.0 * stats.t.sf(np.abs(t), dof) if dof > 0 else np.full(p, np.nan)

    has_const = any(np.all(X[:, j] == X[0, j]) and X[0, j] != 0 for j in range(p))
    centered = y - y.mean() if has_const else y
    sst = float(centered @ centered)
    if sst == 0.0:
        r2 = 1.0 if ssr == 0.0 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ssr / sst))
    adj = 1.0 - (1.0 - r2) * (n - 1 if has_const else n) / dof if dof > 0 else float("nan")
    adj = min(adj, r2)
    return OlsFit(names, beta, se, t, pv, r2, adj, float(np.sqrt(sigma2)) if dof > 0 else float("nan"),
                  n)


# --------------------------------------------------------------------------- formulas

_TERM = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_CATEGORICAL = {"spatial": SPATIAL_MODES, "temporal": TEMPORAL_MODES}


def design_matrix(formula: str, data: pd.DataFrame) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Parse ``"y ~ a + b - 1"`` against ``data``.

    A term that is not a column but matches a level of a categorical column
    (``C3``, ``Spatial_C3``, ``U04``) becomes a 0/1 indicator.  The intercept
    is named ``Constant``; ``- 1`` or ``+ 0`` drops it.
    """
    if "~" not in formula:
        raise ValueError(f"formula needs '~': {formula!r}")
    lhs, rhs = (s.strip() for s in formula.split("~", 1))
    if lhs not in data:
        raise ValueError(f"unknown response column {lhs!r}")
    intercept = True
    terms: list[str] = []
    for tok in re.findall(r"[+-]?\s*[^+-]+", rhs):
        sign = "-" if tok.strip().startswith("-") else "+"
        name = tok.strip().lstrip("+-").strip()
        if name in ("1", "0"):
            if name == "0" or sign == "-":
                intercept = False
            continue
        if sign == "-":
            raise ValueError(f"cannot remove term {name!r}")
        if not _TERM.match(name):
            raise ValueError(f"bad term {name!r} in formula")
        terms.append(name)
    cols, names = [], []
    for name in terms:
        cols.append(_column(name, data))
        names.append(name)
    if intercept:
        cols.append(np.ones(len(data)))
        names.append("Constant")
    if not cols:
        raise ValueError("formula has no predictors")
    return np.column_stack(cols), data[lhs].to_numpy(dtype=float), names


def _column(name: str, data: pd.DataFrame) -> np.ndarray:
    if name in data:
        return data[name].to_numpy(dtype=float)
    for cat, levels in _CATEGORICAL.items():
        if cat not in data:
            continue
        level = name[len(cat) + 1:] if name.lower().startswith(cat + "_") else name
        if level in set(data[cat].astype(str)):
            return (data[cat].astype(str) == level).to_numpy(dtype=float)
        if level in levels:
            # a level absent from the data still makes a valid (all-zero) indicator
            return np.zeros(len(data))
    raise ValueError(f"unknown term {name!r}: not a column or a spatial/temporal level")


def regress(formula: str, data: pd.DataFrame) -> OlsFit:
    if "status" in data:
        data = data[data["status"] == "ok"]
    X, y, names = design_matrix(formula, data)
    return ols_fit(X, y, names)
