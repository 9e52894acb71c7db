"""Least-squares line fits for scaling-exponent estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    slope_stderr: float


def fit_line(x: np.ndarray, y: np.ndarray) -> LineFit:
    """Ordinary least squares y = a*x + b with the slope's standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need at least two points to fit a line")
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise ValueError("x values are all identical")
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    dof = x.size - 2
    if dof > 0:
        resid = y - (slope * x + intercept)
        stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    else:
        stderr = float("nan")
    return LineFit(slope, intercept, stderr)


def fit_loglog(ns, values) -> LineFit:
    """Slope of log(values) against log(ns)."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(ns <= 0) or np.any(values <= 0):
        raise ValueError("log-log fit requires positive data")
    return fit_line(np.log(ns), np.log(values))
