"""Least-squares fits of scaling exponents."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_POINTS = 4


@dataclass
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    residual_max: float

    @property
    def flagged(self) -> bool:
        """Fewer points than a fit should rest on."""
        return self.n_points < MIN_POINTS

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared,
                "n_points": self.n_points, "residual_max": self.residual_max, "flagged": self.flagged}


def fit_loglog(xs, ys) -> FitResult:
    """Fit log y = slope log x + intercept."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or len(x) < 2:
        raise ValueError("need two or more matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    res = ly - (slope * lx + intercept)
    ss = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(res ** 2)) / ss if ss > 0 else 1.0
    return FitResult(float(slope), float(intercept), min(max(r2, 0.0), 1.0), len(x), float(np.abs(res).max()))
