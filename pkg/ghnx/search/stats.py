"""Statistics of search results"""
import numpy as np
from scipy import stats

from ..errors import InputError, StatisticsError


def pearson_r(xs, ys):
    """Sample Pearson correlation

    Computed in two passes (means, then centred sums).

    Parameters
    ----------
    xs, ys: sequence of float
       paired samples, at least two

    Returns
    -------
    float
       r in [-1, 1]

    Raises
    ------
    StatisticsError
       if either sample has zero variance
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        emsg = f"samples must be paired 1-d sequences, got {x.shape} and {y.shape}"
        raise InputError(emsg)
    if len(x) < 2:
        raise StatisticsError(f"correlation needs at least 2 pairs, got {len(x)}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = np.dot(dx, dx), np.dot(dy, dy)
    if sxx == 0.0 or syy == 0.0:
        raise StatisticsError("correlation is undefined for zero variance")
    r = np.dot(dx, dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def pearson_p_value(r, n):
    """One-sided p-value of r > 0 under the t-test with n - 2 dof"""
    if n < 3:
        raise StatisticsError(f"significance needs at least 3 pairs, got {n}")
    if r >= 1.0:
        return 0.0
    if r <= -1.0:
        return 1.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    return float(stats.t.sf(t, n - 2))


def anytime_auc(points):
    """Area under an accuracy-FLOPs curve, normalized by the FLOP span

    Parameters
    ----------
    points: sequence of (float, float)
       (FLOPs, accuracy) pairs with distinct FLOP values, in any order

    Returns
    -------
    float
       trapezoidal area divided by max(FLOPs) - min(FLOPs); lies in [0, 1]
       when every accuracy does
    """
    pts = sorted((float(f), float(a)) for f, a in points)
    if len(pts) < 2:
        raise InputError(f"AUC needs at least 2 points, got {len(pts)}")
    f = np.array([p[0] for p in pts])
    a = np.array([p[1] for p in pts])
    if np.any(np.diff(f) == 0):
        dup = sorted(set(f[1:][np.diff(f) == 0]))
        raise InputError(f"duplicate FLOP values in AUC points: {dup}")
    area = np.sum(0.5 * (a[1:] + a[:-1]) * np.diff(f))
    return float(area / (f[-1] - f[0]))


def dedupe_points(points):
    """Keep the best accuracy of each FLOP value"""
    best = {}
    for f, a in points:
        best[f] = max(a, best.get(f, a))
    return sorted(best.items())
