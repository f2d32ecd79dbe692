"""Order-of-accuracy estimation from residual ladders."""

import math


def fit_order(hs, errs) -> float:
    """Least-squares slope of log(err) against log(h).

    Positive result means the residual shrinks under refinement.  Entries
    with non-positive error are dropped (already at rounding level).
    """
    pts = [(h, e) for h, e in zip(hs, errs) if e > 0.0]
    if len(pts) < 2:
        return math.nan
    lh = [math.log(h) for h, _ in pts]
    le = [math.log(e) for _, e in pts]
    n = len(pts)
    mh = sum(lh) / n
    me = sum(le) / n
    denom = sum((a - mh) ** 2 for a in lh)
    if denom == 0.0:
        return math.nan
    return sum((a - mh) * (b - me) for a, b in zip(lh, le)) / denom


def halving_ratios(errs):
    """Successive error ratios e[i]/e[i+1] along a ladder."""
    return [a / b if b > 0 else math.inf for a, b in zip(errs, errs[1:])]
