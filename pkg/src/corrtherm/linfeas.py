"""Small exact-rational linear feasibility solver.

Phase-1 simplex with Bland's rule over ``fractions.Fraction``; finds some
x >= 0 with A x = b or reports infeasibility.  Only meant for the tiny
instances produced by witness construction (tens of variables), where exact
arithmetic buys bit-reproducible vertex solutions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


def feasible_point(
    a_rows: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> Optional[list[Fraction]]:
    """Return a vertex solution of {A x = b, x >= 0}, or None if infeasible."""
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    rows = [[Fraction(v) for v in r] for r in a_rows]
    rhs = [Fraction(v) for v in b]
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # tableau columns: n structural + m artificial + rhs
    tab = [rows[i] + [Fraction(int(k == i)) for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    # objective: minimize sum of artificials; reduced costs start as column sums
    obj = [sum(tab[i][j] for i in range(m)) for j in range(n + m + 1)]

    while True:
        enter = next((j for j in range(n + m) if obj[j] > 0), None)
        if enter is None:
            break
        ratios = [
            (tab[i][n + m] / tab[i][enter], basis[i], i)
            for i in range(m)
            if tab[i][enter] > 0
        ]
        if not ratios:
            return None  # unbounded phase-1 cannot happen with b >= 0
        _, _, pivot = min(ratios)
        pr = tab[pivot]
        pv = pr[enter]
        tab[pivot] = [v / pv for v in pr]
        for i in range(m):
            if i != pivot and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [v - f * w for v, w in zip(tab[i], tab[pivot])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [v - f * w for v, w in zip(obj, tab[pivot])]
        basis[pivot] = enter

    if obj[n + m] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = tab[i][n + m]
    return x
