"""Dense two-phase primal simplex solver.

Small, deterministic and self-contained: the MPC instances solved here
have at most a few hundred variables, so a dense tableau with Bland's
anti-cycling safeguard is plenty.  Statuses are returned, not raised;
only malformed problems raise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

FEASIBILITY_TOL = 1e-7
OPTIMALITY_TOL = 1e-9
PIVOT_TOL = 1e-10


class LpStructureError(ValueError):
    """Malformed linear program (dimension or bound inconsistencies)."""


@dataclass(frozen=True)
class LinearProgram:
    """min c.x  s.t.  A_ub x <= b_ub,  lo <= x <= hi (hi may be None)."""

    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    bounds: tuple[tuple[float, float | None], ...]

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.asarray(self.A_ub, dtype=float).reshape(-1, c.size)
        b = np.asarray(self.b_ub, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A_ub", A)
        object.__setattr__(self, "b_ub", b)
        object.__setattr__(self, "bounds", tuple(self.bounds))
        if A.shape[0] != b.size:
            raise LpStructureError(
                f"A_ub has {A.shape[0]} rows but b_ub has {b.size} entries")
        if len(self.bounds) != c.size:
            raise LpStructureError(
                f"{len(self.bounds)} bounds for {c.size} variables")
        for j, (lo, hi) in enumerate(self.bounds):
            if not np.isfinite(lo):
                raise LpStructureError(f"variable {j}: lower bound must be finite")
            if hi is not None and hi < lo:
                raise LpStructureError(f"variable {j}: bounds crossed ({lo} > {hi})")


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray | None
    objective: float | None
    status: str


def dump_text(lp: LinearProgram) -> str:
    """Line-oriented dump of the LP for external cross-checking."""
    lines = ["min " + " ".join(f"{v:.12g}" for v in lp.c)]
    for row, rhs in zip(lp.A_ub, lp.b_ub):
        lines.append(" ".join(f"{v:.12g}" for v in row) + f" <= {rhs:.12g}")
    for j, (lo, hi) in enumerate(lp.bounds):
        hi_s = "inf" if hi is None else f"{hi:.12g}"
        lines.append(f"x{j} in [{lo:.12g}, {hi_s}]")
    return "\n".join(lines) + "\n"


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _iterate(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> str:
    """Pivot to optimality of ``cost`` over the current tableau.

    Dantzig pricing normally; switches to Bland's rule permanently after a
    run of non-improving pivots, which guarantees termination.
    """
    m = T.shape[0]
    bland = False
    stall = 0
    last_obj = np.inf
    max_stall = 2 * (T.shape[1] + m)
    while True:
        reduced = cost - cost[basis] @ T[:, :-1]
        reduced[basis] = 0.0
        if bland:
            neg = np.flatnonzero(reduced < -OPTIMALITY_TOL)
            if neg.size == 0:
                return OPTIMAL
            col = int(neg[0])
        else:
            col = int(np.argmin(reduced))
            if reduced[col] >= -OPTIMALITY_TOL:
                return OPTIMAL
        ratios = np.full(m, np.inf)
        positive = T[:, col] > PIVOT_TOL
        ratios[positive] = T[positive, -1] / T[positive, col]
        row = int(np.argmin(ratios))
        if not np.isfinite(ratios[row]):
            return UNBOUNDED
        # break ratio ties toward the smallest basis index (Bland-compatible)
        ties = np.flatnonzero(np.abs(ratios - ratios[row]) <= PIVOT_TOL)
        if ties.size > 1:
            row = int(ties[np.argmin(basis[ties])])
        _pivot(T, basis, row, col)
        obj = cost[basis] @ T[:, -1]
        if obj < last_obj - 1e-12:
            stall = 0
        else:
            stall += 1
            if stall > max_stall:
                bland = True
        last_obj = obj


def solve(lp: LinearProgram) -> LpSolution:
    """Two-phase simplex.  Deterministic for identical input."""
    n = lp.c.size
    lo = np.array([b[0] for b in lp.bounds])
    hi = np.array([np.inf if b[1] is None else b[1] for b in lp.bounds])

    # Shift to x = lo + x', x' >= 0; finite upper bounds become rows.
    b_shift = lp.b_ub - lp.A_ub @ lo
    ub_idx = np.flatnonzero(np.isfinite(hi))
    ub_rows = np.zeros((ub_idx.size, n))
    ub_rows[np.arange(ub_idx.size), ub_idx] = 1.0
    A = np.vstack([lp.A_ub, ub_rows])
    b = np.concatenate([b_shift, hi[ub_idx] - lo[ub_idx]])
    m = A.shape[0]

    # Rows with negative rhs are negated and get an artificial variable.
    neg = b < 0
    A = A.copy()
    A[neg] *= -1.0
    b = np.abs(b)
    slack_sign = np.where(neg, -1.0, 1.0)
    art_rows = np.flatnonzero(neg)
    n_art = art_rows.size

    cols = n + m + n_art
    T = np.zeros((m, cols + 1))
    T[:, :n] = A
    T[np.arange(m), n + np.arange(m)] = slack_sign
    basis = np.empty(m, dtype=int)
    basis[~neg] = n + np.flatnonzero(~neg)
    for k, i in enumerate(art_rows):
        T[i, n + m + k] = 1.0
        basis[i] = n + m + k
    T[:, -1] = b

    if n_art:
        phase1_cost = np.zeros(cols)
        phase1_cost[n + m:] = 1.0
        status = _iterate(T, basis, phase1_cost)
        if status != OPTIMAL or phase1_cost[basis] @ T[:, -1] > FEASIBILITY_TOL:
            return LpSolution(x=None, objective=None, status=INFEASIBLE)
        # Drive any zero-level artificials out of the basis.
        for i in np.flatnonzero(basis >= n + m):
            pivot_cols = np.flatnonzero(np.abs(T[i, :n + m]) > PIVOT_TOL)
            if pivot_cols.size:
                _pivot(T, basis, int(i), int(pivot_cols[0]))
        keep = basis < n + m
        T = np.hstack([T[keep][:, :n + m], T[keep][:, -1:]])
        basis = basis[keep]
        m = T.shape[0]
        cols = n + (slack_sign.size)  # slack columns retain their indices

    phase2_cost = np.zeros(T.shape[1] - 1)
    phase2_cost[:n] = lp.c
    status = _iterate(T, basis, phase2_cost)
    if status == UNBOUNDED:
        return LpSolution(x=None, objective=None, status=UNBOUNDED)

    x_shift = np.zeros(n)
    structural = basis < n
    x_shift[basis[structural]] = T[structural, -1]
    x = lo + x_shift
    # Clean tiny negative round-off against the bounds.
    x = np.clip(x, lo, hi)
    return LpSolution(x=x, objective=float(lp.c @ x), status=OPTIMAL)
