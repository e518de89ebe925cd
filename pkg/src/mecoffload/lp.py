"""Small dense linear programming: two-phase tableau simplex plus a
vertex-enumeration micro-oracle used to test it.

The problems this package produces are tiny (a few dozen variables at most),
so termination certainty and determinism matter more than speed: entering
columns follow Bland's lowest-index rule, ratio-test ties break toward the
lowest row, and rows are rescaled to unit max-coefficient before solving so
mixed second/bit scales do not starve the pivot threshold.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LpProblem",
    "LpConstraint",
    "LpSolution",
    "LpStructureError",
    "BudgetExceededError",
    "constraint",
    "solve_lp",
    "enumerate_vertices",
]

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9

_RELATIONS = ("<=", "=", ">=")


class LpStructureError(ValueError):
    """Malformed problem (dimension mismatch, bad relation); distinct from an
    infeasible status."""


class BudgetExceededError(RuntimeError):
    """An exhaustive routine refused an input beyond its size guard."""


@dataclass(frozen=True)
class LpConstraint:
    coeffs: tuple[float, ...]
    relation: str
    rhs: float


def constraint(coeffs, relation: str, rhs: float) -> LpConstraint:
    return LpConstraint(tuple(float(a) for a in coeffs), relation, float(rhs))


@dataclass(frozen=True)
class LpProblem:
    """min objective . x subject to row constraints and per-variable bounds.

    bounds holds one (lower, upper) pair per variable; use -inf/+inf for
    unbounded sides.  Constraints may be LpConstraint values or plain
    (coeffs, relation, rhs) triples.
    """

    objective: tuple[float, ...]
    constraints: tuple[LpConstraint, ...]
    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(float(c) for c in self.objective))
        cons = []
        for con in self.constraints:
            if isinstance(con, LpConstraint):
                cons.append(constraint(con.coeffs, con.relation, con.rhs))
            else:
                coeffs, relation, rhs = con
                cons.append(constraint(coeffs, relation, rhs))
        object.__setattr__(self, "constraints", tuple(cons))
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))
        n = len(self.objective)
        if len(self.bounds) != n:
            raise LpStructureError(f"{len(self.bounds)} bounds for {n} variables")
        for k, con in enumerate(self.constraints):
            if len(con.coeffs) != n:
                raise LpStructureError(
                    f"constraint {k} has {len(con.coeffs)} coefficients, expected {n}"
                )
            if con.relation not in _RELATIONS:
                raise LpStructureError(f"constraint {k}: unknown relation {con.relation!r}")
            if not math.isfinite(con.rhs):
                raise LpStructureError(f"constraint {k}: rhs must be finite")
        for j, (lo, hi) in enumerate(self.bounds):
            if lo > hi:
                raise LpStructureError(f"variable {j}: lower bound {lo} above upper bound {hi}")

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[float, ...]
    objective_value: float


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _run_simplex(tableau: np.ndarray, basis: list[int], max_iter: int = 100_000) -> str:
    m = tableau.shape[0] - 1
    for _ in range(max_iter):
        obj = tableau[-1]
        enter = -1
        for j in range(tableau.shape[1] - 1):
            if obj[j] < -PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = math.inf
        for i in range(m):
            a = tableau[i, enter]
            if a > PIVOT_TOL:
                ratio = tableau[i, -1] / a
                if ratio < best:  # strict: ties keep the lowest row index
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(tableau, leave, enter)
        basis[leave] = enter
    raise RuntimeError("simplex iteration cap exceeded")


def solve_lp(problem: LpProblem) -> LpSolution:
    """Two-phase simplex.  Deterministic: identical problems yield identical
    solutions, including the vertex picked on degenerate optima."""
    n = problem.n_vars
    nan_x = tuple([math.nan] * n)
    if n == 0:
        ok = all(
            (con.relation == "<=" and con.rhs >= -FEAS_TOL)
            or (con.relation == ">=" and con.rhs <= FEAS_TOL)
            or (con.relation == "=" and abs(con.rhs) <= FEAS_TOL)
            for con in problem.constraints
        )
        return LpSolution("optimal" if ok else "infeasible", (), 0.0)

    # Shift every variable onto [0, inf): x = lo + y, or x = hi - y for
    # upper-bounded-only variables, or x = y+ - y- for free ones.
    col_sign: list[float] = []
    col_var: list[int] = []
    offsets = np.zeros(n)
    upper_rows: list[tuple[int, float]] = []  # (column, residual upper bound)
    for j, (lo, hi) in enumerate(problem.bounds):
        if math.isfinite(lo):
            offsets[j] = lo
            col_var.append(j)
            col_sign.append(1.0)
            if math.isfinite(hi):
                upper_rows.append((len(col_var) - 1, hi - lo))
        elif math.isfinite(hi):
            offsets[j] = hi
            col_var.append(j)
            col_sign.append(-1.0)
        else:
            col_var.append(j)
            col_sign.append(1.0)
            col_var.append(j)
            col_sign.append(-1.0)
    ncols = len(col_var)

    cobj = np.asarray(problem.objective)
    cvec = np.array([cobj[col_var[k]] * col_sign[k] for k in range(ncols)])
    cscale = float(np.max(np.abs(cvec)))
    if cscale > 0.0:
        cvec = cvec / cscale

    rows: list[np.ndarray] = []
    rels: list[str] = []
    rhs: list[float] = []
    for con in problem.constraints:
        a = np.asarray(con.coeffs)
        row = np.array([a[col_var[k]] * col_sign[k] for k in range(ncols)])
        b = con.rhs - float(a @ offsets)
        scale = float(np.max(np.abs(row)))
        if scale <= 0.0:
            sat = (
                (con.relation == "<=" and b >= -FEAS_TOL)
                or (con.relation == ">=" and b <= FEAS_TOL)
                or (con.relation == "=" and abs(b) <= FEAS_TOL)
            )
            if not sat:
                return LpSolution("infeasible", nan_x, math.nan)
            continue
        rows.append(row / scale)
        rels.append(con.relation)
        rhs.append(b / scale)
    for k, ub in upper_rows:
        row = np.zeros(ncols)
        row[k] = 1.0
        scale = max(1.0, abs(ub))
        rows.append(row / scale)
        rels.append("<=")
        rhs.append(ub / scale)

    m = len(rows)
    A = np.array(rows) if m else np.zeros((0, ncols))
    b = np.array(rhs) if m else np.zeros(0)
    rel = list(rels)
    for i in range(m):
        if b[i] < 0.0:
            A[i] = -A[i]
            b[i] = -b[i]
            rel[i] = {"<=": ">=", ">=": "<=", "=": "="}[rel[i]]

    n_slack = sum(1 for r in rel if r == "<=")
    n_surplus = sum(1 for r in rel if r == ">=")
    n_art = sum(1 for r in rel if r in (">=", "="))
    a_at = ncols + n_slack + n_surplus
    total = a_at + n_art
    tableau = np.zeros((m + 1, total + 1))
    basis: list[int] = []
    art_cols: list[int] = []
    si = ti = ai = 0
    for i in range(m):
        tableau[i, :ncols] = A[i]
        tableau[i, -1] = b[i]
        if rel[i] == "<=":
            tableau[i, ncols + si] = 1.0
            basis.append(ncols + si)
            si += 1
        elif rel[i] == ">=":
            tableau[i, ncols + n_slack + ti] = -1.0
            tableau[i, a_at + ai] = 1.0
            basis.append(a_at + ai)
            art_cols.append(a_at + ai)
            ti += 1
            ai += 1
        else:
            tableau[i, a_at + ai] = 1.0
            basis.append(a_at + ai)
            art_cols.append(a_at + ai)
            ai += 1

    if n_art:
        # Phase 1: minimize the artificial sum.
        tableau[-1, :] = 0.0
        for c in art_cols:
            tableau[-1, c] = 1.0
        for i in range(m):
            if basis[i] in art_cols:
                tableau[-1] -= tableau[i]
        status = _run_simplex(tableau, basis)
        phase1 = -tableau[-1, -1]
        if status != "optimal" or phase1 > FEAS_TOL * (1.0 + float(np.max(b, initial=0.0))):
            return LpSolution("infeasible", nan_x, math.nan)
        # Drive leftover artificials out of the basis; rows where that is
        # impossible are redundant and dropped.
        keep: list[int] = []
        for i in range(m):
            if basis[i] in art_cols:
                pivot_col = -1
                for j in range(a_at):
                    if abs(tableau[i, j]) > PIVOT_TOL:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(tableau, i, pivot_col)
                    basis[i] = pivot_col
                    keep.append(i)
            else:
                keep.append(i)
        tableau = np.vstack([tableau[keep], tableau[-1:]])
        basis = [basis[i] for i in keep]
        m = len(basis)
        tableau = np.hstack([tableau[:, :a_at], tableau[:, -1:]])

    # Phase 2: restore the true objective as reduced costs over the basis.
    tableau[-1, :] = 0.0
    tableau[-1, :ncols] = cvec
    for i in range(m):
        cb = cvec[basis[i]] if basis[i] < ncols else 0.0
        if cb != 0.0:
            tableau[-1] -= cb * tableau[i]
    status = _run_simplex(tableau, basis)
    if status == "unbounded":
        return LpSolution("unbounded", nan_x, -math.inf)

    y = np.zeros(tableau.shape[1] - 1)
    for i in range(m):
        y[basis[i]] = tableau[i, -1]
    x = offsets.copy()
    for k in range(ncols):
        x[col_var[k]] += col_sign[k] * y[k]
    objective_value = float(cobj @ x)
    return LpSolution("optimal", tuple(float(v) for v in x), objective_value)


# ---------------------------------------------------------------------------
# Vertex enumeration oracle
# ---------------------------------------------------------------------------

MAX_ORACLE_VARS = 12
MAX_ORACLE_COMBOS = 2_000_000


def _as_rows(problem: LpProblem) -> list[tuple[np.ndarray, str, float]]:
    """All constraints, including finite bounds, as (coeffs, relation, rhs)."""
    n = problem.n_vars
    rows: list[tuple[np.ndarray, str, float]] = []
    for con in problem.constraints:
        rows.append((np.asarray(con.coeffs, dtype=float), con.relation, con.rhs))
    for j, (lo, hi) in enumerate(problem.bounds):
        e = np.zeros(n)
        e[j] = 1.0
        if math.isfinite(lo):
            rows.append((e.copy(), ">=", lo))
        if math.isfinite(hi):
            rows.append((e.copy(), "<=", hi))
    return rows


def _feasible(rows, x: np.ndarray) -> bool:
    for a, relation, b in rows:
        v = float(a @ x)
        tol = FEAS_TOL * (1.0 + abs(b))
        if relation == "<=" and v > b + tol:
            return False
        if relation == ">=" and v < b - tol:
            return False
        if relation == "=" and abs(v - b) > tol:
            return False
    return True


def _enumerate_feasible_vertices(rows, n: int) -> list[np.ndarray]:
    n_combos = math.comb(len(rows), n) if len(rows) >= n else 0
    if n_combos > MAX_ORACLE_COMBOS:
        raise BudgetExceededError(f"{n_combos} candidate bases exceed the enumeration guard")
    vertices: list[np.ndarray] = []
    for combo in itertools.combinations(range(len(rows)), n):
        A = np.array([rows[i][0] for i in combo])
        b = np.array([rows[i][2] for i in combo])
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if float(np.max(np.abs(A @ x - b))) > 1e-7 * (1.0 + float(np.max(np.abs(b)))):
            continue  # near-singular system, unreliable solve
        if _feasible(rows, x):
            vertices.append(x)
    return vertices


def enumerate_vertices(problem: LpProblem) -> LpSolution:
    """Exhaustive vertex enumeration: the reference answer for solve_lp.

    Visits every n-subset of constraint rows (bounds included), keeps the
    feasible intersection points, and returns the minimum-objective one.
    Unboundedness is detected by enumerating the recession directions inside
    a unit box and looking for one that improves the objective.  Only meant
    for tiny problems; anything beyond the size guards is refused.
    """
    n = problem.n_vars
    if n > MAX_ORACLE_VARS:
        raise BudgetExceededError(
            f"{n} variables exceed the {MAX_ORACLE_VARS}-variable oracle guard"
        )
    if n == 0:
        return solve_lp(problem)
    rows = _as_rows(problem)
    c = np.asarray(problem.objective)

    vertices = _enumerate_feasible_vertices(rows, n)
    if not vertices:
        return LpSolution("infeasible", tuple([math.nan] * n), math.nan)

    # Recession directions: relax every rhs to 0 and keep directions inside a
    # unit box, so the cone section is a polytope enumerable the same way.
    ray_rows: list[tuple[np.ndarray, str, float]] = [(a, relation, 0.0) for a, relation, _ in rows]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        ray_rows.append((e.copy(), "<=", 1.0))
        ray_rows.append((e.copy(), ">=", -1.0))
    for d in _enumerate_feasible_vertices(ray_rows, n):
        if float(c @ d) < -FEAS_TOL * (1.0 + float(np.max(np.abs(c)))):
            return LpSolution("unbounded", tuple([math.nan] * n), -math.inf)

    best = vertices[0]
    best_obj = float(c @ best)
    for x in vertices[1:]:
        obj = float(c @ x)
        if obj < best_obj:
            best_obj = obj
            best = x
    return LpSolution("optimal", tuple(float(v) for v in best), best_obj)
