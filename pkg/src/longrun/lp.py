"""Exact rational linear programming.

A dense two-phase primal simplex over exact rationals with Bland's
pivoting rule, which guarantees termination. No floating point is
involved anywhere, so feasibility and optimality answers are exact and
deterministic. Problem sizes in this package are small (tens of
variables), where a dense tableau is the right trade-off.

Variables are created through LinearProgram.add_variable and referenced
by the returned integer index when building constraints; reported
assignments are keyed by variable name. Free variables are handled by
the usual positive/negative split, equality rows get no slack, and
every row receives an artificial variable for phase 1.
"""

from __future__ import annotations

from typing import NamedTuple

from .rationals import ONE, ZERO, format_rational, rat

FEASIBLE = "feasible"
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LESS_EQUAL = "<="
EQUAL = "=="
GREATER_EQUAL = ">="

MAXIMIZE = "max"
MINIMIZE = "min"


class LpOutcome(NamedTuple):
    status: str
    assignment: dict | None  # variable name -> value
    objective_value: object | None


class LinearProgram:
    def __init__(self):
        self.names = []
        self.nonneg = []
        self.constraints = []  # (coeffs dict var->Rat, rel, rhs)
        self.objective = None  # (coeffs dict var->Rat, direction)
        self._seen = set()

    def add_variable(self, name: str, nonneg: bool = True) -> int:
        if name in self._seen:
            raise ValueError(f"duplicate variable name: {name!r}")
        self._seen.add(name)
        self.names.append(name)
        self.nonneg.append(nonneg)
        return len(self.names) - 1

    def add_constraint(self, coeffs: dict, rel: str, rhs) -> None:
        if rel not in (LESS_EQUAL, EQUAL, GREATER_EQUAL):
            raise ValueError(f"bad relation: {rel!r}")
        self.constraints.append((self._clean(coeffs), rel, rat(rhs)))

    def set_objective(self, coeffs: dict, direction: str) -> None:
        if direction not in (MAXIMIZE, MINIMIZE):
            raise ValueError(f"bad direction: {direction!r}")
        self.objective = (self._clean(coeffs), direction)

    def _clean(self, coeffs: dict) -> dict:
        clean = {}
        for idx, c in coeffs.items():
            if not 0 <= idx < len(self.names):
                raise ValueError(f"unknown variable index: {idx}")
            c = rat(c)
            if c != 0:
                clean[idx] = c
        return clean

    def dump(self) -> str:
        """Human-readable listing of the program, for diagnostics."""
        lines = []
        if self.objective is not None:
            coeffs, direction = self.objective
            terms = " + ".join(
                f"{format_rational(c)}*{self.names[i]}" for i, c in sorted(coeffs.items())
            )
            lines.append(f"{direction}: {terms if terms else '0'}")
        for pos, (coeffs, rel, rhs) in enumerate(self.constraints):
            terms = " + ".join(
                f"{format_rational(c)}*{self.names[i]}" for i, c in sorted(coeffs.items())
            )
            lines.append(f"c{pos}: {terms if terms else '0'} {rel} {format_rational(rhs)}")
        for name, nn in zip(self.names, self.nonneg):
            lines.append(f"{name} >= 0" if nn else f"{name} free")
        return "\n".join(lines) + "\n"


class _Tableau:
    """Simplex working state: rows over columns, rhs, basis, costs."""

    def __init__(self, rows, rhs, basis, n_cols):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.n_cols = n_cols

    def pivot(self, r: int, j: int, costs, zval):
        inv = ONE / self.rows[r][j]
        self.rows[r] = [a * inv for a in self.rows[r]]
        self.rhs[r] = self.rhs[r] * inv
        prow = self.rows[r]
        pb = self.rhs[r]
        for i in range(len(self.rows)):
            if i == r:
                continue
            f = self.rows[i][j]
            if f != 0:
                self.rows[i] = [a - f * p for a, p in zip(self.rows[i], prow)]
                self.rhs[i] = self.rhs[i] - f * pb
        f = costs[j]
        if f != 0:
            costs = [c - f * p for c, p in zip(costs, prow)]
            zval = zval + f * pb
        self.basis[r] = j
        return costs, zval

    def run(self, costs, zval, n_usable_cols: int):
        """Maximize with Bland's rule; returns (status, costs, zval)."""
        while True:
            enter = -1
            for j in range(n_usable_cols):
                if costs[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL, costs, zval
            leave = -1
            best = None
            for r in range(len(self.rows)):
                a = self.rows[r][enter]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[r] < self.basis[leave])
                    ):
                        best = ratio
                        leave = r
            if leave < 0:
                return UNBOUNDED, costs, zval
            costs, zval = self.pivot(leave, enter, costs, zval)

    def price_out(self, costs, zval):
        """Zero the reduced costs of basic columns; returns (costs, zval)."""
        for r, bcol in enumerate(self.basis):
            f = costs[bcol]
            if f != 0:
                prow = self.rows[r]
                costs = [c - f * p for c, p in zip(costs, prow)]
                zval = zval + f * self.rhs[r]
        return costs, zval


def _build_tableau(lp: LinearProgram):
    """Standardize the program.

    Returns (tableau or None, columns, n_real_cols, infeasible_early).
    columns lists (variable index, sign) pairs for the structural
    columns; slack columns follow, artificials come last, one per row.
    Rows whose coefficients are all zero are checked and dropped here;
    a contradictory one makes the whole program trivially infeasible.
    """
    columns = []
    for idx, nn in enumerate(lp.nonneg):
        columns.append((idx, 1))
        if not nn:
            columns.append((idx, -1))
    n_struct = len(columns)
    var_cols = {}
    for col, (v, sgn) in enumerate(columns):
        var_cols.setdefault(v, []).append((col, sgn))

    raw_rows = []
    for coeffs, rel, rhs in lp.constraints:
        if not coeffs:
            ok = (
                rhs == 0
                if rel == EQUAL
                else (rhs >= 0 if rel == LESS_EQUAL else rhs <= 0)
            )
            if not ok:
                return None, columns, 0, True
            continue
        raw_rows.append((coeffs, rel, rhs))

    n_slack = sum(1 for _, rel, _ in raw_rows if rel != EQUAL)
    n_rows = len(raw_rows)
    n_real = n_struct + n_slack
    n_cols = n_real + n_rows

    rows = []
    rhs_col = []
    slack_at = n_struct
    for coeffs, rel, rhs in raw_rows:
        row = [ZERO] * n_cols
        for idx, c in coeffs.items():
            for col, sgn in var_cols[idx]:
                row[col] = c if sgn > 0 else -c
        if rel != EQUAL:
            row[slack_at] = ONE if rel == LESS_EQUAL else -ONE
            slack_at += 1
        if rhs < 0:
            row = [-a for a in row]
            rhs = -rhs
        rows.append(row)
        rhs_col.append(rhs)

    basis = []
    for r in range(n_rows):
        rows[r][n_real + r] = ONE
        basis.append(n_real + r)

    return _Tableau(rows, rhs_col, basis, n_cols), columns, n_real, False


def _phase_one(tab: _Tableau, n_real: int) -> bool:
    """Minimize the artificial mass; True iff a feasible basis remains."""
    costs = [ZERO] * n_real + [-ONE] * (tab.n_cols - n_real)
    costs, zval = tab.price_out(costs, ZERO)
    status, costs, zval = tab.run(costs, zval, n_real)
    assert status == OPTIMAL  # bounded above by 0
    if zval != 0:
        return False
    # Basic artificials now sit at value 0. Pivot each onto a real
    # column, or drop its row as redundant when none is available.
    drop = set()
    for r in range(len(tab.rows)):
        if tab.basis[r] < n_real:
            continue
        enter = -1
        for j in range(n_real):
            if tab.rows[r][j] != 0:
                enter = j
                break
        if enter < 0:
            drop.add(r)
        else:
            costs, _ = tab.pivot(r, enter, costs, ZERO)
    if drop:
        keep = [r for r in range(len(tab.rows)) if r not in drop]
        tab.rows = [tab.rows[r] for r in keep]
        tab.rhs = [tab.rhs[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]
    tab.rows = [row[:n_real] for row in tab.rows]
    tab.n_cols = n_real
    return True


def _extract(lp: LinearProgram, tab: _Tableau, columns) -> dict:
    col_val = {}
    for r, bcol in enumerate(tab.basis):
        col_val[bcol] = tab.rhs[r]
    values = [ZERO] * len(lp.names)
    for col, (v, sgn) in enumerate(columns):
        val = col_val.get(col, ZERO)
        if val != 0:
            values[v] = values[v] + (val if sgn > 0 else -val)
    return {name: values[i] for i, name in enumerate(lp.names)}


def solve_feasible(lp: LinearProgram) -> LpOutcome:
    """Phase-1 feasibility check; ignores any objective."""
    tab, columns, n_real, bad = _build_tableau(lp)
    if bad or not _phase_one(tab, n_real):
        return LpOutcome(INFEASIBLE, None, None)
    return LpOutcome(FEASIBLE, _extract(lp, tab, columns), None)


def solve_optimize(lp: LinearProgram) -> LpOutcome:
    """Two-phase solve; requires an objective to have been set."""
    if lp.objective is None:
        raise ValueError("no objective set")
    tab, columns, n_real, bad = _build_tableau(lp)
    if bad or not _phase_one(tab, n_real):
        return LpOutcome(INFEASIBLE, None, None)

    coeffs, direction = lp.objective
    sign = ONE if direction == MAXIMIZE else -ONE
    costs = [ZERO] * tab.n_cols
    for col, (v, sgn) in enumerate(columns):
        c = coeffs.get(v)
        if c is not None:
            costs[col] = sign * (c if sgn > 0 else -c)
    costs, zval = tab.price_out(costs, ZERO)
    status, costs, zval = tab.run(costs, zval, tab.n_cols)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED, None, None)
    value = zval if direction == MAXIMIZE else -zval
    return LpOutcome(OPTIMAL, _extract(lp, tab, columns), value)
