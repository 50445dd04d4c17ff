"""Exact rational linear programming.

The public entry point is :func:`solve_lp`.  Programs are stated over bounded
variables with sparse rows; all data is exact (Fraction / int / 'p/q'
strings), floats are rejected.

Three cooperating engines live here:

* a dense bounded-variable tableau simplex over rationals with Bland's rule
  (reference implementation; default for small programs),
* a revised bounded-variable simplex over rationals with a sparse LU behind
  it (primal and dual pivoting; used at scale and for warm starts),
* a float tableau simplex (numpy) whose only job is to propose a basis.

Floats never decide anything: a float-proposed basis is refactorized in
exact arithmetic, feasibility and reduced costs are re-derived exactly, and
any remaining pivots run in the exact revised engine.  Every reported
outcome is re-checked against the original rows before it leaves
:func:`solve_lp`.  All tie-breaking is index-based, so repeated solves of
the same program give identical results.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .fastrat import RQ, to_fraction
from .model import ValidationError, as_rational

__all__ = [
    "LE",
    "EQ",
    "GE",
    "MIN",
    "MAX",
    "LinRow",
    "LinearProgram",
    "LpOutcome",
    "LpError",
    "solve_lp",
]

LE, EQ, GE = "<=", "=", ">="
MIN, MAX = "min", "max"

_RELS = (LE, EQ, GE)


class LpError(RuntimeError):
    """Internal inconsistency while solving (certificate re-check failed)."""


@dataclass
class LinRow:
    coeffs: dict[int, Fraction]
    rel: str
    rhs: Fraction
    name: str = ""


@dataclass
class LinearProgram:
    """min/max c.x subject to sparse rows and per-variable bounds.

    Bounds default to [0, +inf); ``None`` means unbounded on that side.
    """

    num_vars: int
    sense: str = MIN
    objective: list[Fraction] = field(default_factory=list)
    rows: list[LinRow] = field(default_factory=list)
    lower: list[Fraction | None] = field(default_factory=list)
    upper: list[Fraction | None] = field(default_factory=list)
    names: list[str] | None = None

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise ValidationError("num_vars cannot be negative")
        if self.sense not in (MIN, MAX):
            raise ValidationError(f"sense must be '{MIN}' or '{MAX}'")
        if not self.objective:
            self.objective = [Fraction(0)] * self.num_vars
        if not self.lower:
            self.lower = [Fraction(0)] * self.num_vars
        if not self.upper:
            self.upper = [None] * self.num_vars

    def set_objective(self, coeffs: Mapping[int, object]) -> None:
        for j, v in coeffs.items():
            self._check_var(j)
            self.objective[j] = as_rational(v, what="objective coefficient")

    def add_row(self, coeffs: Mapping[int, object], rel: str, rhs, name: str = "") -> int:
        if rel not in _RELS:
            raise ValidationError(f"bad relation {rel!r}")
        clean: dict[int, Fraction] = {}
        for j, v in coeffs.items():
            self._check_var(j)
            q = as_rational(v, what="row coefficient")
            if q != 0:
                clean[j] = q
        self.rows.append(LinRow(clean, rel, as_rational(rhs, what="rhs"), name))
        return len(self.rows) - 1

    def set_bounds(self, j: int, lower, upper) -> None:
        self._check_var(j)
        lo = None if lower is None else as_rational(lower, what="lower bound")
        hi = None if upper is None else as_rational(upper, what="upper bound")
        if lo is not None and hi is not None and lo > hi:
            raise ValidationError(f"variable {j}: lower bound {lo} exceeds upper {hi}")
        self.lower[j] = lo
        self.upper[j] = hi

    def _check_var(self, j) -> None:
        if not isinstance(j, int) or isinstance(j, bool) or not 0 <= j < self.num_vars:
            raise ValidationError(f"variable index {j!r} out of range")

    def validate(self) -> None:
        for seq, what in ((self.objective, "objective"), (self.lower, "lower"), (self.upper, "upper")):
            if len(seq) != self.num_vars:
                raise ValidationError(f"{what} has wrong length")
        for j in range(self.num_vars):
            lo, hi = self.lower[j], self.upper[j]
            if lo is not None and hi is not None and lo > hi:
                raise ValidationError(f"variable {j}: empty bound interval")
        for row in self.rows:
            if row.rel not in _RELS:
                raise ValidationError(f"bad relation {row.rel!r}")

    def clone_with_bounds(self, fixes: Mapping[int, tuple] | None = None) -> "LinearProgram":
        """Shallow copy sharing rows, with optional per-variable bound overrides."""
        other = LinearProgram(
            num_vars=self.num_vars,
            sense=self.sense,
            objective=self.objective,
            rows=self.rows,
            lower=list(self.lower),
            upper=list(self.upper),
            names=self.names,
        )
        for j, (lo, hi) in (fixes or {}).items():
            other.set_bounds(j, lo, hi)
        return other


@dataclass
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    point: list[Fraction] | None = None
    stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# standard form
# ---------------------------------------------------------------------------


class _Std:
    """Equality standard form: min c.y, A y = b, 0 <= y <= u (u may be None).

    Columns 0..nstruct-1 are transformed original variables, then one slack
    per inequality row (always +1 after row normalization), then one
    artificial per row (fixed to [0,0] outside phase one).  ``recover``
    maps each original variable back to its std counterpart(s).
    """

    __slots__ = (
        "nrows", "nstruct", "nslack", "ncols", "cols", "b", "c", "upper",
        "const", "recover", "maximize", "art_sign", "slack_col",
    )

    def __init__(self) -> None:
        self.cols: list[list[tuple[int, object]]] = []
        self.b: list[object] = []
        self.c: list[object] = []
        self.upper: list[object | None] = []
        self.recover: list[tuple] = []
        self.const = RQ(0)
        self.maximize = False
        self.art_sign: list[int] = []
        self.slack_col: list[int | None] = []

    @property
    def total_cols(self) -> int:
        return self.ncols + self.nrows  # structurals+slacks, then artificials

    def col_entries(self, j: int) -> list[tuple[int, object]]:
        if j < self.ncols:
            return self.cols[j]
        k = j - self.ncols
        return [(k, RQ(self.art_sign[k]))]

    def upper_of(self, j: int, art_free: bool) -> object | None:
        if j < self.ncols:
            return self.upper[j]
        return None if art_free else RQ(0)

    def cost_of(self, j: int, phase_one: bool) -> object:
        if phase_one:
            return RQ(1) if j >= self.ncols else RQ(0)
        return self.c[j] if j < self.ncols else RQ(0)


def _standardize(lp: LinearProgram) -> _Std:
    std = _Std()
    std.maximize = lp.sense == MAX
    sign = RQ(-1) if std.maximize else RQ(1)

    col_of: list[tuple] = []  # per original var, transform record
    std.const = RQ(0)
    for j in range(lp.num_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        cj = sign * RQ(lp.objective[j].numerator, lp.objective[j].denominator)
        if lo is not None:
            idx = len(std.cols)
            std.cols.append([])
            span = None if hi is None else RQ(hi.numerator, hi.denominator) - RQ(lo.numerator, lo.denominator)
            std.upper.append(span)
            std.c.append(cj)
            shift = RQ(lo.numerator, lo.denominator)
            std.const += cj * shift
            rec = ("shift", idx, shift)
        elif hi is not None:
            idx = len(std.cols)
            std.cols.append([])
            std.upper.append(None)
            std.c.append(-cj)
            mirror = RQ(hi.numerator, hi.denominator)
            std.const += cj * mirror
            rec = ("mirror", idx, mirror)
        else:
            ip = len(std.cols)
            std.cols.append([])
            std.upper.append(None)
            std.c.append(cj)
            im = len(std.cols)
            std.cols.append([])
            std.upper.append(None)
            std.c.append(-cj)
            rec = ("split", ip, im)
        col_of.append(rec)
        std.recover.append(rec)

    nstruct_pre = len(std.cols)
    rows_build: list[tuple[dict[int, object], object, bool]] = []
    for row in lp.rows:
        acc: dict[int, object] = {}
        rhs = RQ(row.rhs.numerator, row.rhs.denominator)
        for j, a in row.coeffs.items():
            q = RQ(a.numerator, a.denominator)
            rec = col_of[j]
            if rec[0] == "shift":
                acc[rec[1]] = acc.get(rec[1], RQ(0)) + q
                rhs -= q * rec[2]
            elif rec[0] == "mirror":
                acc[rec[1]] = acc.get(rec[1], RQ(0)) - q
                rhs -= q * rec[2]
            else:
                acc[rec[1]] = acc.get(rec[1], RQ(0)) + q
                acc[rec[2]] = acc.get(rec[2], RQ(0)) - q
        # normalize so a slack, if any, enters with +1
        if row.rel == GE:
            acc = {k: -v for k, v in acc.items()}
            rhs = -rhs
            has_slack = True
        elif row.rel == LE:
            has_slack = True
        else:
            has_slack = False
        rows_build.append((acc, rhs, has_slack))

    std.nrows = len(rows_build)
    std.nslack = sum(1 for _, _, s in rows_build if s)
    # allocate slack columns
    std.slack_col = []
    for _, _, has_slack in rows_build:
        if has_slack:
            std.cols.append([])
            std.upper.append(None)
            std.c.append(RQ(0))
            std.slack_col.append(len(std.cols) - 1)
        else:
            std.slack_col.append(None)
    std.nstruct = nstruct_pre
    std.ncols = len(std.cols)

    std.b = []
    std.art_sign = []
    for k, (acc, rhs, has_slack) in enumerate(rows_build):
        for j, v in acc.items():
            if v != 0:
                std.cols[j].append((k, v))
        if has_slack:
            std.cols[std.slack_col[k]].append((k, RQ(1)))
        std.b.append(rhs)
        std.art_sign.append(1 if rhs >= 0 else -1)
    for col in std.cols:
        col.sort()
    return std


def _patched_std(base: _Std, base_lp: LinearProgram, lp: LinearProgram) -> "_Std | None":
    """Copy-on-write restandardization when only variable bounds changed.

    Shares the column data with ``base`` and patches the rhs, upper bounds,
    constant and recovery records.  Returns None when a bound change altered
    the column layout (a variable gained or lost finite lower bounds), in
    which case the caller must restandardize from scratch.
    """
    out = _Std()
    out.cols = base.cols
    out.c = base.c
    out.slack_col = base.slack_col
    out.nrows, out.nstruct = base.nrows, base.nstruct
    out.nslack, out.ncols = base.nslack, base.ncols
    out.maximize = base.maximize
    out.upper = list(base.upper)
    out.b = list(base.b)
    out.recover = list(base.recover)
    out.const = base.const
    touched: set[int] = set()
    for j in range(lp.num_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        lo0, hi0 = base_lp.lower[j], base_lp.upper[j]
        if lo == lo0 and hi == hi0:
            continue
        rec = base.recover[j]
        if rec[0] != "shift" or lo is None:
            return None
        idx = rec[1]
        delta = RQ(lo.numerator, lo.denominator) - rec[2]
        if delta != 0:
            for k, v in base.cols[idx]:
                out.b[k] = out.b[k] - delta * v
                touched.add(k)
            out.const = out.const + out.c[idx] * delta
            out.recover[j] = ("shift", idx, rec[2] + delta)
        span = None if hi is None else RQ(hi.numerator, hi.denominator) - RQ(lo.numerator, lo.denominator)
        out.upper[idx] = span
    if touched:
        out.art_sign = list(base.art_sign)
        for k in touched:
            out.art_sign[k] = 1 if out.b[k] >= 0 else -1
    else:
        out.art_sign = base.art_sign
    return out


class StdCache:
    """Reusable standardization for a family of programs differing only in
    variable bounds (e.g. branch-and-bound nodes cloned from one root)."""

    def __init__(self, lp: LinearProgram) -> None:
        self.lp = lp
        self.std = _standardize(lp)

    def std_for(self, lp2: LinearProgram) -> "_Std | None":
        if lp2 is self.lp:
            return self.std
        if (
            lp2.rows is not self.lp.rows
            or lp2.objective is not self.lp.objective
            or lp2.sense != self.lp.sense
        ):
            return None
        return _patched_std(self.std, self.lp, lp2)


def extend_warm_token(warm: tuple, old_std: "_Std", new_std: "_Std") -> tuple | None:
    """Carry a warm token across appended inequality rows.

    The old optimal basis plus one basic slack per new row is dual feasible
    for the extended program (new slacks cost nothing), so the exact dual
    simplex repairs primal feasibility in roughly one pivot per violated new
    row.  Requires the old rows/columns to be an untouched prefix of the new
    program; returns None when the shapes say otherwise or a new row lacks a
    slack (equality rows need a phase-one start instead).
    """
    basis0, status0 = warm
    if new_std.nrows < old_std.nrows or new_std.nstruct != old_std.nstruct:
        return None
    grown = new_std.ncols - old_std.ncols
    if grown != new_std.nrows - old_std.nrows:
        return None  # appended rows must contribute exactly their slacks
    basis = [j if j < old_std.ncols else j + grown for j in basis0]
    status = ["L"] * (new_std.ncols + new_std.nrows)
    for j in range(old_std.ncols):
        status[j] = status0[j]
    for k in range(old_std.nrows):  # artificials shift past the new slacks
        status[new_std.ncols + k] = status0[old_std.ncols + k]
    for k in range(old_std.nrows, new_std.nrows):
        sc = new_std.slack_col[k]
        if sc is None:
            return None
        basis.append(sc)
        status[sc] = "B"
    return (tuple(basis), tuple(status))


def gomory_cuts(
    lp: LinearProgram,
    warm: tuple,
    integer_vars: Iterable[int],
    std: "_Std | None" = None,
    max_cuts: int = 24,
    round_bits: int | None = 16,
) -> list[tuple[dict[int, Fraction], Fraction]]:
    """Exact Gomory mixed-integer cuts separating the optimum behind ``warm``.

    ``warm`` is the ``stats['warm']`` token of an optimal solve of ``lp``;
    ``integer_vars`` lists the original variables the caller constrains to
    integer values.  Returns ``(coeffs, rhs)`` pairs, each meaning
    ``sum(coeffs[j] * x[j]) >= rhs``.  Every returned cut is valid for all
    feasible points with integral ``integer_vars`` and is violated by the
    current fractional optimum.  Derived from the rational simplex tableau,
    so validity is exact — no tolerances involved.

    ``round_bits`` dyadically coarsens each cut (coefficients rounded up,
    right side down, to multiples of 2**-round_bits).  Since every variable
    here is bounded below by zero once shifted, that only weakens the cut,
    keeping it valid while sparing later solves the tableau-sized rationals.
    Cuts a coarsening leaves unviolated are dropped.
    """
    if std is None:
        std = _standardize(lp)
    rev = _Revised(std)
    kind, payload = rev.solve_from(warm[0], warm[1])
    if kind != "optimal":
        return []

    # std columns that take integer values whenever the caller's integer
    # variables do (integral shifts/mirrors preserve integrality)
    int_std: set[int] = set()
    for jo in integer_vars:
        rec = std.recover[jo]
        if rec[0] in ("shift", "mirror") and rec[2].denominator == 1:
            int_std.add(rec[1])

    # invert the recovery map: std struct column -> original variable
    back: dict[int, tuple] = {}
    for jo, rec in enumerate(std.recover):
        if rec[0] == "split":
            back[rec[1]] = ("split", jo)
            back[rec[2]] = ("split", jo)
        else:
            back[rec[1]] = (rec[0], jo, rec[2])
    slack_row: dict[int, int] = {}
    for k, sc in enumerate(std.slack_col):
        if sc is not None:
            slack_row[sc] = k

    xB = rev._xb()
    point = _recover_point(lp, std, rev._extract())
    seen: set = {
        (frozenset(row.coeffs.items()), row.rhs)
        for row in lp.rows
        if row.rel == GE
    }
    candidates: list[tuple] = []
    for k, jb in enumerate(rev.basis):
        if jb not in int_std:
            continue
        beta = xB[k]
        f0 = beta - (beta.numerator // beta.denominator)
        if f0 == 0:
            continue
        candidates.append((abs(f0 - RQ(1, 2)), k, f0))
    candidates.sort()

    cuts: list[tuple[dict[int, Fraction], Fraction]] = []
    one = RQ(1)
    for _, k, f0 in candidates[:max_cuts]:
        ek = [RQ(0)] * rev.m
        ek[k] = one
        yrow = rev._btran(ek)
        # cut in the local frame:  sum gamma_j * xtilde_j >= f0
        coeffs_std: dict[int, object] = {}
        rhs = f0
        bad = False
        for j in range(rev.total):
            if rev.status[j] == "B":
                continue
            uj = rev._upper(j)
            if uj is not None and uj == 0:
                continue  # fixed at bound; contributes nothing
            abar = RQ(0)
            for row, v in std.col_entries(j):
                if yrow[row]:
                    abar += yrow[row] * v
            at_upper = rev.status[j] == "U"
            atil = -abar if at_upper else abar
            if j in int_std:
                fj = atil - (atil.numerator // atil.denominator)
                gamma = fj if fj <= f0 else f0 * (one - fj) / (one - f0)
            else:
                gamma = atil if atil >= 0 else f0 * (-atil) / (one - f0)
            if gamma == 0:
                continue
            # back to std variables: xtilde = x' (at lower) or u - x' (at upper)
            if at_upper:
                coeffs_std[j] = coeffs_std.get(j, RQ(0)) - gamma
                rhs -= gamma * uj
            else:
                coeffs_std[j] = coeffs_std.get(j, RQ(0)) + gamma
        # std variables back to original ones
        coeffs: dict[int, Fraction] = {}

        def _bump(jo: int, q) -> None:
            coeffs[jo] = coeffs.get(jo, Fraction(0)) + to_fraction(q)

        for j, q in coeffs_std.items():
            if q == 0:
                continue
            if j >= std.ncols:
                bad = True  # artificial leaked into a cut; should be fixed
                break
            if j in slack_row:
                ridx = slack_row[j]
                row = lp.rows[ridx]
                if row.rel == LE:  # slack = rhs - sum coeffs.x
                    for jo, a in row.coeffs.items():
                        _bump(jo, -q * RQ(a.numerator, a.denominator))
                    rhs -= q * RQ(row.rhs.numerator, row.rhs.denominator)
                else:  # GE rows were negated: slack = sum coeffs.x - rhs
                    for jo, a in row.coeffs.items():
                        _bump(jo, q * RQ(a.numerator, a.denominator))
                    rhs += q * RQ(row.rhs.numerator, row.rhs.denominator)
                continue
            rec = back[j]
            if rec[0] == "split":
                bad = True  # free variable halves cannot be recombined
                break
            if rec[0] == "shift":  # x' = x - shift
                _bump(rec[1], q)
                rhs += q * rec[2]
            else:  # mirror: x' = mirror - x
                _bump(rec[1], -q)
                rhs -= q * rec[2]
        if bad:
            continue
        rhs_f = to_fraction(rhs)
        if round_bits is not None:
            scale = 1 << round_bits
            rounded: dict[int, Fraction] = {}
            exactable = True
            for jo, a in coeffs.items():
                lo = lp.lower[jo]
                if lo is None or lo < 0:
                    exactable = False  # raising this coeff could tighten
                    break
                rounded[jo] = Fraction(-((-a.numerator * scale) // a.denominator), scale)
            if exactable:
                coeffs = rounded
                rhs_f = Fraction((rhs_f.numerator * scale) // rhs_f.denominator, scale)
        clean = {jo: a for jo, a in coeffs.items() if a != 0}
        sig = (frozenset(clean.items()), rhs_f)
        if sig in seen:
            continue
        if sum(a * point[jo] for jo, a in clean.items()) < rhs_f:
            seen.add(sig)
            cuts.append((clean, rhs_f))
    return cuts


def _recover_point(lp: LinearProgram, std: _Std, xstd: list) -> list[Fraction]:
    out: list[Fraction] = []
    for rec in std.recover:
        if rec[0] == "shift":
            out.append(to_fraction(rec[2] + xstd[rec[1]]))
        elif rec[0] == "mirror":
            out.append(to_fraction(rec[2] - xstd[rec[1]]))
        else:
            out.append(to_fraction(xstd[rec[1]] - xstd[rec[2]]))
    return out


def _recover_ray(std: _Std, dstd: dict[int, object]) -> list[Fraction]:
    out: list[Fraction] = []
    for rec in std.recover:
        if rec[0] == "shift":
            out.append(to_fraction(dstd.get(rec[1], RQ(0))))
        elif rec[0] == "mirror":
            out.append(to_fraction(-dstd.get(rec[1], RQ(0))))
        else:
            out.append(to_fraction(dstd.get(rec[1], RQ(0)) - dstd.get(rec[2], RQ(0))))
    return out


# ---------------------------------------------------------------------------
# dense exact tableau engine
# ---------------------------------------------------------------------------


class _DenseExact:
    """Two-phase bounded-variable tableau simplex, Bland's rule throughout."""

    def __init__(self, std: _Std) -> None:
        self.std = std
        m = std.nrows
        total = std.total_cols
        self.m = m
        self.total = total
        zero = RQ(0)
        self.T = [[zero] * total for _ in range(m)]
        for j in range(std.ncols):
            for k, v in std.cols[j]:
                self.T[k][j] = v
        for k in range(m):
            self.T[k][std.ncols + k] = RQ(std.art_sign[k])
        self.basis: list[int] = []
        self.status = ["L"] * total
        self.xB: list[object] = []
        self.art_free = True
        for k in range(m):
            sc = std.slack_col[k]
            if sc is not None and std.b[k] >= 0:
                self.basis.append(sc)
                self.xB.append(std.b[k])
                self.status[sc] = "B"
            else:
                self.basis.append(std.ncols + k)
                self.xB.append(std.b[k] if std.art_sign[k] > 0 else -std.b[k])
                self.status[std.ncols + k] = "B"
                if std.art_sign[k] < 0:
                    # normalize so the starting basis column is +1 (identity)
                    self.T[k] = [-v for v in self.T[k]]
        self.iterations = 0

    def _upper(self, j: int) -> object | None:
        return self.std.upper_of(j, self.art_free)

    def _costs(self, phase_one: bool) -> list:
        return [self.std.cost_of(j, phase_one) for j in range(self.total)]

    def _reduced(self, c: list) -> list:
        d = list(c)
        T = self.T
        for k, bk in enumerate(self.basis):
            cb = c[bk]
            if cb != 0:
                row = T[k]
                for j in range(self.total):
                    if row[j] != 0:
                        d[j] = d[j] - cb * row[j]
        return d

    def _objective(self, c: list) -> object:
        total = RQ(0)
        for k, bk in enumerate(self.basis):
            if c[bk] != 0:
                total += c[bk] * self.xB[k]
        for j in range(self.total):
            if self.status[j] == "U" and c[j] != 0:
                total += c[j] * self._upper(j)
        return total

    def _run_phase(self, c: list) -> tuple[str, dict | None]:
        d = self._reduced(c)
        m, total, T = self.m, self.total, self.T
        while True:
            self.iterations += 1
            enter = -1
            direction = 0
            for j in range(total):
                if self.status[j] == "B":
                    continue
                uj = self._upper(j)
                if uj is not None and uj == 0:
                    continue  # fixed variable
                if self.status[j] == "L" and d[j] < 0:
                    enter, direction = j, 1
                    break
                if self.status[j] == "U" and d[j] > 0:
                    enter, direction = j, -1
                    break
            if enter < 0:
                return "optimal", None

            span = self._upper(enter)
            # best = (t, tiebreak-var, kind, row, side-the-leaver-rests-at)
            best = None if span is None else (span, enter, "flip", -1, "")
            col = [T[k][enter] for k in range(m)]
            for k in range(m):
                a = col[k]
                if a == 0:
                    continue
                delta = -a if direction > 0 else a
                if delta < 0:
                    t = self.xB[k] / (-delta)
                    side = "L"
                else:
                    ub = self._upper(self.basis[k])
                    if ub is None:
                        continue
                    t = (ub - self.xB[k]) / delta
                    side = "U"
                if best is None or t < best[0] or (t == best[0] and self.basis[k] < best[1]):
                    best = (t, self.basis[k], "pivot", k, side)
            if best is None:
                ray = {enter: RQ(direction)}
                for k in range(m):
                    if col[k] != 0:
                        ray[self.basis[k]] = ray.get(self.basis[k], RQ(0)) - RQ(direction) * col[k]
                return "unbounded", ray

            t, _, kind, row_k, best_side = best
            if t != 0:
                for k in range(m):
                    if col[k] != 0:
                        self.xB[k] = self.xB[k] - RQ(direction) * t * col[k]
            if kind == "flip":
                self.status[enter] = "U" if direction > 0 else "L"
                continue
            leaving = self.basis[row_k]
            enter_val = (RQ(0) if self.status[enter] == "L" else self._upper(enter)) + RQ(direction) * t
            self.status[leaving] = best_side
            self.status[enter] = "B"
            self.basis[row_k] = enter
            piv = T[row_k][enter]
            if piv != 1:
                inv = RQ(1) / piv
                T[row_k] = [v * inv for v in T[row_k]]
            prow = T[row_k]
            for k in range(m):
                if k == row_k:
                    continue
                f = T[k][enter]
                if f != 0:
                    trk = T[k]
                    T[k] = [trk[j] - f * prow[j] for j in range(total)]
            f = d[enter]
            if f != 0:
                d = [d[j] - f * prow[j] for j in range(total)]
            self.xB[row_k] = enter_val

    def solve(self) -> tuple[str, list | None, object | None, dict | None]:
        """Returns (status, xstd, objective_over_std, ray)."""
        if any(self.basis[k] >= self.std.ncols for k in range(self.m)):
            status, _ = self._run_phase(self._costs(phase_one=True))
            if status != "optimal":
                raise LpError("phase one cannot be unbounded")
            if self._objective(self._costs(phase_one=True)) > 0:
                return "infeasible", None, None, None
        self.art_free = False
        status, ray = self._run_phase(self._costs(phase_one=False))
        if status == "unbounded":
            return "unbounded", None, None, ray
        xstd = self._extract()
        obj = self._objective(self._costs(phase_one=False))
        return "optimal", xstd, obj, None

    def _extract(self) -> list:
        x = [RQ(0)] * self.std.ncols
        for j in range(self.std.ncols):
            if self.status[j] == "U":
                x[j] = self._upper(j)
        for k, bk in enumerate(self.basis):
            if bk < self.std.ncols:
                x[bk] = self.xB[k]
        return x


# ---------------------------------------------------------------------------
# exact sparse LU
# ---------------------------------------------------------------------------


class _Singular(Exception):
    pass


class _SparseLU:
    """Exact LU of a basis matrix, singleton-first Markowitz-lite pivoting."""

    def __init__(self, n: int, columns: list[list[tuple[int, object]]]) -> None:
        self.n = n
        rows: list[dict[int, object]] = [dict() for _ in range(n)]
        colrows: list[set[int]] = [set() for _ in range(n)]
        for cidx, col in enumerate(columns):
            for r, v in col:
                if v != 0:
                    rows[r][cidx] = v
                    colrows[cidx].add(r)
        self.lops: list[tuple[int, int, object]] = []  # (target_row, pivot_row, factor)
        self.pivots: list[tuple[int, int, object, dict]] = []  # (prow, pcol, val, urow)
        active_rows = set(range(n))
        active_cols = set(range(n))
        heap: list[tuple[int, int]] = [(len(colrows[c]), c) for c in range(n)]
        heapq.heapify(heap)

        for _ in range(n):
            pc = -1
            while heap:
                cnt, c = heapq.heappop(heap)
                if c not in active_cols:
                    continue
                if cnt != len(colrows[c]):
                    heapq.heappush(heap, (len(colrows[c]), c))
                    continue
                pc = c
                break
            if pc < 0 or not colrows[pc]:
                raise _Singular("basis matrix is singular")
            pr = min(colrows[pc], key=lambda r: (len(rows[r]), r))
            pval = rows[pr][pc]
            active_rows.discard(pr)
            active_cols.discard(pc)
            prow_items = rows[pr]
            for c2 in prow_items:
                if c2 != pc:
                    colrows[c2].discard(pr)
                    heapq.heappush(heap, (len(colrows[c2]), c2))
            for r in list(colrows[pc]):
                if r == pr or r not in active_rows:
                    continue
                fac = rows[r][pc] / pval
                self.lops.append((r, pr, fac))
                rrow = rows[r]
                for c2, v2 in prow_items.items():
                    if c2 == pc or c2 not in active_cols:
                        continue
                    nv = rrow.get(c2, RQ(0)) - fac * v2
                    if nv == 0:
                        if c2 in rrow:
                            del rrow[c2]
                            colrows[c2].discard(r)
                            heapq.heappush(heap, (len(colrows[c2]), c2))
                    else:
                        if c2 not in rrow:
                            colrows[c2].add(r)
                            heapq.heappush(heap, (len(colrows[c2]), c2))
                        rrow[c2] = nv
                del rrow[pc]
            colrows[pc] = set()
            self.pivots.append((pr, pc, pval, prow_items))
        # transpose index of U for solve_T
        self.ucols: dict[int, list[tuple[int, object]]] = {}
        for k, (pr, pc, pval, urow) in enumerate(self.pivots):
            for c2, v2 in urow.items():
                if c2 != pc:
                    self.ucols.setdefault(c2, []).append((k, v2))

    def solve(self, b: list) -> list:
        """x with B x = b; b indexed by row, x by column."""
        y = list(b)
        for r, pr, fac in self.lops:
            if y[pr] != 0:
                y[r] = y[r] - fac * y[pr]
        x = [RQ(0)] * self.n
        for pr, pc, pval, urow in reversed(self.pivots):
            s = y[pr]
            for c2, v2 in urow.items():
                if c2 != pc and x[c2] != 0:
                    s = s - v2 * x[c2]
            x[pc] = s / pval
        return x

    def solve_T(self, c: list) -> list:
        """y with B^T y = c; c indexed by column, y by row."""
        v = [RQ(0)] * self.n
        w = [RQ(0)] * self.n
        for k, (pr, pc, pval, _urow) in enumerate(self.pivots):
            s = c[pc]
            for k2, val in self.ucols.get(pc, ()):
                if k2 < k and v[k2] != 0:
                    s = s - val * v[k2]
            v[k] = s / pval
            w[pr] = v[k]
        for r, pr, fac in reversed(self.lops):
            if w[r] != 0:
                w[pr] = w[pr] - fac * w[r]
        return w


# ---------------------------------------------------------------------------
# exact revised engine
# ---------------------------------------------------------------------------


_PIVOT_CAP_BASE = 4000


class _Revised:
    """Bounded-variable revised simplex over the extended std columns.

    Artificial columns are always present, fixed to [0,0] except while the
    built-in phase one runs.  Any (basis, statuses) pair over the extended
    columns can be offered as a start; the driver decides primal vs dual.
    """

    _ETA_LIMIT = 60  # pivots between full refactorizations

    def __init__(self, std: _Std) -> None:
        self.std = std
        self.m = std.nrows
        self.total = std.total_cols
        self.art_free = False
        self.basis: list[int] = []
        self.status: list[str] = []
        self.lu: _SparseLU | None = None
        self.etas: list[tuple[int, list]] = []
        self.stats = {"factors": 0, "primal_pivots": 0, "dual_pivots": 0}

    # -- plumbing ---------------------------------------------------------

    def _upper(self, j: int) -> object | None:
        return self.std.upper_of(j, self.art_free)

    def _cost(self, j: int, phase_one: bool) -> object:
        return self.std.cost_of(j, phase_one)

    def _factor(self) -> bool:
        try:
            self.lu = _SparseLU(self.m, [self.std.col_entries(j) for j in self.basis])
        except _Singular:
            return False
        self.etas = []
        self.stats["factors"] += 1
        return True

    def _push_eta(self, row: int, w: list) -> bool:
        """Record one basis change in product form; refactor periodically."""
        self.etas.append((row, w))
        if len(self.etas) > self._ETA_LIMIT:
            return self._factor()
        return True

    def _ftran(self, rhs: list) -> list:
        x = self.lu.solve(rhs)
        for k, w in self.etas:
            t = x[k] / w[k]
            if t:
                for i, wi in enumerate(w):
                    if wi:
                        x[i] -= t * wi
            x[k] = t
        return x

    def _btran(self, c: list) -> list:
        y = list(c)
        for k, w in reversed(self.etas):
            s = y[k]
            for i, wi in enumerate(w):
                if wi and i != k:
                    s -= wi * y[i]
            y[k] = s / w[k]
        return self.lu.solve_T(y)

    def _xb(self) -> list:
        rhs = list(self.std.b)
        for j in range(self.total):
            if self.status[j] == "U":
                uj = self._upper(j)
                if uj != 0:
                    for k, v in self.std.col_entries(j):
                        rhs[k] = rhs[k] - v * uj
        return self._ftran(rhs)

    def _duals(self, phase_one: bool) -> list:
        cb = [self._cost(bk, phase_one) for bk in self.basis]
        return self._btran(cb)

    def _reduced_for(self, j: int, y: list, phase_one: bool) -> object:
        s = self._cost(j, phase_one)
        for k, v in self.std.col_entries(j):
            if y[k] != 0:
                s = s - y[k] * v
        return s

    def _is_fixed(self, j: int) -> bool:
        uj = self._upper(j)
        return uj is not None and uj == 0

    # -- primal loop --------------------------------------------------------

    def _primal(self, phase_one: bool) -> tuple[str, dict | None]:
        cap = _PIVOT_CAP_BASE + 30 * self.m
        stall = 0
        while True:
            if self.stats["primal_pivots"] + self.stats["dual_pivots"] > cap:
                return "cap", None
            xB = self._xb()
            y = self._duals(phase_one)
            # steepest violation normally; first violation (Bland, finite)
            # once degenerate pivots pile up
            bland = stall > _STALL_LIMIT
            enter, direction = -1, 0
            worst = None
            for j in range(self.total):
                if self.status[j] == "B" or self._is_fixed(j):
                    continue
                dj = self._reduced_for(j, y, phase_one)
                if self.status[j] == "L" and dj < 0:
                    cand = -dj
                elif self.status[j] == "U" and dj > 0:
                    cand = dj
                else:
                    continue
                if bland:
                    enter, direction = j, (1 if self.status[j] == "L" else -1)
                    break
                if worst is None or cand > worst:
                    worst = cand
                    enter, direction = j, (1 if self.status[j] == "L" else -1)
            if enter < 0:
                return "optimal", None
            w = self._ftran(self._col_dense(enter))
            span = self._upper(enter)
            best_t, best_var, best_row, best_side = span, enter, -1, "flip"
            for k in range(self.m):
                a = w[k]
                if a == 0:
                    continue
                delta = -a if direction > 0 else a
                if delta < 0:
                    t = xB[k] / (-delta)
                    side = "L"
                else:
                    ub = self._upper(self.basis[k])
                    if ub is None:
                        continue
                    t = (ub - xB[k]) / delta
                    side = "U"
                if best_t is None or t < best_t or (t == best_t and self.basis[k] < best_var):
                    best_t, best_var, best_row, best_side = t, self.basis[k], k, side
            if best_t is None:
                ray = {enter: RQ(direction)}
                for k in range(self.m):
                    if w[k] != 0:
                        ray[self.basis[k]] = ray.get(self.basis[k], RQ(0)) - RQ(direction) * w[k]
                return "unbounded", ray
            self.stats["primal_pivots"] += 1
            stall = stall + 1 if best_t == 0 else 0
            if best_row < 0:
                self.status[enter] = "U" if direction > 0 else "L"
                continue
            leaving = self.basis[best_row]
            self.basis[best_row] = enter
            self.status[leaving] = best_side
            self.status[enter] = "B"
            if not self._push_eta(best_row, w):
                return "singular", None

    def _col_dense(self, j: int) -> list:
        col = [RQ(0)] * self.m
        for k, v in self.std.col_entries(j):
            col[k] = v
        return col

    # -- dual loop ----------------------------------------------------------

    def _dual(self) -> str:
        cap = _PIVOT_CAP_BASE + 30 * self.m
        stall = 0
        while True:
            if self.stats["primal_pivots"] + self.stats["dual_pivots"] > cap:
                return "cap"
            xB = self._xb()
            # worst primal violation normally; smallest variable index
            # (Bland, finite) once degenerate pivots pile up
            bland = stall > _STALL_LIMIT
            leave_row = -1
            leave_var = None
            leave_viol = None
            for k in range(self.m):
                bk = self.basis[k]
                ub = self._upper(bk)
                if xB[k] < 0:
                    viol = -xB[k]
                elif ub is not None and xB[k] > ub:
                    viol = xB[k] - ub
                else:
                    continue
                if bland:
                    if leave_var is None or bk < leave_var:
                        leave_row, leave_var = k, bk
                elif leave_viol is None or viol > leave_viol:
                    leave_row, leave_var, leave_viol = k, bk, viol
            if leave_row < 0:
                return "feasible"
            below = xB[leave_row] < 0
            ek = [RQ(0)] * self.m
            ek[leave_row] = RQ(1)
            yrow = self._btran(ek)
            y = self._duals(phase_one=False)
            best = None  # (ratio, tiebreak varindex, w_j)
            for j in range(self.total):
                if self.status[j] == "B" or self._is_fixed(j):
                    continue
                wj = RQ(0)
                for k, v in self.std.col_entries(j):
                    if yrow[k] != 0:
                        wj += yrow[k] * v
                if wj == 0:
                    continue
                at_lower = self.status[j] == "L"
                if below:
                    ok = (at_lower and wj < 0) or (not at_lower and wj > 0)
                    denom = -wj
                else:
                    ok = (at_lower and wj > 0) or (not at_lower and wj < 0)
                    denom = wj
                if not ok:
                    continue
                dj = self._reduced_for(j, y, phase_one=False)
                ratio = dj / denom
                if best is None or ratio < best[0]:
                    best = (ratio, j, wj)
                elif ratio == best[0]:
                    if bland:
                        if j < best[1]:
                            best = (ratio, j, wj)
                    elif abs(wj) > abs(best[2]):
                        best = (ratio, j, wj)
            if best is None:
                return "infeasible"
            self.stats["dual_pivots"] += 1
            stall = stall + 1 if best[0] == 0 else 0
            enter = best[1]
            w = self._ftran(self._col_dense(enter))
            if w[leave_row] == 0:
                return "singular"
            self.basis[leave_row] = enter
            self.status[leave_var] = "L" if below else "U"
            self.status[enter] = "B"
            if not self._push_eta(leave_row, w):
                return "singular"

    # -- drivers ------------------------------------------------------------

    def solve_from(self, basis: Sequence[int], statuses: Sequence[str]):
        """Finish solving from a proposed basis.  Returns (kind, payload)."""
        self.basis = list(basis)
        self.status = list(statuses)
        self.art_free = False
        if len(self.basis) != self.m or len(self.status) != self.total:
            return ("fallback", None)
        if not self._factor():
            return ("fallback", None)
        xB = self._xb()
        primal_ok = all(
            xB[k] >= 0
            and (self._upper(self.basis[k]) is None or xB[k] <= self._upper(self.basis[k]))
            for k in range(self.m)
        )
        if primal_ok:
            return self._finish_primal()
        y = self._duals(phase_one=False)
        flips = []
        dual_ok = True
        for j in range(self.total):
            if self.status[j] == "B" or self._is_fixed(j):
                continue
            dj = self._reduced_for(j, y, phase_one=False)
            if self.status[j] == "L" and dj < 0:
                if self._upper(j) is not None:
                    flips.append((j, "U"))
                else:
                    dual_ok = False
                    break
            elif self.status[j] == "U" and dj > 0:
                flips.append((j, "L"))
        if dual_ok:
            for j, st in flips:
                self.status[j] = st
            res = self._dual()
            if res == "feasible":
                return self._finish_primal()
            if res == "infeasible":
                return ("infeasible", None)
        return ("fallback", None)

    def two_phase(self):
        """Exact solve from scratch (crash basis + phase one). Always conclusive
        unless a pivot cap or singular basis forces the dense fallback."""
        self.basis = []
        self.status = ["L"] * self.total
        need_art = False
        for k in range(self.m):
            sc = self.std.slack_col[k]
            if sc is not None and self.std.b[k] >= 0:
                self.basis.append(sc)
                self.status[sc] = "B"
            else:
                self.basis.append(self.std.ncols + k)
                self.status[self.std.ncols + k] = "B"
                need_art = True
        if not self._factor():
            return ("fallback", None)
        if need_art:
            self.art_free = True
            res, _ = self._primal(phase_one=True)
            if res != "optimal":
                return ("fallback", None)
            xB = self._xb()
            art_total = RQ(0)
            for k, bk in enumerate(self.basis):
                if bk >= self.std.ncols:
                    art_total += xB[k]
            for j in range(self.std.ncols, self.total):
                if self.status[j] == "U":
                    raise LpError("artificial parked at an infinite bound")
            if art_total > 0:
                return ("infeasible", None)
        self.art_free = False
        return self._finish_primal()

    def _finish_primal(self):
        res, ray = self._primal(phase_one=False)
        if res == "optimal":
            return ("optimal", self._extract())
        if res == "unbounded":
            return ("unbounded", ray)
        return ("fallback", None)

    def _extract(self) -> list:
        xB = self._xb()
        x = [RQ(0)] * self.std.ncols
        for j in range(self.std.ncols):
            if self.status[j] == "U":
                x[j] = self._upper(j)
        for k, bk in enumerate(self.basis):
            if bk < self.std.ncols:
                x[bk] = xB[k]
            elif xB[k] != 0:
                raise LpError("artificial variable stuck at a nonzero value")
        return x

    def warm_token(self) -> tuple:
        return (tuple(self.basis), tuple(self.status))


# ---------------------------------------------------------------------------
# float proposal engine
# ---------------------------------------------------------------------------


class _FloatProposal:
    """Float tableau simplex used solely to guess a good basis."""

    FEAS_TOL = 1e-9
    COST_TOL = 1e-9

    def __init__(self, std: _Std) -> None:
        import numpy as np

        self.np = np
        self.std = std
        m, total = std.nrows, std.total_cols
        self.m, self.total = m, total
        T = np.zeros((m, total), dtype=float)
        for j in range(std.ncols):
            for k, v in std.cols[j]:
                T[k, j] = float(v)
        for k in range(m):
            T[k, std.ncols + k] = float(std.art_sign[k])
        self.T = T
        self.upper = np.full(total, np.inf)
        for j in range(std.ncols):
            if std.upper[j] is not None:
                self.upper[j] = float(std.upper[j])
        self.art_free = True
        self.basis = []
        self.status = np.zeros(total, dtype=np.int8)  # 0=L, 1=U, 2=B
        self.xB = np.zeros(m)
        b = np.array([float(v) for v in std.b])
        for k in range(m):
            sc = std.slack_col[k]
            if sc is not None and b[k] >= 0:
                self.basis.append(sc)
                self.status[sc] = 2
                self.xB[k] = b[k]
            else:
                a = std.ncols + k
                self.basis.append(a)
                self.status[a] = 2
                self.xB[k] = abs(b[k])
                if std.art_sign[k] < 0:
                    T[k] *= -1.0  # normalize the starting basis column to +1
        self.basis = np.array(self.basis, dtype=int)
        # pristine (normalized) data kept for periodic drift correction
        self.A0 = T.copy()
        self.b0 = self.xB.copy()

    def _upper_vec(self):
        np = self.np
        up = self.upper.copy()
        if not self.art_free:
            up[self.std.ncols:] = 0.0
        return up

    def _refresh(self, c):
        """Rebuild the tableau from pristine data, killing update drift.

        Writes in place so loop-local aliases stay valid; returns the new
        reduced-cost vector, or None when the basis is numerically singular.
        """
        np = self.np
        B = self.A0[:, self.basis]
        try:
            self.T[:] = np.linalg.solve(B, self.A0)
            up = self._upper_vec()
            atU = self.status == 1
            rhs = self.b0.copy()
            if atU.any():
                bounded = np.where(np.isfinite(up), up, 0.0)
                rhs -= self.A0[:, atU] @ bounded[atU]
            self.xB[:] = np.linalg.solve(B, rhs)
        except np.linalg.LinAlgError:
            return None
        return c - c[self.basis] @ self.T

    def _run_phase(self, c) -> str:
        np = self.np
        m, total = self.m, self.total
        T, xB = self.T, self.xB
        up = self._upper_vec()
        cb = c[self.basis]
        d = c - cb @ T
        cap = 2000 + 25 * (m + total)
        taboo = np.zeros(total, dtype=np.int64)
        bland = False
        for it in range(cap):
            if it == 1500:
                bland = True  # degeneracy guard: Dantzig can stall, Bland cannot
            if it and it % 250 == 0:
                nd = self._refresh(c)
                if nd is None:
                    return "stuck"
                d = nd
            fixed = up <= 0
            atL = (self.status == 0) & ~fixed
            atU = (self.status == 1) & ~fixed
            viol = np.where(atL, d, np.inf)
            viol = np.minimum(viol, np.where(atU, -d, np.inf))
            viol = np.where(taboo > it, np.inf, viol)
            if bland:
                cand = np.nonzero(viol < -self.COST_TOL)[0]
                if cand.size == 0:
                    return "optimal"
                enter = int(cand[0])
            else:
                enter = int(np.argmin(viol))
                if viol[enter] >= -self.COST_TOL:
                    return "optimal"
            direction = 1.0 if self.status[enter] == 0 else -1.0
            col = T[:, enter]
            delta = -direction * col
            with np.errstate(divide="ignore", invalid="ignore"):
                t_low = np.where(delta < -1e-12, xB / (-delta), np.inf)
                ub_b = up[self.basis]
                t_up = np.where(delta > 1e-12, (ub_b - xB) / delta, np.inf)
            t_rows = np.minimum(t_low, t_up)
            t_rows = np.where(t_rows < 0, 0.0, t_rows)
            span = up[enter] if np.isfinite(up[enter]) else np.inf
            k_best = int(np.argmin(t_rows)) if m else -1
            t_min = t_rows[k_best] if m else np.inf
            if not np.isfinite(t_min) and not np.isfinite(span):
                return "unbounded"
            if span <= t_min:
                t = span
                xB -= direction * t * col
                self.status[enter] = 1 - self.status[enter]
            else:
                t = t_min
                ties = np.nonzero(t_rows <= t_min + 1e-12)[0]
                k_best = int(ties[np.argmin(self.basis[ties])])
                piv = T[k_best, enter]
                if abs(piv) < 1e-11:
                    # drift or a genuinely tiny pivot: rebuild, then either
                    # retry cleanly or shelve this column for a while
                    nd = self._refresh(c)
                    if nd is None:
                        return "stuck"
                    d = nd
                    if abs(T[k_best, enter]) < 1e-11:
                        taboo[enter] = it + 50
                    continue
                leaving = int(self.basis[k_best])
                xB -= direction * t * col
                enter_val = (0.0 if self.status[enter] == 0 else up[enter]) + direction * t
                self.status[leaving] = 0 if t_low[k_best] <= t_up[k_best] else 1
                self.status[enter] = 2
                self.basis[k_best] = enter
                T[k_best] /= piv
                factors = T[:, enter].copy()
                factors[k_best] = 0.0
                T -= np.outer(factors, T[k_best])
                dj = d[enter]
                d = d - dj * T[k_best]
                xB[k_best] = enter_val
        return "stuck"

    def run(self) -> tuple[str, list[int], list[str]]:
        np = self.np
        # deterministic cost jitter sidesteps Dantzig stalls on the heavily
        # degenerate programs branch-and-bound produces; the exact finishing
        # pivots absorb the distortion
        rng = np.random.default_rng(0)
        c1 = np.zeros(self.total)
        c1[self.std.ncols:] = 1.0 + 1e-9 * rng.random(self.m)
        status = "optimal"
        if (self.basis >= self.std.ncols).any():
            status = self._run_phase(c1)
            if status == "optimal":
                if self._refresh(c1) is None:
                    status = "stuck"
                else:
                    art_val = float(
                        sum(self.xB[k] for k in range(self.m) if self.basis[k] >= self.std.ncols)
                    )
                    if art_val > 1e-7:
                        status = "infeasible"
        if status in ("optimal",):
            self.art_free = False
            c2 = np.zeros(self.total)
            for j in range(self.std.ncols):
                c2[j] = float(self.std.c[j])
            scale = max(1.0, float(np.abs(c2).max()))
            c2 += 1e-9 * scale * rng.random(self.total)
            status = self._run_phase(c2)
        smap = {0: "L", 1: "U", 2: "B"}
        statuses = [smap[int(s)] for s in self.status]
        return status, [int(b) for b in self.basis], statuses


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

_DENSE_CELL_LIMIT = 15000
_STALL_LIMIT = 120  # degenerate pivots tolerated before Bland's rule kicks in


def _finalize(lp: LinearProgram, std: _Std, kind: str, payload, stats: dict, check: bool = True) -> LpOutcome:
    if kind == "infeasible":
        return LpOutcome(status="infeasible", stats=stats)
    if kind == "unbounded":
        if payload is not None:
            ray = _recover_ray(std, payload)
            stats["ray"] = ray
            _check_ray(lp, ray)
        return LpOutcome(status="unbounded", stats=stats)
    xstd = payload
    point = _recover_point(lp, std, xstd)
    value = Fraction(0)
    for j, cj in enumerate(lp.objective):
        if cj != 0:
            value += cj * point[j]
    if check:
        _check_point(lp, point)
    return LpOutcome(status="optimal", value=value, point=point, stats=stats)


def _check_point(lp: LinearProgram, point: list[Fraction]) -> None:
    for j in range(lp.num_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None and point[j] < lo:
            raise LpError(f"certificate check failed: x[{j}] < lower bound")
        if hi is not None and point[j] > hi:
            raise LpError(f"certificate check failed: x[{j}] > upper bound")
    for row in lp.rows:
        lhs = Fraction(0)
        for j, a in row.coeffs.items():
            lhs += a * point[j]
        if row.rel == LE and lhs > row.rhs:
            raise LpError(f"certificate check failed: row {row.name!r} violated")
        if row.rel == GE and lhs < row.rhs:
            raise LpError(f"certificate check failed: row {row.name!r} violated")
        if row.rel == EQ and lhs != row.rhs:
            raise LpError(f"certificate check failed: row {row.name!r} violated")


def _check_ray(lp: LinearProgram, ray: list[Fraction]) -> None:
    drift = Fraction(0)
    for j, cj in enumerate(lp.objective):
        drift += cj * ray[j]
    improving = drift < 0 if lp.sense == MIN else drift > 0
    if not improving:
        raise LpError("unbounded ray does not improve the objective")
    for row in lp.rows:
        move = Fraction(0)
        for j, a in row.coeffs.items():
            move += a * ray[j]
        if (row.rel == LE and move > 0) or (row.rel == GE and move < 0) or (
            row.rel == EQ and move != 0
        ):
            raise LpError("unbounded ray leaves the feasible region")
    for j in range(lp.num_vars):
        if ray[j] > 0 and lp.upper[j] is not None:
            raise LpError("unbounded ray crosses an upper bound")
        if ray[j] < 0 and lp.lower[j] is not None:
            raise LpError("unbounded ray crosses a lower bound")


def solve_lp(lp: LinearProgram, method: str = "auto", warm=None, *, std=None, check: bool = True) -> LpOutcome:
    """Solve exactly.  ``method``: 'auto', 'exact' (dense tableau) or 'guided'.

    ``warm`` may carry the ``stats['warm']`` token of a previous solve of a
    structurally identical program (same rows/columns, bounds may differ);
    it lets branch-and-bound restart from the parent basis.  ``std`` may
    supply a prebuilt standardization (see :class:`StdCache`); ``check=False``
    skips re-verifying the optimal point against the original rows, for
    callers that certify outcomes independently.
    """
    lp.validate()
    if std is None:
        std = _standardize(lp)
    stats: dict = {"method": None}
    cells = std.nrows * (std.total_cols or 1)
    use_dense = method == "exact" or (method == "auto" and cells <= _DENSE_CELL_LIMIT and warm is None)
    if not use_dense:
        rev = _Revised(std)
        if warm is not None:
            kind, payload = rev.solve_from(warm[0], warm[1])
            if kind != "fallback":
                stats.update(rev.stats, method="warm", warm=rev.warm_token())
                return _finalize(lp, std, kind, payload, stats, check=check)
        float_ok = True
        try:
            fp = _FloatProposal(std)
        except (OverflowError, ValueError):
            float_ok = False
        if float_ok:
            fstatus, fbasis, fstatuses = fp.run()
            rev = _Revised(std)
            kind, payload = rev.solve_from(fbasis, fstatuses)
            if kind != "fallback":
                stats.update(rev.stats, method="guided", float_status=fstatus, warm=rev.warm_token())
                return _finalize(lp, std, kind, payload, stats, check=check)
        rev = _Revised(std)
        kind, payload = rev.two_phase()
        if kind != "fallback":
            stats.update(rev.stats, method="revised", warm=rev.warm_token())
            return _finalize(lp, std, kind, payload, stats, check=check)
        if method == "guided" and cells > 4 * _DENSE_CELL_LIMIT:
            raise LpError("all scalable engines failed; refusing a huge dense solve")
    engine = _DenseExact(std)
    status, xstd, _obj, ray = engine.solve()
    stats.update(method="dense", iterations=engine.iterations)
    if status == "infeasible":
        return _finalize(lp, std, "infeasible", None, stats, check=check)
    if status == "unbounded":
        return _finalize(lp, std, "unbounded", ray, stats, check=check)
    return _finalize(lp, std, "optimal", xstd, stats, check=check)
