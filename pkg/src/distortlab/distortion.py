"""Suboptimality ratios.

distortion_ratio measures a concrete model against the best deterministic
post-trained model for known utilities. worst_case_profile_distortion takes
the adversary's view: the supremum of that ratio over every unit-sum utility
matrix consistent with an ordinal profile, solved exactly per candidate via a
denominator-normalized linear program in rational arithmetic. An independent
discretized grid search over the same feasible set is provided as the oracle
the LP path is validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import Instance, PostTrainedModel, expected_utility
from .posttrain import optimal_posttrain
from .preferences import PreferenceProfile, UtilityMatrix
from .rules import borda_winner, plurality_winner

DEFAULT_SIZE_CAP = 200


class SizeCapError(ValueError):
    """Worst-case computation requested beyond the exact-arithmetic cap."""


@dataclass(frozen=True)
class DistortionResult:
    """Ratio of the best achievable expected utility to the achieved one.

    value is math.inf when the achieved utility can be (or is) zero while a
    better outcome exists; degenerate marks the 0/0 corner, reported as 1.
    """

    value: Fraction | float
    optimum: Fraction | float
    achieved: Fraction | float
    witness: PostTrainedModel | None = None
    witness_candidate: int | None = None
    degenerate: bool = False

    @property
    def unbounded(self) -> bool:
        return self.value == math.inf


def distortion_ratio(instance: Instance, utilities: UtilityMatrix, model: PostTrainedModel) -> DistortionResult:
    """Realized distortion of one model under known utilities (exact for rationals)."""
    witness, optimum = optimal_posttrain(instance, utilities)
    achieved = expected_utility(instance, utilities, model)
    if achieved == 0:
        if optimum == 0:
            return DistortionResult(Fraction(1), optimum, achieved, witness, degenerate=True)
        return DistortionResult(math.inf, optimum, achieved, witness)
    return DistortionResult(optimum / achieved, optimum, achieved, witness)


# --- exact simplex ----------------------------------------------------------


class LPInfeasibleError(RuntimeError):
    pass


class LPUnboundedError(RuntimeError):
    pass


def _pivot(table, basis, row, col):
    piv = table[row][col]
    table[row] = [v / piv for v in table[row]]
    prow = table[row]
    for i in range(len(table)):
        if i == row:
            continue
        f = table[i][col]
        if f:
            table[i] = [a - f * b for a, b in zip(table[i], prow)]
    basis[row] = col


def _bland_run(table, basis, obj, ncols):
    """Maximize with Bland's rule; obj is the tableau objective row (last)."""
    while True:
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return
        best_row = None
        best_ratio = None
        for i, trow in enumerate(table):
            a = trow[col]
            if a > 0:
                ratio = trow[-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[best_row])
                ):
                    best_ratio = ratio
                    best_row = i
        if best_row is None:
            raise LPUnboundedError("objective is unbounded above")
        _pivot(table, basis, best_row, col)
        f = obj[col]
        if f:
            prow = table[best_row]
            obj[:] = [a - f * b for a, b in zip(obj, prow)]


def solve_lp_max(c, a_ub, b_ub, a_eq, b_eq):
    """Maximize c.x subject to a_ub.x <= b_ub, a_eq.x = b_eq, x >= 0.

    Dense two-phase simplex over Fractions. Returns (optimum, x). Intended for
    the small programs this package builds; no sparsity, no revised form.
    """
    nvar = len(c)
    rows = []  # (coeffs, rhs, needs_artificial, slack_sign)
    for coeffs, b in zip(a_ub, b_ub):
        coeffs = [Fraction(v) for v in coeffs]
        b = Fraction(b)
        if b < 0:
            coeffs = [-v for v in coeffs]
            b = -b
            rows.append((coeffs, b, True, -1))  # became a >= constraint
        else:
            rows.append((coeffs, b, False, 1))
    for coeffs, b in zip(a_eq, b_eq):
        coeffs = [Fraction(v) for v in coeffs]
        b = Fraction(b)
        if b < 0:
            coeffs = [-v for v in coeffs]
            b = -b
        rows.append((coeffs, b, True, 0))

    nslack = sum(1 for r in rows if r[3] != 0)
    nart = sum(1 for r in rows if r[2])
    ncols = nvar + nslack + nart
    table = []
    basis = []
    si = nvar
    ai = nvar + nslack
    art_cols = []
    for coeffs, b, needs_art, slack_sign in rows:
        row = coeffs + [Fraction(0)] * (nslack + nart) + [b]
        if slack_sign != 0:
            row[si] = Fraction(slack_sign)
            if not needs_art:
                basis.append(si)
            si += 1
        if needs_art:
            row[ai] = Fraction(1)
            basis.append(ai)
            art_cols.append(ai)
            ai += 1
        table.append(row)

    if art_cols:
        # Phase 1: drive the artificial sum to zero.
        obj = [Fraction(0)] * (ncols + 1)
        for j in art_cols:
            obj[j] = Fraction(1)
        for i, b in enumerate(basis):
            if obj[b]:
                f = obj[b]
                obj = [a - f * v for a, v in zip(obj, table[i])]
        _bland_run(table, basis, obj, ncols)
        if obj[-1] != 0:
            raise LPInfeasibleError("no feasible point")
        # Pivot leftover artificials (at value 0) out of the basis.
        for i in range(len(table)):
            if basis[i] in art_cols:
                col = next(
                    (j for j in range(nvar + nslack) if table[i][j] != 0), None
                )
                if col is not None:
                    _pivot(table, basis, i, col)
        keep = [i for i in range(len(table)) if basis[i] not in art_cols]
        table = [table[i] for i in keep]
        basis = [basis[i] for i in keep]

    ncols_main = nvar + nslack
    obj = [Fraction(-v) for v in c] + [Fraction(0)] * (nslack + nart + 1)
    for i, b in enumerate(basis):
        if obj[b]:
            f = obj[b]
            obj = [a - f * v for a, v in zip(obj, table[i])]
    _bland_run(table, basis, obj, ncols_main)

    x = [Fraction(0)] * nvar
    for i, b in enumerate(basis):
        if b < nvar:
            x[b] = table[i][-1]
    return obj[-1], x


# --- worst-case distortion over a profile -----------------------------------


def _group_rankings(profile, group):
    ids = sorted(set(group))
    if not ids:
        raise ValueError("query group is empty")
    if any(not (0 <= q < profile.n) for q in ids):
        raise ValueError("query id outside the profile")
    return ids


def _order_constraints(rankings, nvar, m, var):
    """Rows encoding u(next-ranked) - u(ranked) <= 0 for every adjacent pair."""
    a_ub = []
    for qi, ranking in enumerate(rankings):
        for p in range(m - 1):
            row = [Fraction(0)] * nvar
            row[var(qi, ranking[p + 1])] = Fraction(1)
            row[var(qi, ranking[p])] = Fraction(-1)
            a_ub.append(row)
    return a_ub


def worst_case_profile_distortion(
    profile: PreferenceProfile,
    group,
    winner: int,
    normalization: str = "unit-sum",
    size_cap: int = DEFAULT_SIZE_CAP,
) -> DistortionResult:
    """Supremum of (best candidate total) / (winner total) over consistent utilities.

    Feasible utilities: nonnegative rows summing to 1 whose weak order matches
    the profile; the strict-order supremum equals the maximum over this closed
    relaxation. Solved exactly: one denominator-normalized LP per candidate.
    Unbounded (inf) exactly when the winner's total can be forced to zero,
    i.e. the winner is no voter's top choice.
    """
    if normalization != "unit-sum":
        raise ValueError(f"unsupported normalization {normalization!r}")
    ids = _group_rankings(profile, group)
    m = profile.m
    if not (0 <= winner < m):
        raise ValueError("winner outside the circuit set")
    g = len(ids)
    if g * m > size_cap:
        raise SizeCapError(f"group x circuits = {g * m} exceeds the exact cap {size_cap}")
    rankings = [profile.rankings[q] for q in ids]

    def var(qi, s):
        return qi * m + s

    nvar = g * m

    # Can the winner's total be zero? Minimize it over the plain polytope.
    a_ub = _order_constraints(rankings, nvar, m, var)
    b_ub = [Fraction(0)] * len(a_ub)
    a_eq = []
    for qi in range(g):
        row = [Fraction(0)] * nvar
        for s in range(m):
            row[var(qi, s)] = Fraction(1)
        a_eq.append(row)
    b_eq = [Fraction(1)] * g
    neg_winner = [Fraction(0)] * nvar
    for qi in range(g):
        neg_winner[var(qi, winner)] = Fraction(-1)
    neg_min, x_min = solve_lp_max(neg_winner, a_ub, b_ub, a_eq, b_eq)
    if neg_min == 0:  # the winner's total admits value 0
        totals = [sum(x_min[var(qi, s)] for qi in range(g)) for s in range(m)]
        return DistortionResult(
            math.inf,
            optimum=max(totals),
            achieved=Fraction(0),
            witness_candidate=max(range(m), key=lambda s: (totals[s], -s)),
        )

    # Denominator-normalized program: scale utilities so the winner total is 1,
    # carry the shared row sum as variable t, maximize each candidate's total.
    nvar_t = nvar + 1
    t = nvar
    a_ub = _order_constraints(rankings, nvar_t, m, var)
    b_ub = [Fraction(0)] * len(a_ub)
    a_eq = []
    for qi in range(g):
        row = [Fraction(0)] * nvar_t
        for s in range(m):
            row[var(qi, s)] = Fraction(1)
        row[t] = Fraction(-1)
        a_eq.append(row)
    denom = [Fraction(0)] * nvar_t
    for qi in range(g):
        denom[var(qi, winner)] = Fraction(1)
    a_eq.append(denom)
    b_eq = [Fraction(0)] * g + [Fraction(1)]

    best = None
    best_cand = None
    for cand in range(m):
        c = [Fraction(0)] * nvar_t
        for qi in range(g):
            c[var(qi, cand)] = Fraction(1)
        value, _ = solve_lp_max(c, a_ub, b_ub, a_eq, b_eq)
        if best is None or value > best:
            best = value
            best_cand = cand
    return DistortionResult(best, optimum=best, achieved=Fraction(1), witness_candidate=best_cand)


RULES = {
    "borda": borda_winner,
    "plurality": plurality_winner,
}


def evaluate_rule_distortion(profile, group, rule: str, **kwargs) -> DistortionResult:
    """Run a named ordinal rule on the group, then its worst-case distortion."""
    try:
        pick = RULES[rule]
    except KeyError:
        raise KeyError(f"unknown rule {rule!r}; available: {', '.join(sorted(RULES))}") from None
    return worst_case_profile_distortion(profile, group, pick(profile, group), **kwargs)


# --- independent grid-search oracle ------------------------------------------


@lru_cache(maxsize=None)
def _ranked_grid(m: int, steps: int) -> np.ndarray:
    """All nonincreasing integer m-tuples summing to `steps` (grid utility rows)."""
    out = []

    def rec(prefix, remaining, cap):
        slots = m - len(prefix)
        if slots == 1:
            if remaining <= cap:
                out.append(prefix + (remaining,))
            return
        p = min(cap, remaining)
        while p * slots >= remaining:
            rec(prefix + (p,), remaining - p, p)
            p -= 1

    rec((), steps, steps)
    return np.array(out, dtype=np.int64)


def grid_profile_distortion(profile: PreferenceProfile, group, winner: int, steps: int = 100):
    """Grid-search estimate of worst_case_profile_distortion.

    Rows range over all rank-consistent unit-sum utility vectors on a
    1/steps grid. The ratio of row-separable sums is maximized exactly over
    the product grid by Dinkelbach iteration in integer arithmetic, so this
    path shares nothing with the simplex solver. Returns a Fraction, or
    math.inf when the winner can be starved on the grid.
    """
    ids = _group_rankings(profile, group)
    m = profile.m
    grid = _ranked_grid(m, steps)

    if all(profile.top(q) != winner for q in ids):
        return math.inf

    per_row_pos = []
    for q in ids:
        ranking = profile.rankings[q]
        per_row_pos.append({s: ranking.index(s) for s in range(m)})

    best = Fraction(0)
    for cand in range(m):
        n_arrs = [grid[:, per_row_pos[qi][cand]] for qi in range(len(ids))]
        d_arrs = [grid[:, per_row_pos[qi][winner]] for qi in range(len(ids))]
        ratio = Fraction(0)
        for _ in range(200):
            num, den = ratio.numerator, ratio.denominator
            tn = 0
            td = 0
            for n_arr, d_arr in zip(n_arrs, d_arrs):
                i = int(np.argmax(n_arr * den - d_arr * num))
                tn += int(n_arr[i])
                td += int(d_arr[i])
            nxt = Fraction(tn, td)
            if nxt == ratio:
                break
            ratio = nxt
        best = max(best, ratio)
    return best
