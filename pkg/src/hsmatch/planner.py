"""Per-layer shift-plan search.

A plan fixes the peak bins, the two message maps g0/g1 and the reversibility
shift f. For fixed peaks and g0 the best (g1, f) pair is one minimum-weight
matching of the occupied bins into the free bins; the outer loop enumerates
peak sets and keeps the cheapest plan.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .costs import CostTable, PeakBitMoments, peak_bit_moments
from .errors import InfeasibleMatching, InvalidPeak, InvalidPlan, NoFeasiblePlan
from .histogram import PEHistogram
from .matching import build_bigraph, min_weight_assignment, solve_mwmm

HEURISTIC = "heuristic-g0"
EXHAUSTIVE = "exhaustive"
POLICIES = (HEURISTIC, EXHAUSTIVE)


@dataclass(frozen=True)
class ShiftPlan:
    peaks: tuple
    g0: tuple
    g1: tuple
    f: tuple
    T: int
    predicted_distortion: Fraction | int = 0
    exact: bool = False

    @property
    def f_map(self) -> dict:
        return dict(self.f)

    @property
    def g0_map(self) -> dict:
        return dict(zip(self.peaks, self.g0))

    @property
    def g1_map(self) -> dict:
        return dict(zip(self.peaks, self.g1))

    def key(self):
        """Tie-break order: peaks, then g1, then f."""
        return (self.peaks, self.g1, self.f)

    def decode_table(self) -> dict:
        """Marked error -> (original error, bit or None)."""
        table = {}
        for p, a, b in zip(self.peaks, self.g0, self.g1):
            table[a] = (p, 0)
            table[b] = (p, 1)
        for y, t in self.f:
            table[t] = (y, None)
        return table

    def describe(self) -> str:
        lines = [f"T={self.T} peaks={list(self.peaks)}"]
        lines += [f"  g0({p}) = {a}    g1({p}) = {b}" for p, a, b in zip(self.peaks, self.g0, self.g1)]
        lines += [f"  f({y}) = {t}" for y, t in self.f]
        kind = "exact" if self.exact else "estimated"
        lines.append(f"  predicted distortion ({kind}) = {self.predicted_distortion}")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        g1 = "/".join(str(b) for b in self.g1)
        peaks = "/".join(str(p) for p in self.peaks)
        moved = sum(1 for y, t in self.f if y != t)
        return f"P={peaks} g1={g1} shifted={moved}/{len(self.f)}"


def check_plan(plan: ShiftPlan, hist: PEHistogram | None = None, levels: int | None = None) -> None:
    """Raise InvalidPlan unless every structural invariant of ``plan`` holds."""
    m = len(plan.peaks)
    if len(plan.g0) != m or len(plan.g1) != m:
        raise InvalidPlan("g0/g1 must have one target per peak")
    if len(set(plan.peaks)) != m:
        raise InvalidPlan("duplicate peaks")
    if plan.T < 1:
        raise InvalidPlan("T must be >= 1")
    g0, g1 = set(plan.g0), set(plan.g1)
    if len(g0) != m or len(g1) != m:
        raise InvalidPlan("g0 and g1 must be injective")
    if g0 & g1:
        raise InvalidPlan("G0 and G1 overlap")
    src = [y for y, _ in plan.f]
    dst = [t for _, t in plan.f]
    if src != sorted(set(src)):
        raise InvalidPlan("f domain must be strictly increasing")
    if set(src) & set(plan.peaks):
        raise InvalidPlan("f is defined on a peak")
    if len(set(dst)) != len(dst):
        raise InvalidPlan("f is not injective")
    if set(dst) & (g0 | g1):
        raise InvalidPlan("range(f) meets G0 or G1")
    for p, a, b in zip(plan.peaks, plan.g0, plan.g1):
        if abs(a - p) > plan.T or abs(b - p) > plan.T:
            raise InvalidPlan(f"message map of peak {p} exceeds T")
    for y, t in plan.f:
        if abs(t - y) > plan.T:
            raise InvalidPlan(f"f({y}) = {t} exceeds T")
    if levels is None and hist is not None:
        levels = hist.levels
    if levels is not None:
        for v in list(g0) + list(g1) + dst + src + list(plan.peaks):
            if not -levels < v < levels:
                raise InvalidPlan(f"bin {v} outside the bin universe")
    if hist is not None:
        occupied = hist.occupied()
        if not set(plan.peaks) <= set(occupied):
            raise InvalidPlan("a peak is not an occupied bin")
        if set(src) != set(occupied) - set(plan.peaks):
            raise InvalidPlan("f must cover exactly the non-peak occupied bins")


# ---------------------------------------------------------------- costing


def f_cost(costs: CostTable, f) -> int:
    return sum(costs.shift_cost(y, t - y) for y, t in f)


def peak_cost_estimate(costs: CostTable, peaks, g0, g1) -> Fraction:
    total = Fraction(0)
    for p, a, b in zip(peaks, g0, g1):
        total += costs.peak_cost(p, a - p) + costs.peak_cost(p, b - p)
    return total


def peak_cost_exact(pbm: PeakBitMoments, peaks, g0, g1) -> int:
    return sum(pbm.cost(p, a - p, 0) + pbm.cost(p, b - p, 1) for p, a, b in zip(peaks, g0, g1))


def plan_distortion(plan: ShiftPlan, costs: CostTable, pbm: PeakBitMoments | None = None):
    """SSE of the plan over the embedded sites; exact when bit moments are given."""
    if pbm is None:
        return f_cost(costs, plan.f) + peak_cost_estimate(costs, plan.peaks, plan.g0, plan.g1)
    return f_cost(costs, plan.f) + peak_cost_exact(pbm, plan.peaks, plan.g0, plan.g1)


def _with_distortion(plan: ShiftPlan, costs, pbm=None) -> ShiftPlan:
    d = plan_distortion(plan, costs, pbm)
    if isinstance(d, Fraction) and d.denominator == 1:
        d = int(d)
    return ShiftPlan(plan.peaks, plan.g0, plan.g1, plan.f, plan.T, d, pbm is not None)


# ------------------------------------------------------------- matchings


def _free_bins(hist: PEHistogram, lefts, taken, T: int) -> list[int]:
    """Bins of the universe within T of some left vertex, minus ``taken``."""
    if not lefts:
        return []
    lo = max(hist.lo, min(lefts) - T)
    hi = min(hist.hi, max(lefts) + T)
    taken = set(taken)
    left_arr = np.asarray(sorted(lefts))
    out = []
    for v in range(lo, hi + 1):
        if v in taken:
            continue
        k = np.searchsorted(left_arr, v)
        near = (k < len(left_arr) and left_arr[k] - v <= T) or (k > 0 and v - left_arr[k - 1] <= T)
        if near:
            out.append(v)
    return out


def optimize_f(hist: PEHistogram, costs: CostTable, peaks, g0, g1, T: int, canonical: bool = True):
    """Cheapest injective banded f on the non-peak bins, and its cost L.

    Raises InfeasibleMatching when no such f exists.
    """
    peaks = tuple(peaks)
    lefts = [y for y in hist.occupied() if y not in peaks]
    if not lefts:
        return {}, 0
    rights = _free_bins(hist, lefts, set(g0) | set(g1), T)
    g = build_bigraph(lefts, rights, T, lambda y, q: costs.shift_cost(y, q - y))
    if canonical:
        mt = solve_mwmm(g, canonical=True)
        f = {lefts[i]: rights[j] for i, j in mt.pairs}
        return f, int(mt.total_weight)
    cost, allowed, _ = g.matrix()
    cols, total = min_weight_assignment(cost, allowed)
    return {y: rights[j] for y, j in zip(lefts, cols)}, int(total)


def optimize_g1_and_f(hist: PEHistogram, costs: CostTable, peaks, g0, T: int,
                      canonical: bool = True, peak_weight=None):
    """Joint matching of all occupied bins into the bins not used by g0.

    Peak rows pick their g1 target at the half-weight estimate (or at
    ``peak_weight(p, k)`` when supplied); the other rows pick f. Returns
    (g1 tuple aligned with ``peaks``, f dict, matching weight).
    """
    peaks = tuple(peaks)
    g0 = tuple(g0)
    if peak_weight is None:
        peak_weight = costs.peak_cost
    lefts = hist.occupied()
    rights = _free_bins(hist, lefts, set(g0), T)
    peak_set = set(peaks)

    def weight(u, v):
        return peak_weight(u, v - u) if u in peak_set else costs.shift_cost(u, v - u)

    g = build_bigraph(lefts, rights, T, weight)
    mt = solve_mwmm(g, canonical=canonical)
    target = {lefts[i]: rights[j] for i, j in mt.pairs}
    g1 = tuple(target[p] for p in peaks)
    f = {y: t for y, t in target.items() if y not in peak_set}
    return g1, f, mt.total_weight


class _JointSolver:
    """Fast heuristic-g0 candidate evaluation sharing one dense weight matrix.

    Weights are doubled so the half-weight peak rows stay integral.
    """

    def __init__(self, hist: PEHistogram, costs: CostTable, T: int):
        self.T = T
        self.lefts = hist.occupied()
        self.rights = _free_bins(hist, self.lefts, (), T)
        L = np.asarray(self.lefts)[:, None]
        R = np.asarray(self.rights)[None, :]
        k = R - L
        self.allowed = np.abs(k) <= T
        kk = np.clip(k, -T, T)
        mo = costs.moments
        idx = np.asarray(self.lefts) + mo.offset
        h, s1, s2 = mo.h[idx][:, None], mo.s1[idx][:, None], mo.s2[idx][:, None]
        full = kk * kk * h + 2 * kk * s1 + s2
        self.full = np.where(self.allowed, full, 0).astype(np.int64)
        self.row = {y: i for i, y in enumerate(self.lefts)}
        self.col = {v: j for j, v in enumerate(self.rights)}

    def solve(self, peaks):
        keep = np.ones(len(self.rights), dtype=bool)
        for p in peaks:
            keep[self.col[p]] = False
        cost = 2 * self.full[:, keep]
        for p in peaks:
            cost[self.row[p]] //= 2
        cols, total = min_weight_assignment(cost, self.allowed[:, keep])
        rights = np.asarray(self.rights)[keep]
        target = {y: int(rights[c]) for y, c in zip(self.lefts, cols)}
        return target, Fraction(int(total), 2)


# ------------------------------------------------------------ baseline


def traditional_plan(hist: PEHistogram, peaks, costs: CostTable | None = None, T: int = 1) -> ShiftPlan:
    """Classical step-1 shifting around one or two peaks.

    With two peaks p_l < p_r no occupied bin may lie strictly between them;
    bins below p_l move down by one, bins above p_r move up by one and the
    peaks carry bit 1 by moving outward. One peak behaves like p_l = p_r.
    """
    peaks = tuple(sorted(peaks))
    if len(peaks) not in (1, 2):
        raise InvalidPeak("the step-1 baseline uses one or two peaks")
    occupied = hist.occupied()
    for p in peaks:
        if hist[p] == 0:
            raise InvalidPeak(f"peak bin {p} is empty")
    p_l, p_r = peaks[0], peaks[-1]
    if any(p_l < y < p_r for y in occupied):
        raise InvalidPeak(f"occupied bins between peaks {p_l} and {p_r}")
    if len(peaks) == 1:
        g1 = (p_r + 1,)
        f = tuple((y, y - 1 if y < p_l else y + 1) if y > p_r else (y, y) for y in occupied if y != p_l)
    else:
        g1 = (p_l - 1, p_r + 1)
        f = tuple((y, y - 1 if y < p_l else y + 1) for y in occupied if y not in peaks)
    plan = ShiftPlan(peaks, peaks, g1, f, T)
    check_plan(plan, hist)
    if costs is None:
        costs = CostTable.from_histogram(hist, T)
    return _with_distortion(plan, costs)


def adjacent_pairs(hist: PEHistogram) -> list[tuple]:
    occ = hist.occupied()
    return [(a, b) for a, b in zip(occ, occ[1:])]


# ------------------------------------------------------------ enumeration


def _message_pairs(p: int, T: int, hist: PEHistogram):
    """Unordered {g0(p), g1(p)} target pairs, each visited once.

    The member nearer to p (lower value on a tie) becomes g0, so g0 is the
    identity whenever p itself is in the pair.
    """
    near = [v for v in range(p - T, p + T + 1) if hist.in_universe(v)]
    for a, b in itertools.combinations(near, 2):
        yield (a, b) if (abs(a - p), a) <= (abs(b - p), b) else (b, a)


def enumerate_plans(hist: PEHistogram, costs: CostTable, payload_bits: int, T: int, m: int = 2,
                    g0_policy: str = HEURISTIC, pred=None, bits=None,
                    include_baseline: bool = True) -> ShiftPlan:
    """Best plan over every m-subset of occupied bins with enough capacity.

    Inner matchings use the half-weight peak estimate. When ``pred`` and
    ``bits`` are given, every candidate is rescored with the exact payload and
    the step-1 baseline of each admissible peak pair joins the candidates.
    Ties go to the smallest (peaks, g1, f).
    """
    if g0_policy not in POLICIES:
        raise ValueError(f"unknown g0 policy {g0_policy!r}")
    if m < 1:
        raise ValueError("m must be >= 1")
    exact = pred is not None and bits is not None
    occupied = hist.occupied()
    subsets = [P for P in itertools.combinations(occupied, m)
               if sum(hist[p] for p in P) >= payload_bits]
    if not subsets:
        raise NoFeasiblePlan(f"no {m} peak bins can carry {payload_bits} bits")
    subsets.sort(key=lambda P: (-sum(hist[p] for p in P), P))

    joint = _JointSolver(hist, costs, T) if g0_policy == HEURISTIC else None
    best = None

    def consider(plan: ShiftPlan, pbm):
        nonlocal best
        scored = _with_distortion(plan, costs, pbm)
        if best is None or (scored.predicted_distortion, scored.key()) < (best.predicted_distortion, best.key()):
            best = scored

    for P in subsets:
        pbm = peak_bit_moments(pred, P, bits) if exact else None
        for plan in _candidates_for(P, hist, costs, T, g0_policy, joint):
            consider(plan, pbm)
        if exact and include_baseline and m in (1, 2):
            try:
                base = traditional_plan(hist, P, costs, T)
            except (InvalidPeak, InvalidPlan):
                continue
            consider(base, pbm)
    if best is None:
        raise NoFeasiblePlan("every candidate peak set is infeasible")
    if not exact and g0_policy == HEURISTIC:
        best = _canonical_heuristic(best, hist, costs, T)
    return best


def _candidates_for(P, hist, costs, T, g0_policy, joint):
    if g0_policy == HEURISTIC:
        try:
            target, _ = joint.solve(P)
        except InfeasibleMatching:
            return
        f = tuple((y, t) for y, t in target.items() if y not in P)
        yield ShiftPlan(tuple(P), tuple(P), tuple(target[p] for p in P), f, T)
        return
    # exhaustive: every combination of unordered message-target pairs
    best = None
    per_peak = [list(_message_pairs(p, T, hist)) for p in P]
    for combo in itertools.product(*per_peak):
        g0 = tuple(a for a, _ in combo)
        g1 = tuple(b for _, b in combo)
        if len(set(g0 + g1)) != 2 * len(P):
            continue
        try:
            f, L = optimize_f(hist, costs, P, g0, g1, T, canonical=False)
        except InfeasibleMatching:
            continue
        plan = ShiftPlan(tuple(P), g0, g1, tuple(sorted(f.items())), T)
        est = L + peak_cost_estimate(costs, P, g0, g1)
        if best is None or (est, plan.key()) < best[0]:
            best = ((est, plan.key()), plan)
    if best is not None:
        yield best[1]


def _canonical_heuristic(plan: ShiftPlan, hist, costs, T) -> ShiftPlan:
    """Re-solve the winning peak set with the lexicographic tie-break."""
    g1, f, _ = optimize_g1_and_f(hist, costs, plan.peaks, plan.g0, T, canonical=True)
    canon = ShiftPlan(plan.peaks, plan.g0, g1, tuple(sorted(f.items())), T)
    canon = _with_distortion(canon, costs)
    return canon if canon.predicted_distortion == plan.predicted_distortion else plan


def max_capacity(hist: PEHistogram, m: int, adjacent_only: bool = False) -> int:
    if adjacent_only:
        occ = hist.occupied()
        if m == 1:
            return max((hist[p] for p in occ), default=0)
        return max((hist[a] + hist[b] for a, b in adjacent_pairs(hist)), default=0)
    counts = sorted((hist[p] for p in hist.occupied()), reverse=True)
    return sum(counts[:m])


def best_traditional_plan(hist: PEHistogram, costs: CostTable, payload_bits: int, T: int, m: int = 2,
                          pred=None, bits=None) -> ShiftPlan:
    """Cheapest step-1 plan over admissible adjacent peak pairs (or single peaks)."""
    occupied = hist.occupied()
    cands = [(p,) for p in occupied] if m == 1 else adjacent_pairs(hist)
    cands = [P for P in cands if sum(hist[p] for p in P) >= payload_bits]
    if m not in (1, 2) or not cands:
        raise NoFeasiblePlan(f"no step-1 peak configuration carries {payload_bits} bits")
    exact = pred is not None and bits is not None
    best = None
    for P in cands:
        try:
            plan = traditional_plan(hist, P, costs, T)
        except (InvalidPeak, InvalidPlan):
            continue
        if exact:
            plan = _with_distortion(plan, costs, peak_bit_moments(pred, P, bits))
        if best is None or (plan.predicted_distortion, plan.key()) < (best.predicted_distortion, best.key()):
            best = plan
    if best is None:
        raise NoFeasiblePlan("no valid step-1 plan")
    return best
