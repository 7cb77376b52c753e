"""Exact single-quality solver: a price-descending sweep with expiring pairs.

Customers are processed in decreasing price order.  The solver keeps a
list of candidate qualities whose profits at the current price are
strictly decreasing front to back; the head is therefore the best quality
for the current price, and tracking the best head profit over all events
yields the global optimum.

Two facts make this cheap to maintain.  First, because the market is
Pareto-consistent and events are ordered by price (ties by quality), the
event qualities are nonincreasing, so the customers considering a
candidate quality at event ``t`` are exactly the events from that
quality's first appearance through ``t`` — a closed-form count, no
counting structure needed.  Second, once a lower-quality candidate's
profit catches up with its higher-quality neighbor it stays ahead at
every later (lower) price, so the event at which an adjacent pair's order
flips can be found by a binary search over the remaining events and
scheduled in an expiry queue.  When a pair expires, its higher-quality
member is removed.  Each quality enters the list at most once and is
removed at most once, giving O(n log n) overall.

The solve loop exists twice: a plain-Python version (the reference, also
used for invariant-checked runs) and an optional numba-compiled version
of the same loop used for large instances when numba is importable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError
from .market import NO_PROFITABLE_PRODUCT, Market, Product, ProfitReport, evaluate

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    njit = None

# Below this size the compiled core is not worth dispatching to.
COMPILED_MIN_EVENTS = 4096


@dataclass(frozen=True)
class Event:
    """One sweep stop: the ``index``-th most expensive customer (1-based)."""

    index: int
    price: float
    quality: float


@dataclass(frozen=True)
class Candidate:
    """A quality in the sweep list and the event at which it entered."""

    quality: float
    birth: int


@dataclass(frozen=True)
class Certificate:
    """Scheduled expiry of an adjacent candidate pair.

    Valid while the two candidates stay adjacent and alive; ``expiry`` is
    the first event index at which the right candidate's profit reaches
    the left one's, or ``n + 1`` if that never happens.  ``generation``
    tags the adjacency version so stale entries can be skipped.
    """

    left: Candidate
    right: Candidate
    expiry: int
    generation: int = 0


@dataclass
class SweepStats:
    """Operation counts from one solve, for complexity monitoring."""

    events: int = 0
    appended: int = 0
    duplicate_skips: int = 0
    deletions: int = 0
    certificate_pushes: int = 0
    certificate_pops: int = 0
    stale_pops: int = 0
    peak_list_length: int = 0


def sweep_events(market: Market) -> list[Event]:
    """The market's events in sweep order: price descending, quality descending."""
    if market.dim != 1:
        raise DimensionMismatchError("the sweep solver handles dim=1 markets only")
    p = market.prices
    q = market.qualities[:, 0]
    order = np.lexsort((-q, -p))
    return [Event(i + 1, float(p[j]), float(q[j])) for i, j in enumerate(order)]


def profit_at_event(candidate: Candidate, event: Event) -> float:
    """Profit of quality ``candidate.quality`` priced at this event.

    With nonincreasing event qualities, the considering customers are
    exactly the events from the candidate's birth through ``event``, so
    the count is ``event.index - candidate.birth + 1``.
    """
    if event.index < candidate.birth:
        raise ValueError(
            f"event {event.index} precedes the candidate's birth {candidate.birth}"
        )
    return (event.price - candidate.quality) * (event.index - candidate.birth + 1)


def expiry_index(
    left: Candidate, right: Candidate, events: Sequence[Event], start: int
) -> int:
    """First event index after ``start`` at which ``right`` catches ``left``.

    Requires ``left.quality > right.quality`` and the pair's profits to be
    strictly ordered at ``start``; a violated profit order is a logic
    fault and raises ``AssertionError``.  Returns ``len(events) + 1`` when
    the order holds through the final event.  The profit difference is
    strictly decreasing in the event index (prices fall while the
    lower-quality candidate's relative count grows), so the first flip is
    found by binary search.
    """
    n = len(events)
    if not left.quality > right.quality:
        raise ValueError("left candidate must have the strictly larger quality")
    if start < max(left.birth, right.birth) or start > n:
        raise ValueError(f"start index {start} out of range for this pair")
    if profit_at_event(left, events[start - 1]) <= profit_at_event(
        right, events[start - 1]
    ):
        raise AssertionError("pair profit order already flipped at the current event")
    if start == n or profit_at_event(left, events[n - 1]) > profit_at_event(
        right, events[n - 1]
    ):
        return n + 1
    lo, hi = start + 1, n  # earliest event with flipped order lies in [lo, hi]
    while lo < hi:
        mid = (lo + hi) // 2
        if profit_at_event(left, events[mid - 1]) <= profit_at_event(
            right, events[mid - 1]
        ):
            hi = mid
        else:
            lo = mid + 1
    return lo


def make_certificate(
    left: Candidate,
    right: Candidate,
    events: Sequence[Event],
    start: int,
    generation: int = 0,
) -> Certificate:
    return Certificate(
        left, right, expiry_index(left, right, events, start), generation
    )


def solve_exact_1d(market: Market, *, check_invariants: bool = False) -> ProfitReport:
    """Exact optimum for a one-dimensional market in O(n log n).

    Returns a report whose profit equals the exhaustive grid optimum; when
    no product earns a positive profit the no-profit report is returned.
    ``check_invariants`` turns on O(n) per-event self-checks (quadratic
    overall — for tests only).
    """
    report, _ = solve_exact_1d_with_stats(market, check_invariants=check_invariants)
    return report


def solve_exact_1d_with_stats(
    market: Market, *, check_invariants: bool = False
) -> tuple[ProfitReport, SweepStats]:
    """As :func:`solve_exact_1d`, also returning operation counts."""
    if market.dim != 1:
        raise DimensionMismatchError("the sweep solver handles dim=1 markets only")
    n = len(market)
    pr = market.prices
    ql = market.qualities[:, 0]
    order = np.lexsort((-ql, -pr))
    # 1-based event arrays (index 0 unused)
    p = np.empty(n + 1, dtype=np.float64)
    p[0] = 0.0
    p[1:] = pr[order]
    q = np.empty(n + 1, dtype=np.float64)
    q[0] = 0.0
    q[1:] = ql[order]

    stats = SweepStats(events=n)
    counters = np.zeros(7, dtype=np.int64)
    if njit is not None and n >= COMPILED_MIN_EVENTS and not check_invariants:
        found, best_profit, best_price, best_quality = _sweep_compiled(p, q, counters)
    else:
        found, best_profit, best_price, best_quality = _sweep_python(
            p.tolist(), q.tolist(), counters, check_invariants
        )
    (
        stats.appended,
        stats.duplicate_skips,
        stats.deletions,
        stats.certificate_pushes,
        stats.certificate_pops,
        stats.stale_pops,
        stats.peak_list_length,
    ) = (int(v) for v in counters)

    if not found:
        return NO_PROFITABLE_PRODUCT, stats
    report = evaluate(market, Product(best_price, (best_quality,)))
    if check_invariants and report.profit != best_profit:
        raise AssertionError(
            f"swept profit {best_profit} disagrees with re-evaluation {report.profit}"
        )
    return report, stats


def _sweep_python(
    p: list[float], q: list[float], counters: np.ndarray, check_invariants: bool
) -> tuple[bool, float, float, float]:
    """Reference solve loop over 1-based event arrays.

    Candidates are slots in parallel lists forming a doubly linked list.
    Expiries are filed in a bucket per event index and drained exactly at
    that event; ``cgen`` is bumped whenever a slot's right neighbor
    changes, so outdated bucket entries identify themselves as stale.

    The pair (left, right) flips at the smallest t with
    ``(p[t]-lq)(t-lb+1) <= (p[t]-rq)(t-rb+1)``, which rearranges to
    ``gap*p[t] - dq*t <= dq - (lq*lb - rq*rb)`` with ``gap = rb - lb > 0``
    and ``dq = lq - rq > 0``; the left side strictly decreases in t, so
    the flip index is a binary search (skipped when even the final event
    keeps the order).
    """
    n = len(p) - 1
    cq: list[float] = []
    cb: list[int] = []
    cprev: list[int] = []
    cnext: list[int] = []
    cgen: list[int] = []
    alive: list[bool] = []
    head = -1
    tail = -1
    live = 0
    peak = 0

    bucket_head = [-1] * (n + 2)
    ent_slot: list[int] = []
    ent_gen: list[int] = []
    ent_next: list[int] = []

    appended = dup_skips = deletions = pushes = pops = stale = 0
    best_profit = 0.0
    best_price = 0.0
    best_quality = 0.0
    found = False

    for t in range(1, n + 1):
        pt = p[t]
        qt = q[t]

        if tail >= 0 and cq[tail] == qt:
            # Repeat quality: the existing candidate's closed-form count
            # already absorbs this event.
            dup_skips += 1
        else:
            # Drop tail candidates the newcomer already matches or beats.
            new_profit = pt - qt
            while tail >= 0 and (pt - cq[tail]) * (t - cb[tail] + 1) <= new_profit:
                dead = tail
                alive[dead] = False
                cgen[dead] += 1
                deletions += 1
                live -= 1
                tail = cprev[dead]
                if tail >= 0:
                    cnext[tail] = -1
                    cgen[tail] += 1
                else:
                    head = -1
            slot = len(cq)
            cq.append(qt)
            cb.append(t)
            cprev.append(tail)
            cnext.append(-1)
            cgen.append(0)
            alive.append(True)
            appended += 1
            live += 1
            if live > peak:
                peak = live
            if tail >= 0:
                cnext[tail] = slot
                g = cgen[tail] + 1
                cgen[tail] = g
                lq = cq[tail]
                dq = lq - qt
                gap = t - cb[tail]
                thresh = dq - (lq * cb[tail] - qt * t)
                if gap * p[n] - dq * n <= thresh:  # flips within the horizon
                    a, b = t + 1, n
                    while a < b:
                        mid = (a + b) >> 1
                        if gap * p[mid] - dq * mid <= thresh:
                            b = mid
                        else:
                            a = mid + 1
                    ent_gen.append(g)
                    ent_next.append(bucket_head[a])
                    bucket_head[a] = len(ent_slot)
                    ent_slot.append(tail)
                    pushes += 1
            else:
                head = slot
            tail = slot

        entry = bucket_head[t]
        while entry >= 0:
            ls = ent_slot[entry]
            g = ent_gen[entry]
            entry = ent_next[entry]
            pops += 1
            if not alive[ls] or cgen[ls] != g:
                stale += 1
                continue
            rs = cnext[ls]
            pl = cprev[ls]
            alive[ls] = False
            cgen[ls] += 1
            deletions += 1
            live -= 1
            if pl >= 0:
                cnext[pl] = rs
            cprev[rs] = pl
            if head == ls:
                head = rs
            # The freshly adjacent pair may already be flipped at t; keep
            # merging leftwards until a strictly ordered pair remains.
            rq_ = cq[rs]
            rb_ = cb[rs]
            right_profit = (pt - rq_) * (t - rb_ + 1)
            while pl >= 0:
                if (pt - cq[pl]) * (t - cb[pl] + 1) <= right_profit:
                    dead = pl
                    pl = cprev[dead]
                    alive[dead] = False
                    cgen[dead] += 1
                    deletions += 1
                    live -= 1
                    if pl >= 0:
                        cnext[pl] = rs
                    cprev[rs] = pl
                    if head == dead:
                        head = rs
                else:
                    g = cgen[pl] + 1
                    cgen[pl] = g
                    lq = cq[pl]
                    dq = lq - rq_
                    gap = rb_ - cb[pl]
                    thresh = dq - (lq * cb[pl] - rq_ * rb_)
                    if gap * p[n] - dq * n <= thresh:
                        a, b = t + 1, n
                        while a < b:
                            mid = (a + b) >> 1
                            if gap * p[mid] - dq * mid <= thresh:
                                b = mid
                            else:
                                a = mid + 1
                        ent_gen.append(g)
                        ent_next.append(bucket_head[a])
                        bucket_head[a] = len(ent_slot)
                        ent_slot.append(pl)
                        pushes += 1
                    break

        hp = (pt - cq[head]) * (t - cb[head] + 1)
        if hp > best_profit:
            best_profit = hp
            best_price = pt
            best_quality = cq[head]
            found = True

        if check_invariants:
            _check_state(p, q, t, head, cq, cb, cnext)

    counters[:] = (appended, dup_skips, deletions, pushes, pops, stale, peak)
    return found, best_profit, best_price, best_quality


def _sweep_core(p, q, counters):  # pragma: no cover - compiled twin below
    """Numba twin of :func:`_sweep_python` over preallocated arrays."""
    n = p.shape[0] - 1
    cq = np.empty(n, np.float64)
    cb = np.empty(n, np.int64)
    cprev = np.empty(n, np.int64)
    cnext = np.empty(n, np.int64)
    cgen = np.zeros(n, np.int64)
    alive = np.zeros(n, np.uint8)
    nslots = 0
    head = -1
    tail = -1
    live = 0
    peak = 0

    bucket_head = np.full(n + 2, -1, np.int64)
    cap = 2 * n + 4  # pushes <= appends + deletions <= 2n
    ent_slot = np.empty(cap, np.int64)
    ent_gen = np.empty(cap, np.int64)
    ent_next = np.empty(cap, np.int64)
    nent = 0

    appended = dup_skips = deletions = pushes = pops = stale = 0
    best_profit = 0.0
    best_price = 0.0
    best_quality = 0.0
    found = False

    pn = p[n]
    for t in range(1, n + 1):
        pt = p[t]
        qt = q[t]

        if tail >= 0 and cq[tail] == qt:
            dup_skips += 1
        else:
            new_profit = pt - qt
            while tail >= 0 and (pt - cq[tail]) * (t - cb[tail] + 1) <= new_profit:
                dead = tail
                alive[dead] = 0
                cgen[dead] += 1
                deletions += 1
                live -= 1
                tail = cprev[dead]
                if tail >= 0:
                    cnext[tail] = -1
                    cgen[tail] += 1
                else:
                    head = -1
            slot = nslots
            cq[slot] = qt
            cb[slot] = t
            cprev[slot] = tail
            cnext[slot] = -1
            cgen[slot] = 0
            alive[slot] = 1
            nslots += 1
            appended += 1
            live += 1
            if live > peak:
                peak = live
            if tail >= 0:
                cnext[tail] = slot
                g = cgen[tail] + 1
                cgen[tail] = g
                lq = cq[tail]
                dq = lq - qt
                gap = float(t - cb[tail])
                thresh = dq - (lq * cb[tail] - qt * t)
                if gap * pn - dq * n <= thresh:
                    a = t + 1
                    b = n
                    while a < b:
                        mid = (a + b) >> 1
                        if gap * p[mid] - dq * mid <= thresh:
                            b = mid
                        else:
                            a = mid + 1
                    ent_slot[nent] = tail
                    ent_gen[nent] = g
                    ent_next[nent] = bucket_head[a]
                    bucket_head[a] = nent
                    nent += 1
                    pushes += 1
            else:
                head = slot
            tail = slot

        entry = bucket_head[t]
        while entry >= 0:
            ls = ent_slot[entry]
            g = ent_gen[entry]
            entry = ent_next[entry]
            pops += 1
            if alive[ls] == 0 or cgen[ls] != g:
                stale += 1
                continue
            rs = cnext[ls]
            pl = cprev[ls]
            alive[ls] = 0
            cgen[ls] += 1
            deletions += 1
            live -= 1
            if pl >= 0:
                cnext[pl] = rs
            cprev[rs] = pl
            if head == ls:
                head = rs
            rq_ = cq[rs]
            rb_ = cb[rs]
            right_profit = (pt - rq_) * (t - rb_ + 1)
            while pl >= 0:
                if (pt - cq[pl]) * (t - cb[pl] + 1) <= right_profit:
                    dead = pl
                    pl = cprev[dead]
                    alive[dead] = 0
                    cgen[dead] += 1
                    deletions += 1
                    live -= 1
                    if pl >= 0:
                        cnext[pl] = rs
                    cprev[rs] = pl
                    if head == dead:
                        head = rs
                else:
                    g = cgen[pl] + 1
                    cgen[pl] = g
                    lq = cq[pl]
                    dq = lq - rq_
                    gap = float(rb_ - cb[pl])
                    thresh = dq - (lq * cb[pl] - rq_ * rb_)
                    if gap * pn - dq * n <= thresh:
                        a = t + 1
                        b = n
                        while a < b:
                            mid = (a + b) >> 1
                            if gap * p[mid] - dq * mid <= thresh:
                                b = mid
                            else:
                                a = mid + 1
                        ent_slot[nent] = pl
                        ent_gen[nent] = g
                        ent_next[nent] = bucket_head[a]
                        bucket_head[a] = nent
                        nent += 1
                        pushes += 1
                    break

        hp = (pt - cq[head]) * (t - cb[head] + 1)
        if hp > best_profit:
            best_profit = hp
            best_price = pt
            best_quality = cq[head]
            found = True

    counters[0] = appended
    counters[1] = dup_skips
    counters[2] = deletions
    counters[3] = pushes
    counters[4] = pops
    counters[5] = stale
    counters[6] = peak
    return found, best_profit, best_price, best_quality


if njit is not None:
    _sweep_compiled = njit(cache=True)(_sweep_core)
else:  # pragma: no cover
    _sweep_compiled = None


def _check_state(
    p: Sequence[float],
    q: Sequence[float],
    t: int,
    head: int,
    cq: list[float],
    cb: list[int],
    cnext: list[int],
) -> None:
    """Debug-mode invariants: list ordering and head optimality at event t."""
    pt = p[t]
    slot = head
    prev_quality = None
    prev_profit = None
    while slot >= 0:
        quality = cq[slot]
        profit = (pt - quality) * (t - cb[slot] + 1)
        if prev_quality is not None and not quality < prev_quality:
            raise AssertionError(f"event {t}: list qualities not strictly decreasing")
        if prev_profit is not None and not profit < prev_profit:
            raise AssertionError(f"event {t}: list profits not strictly decreasing")
        prev_quality, prev_profit = quality, profit
        slot = cnext[slot]
    head_profit = (pt - cq[head]) * (t - cb[head] + 1)
    direct = max((pt - q[j]) * (t - j + 1) for j in range(1, t + 1))
    if head_profit != direct:
        raise AssertionError(
            f"event {t}: head profit {head_profit} != direct scan best {direct}"
        )
