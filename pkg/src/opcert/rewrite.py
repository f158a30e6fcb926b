"""Two-sided reduction and bounded completion in the free algebra.

``reduce`` computes full normal forms with cofactor tracking, ``complete``
runs an obstruction-driven completion loop (noncommutative Buchberger) under
explicit budgets, and both keep exact bookkeeping so that every result can be
expanded back into a two-sided combination of the inputs.

Trace conventions:

* ``reduce(p, basis)``:  p = value + sum(c * l . basis[i] . r)
* ``s_polynomial(o, basis)`` and ``complete`` basis elements:
  value = sum(c * l . source[i] . r)   (sources are the original generators
  for ``complete``).
"""

from __future__ import annotations

import heapq
import time
from bisect import insort
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .freealg import (AlgebraError, DegLexOrder, Polynomial, Word,
                      normalize_coeff)
from .kernels import KERNEL


class TraceStep(NamedTuple):
    """One summand ``coeff * left . F[index] . right`` of a cofactor sum."""
    coeff: object  # int | Fraction
    left: Word
    index: int
    right: Word


@dataclass(frozen=True)
class TracedPolynomial:
    """A polynomial together with a two-sided cofactor combination.

    ``combination(sources)`` expands the trace exactly; which identity it
    satisfies (see module docstring) depends on the operation that produced
    this value.
    """

    value: Polynomial
    trace: tuple

    def combination(self, sources: Sequence[Polynomial]) -> Polynomial:
        alg = self.value.alg
        acc = alg.zero()
        for c, l, i, r in self.trace:
            acc = acc + (alg.monomial(l, c) * sources[i] * alg.monomial(r))
        return acc

    def trace_triples(self) -> list:
        """Trace as (left Polynomial, index, right Polynomial) triples."""
        alg = self.value.alg
        return [(alg.monomial(l, c), i, alg.monomial(r)) for c, l, i, r in self.trace]


@dataclass(frozen=True)
class Obstruction:
    """Overlap of two leading words: both padded products equal ``overlap``."""

    i: int
    j: int
    left_i: Word
    right_i: Word
    left_j: Word
    right_j: Word
    overlap: Word

    @property
    def degree(self) -> int:
        return len(self.overlap)


@dataclass(frozen=True)
class CompletionLimits:
    """Budgets for the (generally non-terminating) completion loop."""

    max_degree: int = 12
    max_iterations: int = 50_000
    max_basis_size: int = 10_000
    time_budget: float = 300.0

    def __post_init__(self):
        if min(self.max_degree, self.max_iterations, self.max_basis_size) <= 0 \
                or self.time_budget <= 0:
            raise ValueError("completion limits must be positive")


COMPLETE = "complete"
BUDGET_EXHAUSTED = "budget_exhausted"


def _div(c, lc):
    if lc == 1:
        return c
    return normalize_coeff(Fraction(c) / lc)


# ---------------------------------------------------------------------------
# Obstruction enumeration (reference implementation; the engine uses the
# batched kernel equivalents)
# ---------------------------------------------------------------------------

def _pair_obstructions(i: int, u: Word, j: int, v: Word):
    """All nontrivial overlaps between leading words u (index i) and v (j).

    For i == j only proper self-overlaps exist; for i < j we enumerate
    suffix/prefix overlaps in both orientations plus factor containments
    (including equal words).
    """
    if i == j:
        return [Obstruction(i, i, *row) for row in KERNEL.self_overlaps(u)]
    return [Obstruction(row[0], j, *row[1:])
            for row in KERNEL.batch_overlaps(v, [(i, u)])]


def find_obstructions(basis: Sequence[Polynomial],
                      order: Optional[DegLexOrder] = None) -> list:
    """Enumerate all self- and pairwise obstructions of the basis leads."""
    if not basis:
        return []
    order = order or basis[0].alg.default_order()
    leads = []
    for g in basis:
        if g.is_zero:
            raise AlgebraError("basis elements must be nonzero")
        leads.append(g.lead_word(order))
    seen = set()
    out = []
    for j in range(len(basis)):
        for i in range(j + 1):
            for ob in _pair_obstructions(i, leads[i], j, leads[j]):
                if ob not in seen:
                    seen.add(ob)
                    out.append(ob)
    return out


def s_polynomial(o: Obstruction, basis: Sequence[Polynomial],
                 order: Optional[DegLexOrder] = None) -> TracedPolynomial:
    """Difference of the two padded, lead-normalized multiples.

    The leading terms cancel by construction; ``value = sum(trace)``.
    """
    order = order or basis[0].alg.default_order()
    gi, gj = basis[o.i], basis[o.j]
    alg = gi.alg
    ci = _div(1, gi.lead_coeff(order))
    cj = _div(1, gj.lead_coeff(order))
    left_i = alg.monomial(o.left_i, ci)
    left_j = alg.monomial(o.left_j, cj)
    value = left_i * gi * alg.monomial(o.right_i) \
        - left_j * gj * alg.monomial(o.right_j)
    trace = (TraceStep(ci, o.left_i, o.i, o.right_i),
             TraceStep(normalize_coeff(-cj), o.left_j, o.j, o.right_j))
    return TracedPolynomial(value, trace)


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

class _Reducer:
    """Heap-driven full normal form against a maintained lead table.

    Tie-break: rewrite the order-largest reducible monomial first; within it,
    the leftmost occurrence of the order-largest matching leading word; equal
    leading words resolve to the lowest index.
    """

    def __init__(self, rank, kernel=None):
        self.rank = rank
        self.kernel = kernel or KERNEL
        self.leadmap: dict = {}
        self._len_counts: dict = {}
        self._lengths: Optional[tuple] = ()

    def set_leads(self, leads: Iterable) -> None:
        """leads: iterable of (word, index, lead_coeff); lowest index wins."""
        self.leadmap = {}
        self._len_counts = {}
        self._lengths = ()
        for w, idx, lc in leads:
            self.set_entry(w, idx, lc)

    def set_entry(self, w: Word, idx: int, lc) -> None:
        cur = self.leadmap.get(w)
        if cur is None:
            self._len_counts[len(w)] = self._len_counts.get(len(w), 0) + 1
            self._lengths = None
        elif idx >= cur[0]:
            return
        self.leadmap[w] = (idx, lc, self.kernel.word_key(w, self.rank)[1])

    def del_entry(self, w: Word) -> None:
        if w in self.leadmap:
            del self.leadmap[w]
            n = self._len_counts[len(w)]
            if n == 1:
                del self._len_counts[len(w)]
                self._lengths = None
            else:
                self._len_counts[len(w)] = n - 1

    @property
    def lengths(self) -> tuple:
        if self._lengths is None:
            self._lengths = tuple(sorted(self._len_counts, reverse=True))
        return self._lengths

    def _neg_key(self, w):
        n, mapped = self.kernel.word_key(w, self.rank)
        return (-n, tuple(-x for x in mapped))

    def normal_form(self, terms: dict, items_of, steps: list,
                    deadline: Optional[float] = None) -> bool:
        """Fully reduce ``terms`` in place; append (c, l, idx, r) steps.

        ``items_of(idx)`` yields the stored term items of reducer ``idx``.
        Returns False if the deadline struck before the normal form was
        reached (terms are then left mid-reduction).
        """
        kernel = self.kernel
        leadmap = self.leadmap
        lengths = self.lengths
        if not leadmap:
            return True
        heap = [(self._neg_key(w), w) for w in terms]
        heapq.heapify(heap)
        done = set()
        ticks = 0
        while heap:
            _, w = heapq.heappop(heap)
            if w in done or w not in terms:
                continue
            hit = kernel.find_best_match(w, leadmap, lengths)
            if hit is None:
                done.add(w)
                continue
            pos, lead, idx, lc = hit
            left = w[:pos]
            right = w[pos + len(lead):]
            c = _div(terms[w], lc)
            new_words = kernel.submul(terms, items_of(idx), c, left, right)
            steps.append(TraceStep(c, left, idx, right))
            for nw in new_words:
                if nw not in done:
                    heapq.heappush(heap, (self._neg_key(nw), nw))
            ticks += 1
            if deadline is not None and ticks % 256 == 0 \
                    and time.monotonic() > deadline:
                return False
        return True


def reduce(p: Polynomial, basis: Sequence[Polynomial],
           order: Optional[DegLexOrder] = None, kernel=None) -> TracedPolynomial:
    """Full two-sided normal form of ``p`` modulo ``basis``.

    The result value contains no monomial with a basis leading word as a
    factor, and ``p = value + sum(trace)`` exactly.  Terminates for any input
    (the order is well-founded).
    """
    order = order or p.alg.default_order()
    red = _Reducer(order.ranking, kernel)
    stored = []
    for idx, g in enumerate(basis):
        if g.is_zero:
            raise AlgebraError("basis elements must be nonzero")
        stored.append(list(g._terms.items()))
        red.set_entry(g.lead_word(order), idx, g.lead_coeff(order))
    terms = dict(p._terms)
    steps: list = []
    red.normal_form(terms, lambda idx: stored[idx], steps)
    return TracedPolynomial(Polynomial._make(p.alg, terms), tuple(steps))


# ---------------------------------------------------------------------------
# Completion engine
# ---------------------------------------------------------------------------

_GEN = "g"


class _Element:
    __slots__ = ("terms", "items", "lead", "active", "steps")

    def __init__(self, terms, lead, steps):
        self.terms = terms
        self.items = list(terms.items())
        self.lead = lead
        self.steps = steps  # (coeff, left, ref, right); ref int -> element,
        #                     (_GEN, i) -> original generator i
        self.active = True


@dataclass
class CompletionStats:
    obstructions_processed: int = 0
    obstructions_skipped_degree: int = 0
    elements_added: int = 0
    elapsed: float = 0.0


class CompletionEngine:
    """Fair bounded completion with generator-level trace bookkeeping.

    Obstructions are processed as a FIFO keyed by (overlap degree, creation
    index).  Elements whose lead becomes reducible by a newer lead are retired
    and their normal forms re-enter the basis, so the active lead set stays
    interreduced.  S-polynomial formation for queued obstructions may run on a
    thread pool against an immutable snapshot; results merge sequentially, so
    output never depends on the worker count.

    Queue entries are raw rows (degree, seq, i, j, li, ri, lj, rj).
    """

    def __init__(self, generators, order: DegLexOrder,
                 limits: CompletionLimits, kernel=None, workers: int = 1):
        self.order = order
        self.limits = limits
        self.kernel = kernel or KERNEL
        self.workers = max(1, workers)
        self.reducer = _Reducer(order.ranking, self.kernel)
        self.elements: list[_Element] = []
        self.queue: list = []
        self._active: dict = {}   # idx -> lead word (insertion ordered)
        self._by_lead: dict = {}  # lead word -> ascending active idx list
        self._seq = 0
        self._requeue: list = []
        self._pool = None
        self.stats = CompletionStats()
        self._start = time.monotonic()
        self._deadline = self._start + limits.time_budget
        self._exhausted = False
        seen_monic: dict = {}
        for src_index, g in generators:
            if g.is_zero:
                continue
            lc = g.lead_coeff(order)
            monic = g.monic(order)
            key = frozenset(monic._terms.items())
            if key in seen_monic:
                continue  # duplicate generator: alias to first occurrence
            seen_monic[key] = src_index
            steps = (TraceStep(_div(1, lc), (), (_GEN, src_index), ()),)
            self._append(dict(monic._terms), steps)

    # -- lead bookkeeping ----------------------------------------------------

    def _lead_add(self, idx: int, w: Word) -> None:
        lst = self._by_lead.setdefault(w, [])
        insort(lst, idx)
        self.reducer.del_entry(w)
        self.reducer.set_entry(w, lst[0], 1)

    def _lead_remove(self, idx: int, w: Word) -> None:
        lst = self._by_lead.get(w)
        if lst and idx in lst:
            lst.remove(idx)
            if lst:
                self.reducer.del_entry(w)
                self.reducer.set_entry(w, lst[0], 1)
            else:
                del self._by_lead[w]
                self.reducer.del_entry(w)

    def _retire(self, idx: int) -> None:
        elem = self.elements[idx]
        elem.active = False
        del self._active[idx]
        self._lead_remove(idx, elem.lead)

    def active_indices(self) -> list:
        return sorted(self._active)

    # -- element creation ------------------------------------------------------

    def _append(self, terms: dict, steps) -> int:
        """Add a monic, fully reduced element; retire superseded leads."""
        lead = max(terms, key=self.order.key)
        lc = terms[lead]
        if lc != 1:
            terms = {w: _div(c, lc) for w, c in terms.items()}
            steps = tuple(TraceStep(_div(c, lc), l, ref, r)
                          for c, l, ref, r in steps)
        elem = _Element(terms, lead, tuple(steps))
        idx = len(self.elements)
        self.elements.append(elem)
        self.stats.elements_added += 1
        others = list(self._active.items())  # (idx, lead) snapshot
        # retire active elements whose lead contains the new lead as a factor
        for m in self.kernel.find_retirees(lead, others):
            self._retire(m)
            self._requeue.append(m)
        live = [(m, w) for m, w in others if self.elements[m].active]
        # queue obstructions against the still-active snapshot, then self
        self._push_rows(idx, self.kernel.batch_overlaps(lead, live))
        self._push_rows(idx, [(idx,) + row
                              for row in self.kernel.self_overlaps(lead)])
        self._active[idx] = lead
        self._lead_add(idx, lead)
        return idx

    def _push_rows(self, j: int, rows) -> None:
        maxdeg = self.limits.max_degree
        queue = self.queue
        for row in rows:
            i, li, ri, lj, rj, overlap = row
            deg = len(overlap)
            if deg > maxdeg:
                self.stats.obstructions_skipped_degree += 1
                continue
            heapq.heappush(queue, (deg, self._seq, i, j, li, ri, lj, rj))
            self._seq += 1

    # -- normal forms ----------------------------------------------------------

    def _normal_form(self, terms: dict, steps: list) -> bool:
        return self.reducer.normal_form(
            terms, lambda idx: self.elements[idx].items, steps, self._deadline)

    def _nf_into(self, terms: dict, steps: list) -> bool:
        """Normal form that preserves ``terms_after = sum(steps)``.

        The reducer appends the subtracted multiples (``before = after + sum``),
        so appended entries are negated to keep the element-level identity.
        """
        mark = len(steps)
        ok = self._normal_form(terms, steps)
        for n in range(mark, len(steps)):
            c, l, ref, r = steps[n]
            steps[n] = TraceStep(-c, l, ref, r)
        return ok

    def _process_requeue(self) -> None:
        while self._requeue:
            m = self._requeue.pop()
            terms = dict(self.elements[m].terms)
            steps: list = [TraceStep(1, (), m, ())]
            if not self._nf_into(terms, steps):
                self._exhausted = True
                return
            if terms:
                self._append(terms, steps)

    # -- budgets -----------------------------------------------------------------

    def _budget_ok(self) -> bool:
        if self._exhausted:
            return False
        if self.stats.obstructions_processed >= self.limits.max_iterations:
            return False
        if len(self._active) >= self.limits.max_basis_size:
            return False
        if time.monotonic() > self._deadline:
            return False
        return True

    def has_work(self) -> bool:
        return bool(self.queue or self._requeue)

    # -- main loop -----------------------------------------------------------------

    def _form_spoly(self, row) -> dict:
        _, _, i, j, li, ri, lj, rj = row
        terms: dict = {}
        self.kernel.submul(terms, self.elements[i].items, -1, li, ri)
        self.kernel.submul(terms, self.elements[j].items, 1, lj, rj)
        return terms

    def process(self, max_new_elements: int = 1) -> bool:
        """Work the queue until ``max_new_elements`` were added, the queue is
        exhausted, or a budget tripped.  Returns True iff an element was added.
        """
        added = 0
        elements = self.elements
        while added < max_new_elements:
            self._process_requeue()
            if self._exhausted or not self.queue or not self._budget_ok():
                break
            batch: list = []
            while self.queue and len(batch) < self.workers:
                row = heapq.heappop(self.queue)
                if elements[row[2]].active and elements[row[3]].active:
                    batch.append(row)
            if not batch:
                continue
            if len(batch) > 1:
                if self._pool is None:
                    self._pool = ThreadPoolExecutor(self.workers)
                spolys = list(self._pool.map(self._form_spoly, batch))
            else:
                spolys = [self._form_spoly(batch[0])]
            for n, (row, terms) in enumerate(zip(batch, spolys)):
                if added >= max_new_elements or not self._budget_ok():
                    for leftover in batch[n:]:
                        heapq.heappush(self.queue, leftover)
                    return added > 0
                _, _, i, j, li, ri, lj, rj = row
                # retired mid-batch: the pair cannot survive into the final
                # basis, so its obstruction is moot
                if not (elements[i].active and elements[j].active):
                    continue
                self.stats.obstructions_processed += 1
                steps: list = [TraceStep(1, li, i, ri),
                               TraceStep(-1, lj, j, rj)]
                if not self._nf_into(terms, steps):
                    self._exhausted = True
                    for leftover in batch[n + 1:]:
                        heapq.heappush(self.queue, leftover)
                    return added > 0
                if terms:
                    self._append(terms, steps)
                    added += 1
                self._process_requeue()
        return added > 0

    def run(self) -> str:
        """Drain the queue; returns COMPLETE or BUDGET_EXHAUSTED."""
        while self.has_work():
            if not self._budget_ok():
                self.stats.elapsed = time.monotonic() - self._start
                return BUDGET_EXHAUSTED
            self.process(max_new_elements=2 ** 30)
        self.stats.elapsed = time.monotonic() - self._start
        return COMPLETE if not self._exhausted else BUDGET_EXHAUSTED

    # -- trace expansion --------------------------------------------------------------

    def expand_steps(self, steps) -> list:
        """Expand element-level steps into generator-level TraceSteps.

        Quads with equal (left, generator, right) merge; zero coefficients
        drop out.
        """
        needed = set()
        stack = [ref for _, _, ref, _ in steps if not isinstance(ref, tuple)]
        while stack:
            k = stack.pop()
            if k in needed:
                continue
            needed.add(k)
            stack.extend(ref for _, _, ref, _ in self.elements[k].steps
                         if not isinstance(ref, tuple))
        memo: dict = {}
        for k in sorted(needed):
            acc: dict = {}
            for c, l, ref, r in self.elements[k].steps:
                if isinstance(ref, tuple):
                    key = (l, ref[1], r)
                    v = acc.get(key, 0) + c
                    if v:
                        acc[key] = v
                    else:
                        acc.pop(key, None)
                else:
                    for (l2, gi, r2), c2 in memo[ref].items():
                        key = (l + l2, gi, r2 + r)
                        v = acc.get(key, 0) + c * c2
                        if v:
                            acc[key] = v
                        else:
                            acc.pop(key, None)
            memo[k] = acc
        out: dict = {}
        for c, l, ref, r in steps:
            if isinstance(ref, tuple):
                key = (l, ref[1], r)
                v = out.get(key, 0) + c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
            else:
                for (l2, gi, r2), c2 in memo[ref].items():
                    key = (l + l2, gi, r2 + r)
                    v = out.get(key, 0) + c * c2
                    if v:
                        out[key] = v
                    else:
                        del out[key]
        return [TraceStep(normalize_coeff(c), l, gi, r)
                for (l, gi, r), c in out.items() if c]

    def interreduce(self) -> None:
        """Reduce every active element against the others until stable."""
        changed = True
        guard = 0
        while changed and guard < 10_000:
            changed = False
            guard += 1
            for k in self.active_indices():
                elem = self.elements[k]
                self._lead_remove(k, elem.lead)  # reduce k by the others
                terms = dict(elem.terms)
                steps: list = [TraceStep(1, (), k, ())]
                self._nf_into(terms, steps)
                if len(steps) == 1:  # nothing reduced; restore
                    self._lead_add(k, elem.lead)
                    continue
                elem.active = False
                del self._active[k]
                if terms:
                    self._append(terms, steps)
                self._process_requeue()
                changed = True
                break


def complete(generators: Sequence[Polynomial],
             order: Optional[DegLexOrder] = None,
             limits: Optional[CompletionLimits] = None,
             kernel=None, workers: int = 1):
    """Bounded completion of the generator set.

    Returns ``(basis, status)`` where each basis element is a
    ``TracedPolynomial`` whose trace expresses it exactly in the original
    generators (``value = sum(trace)``), and status is ``"complete"`` when
    every obstruction within ``max_degree`` reduced to zero within budget.
    """
    generators = list(generators)
    if not generators:
        return [], COMPLETE
    order = order or generators[0].alg.default_order()
    limits = limits or CompletionLimits()
    engine = CompletionEngine(list(enumerate(generators)), order, limits,
                              kernel=kernel, workers=workers)
    engine.interreduce()
    status = engine.run()
    alg = generators[0].alg
    basis = []
    for k in engine.active_indices():
        elem = engine.elements[k]
        trace = engine.expand_steps([TraceStep(1, (), k, ())])
        basis.append(TracedPolynomial(Polynomial._make(alg, dict(elem.terms)),
                                      tuple(trace)))
    return basis, status
