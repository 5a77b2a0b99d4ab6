"""Sentence enumeration with redundancy pruning.

Sentences grow layer by layer: layer 1 holds every single-literal clause
over the predicate pool, and each later layer refines a retained sentence
by adding one literal to a clause or one fresh single-literal clause.
Each candidate is classified once:

  dropped (not output, not refined): tautologous clause, refuted,
      decomposable into predicate-disjoint parts, or duplicate canonical
      form of an earlier candidate
  hidden (not output, still refined): trivial full/empty predicate
      constraint, a binary predicate used only reflexively, a subsumed
      clause, or a cell structure already seen
  new (output and refined): everything else

Dropping is reserved for cases whose refinements are provably covered
elsewhere; hiding keeps the search complete while skipping output whose
spectrum is derivable from a simpler sentence.
"""

from __future__ import annotations

import itertools
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .engine import spectrum_fingerprint, KeyTooComplex
from .logic import (
    EXISTS,
    FORALL,
    VARS,
    Clause,
    Literal,
    Predicate,
    Quantifier,
    Sentence,
    canonical_key,
    counting,
    make_clause,
    pair,
    single,
)

PAIR_PREFIXES = [
    (FORALL, FORALL),
    (FORALL, EXISTS),
    (EXISTS, FORALL),
    (EXISTS, EXISTS),
]


@dataclass(frozen=True)
class GenLimits:
    """Search bounds: literals per clause, clauses per sentence, pool size."""

    max_literals: int
    max_clauses: int
    unary: int
    binary: int
    max_count: int = 0

    def predicates(self) -> list[Predicate]:
        unary = [Predicate(f"U{i}", 1) for i in range(self.unary)]
        binary = [Predicate(f"B{i}", 2) for i in range(self.binary)]
        return unary + binary

    def single_quants(self) -> list[Quantifier]:
        quants = [FORALL, EXISTS]
        if self.max_count >= 1:
            quants.append(counting(1))
        return quants

    def pair_quants(self) -> list[tuple[Quantifier, Quantifier]]:
        quants = list(PAIR_PREFIXES)
        if self.max_count >= 1:
            quants.append((FORALL, counting(1)))
            quants.append((counting(1), FORALL))
        return quants


def initial_clauses(limits: GenLimits) -> list[Clause]:
    """Single-literal clauses: one-variable bodies under one-variable
    prefixes, two-variable bodies under two-variable prefixes."""
    preds = limits.predicates()
    out = []
    for q in limits.single_quants():
        for p in preds:
            args = ("x",) if p.arity == 1 else ("x", "x")
            for neg in (False, True):
                out.append(single(q, [Literal(p, args, neg)]))
    for q1, q2 in limits.pair_quants():
        for p in preds:
            if p.arity != 2:
                continue
            for args in (("x", "y"), ("y", "x")):
                for neg in (False, True):
                    out.append(pair(q1, q2, [Literal(p, args, neg)]))
    return out


def _literal_options(preds: Sequence[Predicate], nvars: int) -> list[Literal]:
    opts = []
    vars_avail = VARS[:nvars]
    for p in preds:
        if p.arity == 1:
            tuples = [(v,) for v in vars_avail]
        else:
            tuples = [(a, b) for a in vars_avail for b in vars_avail]
        for args in tuples:
            for neg in (False, True):
                opts.append(Literal(p, args, neg))
    return opts


def refinements(
    s: Sentence, limits: GenLimits, pool: Sequence[Clause]
) -> list[Sentence]:
    """All one-step extensions of s, deduplicated by rendered text."""
    preds = limits.predicates()
    out: dict[str, Sentence] = {}
    for c in s.clauses:
        if c.is_counting or len(c.body) >= limits.max_literals:
            continue
        for lit in _literal_options(preds, c.nvars):
            if lit in c.body:
                continue
            extended = Clause(c.prefix, c.body | {lit})
            child = Sentence((s.clauses - {c}) | {extended})
            out.setdefault(child.render(), child)
    if len(s.clauses) < limits.max_clauses:
        for c0 in pool:
            if c0 in s.clauses:
                continue
            child = Sentence(s.clauses | {c0})
            out.setdefault(child.render(), child)
    return list(out.values())


def is_tautological(s: Sentence) -> bool:
    """Some clause is valid: it contains a complementary literal pair,
    or its trailing existential admits the diagonal witness y = x whose
    instance contains one."""
    for c in s.clauses:
        for lit in c.body:
            if not lit.negated and lit.negate() in c.body:
                return True
        if c.nvars == 2 and c.prefix[1] == EXISTS:
            diag = {lit.substitute({"x": "x", "y": "x"}) for lit in c.body}
            for lit in diag:
                if not lit.negated and lit.negate() in diag:
                    return True
    return False


def is_decomposable(s: Sentence) -> bool:
    """Predicates split into groups never sharing a clause, so the
    spectrum is a product of the groups' spectra."""
    preds = sorted(p.name for p in s.predicates)
    if len(preds) <= 1:
        return False
    parent = {p: p for p in preds}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c in s.clauses:
        names = sorted({lit.pred.name for lit in c.body})
        for other in names[1:]:
            parent[find(other)] = find(names[0])
    return len({find(p) for p in preds}) > 1


def has_trivial_constraint(s: Sentence) -> bool:
    """A clause forces a predicate everywhere-true or everywhere-false:
    a universal single-literal clause over U(x) or B(x,y).  A reflexive
    diagonal constraint (V x B(x,x)) does not qualify; it leaves the
    off-diagonal atoms free."""
    for c in s.clauses:
        if len(c.body) != 1 or any(q != FORALL for q in c.prefix):
            continue
        (lit,) = c.body
        if lit.pred.arity == 1 and c.nvars == 1:
            return True
        if lit.pred.arity == 2 and c.nvars == 2 and lit.args[0] != lit.args[1]:
            return True
    return False


def reflexive_only_binary(s: Sentence, require_multiliteral: bool = False) -> bool:
    """Some binary predicate appears only in reflexive atoms, so it acts
    like a unary predicate already covered by a smaller vocabulary.

    With require_multiliteral, only flags predicates all of whose
    occurrences sit in clauses with at least two literals.
    """
    for p in sorted(p for p in s.predicates if p.arity == 2):
        occurrences = [
            (c, lit)
            for c in s.clauses
            for lit in c.body
            if lit.pred == p
        ]
        if all(lit.args[0] == lit.args[1] for _, lit in occurrences):
            if not require_multiliteral or all(
                len(c.body) >= 2 for c, _ in occurrences
            ):
                return True
    return False


_PAIR_THETAS = [
    ({"x": "x", "y": "y"}, "id"),
    ({"x": "y", "y": "x"}, "swap"),
    ({"x": "x", "y": "x"}, "diagx"),
    ({"x": "y", "y": "y"}, "diagy"),
]


def _pair_theta_ok(k1: tuple, k2: tuple, kind: str) -> bool:
    """Is 'instantiate the two-variable clause with kinds k1 through this
    substitution kind into a clause with kinds k2' a valid implication?"""
    if k1 == ("V", "V"):
        return True
    if k1 == ("V", "E"):
        if kind == "id":
            return k2 in (("V", "E"), ("E", "E"))
        return kind == "swap" and k2 == ("E", "E")
    if k1 == ("E", "V"):
        if kind == "id":
            return k2 in (("E", "V"), ("E", "E"))
        if kind == "swap":
            return k2 in (("V", "E"), ("E", "E"))
        if kind == "diagx":
            return k2[0] == "E"
        return len(k2) == 2 and k2[1] == "E"
    return kind in ("id", "swap") and k2 == ("E", "E")


def _implies_clause(c1: Clause, c2: Clause) -> bool:
    """c1 semantically implies c2, via instantiating c1's variables into
    c2's and checking the literal image lands inside c2's body.  Universal
    variables instantiate freely; an existential variable must land on an
    existential of the target.  Sound for every domain size."""
    k1 = tuple(q.kind for q in c1.prefix)
    k2 = tuple(q.kind for q in c2.prefix)
    thetas = []
    if c1.nvars == 1:
        targets = ("x",) if c2.nvars == 1 else ("x", "y")
        for t in targets:
            pos = 0 if t == "x" else 1
            if k1 == ("V",) or k2[pos] == "E":
                thetas.append({"x": t, "y": t})
    elif c2.nvars == 2:
        thetas = [th for th, kind in _PAIR_THETAS if _pair_theta_ok(k1, k2, kind)]
    elif _pair_theta_ok(k1, (k2[0], k2[0]), "diagx"):
        thetas = [{"x": "x", "y": "x"}]
    for theta in thetas:
        if {lit.substitute(theta) for lit in c1.body} <= c2.body:
            return True
    return False


def _diag_strengthenings(c: Clause) -> list[Clause]:
    """Clauses at least as strong as c: itself, plus the diagonal witness
    form when the trailing quantifier is a plain existential."""
    out = [c]
    if c.nvars == 2 and c.prefix[1] == EXISTS:
        body = {lit.substitute({"x": "x", "y": "x"}) for lit in c.body}
        out.append(Clause((c.prefix[0],), frozenset(body)))
    return out


def _relax_counting(c: Clause) -> Clause:
    """Weaken exactly-k (k >= 1) to a plain existential; implied by c."""
    if not c.is_counting:
        return c
    return Clause(
        tuple(EXISTS if q.is_counting else q for q in c.prefix), c.body
    )


def has_subsumed_clause(s: Sentence) -> bool:
    """Some clause is implied by another clause of the sentence, so the
    sentence equals a shorter one already enumerated.  A counting clause
    may subsume through its at-least-one weakening but is never itself
    subsumed (exactly-k is not monotone)."""
    for c1, c2 in itertools.permutations(s.clauses, 2):
        if c2.is_counting:
            continue
        c1r = _relax_counting(c1)
        for target in _diag_strengthenings(c2):
            if _implies_clause(c1r, target):
                return True
    return False


def _refute_ground(s: Sentence) -> list[frozenset]:
    """Ground clause set whose joint satisfiability is implied by s having
    a model of any size, over a small set of abstract elements."""
    elements = [0, 1]

    def fresh() -> int:
        elements.append(len(elements))
        return elements[-1]

    covered = []
    for c in sorted(s.clauses, key=Clause.render):
        kinds = tuple("E" if q.kind == "E" else "V" for q in c.prefix)
        covered.append((c, kinds))

    # Allocate every witness before grounding so universal parts range
    # over all of them.  Forall-exists witnesses go one level deep: each
    # element present at that point gets one, witnesses' own witnesses
    # are not chased.
    plans: list[tuple[Clause, list[dict[str, int]]]] = []
    ev_clauses: list[tuple[Clause, int]] = []
    for c, kinds in covered:
        if kinds == ("E",):
            w = fresh()
            plans.append((c, [{"x": w, "y": w}]))
        elif kinds == ("E", "E"):
            w1, w2 = fresh(), fresh()
            plans.append((c, [{"x": w1, "y": w2}]))
        elif kinds == ("E", "V"):
            ev_clauses.append((c, fresh()))
    for c, kinds in covered:
        if kinds == ("V", "E"):
            plans.append((c, [{"x": t, "y": fresh()} for t in list(elements)]))
    for c, w in ev_clauses:
        plans.append((c, [{"x": w, "y": t} for t in elements]))

    ground: set[frozenset] = set()

    def add(c: Clause, mapping: dict[str, int]) -> None:
        lits = frozenset(
            (lit.pred.name, tuple(mapping[a] for a in lit.args), lit.negated)
            for lit in c.body
        )
        for name, elems, neg in lits:
            if (name, elems, not neg) in lits:
                return
        ground.add(lits)

    for c, kinds in covered:
        if kinds == ("V",):
            for t in elements:
                add(c, {"x": t, "y": t})
        elif kinds == ("V", "V"):
            for t1 in elements:
                for t2 in elements:
                    add(c, {"x": t1, "y": t2})
    for c, maps in plans:
        for m in maps:
            add(c, m)
    return sorted(ground, key=sorted)


def is_refuted(s: Sentence, max_steps: int = 20000, max_clauses: int = 1500) -> bool:
    """True only if s has no model of any size.

    Grounds the sentence over a few abstract elements (existential
    quantifiers get witness elements, exactly-one weakens to at-least-one)
    and saturates with propositional resolution under a budget.  Running
    out of budget reports not-refuted, never the reverse.
    """
    ground = _refute_ground(s)
    pos = {l[:2] for cl in ground for l in cl if not l[2]}
    neg = {l[:2] for cl in ground for l in cl if l[2]}
    if not pos & neg:
        return False

    clauses: list[frozenset] = []
    for cl in ground:
        if any(other <= cl for other in clauses):
            continue
        clauses = [c for c in clauses if not cl < c]
        clauses.append(cl)
    agenda = list(clauses)
    steps = 0
    i = 0
    while i < len(agenda):
        current = agenda[i]
        i += 1
        for other in list(clauses):
            steps += 1
            if steps > max_steps or len(clauses) > max_clauses:
                return False
            for name, elems, negd in sorted(current):
                if (name, elems, not negd) not in other:
                    continue
                resolvent = (current - {(name, elems, negd)}) | (
                    other - {(name, elems, not negd)}
                )
                if not resolvent:
                    return True
                if any((n, e, not ng) in resolvent for n, e, ng in resolvent):
                    continue
                if any(c <= resolvent for c in clauses):
                    continue
                clauses = [c for c in clauses if not resolvent < c]
                clauses.append(resolvent)
                agenda.append(resolvent)
    return False


def design_redundant(s: Sentence) -> bool:
    """Sentence the pipeline hides or drops on syntactic grounds alone;
    invariant under every spectrum-preserving renaming."""
    return (
        is_tautological(s)
        or is_decomposable(s)
        or has_trivial_constraint(s)
        or reflexive_only_binary(s)
        or has_subsumed_clause(s)
    )


DROPPED = ("tautology", "refuted", "decomposable", "duplicate")
HIDDEN = ("trivial", "reflexive", "subsumed", "spectrum_duplicate")


@dataclass
class GenState:
    seen_canonical: set[bytes] = field(default_factory=set)
    seen_spectrum: set[bytes] = field(default_factory=set)


def classify(s: Sentence, state: GenState, mode: str = "full") -> str:
    """Verdict for one candidate; registers its keys when retained."""
    if mode == "structural":
        return "new"
    if is_tautological(s):
        return "tautology"
    if is_refuted(s):
        return "refuted"
    if is_decomposable(s):
        return "decomposable"
    key = canonical_key(s)
    if key in state.seen_canonical:
        return "duplicate"
    state.seen_canonical.add(key)
    if has_trivial_constraint(s):
        return "trivial"
    if reflexive_only_binary(s):
        return "reflexive"
    if has_subsumed_clause(s):
        return "subsumed"
    # cell-graph comparison is the costliest filter, so it runs last and
    # indexes only sentences every cheaper filter passed
    try:
        fkey = spectrum_fingerprint(s)
    except KeyTooComplex:
        return "new"
    if fkey in state.seen_spectrum:
        return "spectrum_duplicate"
    state.seen_spectrum.add(fkey)
    return "new"


@dataclass
class GenResult:
    kept: list[list[Sentence]]
    hidden: list[list[tuple[Sentence, str]]]
    counts: list[Counter]
    truncated: bool = False

    def kept_cumulative(self) -> list[int]:
        totals, acc = [], 0
        for layer in self.kept:
            acc += len(layer)
            totals.append(acc)
        return totals

    def all_kept(self) -> list[Sentence]:
        return [s for layer in self.kept for s in layer]

    def all_retained(self) -> list[Sentence]:
        out = []
        for kept, hidden in zip(self.kept, self.hidden):
            out.extend(kept)
            out.extend(s for s, _ in hidden)
        return out


def generate(
    limits: GenLimits,
    layers: int,
    mode: str = "full",
    budget_secs: float | None = None,
) -> GenResult:
    """Run the layered search; deterministic for fixed limits and layers."""
    pool = initial_clauses(limits)
    state = GenState()
    frontier = [Sentence(frozenset([c])) for c in pool]
    result = GenResult([], [], [])
    deadline = time.monotonic() + budget_secs if budget_secs is not None else None

    for layer in range(1, layers + 1):
        by_text = {}
        for s in frontier:
            by_text.setdefault(s.render(), s)
        candidates = [by_text[t] for t in sorted(by_text)]
        kept: list[Sentence] = []
        hidden: list[tuple[Sentence, str]] = []
        counts: Counter = Counter()
        for s in candidates:
            if deadline is not None and time.monotonic() > deadline:
                result.truncated = True
                break
            verdict = classify(s, state, mode)
            counts[verdict] += 1
            if verdict == "new":
                kept.append(s)
            elif verdict in HIDDEN:
                hidden.append((s, verdict))
        result.kept.append(kept)
        result.hidden.append(hidden)
        result.counts.append(counts)
        if result.truncated:
            break
        if layer < layers:
            frontier = []
            for s in kept:
                frontier.extend(refinements(s, limits, pool))
            for s, _ in hidden:
                frontier.extend(refinements(s, limits, pool))
    return result


def random_sentence(rng: random.Random, limits: GenLimits) -> Sentence:
    """Uniform-ish fragment-legal sentence inside the given limits."""
    preds = limits.predicates()
    binaries = [p for p in preds if p.arity == 2]
    clauses = []
    for _ in range(rng.randint(1, limits.max_clauses)):
        if binaries and rng.random() < 0.6:
            q1, q2 = rng.choice(limits.pair_quants())
            if q1.is_counting or q2.is_counting:
                counted = "x" if q1.is_counting else "y"
                p = rng.choice(binaries)
                other = "y" if counted == "x" else "x"
                args = rng.choice(
                    [(counted, other), (other, counted), (counted, counted)]
                )
                body = [Literal(p, args, rng.random() < 0.5)]
            else:
                body = rng.sample(
                    _literal_options(preds, 2),
                    rng.randint(1, limits.max_literals),
                )
                if not any(a == "y" for lit in body for a in lit.args):
                    p = rng.choice(binaries)
                    body.append(Literal(p, ("x", "y"), rng.random() < 0.5))
            clauses.append(pair(q1, q2, body))
        else:
            q = rng.choice(limits.single_quants())
            if q.is_counting:
                options = [
                    Literal(p, ("x",) if p.arity == 1 else ("x", "x"), neg)
                    for p in preds
                    for neg in (False, True)
                ]
                body = [rng.choice(options)]
            else:
                body = rng.sample(
                    _literal_options(preds, 1),
                    rng.randint(1, min(limits.max_literals, 2 * len(preds))),
                )
            clauses.append(single(q, body))
    return Sentence(frozenset(clauses))
