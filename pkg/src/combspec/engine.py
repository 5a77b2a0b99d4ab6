"""Lifted model counting for two-variable clause sentences.

The pipeline turns a sentence into a small weighted graph over "cells"
(complete truth assignments to the single-element atoms) and evaluates a
closed-form sum over domain compositions, so the count for domain size n
never enumerates worlds:

1. normalize:   drop quantifiers over variables a clause never uses
2. reduce:      rewrite exactly-one counting quantifiers into cardinality
                constraints on predicates, via fresh defining predicates
                where needed
3. skolemize:   eliminate existential quantifiers with fresh predicates
                weighted (1, -1), leaving only universal clauses
4. condition:   branch on the truth of nullary predicates
5. cell graph:  one vertex per consistent cell, vertex weight from the
                single-element atoms, edge weight from the model count of
                the cross atoms between two elements

Cardinality constraints ride through the computation as symbolic weights;
one polynomial coefficient is read off at the end.  All arithmetic is
exact integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from operator import mul
from typing import Mapping, Sequence

from .logic import (
    EXISTS,
    FORALL,
    VARS,
    Clause,
    FragmentError,
    Literal,
    Predicate,
    Sentence,
    make_clause,
    pair,
    single,
)
from .polynomial import (
    Poly,
    Value,
    canonical_value,
    coeff_of,
    mul_values,
    pow_value,
)

WeightMap = Mapping[str, tuple[int, int]]


class BudgetExceeded(RuntimeError):
    """Raised when a computation runs past its deadline."""


@dataclass(frozen=True)
class CardinalityConstraint:
    """Requires the number of true ground atoms of pred to equal
    coeffs[0]*n^2 + coeffs[1]*n + coeffs[2] at domain size n."""

    pred: str
    coeffs: tuple[int, int, int]

    def target(self, n: int) -> int:
        a2, a1, a0 = self.coeffs
        return a2 * n * n + a1 * n + a0


@dataclass
class Spectrum:
    terms: list[int]
    truncated: bool = False


def _fresh(used: set[str], base: str) -> str:
    i = 0
    while f"{base}{i}" in used:
        i += 1
    name = f"{base}{i}"
    used.add(name)
    return name


def normalize_clauses(clauses: Sequence[Clause]) -> list[Clause]:
    """Drop quantifiers over unused variables; reject unused counting."""
    out = []
    for c in clauses:
        used = {a for lit in c.body for a in lit.args}
        pairs = list(zip(c.prefix, VARS))
        kept = [(q, v) for q, v in pairs if v in used]
        for q, v in pairs:
            if v not in used and q.is_counting:
                raise FragmentError(
                    f"counting quantifier over unused variable in {c.render()}"
                )
        if len(kept) == len(pairs):
            out.append(c)
        elif kept:
            out.append(make_clause([(q, v) for q, v in kept], c.body))
        else:
            out.append(single(FORALL, c.body))
    return out


def reduce_counting(
    clauses: Sequence[Clause],
    weights: dict[str, tuple[int, int]],
    used: set[str],
) -> tuple[list[Clause], list[CardinalityConstraint]]:
    """Rewrite E=1 quantifiers into cardinality constraints.

    Adds fresh defining predicates (weights (1, 1)) to weights/used when a
    counted reflexive atom or an E=1 x V y prefix needs one.  Only k = 1 is
    supported; mixed counting/existential prefixes are rejected.
    """
    out: list[Clause] = []
    constraints: list[CardinalityConstraint] = []
    for c in clauses:
        if not c.is_counting:
            out.append(c)
            continue
        for q in c.prefix:
            if q.is_counting and q.count != 1:
                raise FragmentError(f"only E=1 counting is supported: {c.render()}")
        kinds = tuple("C" if q.is_counting else q.kind for q in c.prefix)
        if kinds in (("C", "C"), ("C", "E"), ("E", "C")):
            raise FragmentError(
                f"counting cannot pair with another existential: {c.render()}"
            )
        if len(c.body) != 1:
            raise FragmentError(f"counting clause must be a single literal: {c.render()}")
        (lit,) = c.body
        counted = VARS[kinds.index("C")]
        pname = lit.pred.name

        if kinds in (("C",), ("V", "C")):
            if lit.pred.arity == 2 and set(lit.args) == {"x", "y"}:
                # row (or column) sums are all one exactly when each element
                # has a witness and the total atom count is n (n^2-n negated)
                out.append(pair(FORALL, EXISTS, [lit]))
                coeffs = (1, -1, 0) if lit.negated else (0, 1, 0)
                constraints.append(CardinalityConstraint(pname, coeffs))
            elif lit.pred.arity == 1:
                coeffs = (0, 1, -1) if lit.negated else (0, 0, 1)
                constraints.append(CardinalityConstraint(pname, coeffs))
            else:
                # counted reflexive atom: define D(x) <-> lit(x,x), count D
                d = Predicate(_fresh(used, "D"), 1)
                weights[d.name] = (1, 1)
                datom = Literal(d, ("x",))
                ratom = Literal(lit.pred, ("x", "x"), lit.negated)
                out.append(single(FORALL, [datom, ratom.negate()]))
                out.append(single(FORALL, [datom.negate(), ratom]))
                constraints.append(CardinalityConstraint(d.name, (0, 0, 1)))
        else:  # ("C", "V"): exactly one x where the literal holds for all y
            a = Predicate(_fresh(used, "A"), 1)
            weights[a.name] = (1, 1)
            aatom = Literal(a, ("x",))
            out.append(pair(FORALL, FORALL, [aatom.negate(), lit]))
            out.append(pair(FORALL, EXISTS, [aatom, lit.negate()]))
            constraints.append(CardinalityConstraint(a.name, (0, 0, 1)))
    return out, constraints


def skolemize_clauses(
    clauses: Sequence[Clause],
    weights: dict[str, tuple[int, int]],
    used: set[str],
) -> list[Clause]:
    """Replace existential prefixes with fresh (1, -1) predicates.

    Every output clause is universally quantified; the weighted count over
    the extended vocabulary equals the input's by the usual telescoping of
    the -1 branch.
    """
    out: list[Clause] = []
    for c in clauses:
        kinds = tuple(q.kind for q in c.prefix)
        if any(q.is_counting for q in c.prefix):
            raise FragmentError("counting quantifier survived reduction")
        if kinds in (("V",), ("V", "V")):
            out.append(c)
        elif kinds == ("E",):
            z = Literal(Predicate(_fresh(used, "Z"), 0), ())
            weights[z.pred.name] = (1, -1)
            for lit in c.body:
                out.append(single(FORALL, [z, lit.negate()]))
        elif kinds == ("E", "E"):
            z = Literal(Predicate(_fresh(used, "Z"), 0), ())
            weights[z.pred.name] = (1, -1)
            for lit in c.body:
                out.append(pair(FORALL, FORALL, [z, lit.negate()]))
        elif kinds == ("V", "E"):
            s = Literal(Predicate(_fresh(used, "S"), 1), ("x",))
            weights[s.pred.name] = (1, -1)
            for lit in c.body:
                out.append(pair(FORALL, FORALL, [s, lit.negate()]))
        else:  # ("E", "V")
            s = Literal(Predicate(_fresh(used, "S"), 1), ("x",))
            z = Literal(Predicate(_fresh(used, "Z"), 0), ())
            weights[s.pred.name] = (1, -1)
            weights[z.pred.name] = (1, -1)
            out.append(single(FORALL, [z.negate(), s]))
            out.append(pair(FORALL, FORALL, [s, *c.body]))
    return out


def condition_nullary(
    clauses: Sequence[Clause],
    weights: WeightMap,
) -> list[tuple[int, list[Clause]]]:
    """Branch on nullary predicate truth: (weight factor, residual clauses)."""
    names = sorted(
        {lit.pred.name for c in clauses for lit in c.body if lit.pred.arity == 0}
    )
    if not names:
        return [(1, list(clauses))]
    branches = []
    for values in itertools.product((True, False), repeat=len(names)):
        assign = dict(zip(names, values))
        factor = 1
        for name, val in assign.items():
            w, wbar = weights.get(name, (1, 1))
            factor *= w if val else wbar
        if factor == 0:
            continue
        residual = []
        dead = False
        for c in clauses:
            body = []
            satisfied = False
            for lit in c.body:
                if lit.pred.arity == 0:
                    if assign[lit.pred.name] != lit.negated:
                        satisfied = True
                        break
                else:
                    body.append(lit)
            if satisfied:
                continue
            if not body:
                dead = True
                break
            residual.append(Clause(c.prefix, frozenset(body)))
        if not dead:
            branches.append((factor, residual))
    return branches


@dataclass
class CellGraph:
    """Vertex-weighted graph over the consistent cells of a signature.

    cells[i] assigns a truth value to each single-element atom (one per
    unary predicate, one per binary predicate's reflexive atom, ordered as
    atom_preds).  weights[i] is the product of those atoms' weights; r[i][j]
    is the weighted count of cross-atom assignments consistent with every
    two-variable clause read in both directions between cells i and j.
    """

    atom_preds: list[Predicate]
    cells: list[tuple[bool, ...]]
    weights: list[Value]
    r: list[list[Value]]
    cvars: tuple[str, ...]
    _merged: tuple | None = field(default=None, repr=False)
    _dp_order: list[int] | None = field(default=None, repr=False)


def build_cell_graph(
    clauses: Sequence[Clause],
    weights: WeightMap,
    sig_preds: Sequence[Predicate],
    cvars: tuple[str, ...] = (),
) -> CellGraph:
    unary = sorted(p for p in sig_preds if p.arity == 1)
    binary = sorted(p for p in sig_preds if p.arity == 2)
    atom_preds = unary + binary
    index = {p.name: i for i, p in enumerate(atom_preds)}
    cvar_set = set(cvars)

    def wpair(p: Predicate) -> tuple[Value, Value]:
        w, wbar = weights.get(p.name, (1, 1))
        if p.name in cvar_set:
            return Poly.variable(cvars, p.name), wbar
        return w, wbar

    atom_w = [wpair(p) for p in atom_preds]

    for c in clauses:
        for lit in c.body:
            if lit.pred.arity == 0:
                raise ValueError("nullary literal reached the cell graph")
        if any(q != FORALL for q in c.prefix):
            raise ValueError("non-universal clause reached the cell graph")

    # diag[c] lists (atom index, negated) for the clause read at a single
    # element, where every argument collapses to that element
    diag = [[(index[l.pred.name], l.negated) for l in c.body] for c in clauses]

    two_var = [c for c in clauses if c.nvars == 2]
    npos = 2 * len(binary)
    bpos = {p.name: 2 * i for i, p in enumerate(binary)}
    nassign = 1 << npos

    # per clause and orientation: cell-determined literals as
    # (use_y_cell, atom index, negated), cross literals as assignment masks
    oriented = []
    for c in two_var:
        for flip in (False, True):
            cell_lits = []
            cross_mask = 0
            for l in c.body:
                args = l.args
                if l.pred.arity == 1:
                    side = args[0] == "y"
                    cell_lits.append((side ^ flip, index[l.pred.name], l.negated))
                elif args[0] == args[1]:
                    side = args[0] == "y"
                    cell_lits.append((side ^ flip, index[l.pred.name], l.negated))
                else:
                    p = bpos[l.pred.name] + ((args == ("y", "x")) ^ flip)
                    for a in range(nassign):
                        if bool(a >> p & 1) != l.negated:
                            cross_mask |= 1 << a
            oriented.append((cell_lits, cross_mask))

    assign_w: list[Value] = []
    for a in range(nassign):
        w: Value = 1
        for p in binary:
            base = bpos[p.name]
            wt, wf = wpair(p)
            w = mul_values(w, wt if a >> base & 1 else wf)
            w = mul_values(w, wt if a >> (base + 1) & 1 else wf)
        assign_w.append(w)
    full_mask = (1 << nassign) - 1

    cells = []
    cell_weights = []
    for bits in itertools.product((False, True), repeat=len(atom_preds)):
        if all(any(bits[i] != neg for i, neg in lits) for lits in diag):
            cells.append(bits)
            w = 1
            for val, (wt, wf) in zip(bits, atom_w):
                w = mul_values(w, wt if val else wf)
            cell_weights.append(w)

    q = len(cells)
    r: list[list[Value]] = [[0] * q for _ in range(q)]
    for i in range(q):
        for j in range(i, q):
            mask = full_mask
            sides = (cells[i], cells[j])
            for cell_lits, cross_mask in oriented:
                if any(sides[use_y][idx] != neg for use_y, idx, neg in cell_lits):
                    continue
                mask &= cross_mask
                if not mask:
                    break
            total: Value = 0
            a = 0
            while mask:
                if mask & 1:
                    total = total + assign_w[a]
                mask >>= 1
                a += 1
            r[i][j] = r[j][i] = total
    return CellGraph(atom_preds, cells, cell_weights, r, cvars)


def _is_zero(v: Value) -> bool:
    return v == 0 if isinstance(v, int) else v.is_zero()


def _merge_cells(g: CellGraph) -> tuple[list[Value], list[list[Value]]]:
    """Collapse cells with identical edge rows, summing their weights.

    Cells i and j merge when r_ii = r_jj = r_ij and their edges agree on
    every other cell: splitting a block between them telescopes to a single
    cell of weight w_i + w_j.  Zero-weight cells drop out entirely.
    """
    if g._merged is not None:
        return g._merged
    q = len(g.cells)
    live = [i for i in range(q) if not _is_zero(g.weights[i])]
    key = [[canonical_value(v) for v in row] for row in g.r]
    groups: list[list[int]] = []
    for i in live:
        for grp in groups:
            rep = grp[0]
            if key[i][i] == key[rep][rep] == key[rep][i] and all(
                key[i][k] == key[rep][k]
                for k in live
                if k != i and k != rep
            ):
                grp.append(i)
                break
        else:
            groups.append([i])
    weights = []
    kept_groups = []
    for grp in groups:
        w: Value = 0
        for i in grp:
            w = w + g.weights[i]
        if not _is_zero(w):
            weights.append(w)
            kept_groups.append(grp)
    reps = [grp[0] for grp in kept_groups]
    r = [[g.r[a][b] for b in reps] for a in reps]
    merged = (weights, r)
    g._merged = merged
    return merged


def _greedy_cell_order(r: list[list[Value]], q: int) -> list[int]:
    """Pick a processing order that keeps DP state counts small.

    A partial assignment is summarized per future cell by a product of that
    cell's column entries, so a column that is constant over the processed
    prefix contributes no state variety.  Greedily append the cell that
    minimizes the product of distinct-value counts over the future columns.
    """
    key = [[canonical_value(v) for v in row] for row in r]
    remaining = list(range(q))
    order: list[int] = []
    while remaining:
        best = remaining[0]
        best_cost = None
        for cand in remaining:
            pref = order + [cand]
            cost = 1
            for j in remaining:
                if j == cand:
                    continue
                cost *= len({key[t][j] for t in pref})
            if best_cost is None or cost < best_cost:
                best, best_cost = cand, cost
        order.append(best)
        remaining.remove(best)
    return order


def evaluate_cell_sum(
    g: CellGraph,
    n: int,
    caps: Sequence[int] | None = None,
    deadline: float | None = None,
) -> Value:
    """Weighted sum over all assignments of n elements to cells.

    Dynamic program over cells: a partial composition of the domain affects
    the rest of the sum only through its unassigned count and, for each
    later cell, the accumulated product of cross-edge powers, so partial
    compositions with equal summaries merge and their coefficients add.
    """
    weights, r = _merge_cells(g)
    q = len(weights)
    if q == 0:
        return 0
    capst = tuple(caps) if caps is not None else None
    order = g._dp_order
    if order is None or len(order) != q:
        order = _greedy_cell_order(r, q)
        g._dp_order = order
    w = [weights[i] for i in order]
    rr = [[r[a][b] for b in order] for a in order]
    if capst is None and all(isinstance(v, int) for v in w) and all(
        isinstance(v, int) for row in rr for v in row
    ):
        return _int_cell_dp(w, rr, q, n, deadline)
    return _value_cell_dp(w, rr, q, n, capst, deadline)


def _pow_row(base: int, emax: int) -> list[int]:
    row = [1] * (emax + 1)
    v = 1
    for e in range(1, emax + 1):
        v *= base
        row[e] = v
    return row


def _int_cell_dp(
    w: list[int],
    rr: list[list[int]],
    q: int,
    n: int,
    deadline: float | None,
) -> int:
    """Plain-integer DP; zero factors break the count loop since every
    higher count keeps the zero."""
    if q == 1:
        return rr[0][0] ** (n * (n - 1) // 2) * w[0] ** n
    # states[rem] maps future-interaction tuples to coefficients; tuple slot
    # t holds prod over processed cells p of rr[p][i+t]^{count_p}
    states: dict[int, dict[tuple[int, ...], int]] = {n: {(1,) * q: 1}}
    total = 0
    ticker = 0
    for i in range(q - 1):
        fold = i == q - 2
        wtab = _pow_row(w[i], n)
        dtab = _pow_row(rr[i][i], n * (n - 1) // 2)
        rows = [_pow_row(rr[i][j], n) for j in range(i + 1, q)]
        mults = [tuple(row[c] for row in rows) for c in range(n + 1)]
        if fold:
            wlast = _pow_row(w[q - 1], n)
            dlast = _pow_row(rr[q - 1][q - 1], n * (n - 1) // 2)
            powcache: dict[tuple[int, int], int] = {}
        nxt: dict[int, dict[tuple[int, ...], int]] = {}
        for rem, bucket in states.items():
            binoms = [1] * (rem + 1)
            b = 1
            for c in range(1, rem + 1):
                b = b * (rem - c + 1) // c
                binoms[c] = b
            if fold:
                lastbase = [
                    dlast[c2 * (c2 - 1) // 2] * wlast[c2] for c2 in range(rem + 1)
                ]
            for accs, coeff in bucket.items():
                ticker += 1
                if deadline is not None and ticker % 512 == 0:
                    if time.monotonic() > deadline:
                        raise BudgetExceeded
                a0 = accs[0]
                rest = accs[1:]
                apow = 1
                for c in range(rem + 1):
                    if c:
                        apow *= a0
                    f = dtab[c * (c - 1) // 2] * wtab[c] * apow
                    if c and f == 0:
                        break
                    contrib = coeff * binoms[c] * f
                    if contrib == 0:
                        continue
                    if fold:
                        # close out the final cell directly
                        c2 = rem - c
                        a1 = rest[0] * mults[c][0]
                        pkey = (a1, c2)
                        p = powcache.get(pkey)
                        if p is None:
                            p = powcache[pkey] = a1**c2
                        total += contrib * lastbase[c2] * p
                        continue
                    na = tuple(map(mul, rest, mults[c])) if c else rest
                    slot = nxt.get(rem - c)
                    if slot is None:
                        nxt[rem - c] = {na: contrib}
                    else:
                        prev = slot.get(na)
                        slot[na] = contrib if prev is None else prev + contrib
        if fold:
            break
        states = {
            rem: {a: v for a, v in bucket.items() if v}
            for rem, bucket in nxt.items()
        }
    return total


def _value_cell_dp(
    w: list[Value],
    rr: list[list[Value]],
    q: int,
    n: int,
    capst: tuple[int, ...] | None,
    deadline: float | None,
) -> Value:
    """Same DP over symbolic weights; states key on canonical values so
    equal polynomials merge."""
    powers: dict[tuple[int, int], list[Value]] = {}

    def pow_of(i: int, j: int, e: int) -> Value:
        tab = powers.setdefault((i, j), [1])
        base = rr[i][j]
        while len(tab) <= e:
            tab.append(mul_values(tab[-1], base, capst))
        return tab[e]

    wpow: dict[int, list[Value]] = {}

    def pow_w(i: int, e: int) -> Value:
        tab = wpow.setdefault(i, [1])
        while len(tab) <= e:
            tab.append(mul_values(tab[-1], w[i], capst))
        return tab[e]

    states: dict[tuple, list] = {(n,) + (1,) * q: [(1,) * q, 1]}
    total: Value = 0
    ticker = 0
    for i in range(q):
        last = i == q - 1
        nxt: dict[tuple, list] = {}
        for key, (accs, coeff) in states.items():
            rem = key[0]
            a0 = accs[0]
            ticker += 1
            if deadline is not None and ticker % 256 == 0:
                if time.monotonic() > deadline:
                    raise BudgetExceeded
            if last:
                f = pow_of(i, i, rem * (rem - 1) // 2)
                f = mul_values(f, pow_w(i, rem), capst)
                f = mul_values(f, pow_value(a0, rem, capst), capst)
                term = mul_values(coeff, f, capst)
                if not _is_zero(term):
                    total = total + term
                continue
            binom = 1
            apow: Value = 1
            for c in range(rem + 1):
                if c:
                    binom = binom * (rem - c + 1) // c
                    apow = mul_values(apow, a0, capst)
                f = pow_of(i, i, c * (c - 1) // 2)
                f = mul_values(f, pow_w(i, c), capst)
                f = mul_values(f, apow, capst)
                if c and _is_zero(f):
                    break
                contrib = mul_values(mul_values(coeff, binom), f, capst)
                if _is_zero(contrib):
                    continue
                na = tuple(
                    mul_values(accs[t], pow_of(i, i + t, c), capst)
                    for t in range(1, q - i)
                )
                nkey = (rem - c,) + tuple(canonical_value(a) for a in na)
                slot = nxt.get(nkey)
                if slot is None:
                    nxt[nkey] = [na, contrib]
                else:
                    slot[1] = slot[1] + contrib
        if last:
            break
        states = {k: v for k, v in nxt.items() if not _is_zero(v[1])}
    return total


@dataclass
class CompiledSentence:
    branches: list[tuple[int, CellGraph]]
    constraints: list[CardinalityConstraint]
    cvars: tuple[str, ...]
    base_weights: dict[str, int]

    def value_at(self, n: int, deadline: float | None = None) -> int:
        if n < 1:
            raise ValueError("domain size must be at least 1")
        targets: dict[str, int] = {}
        for c in self.constraints:
            t = c.target(n)
            if targets.setdefault(c.pred, t) != t:
                return 0
        if any(t < 0 for t in targets.values()):
            return 0
        mono = tuple(targets[p] for p in self.cvars)
        caps = mono if self.cvars else None
        total: Value = 0
        for factor, graph in self.branches:
            v = evaluate_cell_sum(graph, n, caps, deadline)
            total = total + mul_values(v, factor)
        result = coeff_of(total, mono)
        for p, t in targets.items():
            result *= self.base_weights[p] ** t
        return result


def compile_sentence(s: Sentence, weights: WeightMap | None = None) -> CompiledSentence:
    w = {name: (int(a), int(b)) for name, (a, b) in (weights or {}).items()}
    used = {p.name for p in s.predicates}
    clauses = normalize_clauses(sorted(s.clauses, key=Clause.render))
    clauses, constraints = reduce_counting(clauses, w, used)
    clauses = skolemize_clauses(clauses, w, used)
    branches = condition_nullary(clauses, w)

    sig = {p for p in s.predicates if p.arity > 0}
    sig |= {lit.pred for c in clauses for lit in c.body if lit.pred.arity > 0}
    cvars = tuple(sorted({c.pred for c in constraints}))
    base_weights = {p: w.get(p, (1, 1))[0] for p in cvars}

    graphs = [
        (factor, build_cell_graph(residual, w, sorted(sig), cvars))
        for factor, residual in branches
    ]
    return CompiledSentence(graphs, constraints, cvars, base_weights)


def wfomc(s: Sentence, n: int, weights: WeightMap | None = None) -> int:
    """Weighted first-order model count of s at domain size n."""
    return compile_sentence(s, weights).value_at(n)


def compute_spectrum(
    s: Sentence,
    length: int,
    weights: WeightMap | None = None,
    budget_secs: float | None = None,
) -> Spectrum:
    """Model counts for n = 1 .. length, truncated if the budget runs out."""
    deadline = time.monotonic() + budget_secs if budget_secs is not None else None
    compiled = compile_sentence(s, weights)
    terms: list[int] = []
    for n in range(1, length + 1):
        if deadline is not None and time.monotonic() > deadline:
            return Spectrum(terms, truncated=True)
        try:
            terms.append(compiled.value_at(n, deadline))
        except BudgetExceeded:
            return Spectrum(terms, truncated=True)
    return Spectrum(terms, truncated=False)


def _poly_serial(v: Value, perm: Sequence[int]):
    """Name-free canonical form of a weight under a symbol reordering."""
    if isinstance(v, int):
        return v
    if not v.terms:
        return 0
    items = []
    for mono, coef in v.terms.items():
        permuted = [0] * len(mono)
        for src, dst in enumerate(perm):
            permuted[dst] = mono[src]
        items.append((tuple(permuted), coef))
    items.sort()
    if len(items) == 1 and not any(items[0][0]):
        return items[0][1]
    return ("p", tuple(items))


_MAX_ORDERINGS = 100_000


class KeyTooComplex(RuntimeError):
    """Raised when canonical graph labeling would take too many orderings."""


def _graph_serial(g: CellGraph, perm: Sequence[int]) -> str:
    """Canonical serialization of a cell graph under one symbol reordering.

    Refines vertex colors by neighborhood until stable, then minimizes the
    serialized form over orderings within same-color blocks, so two graphs
    serialize identically exactly when they are isomorphic as weighted
    labeled graphs.
    """
    q = len(g.cells)
    if q == 0:
        return "empty"
    wser = [repr(_poly_serial(v, perm)) for v in g.weights]
    eser = [[repr(_poly_serial(v, perm)) for v in row] for row in g.r]

    colors = [f"{wser[i]};{eser[i][i]}" for i in range(q)]
    while True:
        refined = []
        for i in range(q):
            around = sorted((eser[i][j], colors[j]) for j in range(q) if j != i)
            refined.append(f"{colors[i]}|{around}")
        if len(set(refined)) == len(set(colors)):
            colors = refined
            break
        colors = refined

    blocks: dict[str, list[int]] = {}
    for i, col in enumerate(colors):
        blocks.setdefault(col, []).append(i)
    ordered_blocks = [blocks[c] for c in sorted(blocks)]
    count = 1
    for b in ordered_blocks:
        count *= math.factorial(len(b))
        if count > _MAX_ORDERINGS:
            raise KeyTooComplex(f"{count} orderings")

    best: str | None = None
    for parts in itertools.product(
        *(itertools.permutations(b) for b in ordered_blocks)
    ):
        order = [i for part in parts for i in part]
        rows = [wser[i] for i in order]
        for a in range(q):
            for b in range(a, q):
                rows.append(eser[order[a]][order[b]])
        serial = "#".join(rows)
        if best is None or serial < best:
            best = serial
    return f"{q}:{best}"


def cell_graph_key(g: CellGraph) -> bytes:
    """Isomorphism-invariant key: equal keys imply equal contributions."""
    perms = itertools.permutations(range(len(g.cvars))) if g.cvars else [()]
    best = min(_graph_serial(g, p) for p in perms)
    return best.encode()


def spectrum_fingerprint(s: Sentence, weights: WeightMap | None = None) -> bytes:
    """Key equal only for sentences whose spectra provably coincide.

    Covers the full compiled form: nullary branch factors, each branch's
    cell graph up to isomorphism, cardinality targets, and constrained
    predicates' base weights, minimized over renamings of the symbolic
    constraint variables.
    """
    comp = compile_sentence(s, weights)
    k = len(comp.cvars)
    best: str | None = None
    for perm in itertools.permutations(range(k)) if k else [()]:
        graphs = sorted(
            (factor, _graph_serial(g, perm)) for factor, g in comp.branches
        )
        cons = sorted(
            (perm[comp.cvars.index(c.pred)], c.coeffs, comp.base_weights[c.pred])
            for c in comp.constraints
        )
        serial = repr((graphs, cons))
        if best is None or serial < best:
            best = serial
    assert best is not None
    return best.encode()
