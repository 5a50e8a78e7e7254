"""Ground-truth semantics by exhaustive enumeration over finite backends.

The defined set of a formula is the set of parameter tuples for which some
assignment of ring elements to the bound variables satisfies the body.
Parameter tuples are always enumerated in full.  The witness search is a
complete backtracking search: it prunes a branch only when the partially
evaluated body is already false, and it restricts a variable to the roots
of an equation only when that equation sits in purely conjunctive context
(every witness must satisfy it, so no witness is ever missed).  The result
is identical to the naive product enumeration, just affordable.

Over a ``ZBox`` backend both parameters and witnesses range over finite
windows and every verdict is heuristic; results carry ``exhaustive=False``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .formula import And, Atom, Body, Formula, Relation
from .poly import Polynomial
from .ring import ProductRing, RingBackend, ZBox, ZMod

DEFAULT_WITNESS_FACTOR = 4


@dataclass(frozen=True)
class DefinableSet:
    """The parameter tuples satisfying a formula, in canonical sorted order."""

    ring: RingBackend
    arity: int
    tuples: tuple[tuple, ...]
    exhaustive: bool

    def __contains__(self, item: tuple) -> bool:
        return item in set(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def to_lines(self) -> list[str]:
        if self.arity == 0:
            return ["()" for _ in self.tuples]
        return [
            " ".join(self.ring.format_element(e) for e in t) for t in self.tuples
        ]

    def to_json(self) -> dict:
        return {
            "ring": self.ring.descriptor(),
            "arity": self.arity,
            "exhaustive": self.exhaustive,
            "tuples": [[self.ring.element_to_json(e) for e in t] for t in self.tuples],
        }


class Verdict(Enum):
    EQUAL = "EQUAL"
    DIFFER = "DIFFER"
    HEURISTIC_EQUAL = "HEURISTIC_EQUAL"


@dataclass(frozen=True)
class EqualityResult:
    verdict: Verdict
    witness: tuple | None = None


class ProductVerdict(Enum):
    PRODUCT = "PRODUCT"
    NOT_PRODUCT = "NOT_PRODUCT"


@dataclass(frozen=True)
class ProductResult:
    verdict: ProductVerdict
    witness: tuple | None = None


# -- compiled bodies -----------------------------------------------------------


class _CompiledAtom:
    __slots__ = ("evaluate", "var_ids", "is_eq", "conj_context")

    def __init__(self, evaluate, var_ids, is_eq, conj_context):
        self.evaluate = evaluate
        self.var_ids = var_ids
        self.is_eq = is_eq
        self.conj_context = conj_context


def _compile_poly(p: Polynomial, var_id: dict[str, int], ring: RingBackend):
    """Turn a polynomial into a fast evaluator over an assignment list."""
    terms = tuple(
        (coeff, tuple((var_id[v], e) for v, e in mono.exps)) for mono, coeff in p.terms
    )
    if isinstance(ring, ZMod):
        n = ring.modulus

        def evaluate(assign, _terms=terms, _n=n):
            total = 0
            for coeff, factors in _terms:
                value = coeff
                for vid, exp in factors:
                    value *= assign[vid] ** exp
                total += value
            return total % _n

        return evaluate
    if isinstance(ring, ZBox):

        def evaluate(assign, _terms=terms):
            total = 0
            for coeff, factors in _terms:
                value = coeff
                for vid, exp in factors:
                    value *= assign[vid] ** exp
                total += value
            return total

        return evaluate

    canon = {coeff: ring.canonical(coeff) for coeff, _ in terms}

    def evaluate(assign, _terms=terms, _ring=ring, _canon=canon):
        total = _ring.zero()
        for coeff, factors in _terms:
            value = _canon[coeff]
            for vid, exp in factors:
                value = _ring.mul(value, _ring.pow(assign[vid], exp))
            total = _ring.add(total, value)
        return total

    return evaluate


def _compile_body(body: Body, var_id: dict[str, int], ring: RingBackend):
    """Returns (tree, compiled_atoms); tree leaves are atom indices."""
    compiled: list[_CompiledAtom] = []
    zero = ring.zero()

    def walk(node: Body, conj_context: bool):
        if isinstance(node, Atom):
            idx = len(compiled)
            compiled.append(
                _CompiledAtom(
                    _compile_poly(node.poly, var_id, ring),
                    tuple(sorted(var_id[v] for v in node.poly.variables())),
                    node.relation is Relation.EQ,
                    conj_context,
                )
            )
            return ("atom", idx)
        if isinstance(node, And):
            return ("and", tuple(walk(c, conj_context) for c in node.children))
        return ("or", tuple(walk(c, False) for c in node.children))

    tree = walk(body, True)
    return tree, compiled, zero


def _eval3(tree, compiled, assign, zero):
    """Three-valued evaluation: True / False / None (undetermined)."""
    tag, payload = tree
    if tag == "atom":
        atom = compiled[payload]
        for vid in atom.var_ids:
            if assign[vid] is None:
                return None
        value = atom.evaluate(assign)
        return (value == zero) if atom.is_eq else (value != zero)
    if tag == "and":
        result = True
        for child in payload:
            v = _eval3(child, compiled, assign, zero)
            if v is False:
                return False
            if v is None:
                result = None
        return result
    result = False
    for child in payload:
        v = _eval3(child, compiled, assign, zero)
        if v is True:
            return True
        if v is None:
            result = None
    return result


def _search(tree, compiled, assign, zero, bound_ids, domain) -> bool:
    """Complete backtracking witness search; True iff some assignment of
    ``domain`` values to ``bound_ids`` satisfies the body."""
    state = _eval3(tree, compiled, assign, zero)
    if state is not None:
        return state

    # Unit propagation: an undetermined equation in conjunctive context with
    # a single unassigned variable restricts that variable to its roots.
    for atom in compiled:
        if not (atom.conj_context and atom.is_eq):
            continue
        pending = [vid for vid in atom.var_ids if assign[vid] is None]
        if len(pending) != 1:
            continue
        vid = pending[0]
        for value in domain:
            assign[vid] = value
            if atom.evaluate(assign) == zero and _search(
                tree, compiled, assign, zero, bound_ids, domain
            ):
                assign[vid] = None
                return True
        assign[vid] = None
        return False

    for vid in bound_ids:
        if assign[vid] is None:
            for value in domain:
                assign[vid] = value
                if _search(tree, compiled, assign, zero, bound_ids, domain):
                    assign[vid] = None
                    return True
            assign[vid] = None
            return False
    raise AssertionError("undetermined body with no unassigned variable")


def _domains(ring: RingBackend, param_box, witness_box, witness_factor):
    if isinstance(ring, ZBox):
        pb = ring.bound if param_box is None else param_box
        wb = witness_factor * pb if witness_box is None else witness_box
        return list(range(-pb, pb + 1)), list(range(-wb, wb + 1)), False
    if ring.is_finite:
        elements = list(ring.elements())
        return elements, elements, True
    raise ValueError(
        f"enumeration over {ring.descriptor()} is not supported (infinite backend)"
    )


def _product_tuples(domain: Sequence, arity: int) -> Iterable[tuple]:
    if arity == 0:
        yield ()
        return
    indices = [0] * arity
    size = len(domain)
    while True:
        yield tuple(domain[i] for i in indices)
        pos = arity - 1
        while pos >= 0:
            indices[pos] += 1
            if indices[pos] < size:
                break
            indices[pos] = 0
            pos -= 1
        if pos < 0:
            return


def definable_set(
    formula: Formula,
    ring: RingBackend,
    *,
    param_box: int | None = None,
    witness_box: int | None = None,
    witness_factor: int = DEFAULT_WITNESS_FACTOR,
) -> DefinableSet:
    """The set of parameter tuples for which a witness exists."""
    param_domain, witness_domain, exhaustive = _domains(
        ring, param_box, witness_box, witness_factor
    )
    names = list(formula.params) + list(formula.bound)
    var_id = {name: i for i, name in enumerate(names)}
    tree, compiled, zero = _compile_body(formula.body, var_id, ring)
    n = len(formula.params)
    bound_ids = list(range(n, len(names)))
    assign: list = [None] * len(names)

    found: list[tuple] = []
    for point in _product_tuples(param_domain, n):
        for i, value in enumerate(point):
            assign[i] = value
        if _search(tree, compiled, assign, zero, bound_ids, witness_domain):
            found.append(point)
    for i in range(n):
        assign[i] = None
    found.sort()
    return DefinableSet(ring, n, tuple(found), exhaustive)


def has_witness(
    formula: Formula,
    point: tuple,
    ring: RingBackend,
    *,
    witness_box: int | None = None,
    witness_factor: int = DEFAULT_WITNESS_FACTOR,
) -> bool:
    """Does this specific parameter tuple belong to the defined set?"""
    if len(point) != len(formula.params):
        raise ValueError("point arity does not match the formula")
    _, witness_domain, _ = _domains(ring, None, witness_box, witness_factor)
    names = list(formula.params) + list(formula.bound)
    var_id = {name: i for i, name in enumerate(names)}
    tree, compiled, zero = _compile_body(formula.body, var_id, ring)
    assign: list = list(point) + [None] * len(formula.bound)
    bound_ids = list(range(len(point), len(names)))
    return _search(tree, compiled, assign, zero, bound_ids, witness_domain)


def first_witness(
    formula: Formula,
    point: tuple,
    ring: RingBackend,
    *,
    witness_box: int | None = None,
    witness_factor: int = DEFAULT_WITNESS_FACTOR,
) -> tuple | None:
    """The lexicographically first witness (in backend enumeration order),
    or None.  Uses plain ordered enumeration, so it is for audit trails at
    small scale; membership checks should use :func:`has_witness`."""
    if len(point) != len(formula.params):
        raise ValueError("point arity does not match the formula")
    _, witness_domain, _ = _domains(ring, None, witness_box, witness_factor)
    names = list(formula.params) + list(formula.bound)
    var_id = {name: i for i, name in enumerate(names)}
    tree, compiled, zero = _compile_body(formula.body, var_id, ring)
    assign: list = list(point) + [None] * len(formula.bound)
    for witness in _product_tuples(witness_domain, len(formula.bound)):
        assign[len(point) :] = list(witness)
        if _eval3(tree, compiled, assign, zero):
            return witness
    return None


def sets_equal(
    f1: Formula,
    f2: Formula,
    ring: RingBackend,
    *,
    param_box: int | None = None,
    witness_box: int | None = None,
    witness_factor: int = DEFAULT_WITNESS_FACTOR,
) -> EqualityResult:
    """Compare defined sets.  Exact over finite backends; over a ZBox the
    verdict is HEURISTIC_EQUAL when each side's box-found members are
    accepted by the other side under an enlarged witness box."""
    if len(f1.params) != len(f2.params):
        raise ValueError("formulas have different parameter arity")
    if isinstance(ring, ZBox):
        s1 = definable_set(
            f1, ring, param_box=param_box, witness_box=witness_box,
            witness_factor=witness_factor,
        )
        s2 = definable_set(
            f2, ring, param_box=param_box, witness_box=witness_box,
            witness_factor=witness_factor,
        )
        pb = ring.bound if param_box is None else param_box
        wb = witness_factor * pb if witness_box is None else witness_box
        enlarged = wb * witness_factor
        for point in s1.tuples:
            if point not in set(s2.tuples) and not has_witness(
                f2, point, ring, witness_box=enlarged
            ):
                return EqualityResult(Verdict.DIFFER, point)
        for point in s2.tuples:
            if point not in set(s1.tuples) and not has_witness(
                f1, point, ring, witness_box=enlarged
            ):
                return EqualityResult(Verdict.DIFFER, point)
        return EqualityResult(Verdict.HEURISTIC_EQUAL)

    s1 = definable_set(f1, ring)
    s2 = definable_set(f2, ring)
    if s1.tuples == s2.tuples:
        return EqualityResult(Verdict.EQUAL)
    difference = sorted(set(s1.tuples).symmetric_difference(s2.tuples))
    return EqualityResult(Verdict.DIFFER, difference[0])


def is_product_set(s: DefinableSet) -> ProductResult:
    """Is a set over a product backend a product of componentwise sets?

    Projects to the two factors, then looks for a recombination of
    projections that the set misses; the witness is such a mixed tuple.
    """
    if not isinstance(s.ring, ProductRing):
        raise ValueError("is_product_set needs a set over a product backend")
    if not s.exhaustive:
        raise ValueError("is_product_set needs an exhaustively computed set")
    left = sorted({tuple(e[0] for e in t) for t in s.tuples})
    right = sorted({tuple(e[1] for e in t) for t in s.tuples})
    members = set(s.tuples)
    for a in left:
        for b in right:
            mixed = tuple(zip(a, b))
            if mixed not in members:
                return ProductResult(ProductVerdict.NOT_PRODUCT, mixed)
    return ProductResult(ProductVerdict.PRODUCT)


def count_solutions(
    p: Polynomial, ring: RingBackend, variables: tuple[str, ...] | None = None
) -> int:
    """Number of zeros of ``p`` over ``ring**len(variables)``.

    ``variables`` defaults to the variables occurring in ``p``; pass it
    explicitly to count over a larger ambient space (e.g. the zero
    polynomial in one variable).
    """
    if not ring.is_finite:
        raise ValueError("count_solutions needs a finite backend")
    names = tuple(sorted(p.variables())) if variables is None else tuple(variables)
    if not p.variables() <= set(names):
        raise ValueError("variables must cover the polynomial")
    zero_formula = Formula(names, (), Atom(p, Relation.EQ))
    return len(definable_set(zero_formula, ring))
