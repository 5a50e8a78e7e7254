"""Naive reference semantics: full product enumeration, no pruning.

Deliberately independent of ringlower.oracle so the two implementations
can check each other on small instances.
"""

from itertools import product

from ringlower.formula import And, Atom, Relation


def naive_definable_set(formula, ring, param_domain=None, witness_domain=None):
    elements = list(ring.elements()) if param_domain is None else list(param_domain)
    witnesses = elements if witness_domain is None else list(witness_domain)
    zero = ring.zero()

    def truth(body, env):
        if isinstance(body, Atom):
            value = body.poly.evaluate(env, ring)
            return (value == zero) == (body.relation is Relation.EQ)
        if isinstance(body, And):
            return all(truth(child, env) for child in body.children)
        return any(truth(child, env) for child in body.children)

    out = set()
    for point in product(elements, repeat=len(formula.params)):
        env = dict(zip(formula.params, point))
        for witness in product(witnesses, repeat=len(formula.bound)):
            env.update(zip(formula.bound, witness))
            if truth(formula.body, env):
                out.add(point)
                break
    return tuple(sorted(out))
