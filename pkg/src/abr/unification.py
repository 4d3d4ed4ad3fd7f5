"""First-order unification with occurs check, plus substitution helpers.

Substitutions are plain dicts mapping Variable to Term. They are treated
as immutable by convention: unify returns an extended copy and never
mutates its input.
"""

from __future__ import annotations

from typing import Optional

from .terms import Atom, ListTerm, Literal, Term, Variable

Substitution = dict[Variable, Term]


def walk(term: Term, subst: Substitution) -> Term:
    """Resolve a variable through the substitution chain (one level deep)."""
    while isinstance(term, Variable) and term in subst:
        term = subst[term]
    return term


def apply(term: Term, subst: Substitution) -> Term:
    term = walk(term, subst)
    if isinstance(term, ListTerm):
        return ListTerm(tuple(apply(t, subst) for t in term.items))
    return term


def apply_atom(atom: Atom, subst: Substitution) -> Atom:
    return Atom(atom.predicate, tuple(apply(a, subst) for a in atom.args))


def apply_literal(lit: Literal, subst: Substitution) -> Literal:
    return Literal(apply_atom(lit.atom, subst), lit.positive)


def occurs(v: Variable, term: Term, subst: Substitution) -> bool:
    term = walk(term, subst)
    if isinstance(term, Variable):
        return term == v
    if isinstance(term, ListTerm):
        return any(occurs(v, t, subst) for t in term.items)
    return False


def unify(a: Term, b: Term, subst: Optional[Substitution] = None) -> Optional[Substitution]:
    """Unify two terms, returning an extended substitution or None.

    The occurs check is always on; X never unifies with a list containing X.
    """
    if subst is None:
        subst = {}
    a = walk(a, subst)
    b = walk(b, subst)
    if a == b:
        return subst
    if isinstance(a, Variable):
        if occurs(a, b, subst):
            return None
        out = dict(subst)
        out[a] = b
        return out
    if isinstance(b, Variable):
        return unify(b, a, subst)
    if isinstance(a, ListTerm) and isinstance(b, ListTerm):
        if len(a.items) != len(b.items):
            return None
        out: Optional[Substitution] = subst
        for x, y in zip(a.items, b.items):
            out = unify(x, y, out)
            if out is None:
                return None
        return out
    # remaining non-variable pairs (constants, integers, mixed kinds) only
    # unify when structurally equal, which the fast path above already caught
    return None


def unify_atoms(a: Atom, b: Atom, subst: Optional[Substitution] = None) -> Optional[Substitution]:
    if a.predicate != b.predicate or a.arity != b.arity:
        return None
    out = {} if subst is None else subst
    for x, y in zip(a.args, b.args):
        out = unify(x, y, out)
        if out is None:
            return None
    return out


def unify_literals(a: Literal, b: Literal, subst: Optional[Substitution] = None) -> Optional[Substitution]:
    if a.positive != b.positive:
        return None
    return unify_atoms(a.atom, b.atom, subst)
