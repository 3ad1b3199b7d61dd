"""Persistent substitutions and first-order unification with occurs check.

A Substitution is a chain of immutable binding nodes. Extending returns a new
node that shares the whole parent chain, so sibling search branches share
their common binding prefix and no lookup ever mutates shared state.
"""

from __future__ import annotations

from .terms import App, Literal, Term, Var


# Chains longer than this are flattened into one node on extension; a variable
# is never rebound, so flattening is a plain union that preserves lookups.
_FLATTEN_EVERY = 16


class Substitution:
    __slots__ = ("_bindings", "_parent", "_domain", "generation", "_chain")

    def __init__(self, bindings: dict | None = None, parent: "Substitution | None" = None):
        self._bindings = bindings or {}
        if parent is not None and parent._chain >= _FLATTEN_EVERY:
            merged = dict(self._bindings)
            node = parent
            while node is not None:
                for var_id, term in node._bindings.items():
                    merged.setdefault(var_id, term)
                node = node._parent
            self._bindings = merged
            parent = None
            self._chain = 0
        else:
            self._chain = 0 if parent is None else parent._chain + 1
        self._parent = parent
        if parent is None:
            self._domain = frozenset(self._bindings)
        else:
            self._domain = parent._domain | self._bindings.keys()
        # generation counter: total number of bindings accumulated
        self.generation = len(self._bindings) + (0 if parent is None else parent.generation)

    def __len__(self) -> int:
        return self.generation

    def lookup(self, var_id: int):
        if var_id not in self._domain:
            return None
        node = self
        while node is not None:
            term = node._bindings.get(var_id)
            if term is not None:
                return term
            node = node._parent
        return None

    def extended(self, bindings: dict) -> "Substitution":
        return Substitution(dict(bindings), self)

    def factors_through(self, other: "Substitution") -> bool:
        """True iff every binding of `other` is present here unchanged."""
        return all(self.lookup(var_id) is term for var_id, term in other.items())

    def items(self):
        seen = set()
        node = self
        while node is not None:
            for var_id, term in node._bindings.items():
                if var_id not in seen:
                    seen.add(var_id)
                    yield var_id, term
            node = node._parent

    def deref(self, t: Term) -> Term:
        while isinstance(t, Var):
            bound = self.lookup(t.id)
            if bound is None:
                return t
            t = bound
        return t


EMPTY_SUBSTITUTION = Substitution()


def unify(sigma: Substitution, a, b) -> Substitution | None:
    """Unify two terms, or the argument lists of two complementary literals.

    Returns an extension of `sigma` or None on clash / occurs-check failure.
    For literals the caller guarantees equal predicates and opposite polarity
    (normally via the extension index); violating that is a usage error.
    """
    if isinstance(a, Literal) or isinstance(b, Literal):
        if not (isinstance(a, Literal) and isinstance(b, Literal)):
            raise TypeError("cannot unify a literal with a term")
        if a.predicate != b.predicate or a.positive == b.positive:
            raise ValueError("literal unification requires complementary literals")
        return unify_args(sigma, a.args, b.args)
    return unify_args(sigma, (a,), (b,))


def unify_args(sigma: Substitution, xs: tuple, ys: tuple) -> Substitution | None:
    if len(xs) != len(ys):
        return None
    new: dict = {}

    def walk(t):
        while isinstance(t, Var):
            bound = new.get(t.id)
            if bound is None:
                bound = sigma.lookup(t.id)
            if bound is None:
                return t
            t = bound
        return t

    def occurs(var_id, t) -> bool:
        stack = [t]
        while stack:
            u = walk(stack.pop())
            if isinstance(u, Var):
                if u.id == var_id:
                    return True
            else:
                stack.extend(u.args)
        return False

    stack = list(zip(xs, ys))
    while stack:
        a, b = stack.pop()
        a = walk(a)
        b = walk(b)
        if a is b:
            continue
        if isinstance(a, Var):
            if isinstance(b, Var) and a.id == b.id:
                continue
            if occurs(a.id, b):
                return None
            new[a.id] = b
        elif isinstance(b, Var):
            if occurs(b.id, a):
                return None
            new[b.id] = a
        else:
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
    if not new:
        return sigma
    return sigma.extended(new)


def resolve_term(sigma: Substitution, t: Term) -> Term:
    """Apply the substitution exhaustively, producing a fresh term."""
    t = sigma.deref(t)
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.functor, tuple(resolve_term(sigma, a) for a in t.args))


def resolve_literal(sigma: Substitution, lit: Literal) -> Literal:
    if not lit.args:
        return lit
    return Literal(lit.positive, lit.predicate, tuple(resolve_term(sigma, a) for a in lit.args))


def _pairs_equal_under(sigma: Substitution, stack: list) -> bool:
    lookup = sigma.lookup
    while stack:
        x, y = stack.pop()
        while type(x) is Var:
            t = lookup(x.id)
            if t is None:
                break
            x = t
        while type(y) is Var:
            t = lookup(y.id)
            if t is None:
                break
            y = t
        if x is y:
            continue
        if type(x) is Var or type(y) is Var:
            if type(x) is not type(y) or x.id != y.id:
                return False
        elif x.functor != y.functor or len(x.args) != len(y.args):
            return False
        else:
            stack.extend(zip(x.args, y.args))
    return True


def terms_equal_under(sigma: Substitution, a: Term, b: Term) -> bool:
    """Structural equality of two terms modulo the substitution."""
    return _pairs_equal_under(sigma, [(a, b)])


def literals_equal_under(sigma: Substitution, a: Literal, b: Literal) -> bool:
    if a.positive != b.positive or a.predicate != b.predicate or len(a.args) != len(b.args):
        return False
    if not a.args:
        return True
    return _pairs_equal_under(sigma, list(zip(a.args, b.args)))
