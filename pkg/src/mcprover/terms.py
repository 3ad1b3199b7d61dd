"""First-order clausal syntax: terms, literals, clauses and the clause matrix.

Variables are plain integers scoped to a namespace: input clauses index their
variables 0..k-1 in order of first occurrence, and search-time clause copies
are renamed by offsetting those indices into a per-search counter. Constants
are zero-arity applications.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

TOP_PREDICATE = "$top"
EQ_PREDICATE = "="


@dataclass(frozen=True, slots=True)
class Var:
    id: int


@dataclass(frozen=True, slots=True)
class App:
    functor: str
    args: tuple = ()


Term = Var | App


@dataclass(frozen=True, slots=True)
class Literal:
    positive: bool
    predicate: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def complement(self) -> "Literal":
        return Literal(not self.positive, self.predicate, self.args)

    def is_top(self) -> bool:
        return self.predicate == TOP_PREDICATE


TOP = Literal(True, TOP_PREDICATE)
NEG_TOP = Literal(False, TOP_PREDICATE)


@dataclass(frozen=True)
class Clause:
    literals: tuple
    origin: int = -1
    var_count: int = 0
    var_names: tuple = ()
    label: str = ""

    def __len__(self) -> int:
        return len(self.literals)

    def is_positive(self) -> bool:
        return all(lit.positive for lit in self.literals)


# Pseudo-clause holding the synthetic goal every derivation starts from.
START_CLAUSE = Clause((TOP,), origin=-1, label="start")


def rename_term(t: Term, offset: int) -> Term:
    if isinstance(t, Var):
        return Var(t.id + offset)
    if not t.args:
        return t
    return App(t.functor, tuple(rename_term(a, offset) for a in t.args))


def rename_literal(lit: Literal, offset: int) -> Literal:
    if not lit.args:
        return lit
    return Literal(lit.positive, lit.predicate, tuple(rename_term(a, offset) for a in lit.args))


@dataclass
class Matrix:
    """Prepared problem: clause list plus the extension index.

    The index maps (predicate, polarity-of-a-goal-literal) to the positions of
    clause literals that could connect to such a goal, i.e. literals with the
    same predicate and the opposite polarity.
    """

    clauses: tuple = ()
    index: dict = field(default_factory=dict, repr=False)
    digest: str = ""
    has_positive_start: bool = False
    prepared: bool = False

    def candidates(self, predicate: str, positive: bool) -> tuple:
        return self.index.get((predicate, positive), ())


def build_extension_index(clauses) -> dict:
    index: dict = {}
    for ci, clause in enumerate(clauses):
        for li, lit in enumerate(clause.literals):
            key = (lit.predicate, not lit.positive)
            index.setdefault(key, []).append((ci, li))
    return {key: tuple(entries) for key, entries in index.items()}


# --- canonical printing ---------------------------------------------------

_LOWER_OK = "abcdefghijklmnopqrstuvwxyz"
_WORD_OK = set(_LOWER_OK + _LOWER_OK.upper() + "0123456789_")


def _atom_name(name: str) -> str:
    """Quote a functor/predicate name unless it is a plain TPTP word."""
    if name and (name[0] in _LOWER_OK or name[0] == "$" or name.isdigit()):
        body = name[1:] if name[0] == "$" else name
        if all(c in _WORD_OK for c in body):
            return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def term_to_str(t: Term, var_names: tuple = ()) -> str:
    if isinstance(t, Var):
        if t.id < len(var_names):
            return var_names[t.id]
        return f"_{t.id}"
    if not t.args:
        return _atom_name(t.functor)
    args = ",".join(term_to_str(a, var_names) for a in t.args)
    return f"{_atom_name(t.functor)}({args})"


def literal_to_str(lit: Literal, var_names: tuple = ()) -> str:
    if lit.predicate == EQ_PREDICATE and lit.arity == 2:
        op = "=" if lit.positive else "!="
        return f"{term_to_str(lit.args[0], var_names)} {op} {term_to_str(lit.args[1], var_names)}"
    sign = "" if lit.positive else "~"
    if not lit.args:
        return sign + _atom_name(lit.predicate)
    args = ",".join(term_to_str(a, var_names) for a in lit.args)
    return f"{sign}{_atom_name(lit.predicate)}({args})"


def clause_to_str(clause: Clause) -> str:
    return " | ".join(literal_to_str(lit, clause.var_names) for lit in clause.literals)


def matrix_to_cnf(matrix: Matrix) -> str:
    """Canonical cnf rendering of a matrix, one clause per line."""
    lines = []
    for i, clause in enumerate(matrix.clauses):
        label = clause.label or f"c{i}"
        lines.append(f"cnf({label}, axiom, {clause_to_str(clause)}).")
    return "\n".join(lines) + ("\n" if lines else "")


def matrix_digest(clauses) -> str:
    text = "\n".join(clause_to_str(c) for c in clauses)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
