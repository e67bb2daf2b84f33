"""
Terms, atoms, clauses and substitutions.

Every value in this module is immutable. Variables are identified by an
integer id drawn from a process-wide counter, so two variables compare
equal only when they are the same variable; the display name is kept
for rendering and ignored by equality.

Unification always performs the occur check.

"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import (
    AbstractSet,
    Iterable,
    Iterator,
    Mapping,
    MutableMapping,
    Sequence,
    Union,
    overload,
)

# monotone session counter; next() on itertools.count is atomic in CPython
_fresh_ids = itertools.count(1)

# list constructor and empty list
CONS = "."
NIL_NAME = "[]"

PLAIN_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Var:
    id: int
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        if self.name:
            return f"{self.name}_{self.id}"
        return f"_G{self.id}"


@dataclass(frozen=True)
class Struct:
    """A function symbol applied to its arguments; constants have no arguments."""

    name: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, order=True)
class Predicate:
    """A relation symbol together with its arity, e.g. append/3."""

    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"

    @classmethod
    def parse(cls, indicator: str) -> Predicate:
        name, sep, arity = indicator.rpartition("/")
        if not sep or not name or not arity.isdigit():
            raise ValueError(f"Invalid predicate indicator: '{indicator}'")
        return cls(name, int(arity))


@dataclass(frozen=True)
class Atom(Struct):
    """A relation symbol applied to terms."""

    @property
    def predicate(self) -> Predicate:
        return Predicate(self.name, len(self.args))


Term = Union[Var, Struct]

NIL = Struct(NIL_NAME)
TRUE = Atom("true")


def cons(head: Term, tail: Term) -> Struct:
    return Struct(CONS, (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    result = tail
    for item in reversed(list(items)):
        result = cons(item, result)
    return result


@dataclass(frozen=True)
class Clause:
    """
    A definite clause H <- B1, ..., Bm.

    A binary clause has exactly one body slot, holding either an atom
    or `true` for the empty body. Program facts have an empty body.

    """

    head: Atom
    body: tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        if self.head == TRUE:
            raise ValueError("'true' cannot be the head of a clause")

    @classmethod
    def binary(cls, head: Atom, body: Atom = TRUE) -> Clause:
        return cls(head, (body,))

    @property
    def is_binary(self) -> bool:
        return len(self.body) == 1

    @property
    def goals(self) -> tuple[Atom, ...]:
        """Return the body atoms, leaving out `true`."""
        return tuple(atom for atom in self.body if atom != TRUE)

    @property
    def is_success_pattern(self) -> bool:
        return self.is_binary and self.body[0] == TRUE

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Program:
    """An ordered list of clauses in which every relation symbol has one arity."""

    clauses: tuple[Clause, ...] = ()

    def __post_init__(self) -> None:
        arities: dict[str, int] = {}
        for clause in self.clauses:
            for atom in (clause.head, *clause.goals):
                if arities.setdefault(atom.name, atom.arity) != atom.arity:
                    raise ValueError(
                        f"Relation symbol '{atom.name}' used with arities "
                        f"{arities[atom.name]} and {atom.arity}"
                    )

    @cached_property
    def signature(self) -> frozenset[Predicate]:
        """Return the relation symbols occurring in the program."""
        return frozenset(
            atom.predicate
            for clause in self.clauses
            for atom in (clause.head, *clause.goals)
        )

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)


def fresh_var(name: str = "") -> Var:
    return Var(next(_fresh_ids), name)


# ---------------------------------------------------------------------------
# traversal
# ---------------------------------------------------------------------------

Renderable = Union[Term, Clause, Sequence[Atom]]


def _roots(x: Renderable) -> list[Term]:
    if isinstance(x, Clause):
        return [x.head, *x.body]
    if isinstance(x, (Var, Struct)):
        return [x]
    return list(x)


def variables(x: Renderable) -> list[Var]:
    """Return the variables of x in order of first occurrence."""
    seen: dict[Var, None] = {}
    stack = list(reversed(_roots(x)))
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            seen.setdefault(t, None)
        else:
            stack.extend(reversed(t.args))
    return list(seen)


def is_ground(x: Renderable) -> bool:
    stack = _roots(x)
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            return False
        stack.extend(t.args)
    return True


def shares_variables(x: Renderable, y: Renderable) -> bool:
    return not set(variables(x)).isdisjoint(variables(y))


# ---------------------------------------------------------------------------
# substitutions
# ---------------------------------------------------------------------------


class Substitution(Mapping[Var, Term]):
    """
    A finite map from variables to terms, applied simultaneously.

    Bindings of the form X/X are dropped on construction, so the key set
    and the domain always coincide.

    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[Var, Term] | None = None) -> None:
        self._bindings: dict[Var, Term] = {
            v: t for v, t in (bindings or {}).items() if v != t
        }

    def __getitem__(self, key: Var) -> Term:
        return self._bindings[key]

    def __iter__(self) -> Iterator[Var]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __repr__(self) -> str:
        return f"Substitution({self})"

    def __str__(self) -> str:
        return "{" + ", ".join(f"{v}/{render(t)}" for v, t in self.items()) + "}"

    @property
    def domain(self) -> frozenset[Var]:
        return frozenset(self._bindings)

    def range_variables(self) -> set[Var]:
        return {v for t in self._bindings.values() for v in variables(t)}

    def variables(self) -> set[Var]:
        return set(self._bindings) | self.range_variables()

    def compose(self, other: Substitution) -> Substitution:
        """Return the substitution applying self first and then other."""
        bindings: dict[Var, Term] = {
            v: apply(other, t) for v, t in self._bindings.items()
        }
        for v, t in other.items():
            bindings.setdefault(v, t)
        return Substitution(bindings)

    def is_renaming(self) -> bool:
        values = list(self._bindings.values())
        return all(isinstance(t, Var) for t in values) and len(set(values)) == len(
            values
        )


EMPTY = Substitution()


def _substitute(t: Term, bindings: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return bindings.get(t, t)
    if not t.args:
        return t
    args = tuple(_substitute(a, bindings) for a in t.args)
    if all(new is old for new, old in zip(args, t.args)):
        return t
    return type(t)(t.name, args)


@overload
def apply(s: Mapping[Var, Term], x: Clause) -> Clause:
    ...


@overload
def apply(s: Mapping[Var, Term], x: Atom) -> Atom:
    ...


@overload
def apply(s: Mapping[Var, Term], x: Term) -> Term:
    ...


def apply(s: Mapping[Var, Term], x: Term | Clause) -> Term | Clause:
    """Apply s to a term, atom or clause, replacing all bound variables at once."""
    if isinstance(x, Clause):
        return Clause(
            _substitute(x.head, s),  # type: ignore[arg-type]
            tuple(_substitute(b, s) for b in x.body),  # type: ignore[misc]
        )
    return _substitute(x, s)


def apply_all(s: Mapping[Var, Term], atoms: Iterable[Atom]) -> tuple[Atom, ...]:
    return tuple(apply(s, atom) for atom in atoms)


def fresh_renaming(
    vs: Iterable[Var], avoid: AbstractSet[Var] = frozenset()
) -> Substitution:
    mapping: dict[Var, Term] = {}
    for v in vs:
        w = fresh_var(v.name)
        while w in avoid:
            w = fresh_var(v.name)
        mapping[v] = w
    return Substitution(mapping)


def rename_apart(c: Clause, avoid: AbstractSet[Var] = frozenset()) -> Clause:
    """Return a variant of c sharing no variable with avoid."""
    return apply(fresh_renaming(variables(c), avoid), c)


@overload
def fresh_copy(x: Atom) -> Atom:
    ...


@overload
def fresh_copy(x: Term) -> Term:
    ...


def fresh_copy(x: Term) -> Term:
    """Return a variant of x over brand new variables."""
    return apply(fresh_renaming(variables(x)), x)


# ---------------------------------------------------------------------------
# unification and matching
# ---------------------------------------------------------------------------

Bindings = MutableMapping[Var, Term]


def _walk(t: Term, bindings: Mapping[Var, Term]) -> Term:
    while isinstance(t, Var) and t in bindings:
        t = bindings[t]
    return t


def _occurs(v: Var, t: Term, bindings: Mapping[Var, Term]) -> bool:
    stack = [t]
    while stack:
        u = _walk(stack.pop(), bindings)
        if isinstance(u, Var):
            if u == v:
                return True
        else:
            stack.extend(u.args)
    return False


def unify(
    a: Term, b: Term, bindings: Mapping[Var, Term] | None = None
) -> dict[Var, Term] | None:
    """
    Extend triangular bindings so that a and b become equal.

    The input mapping is left untouched; a new dict is returned, or None
    when the terms do not unify. Use `solve` to turn the result into an
    idempotent substitution.

    """
    result = dict(bindings or {})
    stack: list[tuple[Term, Term]] = [(a, b)]
    while stack:
        s, t = stack.pop()
        s = _walk(s, result)
        t = _walk(t, result)
        if isinstance(s, Var):
            if s == t:
                continue
            if _occurs(s, t, result):
                return None
            result[s] = t
        elif isinstance(t, Var):
            if _occurs(t, s, result):
                return None
            result[t] = s
        elif s.name != t.name or len(s.args) != len(t.args):
            return None
        else:
            stack.extend(zip(s.args, t.args))
    return result


def _resolve(t: Term, bindings: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        bound = bindings.get(t)
        return t if bound is None else _resolve(bound, bindings)
    if not t.args:
        return t
    args = tuple(_resolve(a, bindings) for a in t.args)
    if all(new is old for new, old in zip(args, t.args)):
        return t
    return type(t)(t.name, args)


def solve(bindings: Mapping[Var, Term]) -> Substitution:
    """Turn triangular bindings into an idempotent substitution."""
    return Substitution({v: _resolve(t, bindings) for v, t in bindings.items()})


def mgu(a: Atom, b: Atom) -> Substitution | None:
    bindings = unify(a, b)
    return None if bindings is None else solve(bindings)


def mgu_tuple(as_: Sequence[Atom], bs: Sequence[Atom]) -> Substitution | None:
    """Return the simultaneous most general unifier of the paired atoms."""
    if len(as_) != len(bs):
        raise ValueError(
            f"Cannot unify {len(as_)} atoms with {len(bs)} atoms: lengths differ"
        )
    bindings: dict[Var, Term] | None = {}
    for a, b in zip(as_, bs):
        bindings = unify(a, b, bindings)
        if bindings is None:
            return None
    return solve(bindings or {})


def match_args(
    generals: Sequence[Term], specifics: Sequence[Term]
) -> Substitution | None:
    """Return one substitution mapping every general term onto its specific one."""
    if len(generals) != len(specifics):
        return None
    bindings: dict[Var, Term] = {}
    stack = list(zip(generals, specifics))
    while stack:
        g, s = stack.pop()
        if isinstance(g, Var):
            bound = bindings.setdefault(g, s)
            if bound is not s and bound != s:
                return None
        elif isinstance(s, Var) or g.name != s.name or len(g.args) != len(s.args):
            return None
        else:
            stack.extend(zip(g.args, s.args))
    return Substitution(bindings)


def match(general: Renderable, specific: Renderable) -> Substitution | None:
    """
    Return eta with apply(eta, general) == specific, or None.

    Only the variables of general are bound; the variables of specific
    are treated as constants, so the two sides may share variables.

    """
    return match_args(_roots(general), _roots(specific))


def is_more_general(x: Renderable, y: Renderable) -> bool:
    return match(x, y) is not None


def is_variant(x: Renderable, y: Renderable) -> bool:
    return is_more_general(x, y) and is_more_general(y, x)


def less_general(s: Term, t: Term) -> Term | None:
    """
    Return the less general of two terms, or None if they are incomparable.

    When s and t are variants, s is returned.

    """
    if is_more_general(t, s):
        return s
    if is_more_general(s, t):
        return t
    return None


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_name(name: str) -> str:
    if name == NIL_NAME or name.isdigit() or PLAIN_NAME.match(name):
        return name
    # an embedded quote is doubled, as the parser reads it
    escaped = name.replace("'", "''")
    return f"'{escaped}'"


def _render_term(t: Term, names: Mapping[Var, str]) -> str:
    if isinstance(t, Var):
        return names.get(t) or str(t)
    if t.name == CONS and len(t.args) == 2:
        items = []
        tail: Term = t
        while isinstance(tail, Struct) and tail.name == CONS and len(tail.args) == 2:
            items.append(_render_term(tail.args[0], names))
            tail = tail.args[1]
        rest = "" if tail == NIL else "|" + _render_term(tail, names)
        return "[" + ",".join(items) + rest + "]"
    if not t.args:
        return render_name(t.name)
    args = ",".join(_render_term(a, names) for a in t.args)
    return f"{render_name(t.name)}({args})"


def render(x: Renderable, names: Mapping[Var, str] | None = None) -> str:
    """
    Render a term, atom, clause or query as program text.

    Variables are shown by their entry in names, falling back to their
    own display form.

    """
    names = names or {}
    if isinstance(x, Clause):
        head = _render_term(x.head, names)
        if not x.body:
            return f"{head}."
        body = ", ".join(_render_term(b, names) for b in x.body)
        return f"{head} :- {body}."
    if isinstance(x, (Var, Struct)):
        return _render_term(x, names)
    return ", ".join(_render_term(a, names) for a in x)


def canonical_names(x: Renderable) -> dict[Var, str]:
    return {v: f"X{i}" for i, v in enumerate(variables(x), start=1)}


def canonical_form(x: Renderable) -> str:
    """
    Render x with its variables renumbered X1, X2, ... by first occurrence.

    Two inputs have the same canonical form iff they are variants.

    """
    return render(x, canonical_names(x))
