"""
Parser for pure logic programs written in a small subset of Prolog.

Supported: facts and definite clauses, `:-` and `,` as the only
operators, lowercase or quoted atoms, variables starting with an
uppercase letter or `_`, non-negative integers, list sugar and `%`
comments. `_` is a fresh variable at each occurrence and `true` in a
body is the empty conjunction. A quote inside a quoted atom is written
twice, as in 'it''s'.

"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

from lark import Lark, Token, Transformer, Tree, v_args
from lark.exceptions import (
    UnexpectedCharacters,
    UnexpectedEOF,
    UnexpectedInput,
    UnexpectedToken,
)

from .exceptions import ParseError
from .terms import (
    NIL,
    TRUE,
    Atom,
    Clause,
    Program,
    Struct,
    Term,
    Var,
    canonical_form,
    fresh_var,
    make_list,
)

logger = logging.getLogger(__name__)

GRAMMAR = r"""
program: clause*
query: atom "."?

clause: atom (":-" atom ("," atom)*)? "."

atom: name ("(" args ")")?

args: term ("," term)*

term: VAR                     -> variable
    | INT                     -> integer
    | name "(" args ")"       -> compound
    | name                    -> constant
    | "[" "]"                 -> nil
    | "[" args "]"            -> closed_list
    | "[" args "|" term "]"   -> open_list

name: NAME | QUOTED

NAME: /[a-z][A-Za-z0-9_]*/
QUOTED: /'([^'\n]|'')*'/
VAR: /[A-Z_][A-Za-z0-9_]*/
INT: /[0-9]+/
COMMENT: /%[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_parser = Lark(
    GRAMMAR,
    start=["program", "query"],
    parser="lalr",
    propagate_positions=True,
    maybe_placeholders=False,
)


@dataclass(frozen=True)
class SourceProgram:
    """A parsed program together with its text and clause positions."""

    text: str
    program: Program
    # (line, column) of each clause, 1-based
    positions: tuple[tuple[int, int], ...]


@v_args(inline=True)
class ClauseBuilder(Transformer):
    """
    Build terms for a single clause or query.

    A new builder is used for each clause, which is what scopes
    variable names per clause.

    """

    def __init__(self) -> None:
        super().__init__()
        self.scope: dict[str, Var] = {}

    def name(self, token: Token) -> str:
        text = str(token)
        if token.type == "QUOTED":
            return text[1:-1].replace("''", "'")
        return text

    def variable(self, token: Token) -> Var:
        name = str(token)
        if name == "_":
            return fresh_var("_")
        if name not in self.scope:
            self.scope[name] = fresh_var(name)
        return self.scope[name]

    def integer(self, token: Token) -> Struct:
        return Struct(str(int(token)))

    def constant(self, name: str) -> Struct:
        return Struct(name)

    def compound(self, name: str, args: list[Term]) -> Struct:
        return Struct(name, tuple(args))

    def nil(self) -> Struct:
        return NIL

    def closed_list(self, args: list[Term]) -> Term:
        return make_list(args)

    def open_list(self, args: list[Term], tail: Term) -> Term:
        return make_list(args, tail)

    def args(self, *terms: Term) -> list[Term]:
        return list(terms)

    def atom(self, name: str, args: list[Term] | None = None) -> Atom:
        return Atom(name, tuple(args or ()))


def _end_position(text: str) -> tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def _parse_tree(text: str, start: str) -> Tree:
    try:
        return _parser.parse(text, start=start)
    except UnexpectedInput as ex:
        raise _parse_error(text, start, ex) from ex


def _parse_error(text: str, start: str, ex: UnexpectedInput) -> ParseError:
    at_end = isinstance(ex, UnexpectedEOF) or (
        isinstance(ex, UnexpectedToken) and ex.token.type == "$END"
    )
    if at_end:
        line, column = _end_position(text)
        if start == "program":
            return ParseError("unterminated clause, expected '.'", line, column)
        return ParseError("unexpected end of query", line, column)
    if isinstance(ex, UnexpectedCharacters):
        return ParseError(f"unexpected character {ex.char!r}", ex.line, ex.column)
    if isinstance(ex, UnexpectedToken):
        token = ex.token
        if start == "query" and token.type == "COMMA":
            return ParseError(
                "only atomic queries can be analyzed", ex.line, ex.column
            )
        expected = ", ".join(sorted(ex.expected))
        return ParseError(
            f"unexpected {str(token)!r}, expected one of: {expected}",
            ex.line,
            ex.column,
        )
    return ParseError(str(ex), ex.line, ex.column)


def _position(tree: Tree) -> tuple[int, int]:
    meta: Any = tree.meta
    return getattr(meta, "line", 1), getattr(meta, "column", 1)


def parse_source(text: str) -> SourceProgram:
    """
    Parse program text.

    Raises ParseError with the line and column of the first problem:
    malformed syntax, a clause missing its terminating '.', a relation
    symbol used with two arities, or `true` used as a head.

    """
    tree = _parse_tree(text, "program")
    clauses: list[Clause] = []
    positions: list[tuple[int, int]] = []
    arities: dict[str, int] = {}
    for clause_tree in tree.children:
        assert isinstance(clause_tree, Tree)  # noqa: S101
        builder = ClauseBuilder()
        atoms: list[Atom] = []
        for atom_tree in clause_tree.children:
            assert isinstance(atom_tree, Tree)  # noqa: S101
            atom = builder.transform(atom_tree)
            known = arities.setdefault(atom.name, atom.arity)
            if known != atom.arity:
                raise ParseError(
                    f"'{atom.name}' used with arity {atom.arity}, "
                    f"previously with arity {known}",
                    *_position(atom_tree),
                )
            atoms.append(atom)
        head, *body = atoms
        if head.name == TRUE.name:
            raise ParseError(
                "'true' is reserved and cannot be a clause head",
                *_position(clause_tree),
            )
        clauses.append(Clause(head, tuple(b for b in body if b != TRUE)))
        positions.append(_position(clause_tree))
    logger.debug("Parsed %s clauses", len(clauses))
    return SourceProgram(text, Program(tuple(clauses)), tuple(positions))


def parse_program(text: str) -> Program:
    return parse_source(text).program


def parse_query(text: str) -> Atom:
    """Parse a single atom, optionally terminated by '.'."""
    tree = _parse_tree(text, "query")
    (atom_tree,) = tree.children
    return ClauseBuilder().transform(atom_tree)


def render_program(program: Program) -> str:
    """Render one clause per line, variables renamed by first occurrence."""
    return "".join(f"{canonical_form(clause)}\n" for clause in program)
