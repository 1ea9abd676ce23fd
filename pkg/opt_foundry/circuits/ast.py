"""
Syntax tree of the circuit language, its errors, and the printer.

Expressions compose left-associatively with precedence ``+`` < ``.`` < ``x``:
``g . f`` is ``g`` after ``f`` and ``f x h`` runs ``f`` and ``h`` side by side.
"""
from dataclasses import dataclass, field
from typing import Optional


class CircuitError(ValueError):
    pass


class CircuitSyntaxError(CircuitError):

    def __init__(self, message, line, col):
        super().__init__(f'{message} at line {line}, column {col}')
        self.line = line
        self.col = col


class DuplicateDeclaration(CircuitError):
    pass


class UnknownName(CircuitError):

    def __init__(self, name, span=None):
        where = f' at line {span.line}, column {span.col}' if span else ''
        super().__init__(f'Unknown name {name!r}{where}')
        self.name = name
        self.span = span


class WireMismatch(CircuitError):

    def __init__(self, expected, actual, span=None):
        where = f' at line {span.line}, column {span.col}' if span else ''
        super().__init__(f'Wire mismatch{where}: expected {list(expected)}, got {list(actual)}')
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        self.span = span


class BindingMismatch(CircuitError):
    pass


@dataclass(frozen=True)
class Span:
    line: int
    col: int


@dataclass(frozen=True)
class Primitive:
    name: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Identity:
    system: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Serial:
    """
    ``left`` after ``right``.
    """
    left: object
    right: object
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Parallel:
    left: object
    right: object
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Sum:
    left: object
    right: object
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SystemDecl:
    name: str
    level: int
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Declaration:
    name: str
    expr: object
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    systems: tuple = ()
    declarations: tuple = ()

    @property
    def levels(self):
        return {s.name: s.level for s in self.systems}

    def declaration(self, name):
        for decl in self.declarations:
            if decl.name == name:
                return decl
        raise UnknownName(name)


_PRECEDENCE = {Sum: 1, Serial: 2, Parallel: 3}
_OPERATOR = {Sum: '+', Serial: '.', Parallel: 'x'}


def _format(expr, min_prec):
    kind = type(expr)
    if kind is Primitive:
        return expr.name
    if kind is Identity:
        return f'id[{expr.system}]'
    prec = _PRECEDENCE[kind]
    # Left-associative: the right operand at equal precedence needs parentheses.
    text = f'{_format(expr.left, prec)} {_OPERATOR[kind]} {_format(expr.right, prec + 1)}'
    return f'({text})' if prec < min_prec else text


def format_expr(expr):
    return _format(expr, 0)


def format_program(program):
    lines = [f'system {s.name} = {s.level};' for s in program.systems]
    lines += [f'let {d.name} = {format_expr(d.expr)};' for d in program.declarations]
    return '\n'.join(lines) + '\n'
