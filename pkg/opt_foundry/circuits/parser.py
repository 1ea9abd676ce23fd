"""
Tokenizer and recursive-descent parser for ``.optc`` circuit programs.

    program  := preamble decl*
    preamble := ("system" IDENT "=" INT ";")*
    decl     := "let" IDENT "=" expr ";"
    expr     := sum
    sum      := serial ("+" serial)*
    serial   := par ("." par)*
    par      := atom ("x" atom)*
    atom     := IDENT | "id" "[" IDENT "]" | "(" expr ")"

``#`` starts a comment running to the end of the line.
"""
import re
from dataclasses import dataclass

from opt_foundry.circuits.ast import (
    CircuitSyntaxError,
    Declaration,
    DuplicateDeclaration,
    Identity,
    Parallel,
    Primitive,
    Program,
    Serial,
    Span,
    Sum,
    SystemDecl,
)

KEYWORDS = ('system', 'let', 'id', 'x')

TOKEN_RE = re.compile(r"""
    (?P<newline>\n)
  | (?P<skip>[ \t\r]+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[=;.+()\[\]])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    span: Span


def tokenize(source):
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        match = TOKEN_RE.match(source, pos)
        if not match:
            raise CircuitSyntaxError(f'Unexpected character {source[pos]!r}', line, pos - line_start + 1)
        kind, value = match.lastgroup, match.group()
        span = Span(line, pos - line_start + 1)
        pos = match.end()
        if kind == 'newline':
            line, line_start = line + 1, pos
        elif kind == 'int':
            yield Token('INT', value, span)
        elif kind == 'name':
            yield Token(value if value in KEYWORDS else 'IDENT', value, span)
        elif kind == 'punct':
            yield Token(value, value, span)
    yield Token('EOF', '', Span(line, pos - line_start + 1))


class Parser:

    def __init__(self, source):
        self.tokens = list(tokenize(source))
        self.pos = 0

    @property
    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        if token.kind != 'EOF':
            self.pos += 1
        return token

    def error(self, message, token=None):
        token = token or self.peek
        found = 'end of input' if token.kind == 'EOF' else f'token {token.value!r}'
        return CircuitSyntaxError(f'{message}, found {found}', token.span.line, token.span.col)

    def expect(self, kind, what=None):
        if self.peek.kind != kind:
            raise self.error(f'Expected {what or repr(kind)}')
        return self.advance()

    def parse_program(self):
        systems, declarations, seen = [], [], set()
        while self.peek.kind == 'system':
            start = self.advance()
            name = self.expect('IDENT', 'a system name')
            self.expect('=')
            level = self.expect('INT', 'a system level')
            self.expect(';')
            if name.value in seen:
                raise DuplicateDeclaration(f'System {name.value!r} declared twice (line {start.span.line})')
            seen.add(name.value)
            systems.append(SystemDecl(name.value, int(level.value), start.span))
        while self.peek.kind == 'let':
            start = self.advance()
            name = self.expect('IDENT', 'a declaration name')
            self.expect('=')
            expr = self.parse_expr()
            self.expect(';')
            if name.value in seen:
                raise DuplicateDeclaration(f'Name {name.value!r} declared twice (line {start.span.line})')
            seen.add(name.value)
            declarations.append(Declaration(name.value, expr, start.span))
        if self.peek.kind != 'EOF':
            raise self.error("Expected 'let'")
        return Program(tuple(systems), tuple(declarations))

    def parse_expr(self):
        left = self.parse_serial()
        while self.peek.kind == '+':
            self.advance()
            left = Sum(left, self.parse_serial(), left.span)
        return left

    def parse_serial(self):
        left = self.parse_parallel()
        while self.peek.kind == '.':
            self.advance()
            left = Serial(left, self.parse_parallel(), left.span)
        return left

    def parse_parallel(self):
        left = self.parse_atom()
        while self.peek.kind == 'x':
            self.advance()
            left = Parallel(left, self.parse_atom(), left.span)
        return left

    def parse_atom(self):
        token = self.peek
        if token.kind == 'IDENT':
            self.advance()
            return Primitive(token.value, token.span)
        if token.kind == 'id':
            self.advance()
            self.expect('[')
            system = self.expect('IDENT', 'a system name')
            self.expect(']')
            return Identity(system.value, token.span)
        if token.kind == '(':
            self.advance()
            expr = self.parse_expr()
            self.expect(')')
            return expr
        raise self.error('Expected an expression')


def parse_circuit(source):
    return Parser(source).parse_program()


def parse_expression(source):
    parser = Parser(source)
    expr = parser.parse_expr()
    if parser.peek.kind != 'EOF':
        raise parser.error('Trailing input')
    return expr
