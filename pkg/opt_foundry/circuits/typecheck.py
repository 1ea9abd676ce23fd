"""
Wire types over declared system labels.
"""
from dataclasses import dataclass, field

from opt_foundry.circuits.ast import (
    DuplicateDeclaration,
    Identity,
    Parallel,
    Primitive,
    Serial,
    Sum,
    UnknownName,
    WireMismatch,
)


@dataclass(frozen=True)
class WireType:
    """
    Ordered input and output systems; the trivial system is the empty list.
    """
    inputs: tuple = ()
    outputs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'inputs', tuple(self.inputs))
        object.__setattr__(self, 'outputs', tuple(self.outputs))

    @property
    def is_scalar(self):
        return not self.inputs and not self.outputs

    @property
    def is_state(self):
        return not self.inputs and bool(self.outputs)

    @property
    def is_effect(self):
        return bool(self.inputs) and not self.outputs

    def __str__(self):
        return '{} -> {}'.format(' x '.join(self.inputs) or 'I', ' x '.join(self.outputs) or 'I')


@dataclass
class TypedProgram:
    program: object
    levels: dict
    registry: dict
    declaration_types: dict = field(default_factory=dict)
    node_types: dict = field(default_factory=dict)

    def type_of(self, name):
        return self.declaration_types[name]


class _Checker:

    def __init__(self, program, registry):
        self.typed = TypedProgram(program, program.levels, dict(registry))

    def system(self, name, span):
        if name not in self.typed.levels:
            raise UnknownName(name, span)
        return name

    def check(self, node):
        kind = type(node)
        if kind is Primitive:
            result = self.primitive(node)
        elif kind is Identity:
            system = self.system(node.system, node.span)
            result = WireType((system,), (system,))
        elif kind is Serial:
            after, before = self.check(node.left), self.check(node.right)
            if before.outputs != after.inputs:
                raise WireMismatch(after.inputs, before.outputs, node.span)
            result = WireType(before.inputs, after.outputs)
        elif kind is Parallel:
            left, right = self.check(node.left), self.check(node.right)
            result = WireType(left.inputs + right.inputs, left.outputs + right.outputs)
        elif kind is Sum:
            left, right = self.check(node.left), self.check(node.right)
            if left != right:
                raise WireMismatch(left.inputs + left.outputs, right.inputs + right.outputs, node.span)
            result = left
        else:
            raise TypeError(f'Not a circuit node: {node!r}')
        self.typed.node_types[node] = result
        return result

    def primitive(self, node):
        if node.name in self.typed.declaration_types:
            return self.typed.declaration_types[node.name]
        if node.name not in self.typed.registry:
            raise UnknownName(node.name, node.span)
        wire_type = self.typed.registry[node.name]
        for system in wire_type.inputs + wire_type.outputs:
            self.system(system, node.span)
        return wire_type

    def run(self):
        for decl in self.typed.program.declarations:
            if decl.name in self.typed.registry:
                raise DuplicateDeclaration(f'{decl.name!r} is both declared and bound')
            self.typed.declaration_types[decl.name] = self.check(decl.expr)
        return self.typed


def typecheck(program, registry):
    """
    Annotate every node with its WireType in one bottom-up pass.

    ``registry`` maps primitive names to WireTypes; earlier ``let`` names may be reused.
    """
    return _Checker(program, registry).run()
