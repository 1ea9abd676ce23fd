"""
Evaluation of typed circuits against a theory backend.

Primitives are bound to backend processes through a manifest::

    {
      "primitives": {
        "bell": {"kind": "state", "systems": ["A", "B"], "matrix": [[0.5, 0, 0, 0.5], ...]},
        "e0": {"kind": "effect", "systems": ["A"], "matrix": [[1, 0], [0, 0]]},
        "flip": {"kind": "channel", "inputs": ["A"], "outputs": ["A"], "unitary": [[0, 1], [1, 0]]}
      }
    }

States accept ``matrix``, ``vector`` (a pure state) or ``probabilities``; effects accept
``matrix``, ``vector`` or ``probabilities``; channels accept ``kraus``, ``unitary`` or
``stochastic``. Complex numbers may be written as strings such as ``"0.5-0.5j"``.
"""
import json
import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np
import yaml

from opt_foundry.circuits.ast import (
    BindingMismatch,
    CircuitError,
    Identity,
    Parallel,
    Primitive,
    Serial,
    Sum,
    UnknownName,
)
from opt_foundry.circuits.parser import parse_circuit
from opt_foundry.circuits.typecheck import WireType, typecheck
from opt_foundry.conf import get_setting
from opt_foundry.theories import Channel, get_backend

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Binding:
    name: str
    wire_type: WireType
    channel: Channel


def _convert(data):
    if isinstance(data, list):
        return [_convert(item) for item in data]
    if isinstance(data, str):
        return complex(data.replace(' ', ''))
    return data


def _array(data, name):
    try:
        return np.array(_convert(data), dtype=complex)
    except (TypeError, ValueError) as e:
        raise BindingMismatch(f'{name}: cannot read numeric data ({e})')


def _level(systems, levels):
    for system in systems:
        if system not in levels:
            raise UnknownName(system)
    return reduce(lambda a, b: a * b, (levels[s] for s in systems), 1)


def _operator(entry, name, size):
    if 'matrix' in entry:
        M = _array(entry['matrix'], name)
    elif 'vector' in entry:
        v = _array(entry['vector'], name)
        M = np.outer(v, v.conj())
    elif 'probabilities' in entry:
        M = np.diag(_array(entry['probabilities'], name))
    else:
        raise BindingMismatch(f'{name}: expected one of matrix, vector or probabilities')
    if M.shape != (size, size):
        raise BindingMismatch(f'{name}: expected a {size}x{size} operator, got shape {M.shape}')
    return M


def build_binding(backend, name, entry, levels):
    """
    A Binding from one manifest entry; ``levels`` maps system labels to levels.
    """
    backend = get_backend(backend)
    kind = entry.get('kind')
    if kind == 'state':
        wire_type = WireType((), entry['systems'])
        n = _level(wire_type.outputs, levels)
        channel = Channel(backend, _operator(entry, name, n)[:, :, None, None])
    elif kind == 'effect':
        wire_type = WireType(entry['systems'], ())
        n = _level(wire_type.inputs, levels)
        channel = Channel(backend, _operator(entry, name, n).T[None, None, :, :])
    elif kind == 'channel':
        wire_type = WireType(entry['inputs'], entry['outputs'])
        n_in, n_out = _level(wire_type.inputs, levels), _level(wire_type.outputs, levels)
        if 'kraus' in entry:
            channel = Channel.from_kraus(backend, [_array(K, name) for K in entry['kraus']])
        elif 'unitary' in entry:
            channel = Channel.unitary(backend, _array(entry['unitary'], name))
        elif 'stochastic' in entry:
            channel = Channel.stochastic(backend, np.real(_array(entry['stochastic'], name)))
        else:
            raise BindingMismatch(f'{name}: expected one of kraus, unitary or stochastic')
        if (channel.n_in, channel.n_out) != (n_in, n_out):
            raise BindingMismatch(
                f'{name}: declared {n_in} -> {n_out} but bound {channel.n_in} -> {channel.n_out}'
            )
    else:
        raise BindingMismatch(f'{name}: unknown primitive kind {kind!r}')
    if backend.real and np.abs(channel.superop.imag).max(initial=0) > 0:
        raise BindingMismatch(f'{name}: complex data bound in a real backend')
    return Binding(name, wire_type, channel)


def load_bindings(manifest, backend, levels):
    """
    Bindings from a manifest dict, or from JSON/YAML text or an open file.
    """
    if hasattr(manifest, 'read'):
        manifest = manifest.read()
    if isinstance(manifest, str):
        try:
            manifest = json.loads(manifest)
        except ValueError:
            manifest = yaml.safe_load(manifest)
    if not isinstance(manifest, dict):
        raise BindingMismatch('Bindings manifest must be a mapping')
    primitives = manifest.get('primitives', {})
    return {name: build_binding(backend, name, entry, levels) for name, entry in sorted(primitives.items())}


def scalar_in_range(value, tol=None):
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    return -tol <= value <= 1 + tol


class Evaluator:
    """
    Evaluates declarations to processes: serial composition composes, parallel composition
    uses ``tensor`` (``Channel.tensor`` unless replaced) and sums add.
    """

    def __init__(self, backend, bindings, tensor=None):
        self.backend = get_backend(backend)
        self.bindings = dict(bindings)
        self.tensor = tensor or Channel.tensor

    @property
    def registry(self):
        return {name: binding.wire_type for name, binding in self.bindings.items()}

    def prepare(self, program):
        return typecheck(program, self.registry)

    def _level(self, typed, systems):
        return _level(systems, typed.levels)

    def evaluate(self, typed, name):
        return self._node(typed, typed.program.declaration(name).expr, {})

    def _node(self, typed, node, memo):
        kind = type(node)
        if kind is Primitive:
            if node.name in typed.declaration_types:
                if node.name not in memo:
                    memo[node.name] = self._node(typed, typed.program.declaration(node.name).expr, memo)
                return memo[node.name]
            binding = self.bindings[node.name]
            expected = (self._level(typed, binding.wire_type.inputs), self._level(typed, binding.wire_type.outputs))
            if (binding.channel.n_in, binding.channel.n_out) != expected:
                raise BindingMismatch(f'{node.name}: bound process does not match its declared systems')
            return binding.channel
        if kind is Identity:
            return Channel.identity(self.backend, typed.levels[node.system])
        if kind is Serial:
            return self._node(typed, node.left, memo).compose(self._node(typed, node.right, memo))
        if kind is Parallel:
            return self.tensor(self._node(typed, node.left, memo), self._node(typed, node.right, memo))
        if kind is Sum:
            return self._node(typed, node.left, memo) + self._node(typed, node.right, memo)
        raise CircuitError(f'Not a circuit node: {node!r}')

    def result(self, typed, name):
        """
        A probability for scalar declarations, an Element for states, else the process.
        """
        channel = self.evaluate(typed, name)
        wire_type = typed.type_of(name)
        if wire_type.is_scalar:
            return channel.scalar()
        if wire_type.is_state:
            return self.backend.from_matrix(channel.n_out, channel.superop[:, :, 0, 0])
        return channel

    def coarse_graining_is_deterministic(self, typed, name, tol=None):
        """
        Whether a ``+`` declaration coarse-grains to a deterministic process.
        """
        decl = typed.program.declaration(name)
        if not isinstance(decl.expr, Sum):
            raise CircuitError(f'{name!r} is not a coarse-graining')
        return self.evaluate(typed, name).is_deterministic(tol)


def run_program(source, backend, manifest):
    """
    Parse (unless ``source`` is an already parsed program), bind, typecheck and evaluate
    every declaration.
    """
    program = parse_circuit(source) if isinstance(source, str) else source
    evaluator = Evaluator(backend, load_bindings(manifest, backend, program.levels))
    typed = evaluator.prepare(program)
    return {decl.name: evaluator.result(typed, decl.name) for decl in program.declarations}
