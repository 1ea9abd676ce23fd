"""
Randomized checks of the composition laws through the parser, typechecker and evaluator.
"""
import logging

import numpy as np

from opt_foundry.circuits.evaluator import Binding, Evaluator
from opt_foundry.circuits.parser import parse_circuit
from opt_foundry.circuits.typecheck import WireType
from opt_foundry.conf import get_setting
from opt_foundry.reports import CheckReport, Stopwatch, verdict_for
from opt_foundry.sampling import make_rng, resolve_seed
from opt_foundry.theories import Channel, get_backend

log = logging.getLogger(__name__)

MAX_LEVEL = 3

SYSTEMS = ('A', 'B', 'C', 'A2', 'B2', 'C2')

PRIMITIVES = {
    'f': ('A', 'B'),
    'g': ('B', 'C'),
    'h': ('C', 'A'),
    'f2': ('A2', 'B2'),
    'g2': ('B2', 'C2'),
}

LAWS = {
    'interchange': ('(g x g2) . (f x f2)', '(g . f) x (g2 . f2)'),
    'serial_associativity': ('(h . g) . f', 'h . (g . f)'),
    'parallel_associativity': ('(f x f2) x g', 'f x (f2 x g)'),
    'unit_left': ('id[B] . f', 'f'),
    'unit_right': ('f . id[A]', 'f'),
    'unit_parallel': ('f x id[I]', 'f'),
}


def law_source(levels):
    """
    Program text declaring every law as a ``<law>_lhs`` / ``<law>_rhs`` pair.
    """
    lines = [f'system {name} = {levels[name]};' for name in SYSTEMS]
    lines.append('system I = 1;')
    for law, (lhs, rhs) in LAWS.items():
        lines.append(f'let {law}_lhs = {lhs};')
        lines.append(f'let {law}_rhs = {rhs};')
    return '\n'.join(lines) + '\n'


def swapped_tensor(first, second):
    """
    A broken parallel composition that lists the output factors in the wrong order.
    """
    correct = first.tensor(second)
    n1, n2 = first.n_out, second.n_out
    m = correct.n_in
    superop = np.asarray(correct.superop).reshape(n1, n2, n1, n2, m, m)
    superop = superop.transpose(1, 0, 3, 2, 4, 5).reshape(n1 * n2, n1 * n2, m, m)
    return Channel(correct.backend, superop)


def law_check(backend, n_instances=None, seed=None, tol=None, tensor=None):
    """
    Interchange, both associativities and the unit laws on random bindings at levels up to
    three, each compared as evaluated processes.
    """
    backend = get_backend(backend)
    n_instances = get_setting('SAMPLES') if n_instances is None else n_instances
    tol = get_setting('LAW_TOLERANCE') if tol is None else tol
    seed = resolve_seed(seed)
    rng = make_rng(seed)
    watch = Stopwatch()
    log.info('Checking composition laws for %s on %s instances (seed %s)', backend.label, n_instances, seed)

    summary = {law: {'passed': 0, 'failed': 0, 'max_deviation': 0.0} for law in LAWS}
    witnesses = []
    for instance in range(n_instances):
        levels = {name: int(rng.integers(1, MAX_LEVEL + 1)) for name in SYSTEMS}
        bindings = {
            name: Binding(name, WireType((src,), (dst,)),
                          Channel.random(backend, levels[src], levels[dst], rng))
            for name, (src, dst) in PRIMITIVES.items()
        }
        source = law_source(levels)
        evaluator = Evaluator(backend, bindings, tensor=tensor)
        typed = evaluator.prepare(parse_circuit(source))
        for law in LAWS:
            lhs = evaluator.evaluate(typed, f'{law}_lhs')
            rhs = evaluator.evaluate(typed, f'{law}_rhs')
            if lhs.superop.shape != rhs.superop.shape:
                deviation = np.inf
            else:
                deviation = float(np.max(np.abs(lhs.superop - rhs.superop)))
            stats = summary[law]
            stats['max_deviation'] = max(stats['max_deviation'], deviation)
            if deviation <= tol:
                stats['passed'] += 1
                continue
            stats['failed'] += 1
            if stats['failed'] == 1:
                witnesses.append({'law': law, 'instance': instance, 'levels': levels,
                                  'deviation': deviation, 'source': source})

    for witness in witnesses:
        log.error('Law %s fails on instance %s (deviation %s)', witness['law'], witness['instance'],
                  witness['deviation'])
    return CheckReport(
        check='law_check',
        backend=backend.label,
        levels=list(range(1, MAX_LEVEL + 1)),
        verdict=verdict_for(not witnesses),
        witnesses=witnesses,
        tolerances={'law': tol},
        seed=seed,
        samples=n_instances,
        runtime_ms=watch.elapsed_ms,
        details={'laws': summary},
    )
