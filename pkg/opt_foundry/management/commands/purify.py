"""
purify.py

Purifies a state on two copies of its system and reports both marginals. For the
classical backend it reports whether a purification exists at all.

EXAMPLE USAGE:

python manage.py purify --backend real --state "[[0.75, 0], [0, 0.25]]"
python manage.py purify --backend classical --state "[0.5, 0.5]"

OPTIONS:

* --backend: classical, real or complex (default complex).
* --state: the state as a JSON or YAML matrix, or a list of probabilities for the
  classical backend. A random state of the first of --levels is used when omitted.
* --levels: level of the random state (default 2).
* --seed: random seed for the random state.
* --tol: tolerance for comparing the marginals.
* --format: json, yaml or md.
* --out: path of a file to which the report is also written.
* --no-runtime: leave timings out of the report.

An input that is not a normalized state is a usage error (exit status 2).
"""
import logging
import sys

import numpy as np
from django.core.management.base import BaseCommand

from opt_foundry.cones import ConeContext, is_internal
from opt_foundry.management.commands import (
    add_run_arguments,
    read_state,
    run_config,
    state_argument,
    usage_error,
    write_report,
)
from opt_foundry.purification import (
    PurificationError,
    ZigzagError,
    complementary_state,
    marginal,
    purification_exists,
    purify,
    zigzag_pair,
)
from opt_foundry.reports import CheckReport, Stopwatch, verdict_for
from opt_foundry.sampling import make_rng
from opt_foundry.theories import BackendKind, get_backend

log = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Purify a state and report its marginals'

    def add_arguments(self, parser):
        add_run_arguments(parser, levels_default='2', backend_default='complex')
        state_argument(parser)

    def handle(self, *args, **options):
        config = run_config('purify', options)
        backend = get_backend(config.backend)
        tol = config.tol or 1e-9
        rho = read_state(backend, options['state'], config.levels[0], make_rng(config.seed))
        watch = Stopwatch()

        if backend.kind == BackendKind.CLASSICAL:
            try:
                exists = purification_exists(backend, rho, tol)
            except PurificationError as e:
                raise usage_error(f'Cannot purify --state: {e}')
            witnesses = [] if exists else [{'reason': 'no_purification', 'state': rho}]
            details = {'state': rho, 'purification_exists': exists}
            ok = exists
        else:
            try:
                pair = purify(backend, rho, tol)
            except PurificationError as e:
                raise usage_error(f'Cannot purify --state: {e}')
            first = marginal(backend, pair.state, keep=0)
            second = complementary_state(pair)
            spectrum = np.sort(np.linalg.eigvalsh(backend.to_matrix(rho)))
            other_spectrum = np.sort(np.linalg.eigvalsh(backend.to_matrix(second)))
            ok = first.allclose(rho, tol) and np.allclose(spectrum, other_spectrum, rtol=0, atol=tol)
            details = {
                'state': rho,
                'purification': pair.state,
                'vector': pair.vector,
                'marginal': first,
                'complementary_state': second,
            }
            if is_internal(ConeContext(rho.algebra, tol), rho):
                try:
                    details['zigzag_probability'] = zigzag_pair(backend, rho).probability
                except ZigzagError as e:
                    log.warning('No zigzag pair for the input state: %s', e)
            witnesses = [] if ok else [{'reason': 'marginal_mismatch', 'state': rho, 'marginal': first}]

        report = CheckReport(
            check='purify',
            backend=backend.label,
            levels=[backend.level_of(rho)],
            verdict=verdict_for(ok),
            witnesses=witnesses,
            tolerances={'check': tol},
            seed=config.seed,
            samples=1,
            runtime_ms=watch.elapsed_ms,
            details=details,
        )
        write_report(self, report, config)
        sys.exit(int(not report.passed))
