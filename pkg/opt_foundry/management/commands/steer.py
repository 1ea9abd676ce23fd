"""
steer.py

Splits a state into a random ensemble by measuring its purifying system, then rebuilds a
measurement on the purifying system that steers the first system into that ensemble.

EXAMPLE USAGE:

python manage.py steer --backend complex --levels 3 --outcomes 4 --seed 11

OPTIONS:

* --backend: real or complex (default complex).
* --state: the state as a JSON or YAML matrix; a random state of the first of --levels
  is used when omitted.
* --levels: level of the random state (default 2).
* --outcomes: number of ensemble members.
* --seed: random seed for the state and the splitting measurement.
* --tol: tolerance for the reconstruction.
* --format: json, yaml or md.
* --out: path of a file to which the report is also written.
* --no-runtime: leave timings out of the report.
"""
import sys

from django.core.management.base import BaseCommand

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
    SteeringError,
    apply_local_effect,
    purify,
    steering_measurement,
)
from opt_foundry.reports import CheckReport, Stopwatch, verdict_for
from opt_foundry.sampling import make_rng
from opt_foundry.theories import BackendKind, get_backend, is_measurement, random_measurement


class Command(BaseCommand):
    help = 'Reproduce an ensemble decomposition of a state by a measurement on its purification'

    def add_arguments(self, parser):
        add_run_arguments(parser, levels_default='2', backend_default='complex')
        state_argument(parser)
        parser.add_argument(
            '--outcomes',
            dest='outcomes',
            type=int,
            default=2,
            help='Number of ensemble members.',
        )

    def handle(self, *args, **options):
        config = run_config('steer', options)
        backend = get_backend(config.backend)
        if backend.kind == BackendKind.CLASSICAL:
            raise usage_error('Steering needs a quantum backend')
        if options['outcomes'] < 1:
            raise usage_error('--outcomes must be positive')
        tol = config.tol or 1e-8
        rng = make_rng(config.seed)
        rho = read_state(backend, options['state'], config.levels[0], rng)
        watch = Stopwatch()

        try:
            pair = purify(backend, rho)
        except PurificationError as e:
            raise usage_error(f'Cannot purify --state: {e}')
        splitting = random_measurement(backend, pair.level, options['outcomes'], rng)
        ensemble = [apply_local_effect(backend, pair.state, b) for b in splitting]
        witnesses, details = [], {'state': rho, 'ensemble': ensemble}
        try:
            result = steering_measurement(pair, ensemble, tol)
        except SteeringError as e:
            witnesses.append({'reason': str(e), 'state': rho})
        else:
            details['effects'] = list(result.effects)
            if not is_measurement(backend, pair.level, list(result.effects), tol):
                witnesses.append({'reason': 'effects_do_not_form_a_measurement', 'effects': list(result.effects)})

        report = CheckReport(
            check='steer',
            backend=backend.label,
            levels=[pair.level],
            verdict=verdict_for(not witnesses),
            witnesses=witnesses,
            tolerances={'check': tol},
            seed=config.seed,
            samples=options['outcomes'],
            runtime_ms=watch.elapsed_ms,
            details=details,
        )
        write_report(self, report, config)
        sys.exit(int(not report.passed))
