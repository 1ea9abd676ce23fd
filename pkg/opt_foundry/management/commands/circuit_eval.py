"""
circuit_eval.py

Evaluates every declaration of a ``.optc`` circuit program against a backend, with the
primitives bound by a JSON (or YAML) manifest.

EXAMPLE USAGE:

python manage.py circuit_eval bell.optc --backend complex --bindings bell.json

OPTIONS:

* source: path of the .optc program.
* --bindings: pass a JSON or YAML manifest binding every primitive the program uses to a
  state, effect or channel.
* --backend: classical, real or complex (default complex).
* --tol: tolerance for the range check on probabilities.
* --format: json, yaml or md.
* --out: path of a file to which the report is also written.
* --no-runtime: leave timings out of the report.

A program that does not parse is a usage error (exit status 2). Binding, typing and range
failures are reported as witnesses with exit status 1.
"""
import logging
import sys

from django.core.management.base import BaseCommand

from opt_foundry.circuits import CircuitError, parse_circuit, run_program, scalar_in_range
from opt_foundry.management.commands import add_run_arguments, run_config, usage_error, write_report
from opt_foundry.reports import CheckReport, Stopwatch, verdict_for
from opt_foundry.theories import Channel, get_backend

log = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Evaluate a circuit program'

    def add_arguments(self, parser):
        parser.add_argument(
            'source',
            type=str,
            help='Path of the .optc program.',
        )
        parser.add_argument(
            '--bindings',
            dest='bindings',
            required=True,
            help='Path of the bindings manifest.',
        )
        add_run_arguments(parser, backend_default='complex', levels=False)

    def handle(self, *args, **options):
        config = run_config('circuit_eval', options)
        backend = get_backend(config.backend)
        try:
            with open(options['source'], encoding='UTF-8') as infile:
                source = infile.read()
            with open(options['bindings'], encoding='UTF-8') as infile:
                manifest = infile.read()
        except OSError as e:
            raise usage_error(f'Cannot read input: {e}')
        try:
            program = parse_circuit(source)
        except CircuitError as e:
            raise usage_error(f'Cannot parse {options["source"]}: {e}')

        watch = Stopwatch()
        witnesses, results = [], {}
        try:
            values = run_program(program, backend, manifest)
        except CircuitError as e:
            log.error('Circuit evaluation failed: %s', e)
            values = {}
            witnesses.append({'reason': type(e).__name__, 'message': str(e)})

        for name, value in values.items():
            if isinstance(value, float):
                results[name] = value
                if not scalar_in_range(value, config.tol):
                    log.warning('%s = %s lies outside [0, 1]', name, value)
                    witnesses.append({'reason': 'probability_out_of_range', 'declaration': name, 'value': value})
                self.stderr.write(f'{name} = {value:.12g}')
            elif isinstance(value, Channel):
                results[name] = {'process': f'{value.n_in} -> {value.n_out}'}
            else:
                results[name] = value

        report = CheckReport(
            check='circuit_eval',
            backend=backend.label,
            levels=[],
            verdict=verdict_for(not witnesses),
            witnesses=witnesses,
            tolerances={'check': config.tol} if config.tol else {},
            seed=config.seed,
            samples=len(results),
            runtime_ms=watch.elapsed_ms,
            details={'source': options['source'], 'results': results},
        )
        write_report(self, report, config)
        sys.exit(int(not report.passed))
