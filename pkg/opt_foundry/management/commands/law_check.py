"""
law_check.py

Checks the interchange, associativity and unit laws of circuit composition on random
bindings, evaluated through the circuit language.

EXAMPLE USAGE:

python manage.py law_check --backend complex --samples 50 --seed 7

OPTIONS:

* --backend: classical, real or complex (default complex).
* --samples: number of random instances of each law.
* --seed: random seed; defaults to OPT_FOUNDRY_SEED or the SEED setting.
* --tol: tolerance override for comparing the two sides of a law.
* --format: json, yaml or md.
* --out: path of a file to which the report is also written.
* --no-runtime: leave timings out of the report.
"""
import sys

from django.core.management.base import BaseCommand

from opt_foundry.circuits.laws import law_check
from opt_foundry.management.commands import add_run_arguments, run_config, write_report


class Command(BaseCommand):
    help = 'Check the composition laws of circuits on random instances'

    def add_arguments(self, parser):
        add_run_arguments(parser, backend_default='complex', levels=False)

    def handle(self, *args, **options):
        config = run_config('law_check', options)
        report = law_check(config.backend, n_instances=config.samples, seed=config.seed, tol=config.tol)
        write_report(self, report, config)
        sys.exit(int(not report.passed))
