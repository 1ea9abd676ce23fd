"""
check_postulates.py

Runs the local-equivalence and ES-purification checks on the classical, real-quantum and
complex-quantum backends and compares the verdicts with the expected table.

EXAMPLE USAGE:

python manage.py check_postulates --levels 2,3 --format md
python manage.py check_postulates --backend real --levels 2 --out real.json

OPTIONS:

* --backend: classical, real or complex; all three backends are checked when omitted.
* --levels: system levels to check, as a list ("2,3"), a range ("2..4") or both.
* --samples: number of sampled states per level for the ES-purification check.
* --seed: random seed; defaults to OPT_FOUNDRY_SEED or the SEED setting.
* --tol: tolerance override for the checks.
* --expected_file: pass a yaml file mapping each theory label to its expected
  local_equivalence and es_purification verdicts (pass or fail).
* --format: json, yaml or md.
* --out: path of a file to which the report is also written.
* --no-runtime: leave timings out of the report.

The exit status is 0 when every verdict matches the expected table, 1 otherwise.
"""
import logging
import sys

from django.core.management.base import BaseCommand

from opt_foundry.management.commands import (
    add_run_arguments,
    expected_file_argument,
    read_expected_verdicts,
    run_config,
    write_report,
)
from opt_foundry.postulates import postulate_table

log = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Check local equivalence and ES purification on each theory backend'

    def add_arguments(self, parser):
        add_run_arguments(parser, levels_default='2,3')
        expected_file_argument(parser)

    def handle(self, *args, **options):
        config = run_config('check_postulates', options)
        expected = read_expected_verdicts(options['expected_file'])
        backends = [config.backend] if config.backend else None
        report = postulate_table(
            config.levels,
            n_samples=config.samples,
            seed=config.seed,
            tol=config.tol,
            expected=expected,
            backends=backends,
        )
        write_report(self, report, config)
        if not report.passed:
            self.stderr.write('Postulate verdicts deviate from the expected table')
        sys.exit(int(not report.passed))
