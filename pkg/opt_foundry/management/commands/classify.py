"""
classify.py

Runs the exclusion argument over a range of ranks, or looks up the simple Euclidean Jordan
algebras of a given rank and dimension.

EXAMPLE USAGE:

python manage.py classify --n 2..6 --format json
python manage.py classify --rank 2 --dim 25

OPTIONS:

* --n: ranks of the candidate algebras, as a list or a range starting at 2 or above.
* --rank, --dim: look up the simple algebras of this rank and dimension instead of
  running the exclusion. Both must be given.
* --format: json, yaml or md.
* --out: path of a file to which the report is also written.
* --no-runtime: leave timings out of the report.
"""
import sys

from django.core.management.base import BaseCommand

from opt_foundry.eja import classify_simple
from opt_foundry.management.commands import add_run_arguments, parse_levels, run_config, usage_error, write_report
from opt_foundry.postulates import classification_exclusion
from opt_foundry.reports import CheckReport, Stopwatch


class Command(BaseCommand):
    help = 'Show that only complex Hermitian matrices survive the composite-dimension argument'

    def add_arguments(self, parser):
        add_run_arguments(parser, levels=False)
        parser.add_argument(
            '--n',
            dest='n',
            default='2..6',
            help='Ranks of the candidate algebras, e.g. "2..6".',
        )
        parser.add_argument(
            '--rank',
            dest='rank',
            type=int,
            default=None,
            help='Rank to look up (with --dim) instead of running the exclusion.',
        )
        parser.add_argument(
            '--dim',
            dest='dim',
            type=int,
            default=None,
            help='Dimension to look up (with --rank).',
        )

    def handle(self, *args, **options):
        config = run_config('classify', options)
        if (options['rank'] is None) != (options['dim'] is None):
            raise usage_error('--rank and --dim must be given together')

        if options['rank'] is not None:
            watch = Stopwatch()
            families = classify_simple(options['rank'], options['dim'])
            report = CheckReport(
                check='classify_simple',
                backend='EJA',
                levels=[options['rank']],
                verdict='pass',
                runtime_ms=watch.elapsed_ms,
                details={'rank': options['rank'], 'dim': options['dim'], 'families': families},
            )
        else:
            n_values = parse_levels(options['n'])
            if n_values[0] < 2:
                raise usage_error('--n values must be at least 2')
            report = classification_exclusion(n_values)

        write_report(self, report, config)
        sys.exit(int(not report.passed))
