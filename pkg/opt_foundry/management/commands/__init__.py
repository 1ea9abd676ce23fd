"""
Common opt_foundry code used by management commands.
"""
import argparse
import json
import logging
import os
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml
from django.core.management import CommandError

from opt_foundry.conf import get_setting
from opt_foundry.postulates import ES_PURIFICATION, LOCAL_EQUIVALENCE
from opt_foundry.reports import FAIL, FORMATS, PASS, emit_report, strip_runtime
from opt_foundry.theories import BACKEND_NAMES

log = logging.getLogger(__name__)

EXPECTED_VERDICTS_FILE = os.path.join(os.path.dirname(__file__), 'expected_verdicts.yml')

USAGE_ERROR = 2


class ConfigurationException(Exception):
    pass


@dataclass
class RunConfig:
    """
    Settings of one command run, after flags have been resolved against the defaults.
    """
    command: str
    backend: Optional[str]
    levels: list
    samples: int
    seed: int
    tol: Optional[float]
    fmt: str
    out: Optional[str]
    runtime: bool = True


def usage_error(message):
    return CommandError(message, returncode=USAGE_ERROR)


def parse_levels(text):
    """
    Parse ``"2,3"``, ``"2..6"`` or a mix such as ``"2,4..5"`` into a sorted list.
    """
    if isinstance(text, (list, tuple)):
        text = ','.join(str(item) for item in text)
    levels = set()
    for item in str(text).split(','):
        item = item.strip()
        match = re.fullmatch(r'(\d+)\.\.(\d+)', item)
        if match:
            low, high = int(match.group(1)), int(match.group(2))
            if low > high:
                raise usage_error(f'Empty level range: {item}')
            levels.update(range(low, high + 1))
        elif item.isdigit():
            levels.add(int(item))
        else:
            raise usage_error(f'Cannot parse levels: {text!r}')
    if not levels or min(levels) < 1:
        raise usage_error(f'Levels must be positive integers: {text!r}')
    return sorted(levels)


def add_run_arguments(parser, levels_default='2,3', backend_default=None, levels=True):
    """
    Flags shared by every check command.
    """
    parser.add_argument(
        '--backend',
        dest='backend',
        default=backend_default,
        choices=BACKEND_NAMES,
        help='Theory backend to use.',
    )
    if levels:
        parser.add_argument(
            '--levels',
            dest='levels',
            default=levels_default,
            help='System levels, e.g. "2,3" or "2..4".',
        )
    parser.add_argument(
        '--samples',
        dest='samples',
        type=int,
        default=None,
        help='Number of random samples (defaults to the SAMPLES setting).',
    )
    parser.add_argument(
        '--seed',
        dest='seed',
        type=int,
        default=None,
        help='Random seed (defaults to OPT_FOUNDRY_SEED or the SEED setting).',
    )
    parser.add_argument(
        '--tol',
        dest='tol',
        type=float,
        default=None,
        help='Tolerance override for the checks.',
    )
    parser.add_argument(
        '--format',
        dest='format',
        default='json',
        choices=FORMATS,
        help='Report format.',
    )
    parser.add_argument(
        '--out',
        dest='out',
        default=None,
        help='File to which the report is also written.',
    )
    parser.add_argument(
        '--no-runtime',
        dest='no_runtime',
        action='store_true',
        help='Omit timings so reports for a fixed seed are byte-identical.',
    )


def run_config(command, options):
    samples = get_setting('SAMPLES') if options.get('samples') is None else options['samples']
    if samples < 1:
        raise usage_error(f'--samples must be positive, got {samples}')
    tol = options.get('tol')
    if tol is not None and not tol > 0:
        raise usage_error(f'--tol must be positive, got {tol}')
    if options.get('backend') not in (None,) + BACKEND_NAMES:
        raise usage_error(f'Unknown backend: {options["backend"]}')
    if options.get('format', 'json') not in FORMATS:
        raise usage_error(f'Unknown format: {options["format"]}')
    return RunConfig(
        command=command,
        backend=options.get('backend'),
        levels=parse_levels(options['levels']) if options.get('levels') is not None else [],
        samples=samples,
        seed=get_setting('SEED') if options.get('seed') is None else options['seed'],
        tol=tol,
        fmt=options.get('format') or 'json',
        out=options.get('out'),
        runtime=not options.get('no_runtime', False),
    )


def read_expected_verdicts(config_file):
    """
    Load the expected postulate table: theory label -> {check: "pass" | "fail"}.
    """
    log.info("Loading expected verdicts: {}".format(getattr(config_file, 'name', config_file)))
    try:
        if isinstance(config_file, str):
            with open(config_file, encoding='UTF-8') as infile:
                table = yaml.safe_load(infile)
        else:
            table = yaml.safe_load(config_file)
    except (yaml.YAMLError, FileNotFoundError):
        raise ConfigurationException(f"Unable to load expected verdicts: {config_file}")
    if not table or not isinstance(table, dict):
        raise ConfigurationException(f"Expected verdicts file is empty: {config_file}")
    for theory, row in table.items():
        if not isinstance(row, dict) or set(row) != {LOCAL_EQUIVALENCE, ES_PURIFICATION}:
            raise ConfigurationException(f"Invalid row for {theory} in expected verdicts")
        if any(verdict not in (PASS, FAIL) for verdict in row.values()):
            raise ConfigurationException(f"Invalid verdict for {theory} in expected verdicts")
    return table


def expected_file_argument(parser):
    parser.add_argument(
        '--expected_file',
        dest='expected_file',
        default=EXPECTED_VERDICTS_FILE,
        type=argparse.FileType('r', encoding='UTF-8'),
        help='YAML file with the expected verdict of each postulate per theory.',
    )


def state_argument(parser):
    parser.add_argument(
        '--state',
        dest='state',
        default=None,
        help=(
            'State as a JSON/YAML matrix, e.g. "[[0.75, 0], [0, 0.25]]", or a probability list for '
            'the classical backend. A random state of the first level is used when omitted.'
        ),
    )


def read_state(backend, text, level, rng):
    """
    Parse ``--state`` for ``backend``, or sample a random state of ``level``.
    """
    if text is None:
        return backend.random_state(level, rng)
    try:
        data = json.loads(text)
    except ValueError:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError:
            raise usage_error(f'Cannot parse --state: {text!r}')
    try:
        array = np.array(_complex_entries(data), dtype=complex)
    except (TypeError, ValueError):
        raise usage_error(f'Cannot parse --state: {text!r}')
    if array.ndim == 1:
        array = np.diag(array)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise usage_error(f'--state must be a square matrix, got shape {array.shape}')
    return backend.from_matrix(array.shape[0], array)


def _complex_entries(data):
    if isinstance(data, list):
        return [_complex_entries(item) for item in data]
    if isinstance(data, str):
        return complex(data.replace(' ', ''))
    return data


def write_report(command, report, config):
    """
    Write the report to the command's stdout and, if requested, to ``config.out``.
    """
    if not config.runtime:
        report = strip_runtime(report)
    text = emit_report(report, config.fmt)
    command.stdout.write(text)
    if config.out:
        with open(config.out, 'w', encoding='UTF-8') as outfile:
            outfile.write(text)
    return text
