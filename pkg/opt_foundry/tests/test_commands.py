"""
Tests of the management commands, run through call_command.
"""
import io
import json
import os
import tempfile
from unittest.mock import patch

import ddt
import pytest
import yaml
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from opt_foundry.management.commands import ConfigurationException, parse_levels, read_expected_verdicts
from opt_foundry.reports import CHECK_MARK, CROSS_MARK

CIRCUITS = os.path.join(os.path.dirname(__file__), 'circuits')


@ddt.ddt
class CommandTest(SimpleTestCase):
    """
    Runs each command with ``sys.exit`` patched and checks its exit value and report.
    """

    def run_command(self, cmd, *args, exit_value=0, **kwargs):
        out = io.StringIO()
        err = io.StringIO()
        with patch('sys.exit') as exit_mock:
            call_command(cmd, *args, stdout=out, stderr=err, verbosity=0, **kwargs)
            exit_mock.assert_called_once_with(exit_value)
        return out.getvalue(), err.getvalue()

    def run_json(self, cmd, *args, **kwargs):
        out, _ = self.run_command(cmd, *args, **kwargs)
        return json.loads(out)

    def test_check_postulates(self):
        report = self.run_json('check_postulates', levels='2', samples=3, seed=0)
        self.assertEqual(report['verdict'], 'pass')
        self.assertEqual(report['levels'], [2])
        theories = [row['theory'] for row in report['details']['table']]
        self.assertEqual(theories, ['Classical', 'RealQT', 'ComplexQT'])

    def test_check_postulates_markdown(self):
        out, _ = self.run_command('check_postulates', levels='2', samples=2, format='md')
        self.assertIn(f'| Classical | {CHECK_MARK} | {CROSS_MARK} |', out)
        self.assertIn(f'| RealQT | {CROSS_MARK} | {CHECK_MARK} |', out)
        self.assertIn(f'| ComplexQT | {CHECK_MARK} | {CHECK_MARK} |', out)

    def test_check_postulates_single_backend(self):
        report = self.run_json('check_postulates', backend='real', levels='2', samples=2)
        self.assertEqual([row['theory'] for row in report['details']['table']], ['RealQT'])

    def test_check_postulates_against_other_expectations(self):
        expected = io.StringIO(yaml.safe_dump({
            'Classical': {'local_equivalence': 'pass', 'es_purification': 'pass'},
        }))
        out, err = self.run_command(
            'check_postulates', levels='2', samples=2, backend='classical', expected_file=expected, exit_value=1,
        )
        self.assertEqual(json.loads(out)['witnesses'][0]['theory'], 'Classical')
        self.assertIn('deviate', err)

    @ddt.data(
        'Classical: [pass, fail]\n',
        'Classical:\n  local_equivalence: "pass"\n',
        'Classical:\n  local_equivalence: "pass"\n  es_purification: "maybe"\n',
        '',
    )
    def test_malformed_expectations(self, text):
        with self.assertRaises(ConfigurationException):
            self.run_command('check_postulates', levels='2', samples=2, expected_file=io.StringIO(text))

    def test_classify(self):
        report = self.run_json('classify', n='2..6')
        self.assertEqual(report['check'], 'classification_exclusion')
        self.assertEqual(report['details']['survivors']['6'], ['ComplexHerm(6)'])

    def test_classify_lookup(self):
        report = self.run_json('classify', rank=2, dim=25)
        self.assertEqual(report['details']['families'], ['Spin(25)'])

    @ddt.data({'n': '1..3'}, {'rank': 2}, {'n': 'two'}, {'n': '3..2'})
    def test_classify_usage_errors(self, kwargs):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('classify', **kwargs)
        self.assertEqual(ctx.exception.returncode, 2)

    @ddt.data({'tol': -1.0}, {'samples': 0}, {'backend': 'octonionic'}, {'format': 'xml'})
    def test_bad_run_flags(self, kwargs):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('law_check', **kwargs)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_law_check(self):
        report = self.run_json('law_check', backend='classical', samples=5, seed=2)
        self.assertEqual(report['verdict'], 'pass')
        self.assertEqual(report['samples'], 5)

    def test_purify_real(self):
        report = self.run_json('purify', backend='real', state='[[0.75, 0], [0, 0.25]]')
        self.assertEqual(report['backend'], 'RealQT')
        self.assertEqual(report['levels'], [2])
        self.assertEqual(report['details']['vector'], pytest.approx([0.75 ** 0.5, 0, 0, 0.5]))
        self.assertAlmostEqual(report['details']['zigzag_probability'], 3 / 16)

    def test_purify_random_state(self):
        report = self.run_json('purify', levels='3', seed=5)
        self.assertEqual(report['verdict'], 'pass')
        self.assertEqual(report['details']['purification']['algebra'], 'ComplexHerm(9)')

    @ddt.data(('[0.5, 0.5]', 1), ('[1, 0]', 0))
    @ddt.unpack
    def test_purify_classical(self, state, exit_value):
        out, _ = self.run_command('purify', backend='classical', state=state, exit_value=exit_value)
        report = json.loads(out)
        self.assertEqual(report['details']['purification_exists'], not exit_value)

    @ddt.data('[[1, 0]]', '[[1, 0], [0, 1]]', 'not a matrix')
    def test_purify_bad_state(self, state):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('purify', state=state)
        self.assertEqual(ctx.exception.returncode, 2)

    @ddt.data('[1, 0.5, -0.5]', '[0.5, 0.25]')
    def test_purify_classical_bad_state(self, state):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('purify', backend='classical', state=state)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_steer(self):
        report = self.run_json('steer', backend='complex', levels='3', outcomes=4, seed=11)
        self.assertEqual(report['verdict'], 'pass')
        self.assertEqual(len(report['details']['effects']), 4)
        self.assertEqual(report['samples'], 4)

    @ddt.data({'backend': 'classical'}, {'outcomes': 0})
    def test_steer_usage_errors(self, kwargs):
        with self.assertRaises(CommandError):
            self.run_command('steer', **kwargs)

    def test_circuit_eval(self):
        out, err = self.run_command(
            'circuit_eval', os.path.join(CIRCUITS, 'bell.optc'), bindings=os.path.join(CIRCUITS, 'bell.json'),
        )
        self.assertEqual(err.strip(), 'p = 0.5')
        report = json.loads(out)
        self.assertEqual(report['details']['results'], {'p': 0.5})

    def test_circuit_eval_reports_processes(self):
        out, _ = self.run_command(
            'circuit_eval', os.path.join(CIRCUITS, 'coarse_graining.optc'),
            bindings=os.path.join(CIRCUITS, 'primitives.yml'),
        )
        self.assertEqual(json.loads(out)['details']['results']['c'], {'process': '2 -> 1'})

    def run_circuit(self, program, bindings=None, exit_value=0):
        with tempfile.TemporaryDirectory() as tmp:
            source = os.path.join(tmp, 'program.optc')
            with open(source, 'w') as f:
                f.write(program)
            if bindings is None:
                manifest = os.path.join(CIRCUITS, 'primitives.yml')
            else:
                manifest = os.path.join(tmp, 'bindings.json')
                with open(manifest, 'w') as f:
                    json.dump(bindings, f)
            return self.run_command('circuit_eval', source, bindings=manifest, exit_value=exit_value)

    def test_circuit_eval_syntax_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_circuit('let q = ;\n')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('line 1, column 9', str(ctx.exception))

    def test_circuit_eval_duplicate_declaration(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_circuit('system A = 2;\nlet p = a0;\nlet p = a1;\n')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_circuit_eval_unknown_primitive(self):
        out, _ = self.run_circuit('system A = 2;\nsystem B = 2;\nlet p = nothing . zero;\n', exit_value=1)
        witness = json.loads(out)['witnesses'][0]
        self.assertEqual(witness['reason'], 'UnknownName')

    def test_circuit_eval_probability_out_of_range(self):
        bindings = {'primitives': {
            'zero': {'kind': 'state', 'systems': ['A'], 'matrix': [[1, 0], [0, 0]]},
            'twice': {'kind': 'effect', 'systems': ['A'], 'matrix': [[2, 0], [0, 0]]},
        }}
        out, err = self.run_circuit('system A = 2;\nlet p = twice . zero;\n', bindings, exit_value=1)
        self.assertEqual(err.strip(), 'p = 2')
        report = json.loads(out)
        self.assertEqual(report['witnesses'], [
            {'reason': 'probability_out_of_range', 'declaration': 'p', 'value': 2.0},
        ])

    def test_circuit_eval_missing_file(self):
        with self.assertRaises(CommandError):
            self.run_command('circuit_eval', 'missing.optc', bindings=os.path.join(CIRCUITS, 'bell.json'))

    @ddt.data('check_postulates', 'law_check')
    def test_reports_without_runtime_are_stable(self, cmd):
        first, _ = self.run_command(cmd, samples=2, seed=3, no_runtime=True, format='yaml')
        second, _ = self.run_command(cmd, samples=2, seed=3, no_runtime=True, format='yaml')
        self.assertEqual(first, second)
        self.assertIn('runtime_ms: null', first)

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'report.json')
            out, _ = self.run_command('classify', rank=3, dim=27, out=path)
            with open(path, encoding='UTF-8') as f:
                self.assertEqual(f.read(), out)
        self.assertEqual(json.loads(out)['details']['families'], ['OctHerm3'])


@pytest.mark.parametrize('text,levels', [
    ('2', [2]),
    ('2,3', [2, 3]),
    ('2..4', [2, 3, 4]),
    ('4, 2..3', [2, 3, 4]),
    ([3, 2], [2, 3]),
])
def test_parse_levels(text, levels):
    assert parse_levels(text) == levels


@pytest.mark.parametrize('text', ['', '0', 'a', '2..', '-1'])
def test_parse_levels_rejects(text):
    with pytest.raises(CommandError):
        parse_levels(text)


def test_default_expected_verdicts():
    table = read_expected_verdicts(
        os.path.join(os.path.dirname(__file__), '..', 'management', 'commands', 'expected_verdicts.yml')
    )
    assert table['RealQT'] == {'local_equivalence': 'fail', 'es_purification': 'pass'}
