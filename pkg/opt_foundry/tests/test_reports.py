import json

import numpy as np
import pytest
import yaml

from opt_foundry import eja
from opt_foundry.reports import (
    CHECK_MARK,
    CROSS_MARK,
    FAIL,
    PASS,
    CheckReport,
    ReportError,
    deserialize_element,
    emit_report,
    load_report,
    merge_reports,
    plain,
    serialize_element,
    strip_runtime,
    verdict_for,
)


def make_report(**kwargs):
    data = dict(check='dimension_identity', backend='RealQT', levels=[2], verdict=FAIL,
                witnesses=[{'d_A': 3, 'd_B': 3, 'd_AB': 10, 'deficit': 1}],
                tolerances={'check': 1e-8}, seed=0, samples=1, runtime_ms=1.5)
    data.update(kwargs)
    return CheckReport(**data)


def test_failures_need_witnesses():
    with pytest.raises(ReportError):
        make_report(witnesses=[])
    with pytest.raises(ReportError):
        make_report(verdict='maybe')


def test_verdicts():
    assert verdict_for(True) == PASS
    assert verdict_for(False) == FAIL
    assert make_report(verdict=PASS, witnesses=[]).passed


def test_json_round_trip():
    report = make_report()
    text = emit_report(report, 'json')
    assert text.endswith('\n')
    assert json.loads(text)['witnesses'][0]['deficit'] == 1
    assert load_report(text) == report


def test_yaml_round_trip():
    report = make_report(details={'note': 'line one\nline two'})
    text = emit_report(report, 'yaml')
    assert 'note: |' in text
    assert yaml.safe_load(text)['check'] == 'dimension_identity'
    assert load_report(text) == report


def test_markdown_table():
    rows = [
        {'theory': 'Classical', 'local_equivalence': PASS, 'es_purification': FAIL},
        {'theory': 'ComplexQT', 'local_equivalence': PASS, 'es_purification': PASS},
    ]
    report = make_report(check='postulate_table', details={'table': rows})
    text = emit_report(report, 'md')
    assert text.startswith('## postulate_table')
    assert f'| Classical | {CHECK_MARK} | {CROSS_MARK} |' in text
    assert f'| ComplexQT | {CHECK_MARK} | {CHECK_MARK} |' in text
    assert '### Witnesses' in text


def test_markdown_exclusion_records():
    record = {'n': 3, 'candidate': 'OctHerm3', 'composite_rank': 9, 'composite_dim': 729,
              'dims_key': 'rank9_dims', 'rank9_dims': [45, 81, 153], 'excluded': True}
    text = emit_report(make_report(verdict=PASS, witnesses=[], details={'records': [record]}), 'md')
    assert '| 3 | OctHerm3 | 9 | 729 | 45, 81, 153 | yes |' in text
    assert '### Witnesses' not in text


def test_unknown_format():
    with pytest.raises(ReportError):
        emit_report(make_report(), 'xml')


def test_unparseable_reports():
    with pytest.raises(ReportError):
        load_report('[1, 2]')
    with pytest.raises(ReportError):
        load_report('{"check": "x"}')


def test_element_serialization():
    alg = eja.make_algebra('Spin(3)')
    x = alg.element([1.0, 0.5, -0.25])
    data = serialize_element(x)
    assert data == {'algebra': 'Spin(3)', 'coords': [1.0, 0.5, -0.25]}
    assert deserialize_element(data).allclose(x)
    assert plain({'witness': x}) == {'witness': data}


def test_plain_values():
    assert plain(np.array([1, 2])) == [1, 2]
    assert plain(np.array([1 + 2j])) == {'real': [1.0], 'imag': [2.0]}
    assert plain(1 - 1j) == {'real': 1.0, 'imag': -1.0}
    assert plain((np.int64(3), np.float64(0.5), np.bool_(True))) == [3, 0.5, True]
    assert plain({1: eja.tag(eja.COMPLEX_HERM, 2)}) == {'1': 'ComplexHerm(2)'}


def test_strip_runtime():
    inner = make_report(verdict=PASS, witnesses=[], runtime_ms=2.0)
    report = make_report(runtime_ms=9.0, details={'checks': merge_reports([inner])})
    stripped = strip_runtime(report)
    assert stripped.runtime_ms is None
    assert stripped.details['checks'][0]['runtime_ms'] is None
    assert emit_report(stripped) == emit_report(strip_runtime(make_report(runtime_ms=1.0, details={
        'checks': merge_reports([make_report(verdict=PASS, witnesses=[], runtime_ms=7.0)])
    })))


def test_merge_orders_by_check_then_backend():
    reports = [
        make_report(check='b', backend='RealQT'),
        make_report(check='a', backend='RealQT'),
        make_report(check='a', backend='Classical'),
    ]
    assert [(r['check'], r['backend']) for r in merge_reports(reports)] == [
        ('a', 'Classical'), ('a', 'RealQT'), ('b', 'RealQT'),
    ]
