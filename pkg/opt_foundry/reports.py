"""
Structured check outcomes and their serialization.

A ``CheckReport`` is what every checker returns and what every management command prints.
It serializes to JSON (sorted keys, two-space indent), YAML (block style) or a Markdown
summary; the postulate table renders with check marks.
"""
import enum
import json
import logging
from dataclasses import asdict, dataclass, field
from timeit import default_timer
from typing import Optional

import numpy as np
import yaml

log = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
FORMATS = ('json', 'md', 'yaml')

CHECK_MARK = '✓'
CROSS_MARK = '✗'


class ReportError(ValueError):
    pass


def plain(value):
    """
    Convert numpy data, algebra elements and tags into JSON/YAML-safe Python values.

    Complex arrays become ``{'real': [...], 'imag': [...]}``.
    """
    # Imported here; eja imports nothing from this module but keeps reports usable standalone.
    from opt_foundry.eja import Element, FamilyTag

    if isinstance(value, Element):
        return serialize_element(value)
    if isinstance(value, FamilyTag):
        return str(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return {'real': value.real.tolist(), 'imag': value.imag.tolist()}
        return value.tolist()
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {'real': float(value.real), 'imag': float(value.imag)}
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def serialize_element(x):
    """
    Witness form of an Element: the algebra descriptor and its coordinate array.
    """
    return {'algebra': str(x.algebra.family), 'coords': [float(c) for c in x.coords]}


def deserialize_element(data):
    from opt_foundry.eja import Element, make_algebra
    return Element(make_algebra(data['algebra']), data['coords'])


@dataclass
class CheckReport:
    check: str
    backend: str
    levels: list
    verdict: str
    witnesses: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    seed: Optional[int] = None
    samples: int = 0
    runtime_ms: Optional[float] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL):
            raise ReportError(f'Unknown verdict: {self.verdict!r}')
        if self.verdict == FAIL and not self.witnesses:
            raise ReportError(f'Check {self.check} failed without a witness')
        self.levels = list(self.levels)
        self.witnesses = plain(list(self.witnesses))
        self.tolerances = plain(dict(self.tolerances))
        self.details = plain(dict(self.details))

    @property
    def passed(self):
        return self.verdict == PASS

    def to_dict(self):
        return plain(asdict(self))

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**data)
        except TypeError as e:
            raise ReportError(f'Malformed report: {e}')


def verdict_for(ok):
    return PASS if ok else FAIL


class Stopwatch:
    """
    Wall-clock timing of a check in milliseconds.
    """

    def __init__(self):
        self._timer = default_timer
        self._start = self._timer()

    @property
    def elapsed_ms(self):
        return (self._timer() - self._start) * 1000.0


def merge_reports(reports):
    """
    Sub-reports as dicts, ordered by check name then backend.
    """
    return [r.to_dict() for r in sorted(reports, key=lambda r: (r.check, r.backend))]


def strip_runtime(report):
    """
    Remove every runtime field so fixed-seed output is byte-stable.
    """
    data = report.to_dict()

    def _strip(obj):
        if isinstance(obj, dict):
            return {k: (None if k == 'runtime_ms' else _strip(v)) for k, v in obj.items()}
        if isinstance(obj, list):
            return [_strip(v) for v in obj]
        return obj
    return CheckReport.from_dict(_strip(data))


def dump_report_yaml(data):
    """
    Serialize to yaml using block style throughout, multi-line strings as literal blocks.
    """
    class ReportDumper(yaml.SafeDumper):
        pass

    def str_formatter(dumper, value):
        style = '|' if '\n' in value else None
        return dumper.represent_scalar('tag:yaml.org,2002:str', value, style=style)
    ReportDumper.add_representer(str, str_formatter)

    return yaml.dump(data, Dumper=ReportDumper, default_flow_style=False, sort_keys=True, allow_unicode=True)


def _mark(verdict):
    return CHECK_MARK if verdict == PASS else CROSS_MARK


def render_markdown(report):
    lines = [f'## {report.check}', '']
    lines.append(f'- backend: {report.backend}')
    lines.append(f'- levels: {", ".join(str(level) for level in report.levels)}')
    lines.append(f'- verdict: {report.verdict}')
    lines.append(f'- seed: {report.seed}')
    lines.append(f'- samples: {report.samples}')
    lines.append('')

    table = report.details.get('table')
    if table:
        lines.append('| Theory | Local equivalence | ES purification |')
        lines.append('|---|---|---|')
        for row in table:
            lines.append('| {} | {} | {} |'.format(
                row['theory'], _mark(row['local_equivalence']), _mark(row['es_purification'])
            ))
        lines.append('')

    records = report.details.get('records')
    if records:
        lines.append('| n | candidate | composite rank | composite dim | simple dims at that rank | excluded |')
        lines.append('|---|---|---|---|---|---|')
        for record in records:
            lines.append('| {} | {} | {} | {} | {} | {} |'.format(
                record['n'],
                record['candidate'],
                record['composite_rank'],
                record['composite_dim'],
                ', '.join(str(d) for d in record[record['dims_key']]),
                'yes' if record['excluded'] else 'no',
            ))
        lines.append('')

    if report.witnesses:
        lines.append('### Witnesses')
        lines.append('')
        lines.append('```json')
        lines.append(json.dumps(report.witnesses, sort_keys=True, indent=2))
        lines.append('```')
        lines.append('')
    return '\n'.join(lines)


def emit_report(report, fmt='json'):
    """
    Serialize ``report`` in one of ``FORMATS``.
    """
    if fmt == 'json':
        return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + '\n'
    if fmt == 'yaml':
        return dump_report_yaml(report.to_dict())
    if fmt == 'md':
        return render_markdown(report)
    raise ReportError(f'Unknown report format: {fmt!r}')


def load_report(text):
    """
    Parse emitted JSON or YAML back into a CheckReport.
    """
    try:
        data = json.loads(text)
    except ValueError:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ReportError(f'Unable to parse report: {e}')
    if not isinstance(data, dict):
        raise ReportError('Report must be a mapping')
    return CheckReport.from_dict(data)
