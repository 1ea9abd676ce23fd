"""
Postulate checkers: local equivalence, ES purification, the exclusion argument that leaves
only complex quantum theory, and the table contrasting the three backends.
"""
import itertools
import logging

import numpy as np

from opt_foundry import eja
from opt_foundry.conf import get_setting
from opt_foundry.purification import PurificationError, purification_exists, purify, rotate_purifier, uniqueness_unitary
from opt_foundry.reports import FAIL, PASS, CheckReport, Stopwatch, merge_reports, verdict_for
from opt_foundry.sampling import haar_orthogonal, haar_unitary, make_rng, resolve_seed
from opt_foundry.theories import (
    BackendKind,
    Channel,
    dimension_identity_check,
    get_backend,
    is_reversible,
    locally_equivalent,
    product_tomography_witness,
)

log = logging.getLogger(__name__)

LOCAL_EQUIVALENCE = 'local_equivalence'
ES_PURIFICATION = 'es_purification'

EXPECTED_TABLE = {
    'Classical': {LOCAL_EQUIVALENCE: PASS, ES_PURIFICATION: FAIL},
    'RealQT': {LOCAL_EQUIVALENCE: FAIL, ES_PURIFICATION: PASS},
    'ComplexQT': {LOCAL_EQUIVALENCE: PASS, ES_PURIFICATION: PASS},
}

SPIN_CANDIDATES = (5, 7, 8, 9, 10, 11, 12)


def _require_levels(levels):
    levels = sorted(set(int(level) for level in levels))
    if not levels:
        raise ValueError('At least one level is required')
    if levels[0] < 1:
        raise ValueError(f'Levels must be positive, got {levels[0]}')
    return levels


def check_local_equivalence(backend, levels, tol=None):
    """
    Local tomography on every pair of levels: ``d_AB = d_A d_B`` and no pair of composite
    states shares all product-effect statistics.
    """
    backend = get_backend(backend)
    levels = _require_levels(levels)
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    watch = Stopwatch()
    log.info('Checking local equivalence for %s on levels %s', backend.label, levels)

    witnesses = []
    pairs = []
    for n_a, n_b in itertools.combinations_with_replacement(levels, 2):
        A, B = backend.system(n_a), backend.system(n_b)
        dims = dimension_identity_check(backend, A, B)
        witness = product_tomography_witness(backend, A, B, tol)
        pairs.append({'levels': [n_a, n_b], 'dimension_identity': dims.verdict, **dims.details})
        if witness is not None:
            witnesses.append({
                'levels': [n_a, n_b],
                'd_AB': dims.details['d_AB'],
                'd_A_d_B': dims.details['d_A'] * dims.details['d_B'],
                'product_effect_span_rank': witness.span_rank,
                'rho_plus': witness.rho_plus,
                'rho_minus': witness.rho_minus,
            })
        elif not dims.passed:
            witnesses.extend(dims.witnesses)

    if witnesses:
        log.error('%s fails local equivalence: %s witness(es)', backend.label, len(witnesses))
    return CheckReport(
        check=LOCAL_EQUIVALENCE,
        backend=backend.label,
        levels=levels,
        verdict=verdict_for(not witnesses),
        witnesses=witnesses,
        tolerances={'check': tol},
        samples=len(pairs),
        runtime_ms=watch.elapsed_ms,
        details={'pairs': pairs},
    )


def _purifier_rotation(backend, level, rng):
    if backend.real:
        return haar_orthogonal(level, rng)
    return haar_unitary(level, rng)


def check_es_purification(backend, levels, n_samples=None, seed=None, tol=None):
    """
    Existence of a purification on an equivalent system for sampled states, and for the
    quantum backends uniqueness up to a reversible channel on the purifying system.

    Samples start with the maximally mixed state of each level.
    """
    backend = get_backend(backend)
    levels = _require_levels(levels)
    n_samples = get_setting('SAMPLES') if n_samples is None else n_samples
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    seed = resolve_seed(seed)
    rng = make_rng(seed)
    watch = Stopwatch()
    log.info('Checking ES purification for %s on levels %s (%s samples, seed %s)',
             backend.label, levels, n_samples, seed)

    witnesses = []
    for level in levels:
        states = [backend.maximally_mixed(level)]
        states += [backend.random_state(level, rng) for _ in range(max(0, n_samples - 1))]
        for rho in states:
            if not purification_exists(backend, rho):
                witnesses.append({'level': level, 'reason': 'no_purification', 'state': rho})
                break
            if backend.kind == BackendKind.CLASSICAL:
                continue
            pair = purify(backend, rho)
            other = rotate_purifier(backend, pair.state, _purifier_rotation(backend, level, rng))
            try:
                channel = uniqueness_unitary(backend, pair.state, other, tol)
            except PurificationError as e:
                witnesses.append({'level': level, 'reason': 'not_unique', 'state': rho, 'error': str(e)})
                break
            if not is_reversible(channel, tol):
                witnesses.append({'level': level, 'reason': 'not_reversible', 'state': rho})
                break

    if witnesses:
        log.error('%s fails ES purification: %s', backend.label, [w['reason'] for w in witnesses])
    return CheckReport(
        check=ES_PURIFICATION,
        backend=backend.label,
        levels=levels,
        verdict=verdict_for(not witnesses),
        witnesses=witnesses,
        tolerances={'check': tol},
        seed=seed,
        samples=n_samples,
        runtime_ms=watch.elapsed_ms,
    )


def _candidates(n):
    out = [eja.tag(eja.REAL_SYM, n), eja.tag(eja.COMPLEX_HERM, n), eja.tag(eja.QUAT_HERM, n)]
    if n == 2:
        out += [eja.tag(eja.SPIN, d) for d in SPIN_CANDIDATES]
    if n == 3:
        out.append(eja.tag(eja.OCT_HERM3))
    return out


def _inequality(candidate, r, d, dims):
    if candidate.name == eja.REAL_SYM:
        return {'relation': 'd < r(r+1)/2', 'lhs': d, 'rhs': r * (r + 1) // 2, 'holds': d < r * (r + 1) // 2}
    if candidate.name == eja.QUAT_HERM:
        return {'relation': 'd > r(2r-1)', 'lhs': d, 'rhs': r * (2 * r - 1), 'holds': d > r * (2 * r - 1)}
    if candidate.name == eja.COMPLEX_HERM:
        return {'relation': 'd = r^2', 'lhs': d, 'rhs': r * r, 'holds': d == r * r}
    return {'relation': 'd not in dims', 'lhs': d, 'rhs': dims, 'holds': d not in dims}


def exclusion_record(n, candidate):
    """
    Composite (rank, dimension) forced by ``n_AB = n_A n_B`` and ``d_AB = d_A d_B`` for a
    candidate algebra of rank ``n``, and the simple algebras that fit it.
    """
    candidate_dim = eja.make_algebra(candidate).dim
    r, d = n * n, candidate_dim * candidate_dim
    dims = sorted(dim for dim, _ in eja.simple_dimensions(r))
    survivors = [str(family) for family in eja.classify_simple(r, d)]
    dims_key = f'rank{r}_dims'
    return {
        'n': n,
        'candidate': str(candidate),
        'candidate_dim': candidate_dim,
        'composite_rank': r,
        'composite_dim': d,
        'dims_key': dims_key,
        dims_key: dims,
        'survivors': survivors,
        'excluded': not survivors,
        'inequality': _inequality(candidate, r, d, dims),
    }


def classification_exclusion(n_values):
    """
    For every ``n``, only ``ComplexHerm(n)`` has a composite that is again a simple algebra.
    """
    n_values = sorted(set(int(n) for n in n_values))
    if not n_values:
        raise ValueError('At least one value of n is required')
    if n_values[0] < 2:
        raise ValueError(f'classification_exclusion requires n >= 2, got {n_values[0]}')
    watch = Stopwatch()
    log.info('Running classification exclusion for n in %s', n_values)

    records, witnesses, survivors = [], [], {}
    for n in n_values:
        expected = str(eja.tag(eja.COMPLEX_HERM, n))
        kept = []
        for candidate in _candidates(n):
            record = exclusion_record(n, candidate)
            records.append(record)
            if not record['excluded']:
                kept.append(record['candidate'])
            if not record['inequality']['holds']:
                witnesses.append(record)
        survivors[str(n)] = kept
        if kept != [expected]:
            witnesses.append({'n': n, 'survivors': kept, 'expected': [expected]})

    if witnesses:
        log.error('Classification exclusion deviates: %s', witnesses)
    return CheckReport(
        check='classification_exclusion',
        backend='EJA',
        levels=n_values,
        verdict=verdict_for(not witnesses),
        witnesses=witnesses,
        samples=len(records),
        runtime_ms=watch.elapsed_ms,
        details={'records': records, 'survivors': survivors},
    )


def postulate_table(levels, n_samples=None, seed=None, tol=None, expected=None, backends=None):
    """
    Run both postulate checks on each backend and compare against ``expected``
    (``EXPECTED_TABLE`` by default); the verdict is whether every row matches.
    """
    levels = _require_levels(levels)
    expected = EXPECTED_TABLE if expected is None else expected
    backends = [get_backend(b) for b in (backends or BackendKind)]
    seed = resolve_seed(seed)
    watch = Stopwatch()

    rows, reports, witnesses, deviations = [], [], [], []
    for backend in backends:
        le = check_local_equivalence(backend, levels, tol)
        es = check_es_purification(backend, levels, n_samples, seed, tol)
        reports += [le, es]
        row = {'theory': backend.label, LOCAL_EQUIVALENCE: le.verdict, ES_PURIFICATION: es.verdict}
        rows.append(row)
        for report in (le, es):
            witnesses += [{'theory': backend.label, 'check': report.check, 'witness': w} for w in report.witnesses]
        wanted = expected.get(backend.label)
        if wanted is not None and any(row[key] != wanted[key] for key in (LOCAL_EQUIVALENCE, ES_PURIFICATION)):
            deviations.append({'theory': backend.label, 'observed': row, 'expected': wanted})

    for deviation in deviations:
        log.error('Postulate table row deviates: %s', deviation)
    return CheckReport(
        check='postulate_table',
        backend=','.join(b.label for b in backends),
        levels=levels,
        verdict=verdict_for(not deviations),
        witnesses=deviations,
        tolerances={'check': get_setting('CHECK_TOLERANCE') if tol is None else tol},
        seed=seed,
        samples=get_setting('SAMPLES') if n_samples is None else n_samples,
        runtime_ms=watch.elapsed_ms,
        details={'table': rows, 'failure_witnesses': witnesses, 'checks': merge_reports(reports)},
    )


def process_equivalence_spot_check(backend='complex', level=2, seed=None, tol=None):
    """
    Two Kraus presentations of one process agree on all basis states and effects, and then
    agree as maps even when run alongside an ancilla; an unrelated process is told apart.
    """
    backend = get_backend(backend)
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    seed = resolve_seed(seed)
    rng = make_rng(seed)
    watch = Stopwatch()

    if backend.kind == BackendKind.CLASSICAL:
        raise ValueError('Kraus presentations need a quantum backend')
    kraus = _random_kraus(backend, level, rng)
    mixing = _purifier_rotation(backend, len(kraus), rng)
    mixed = [sum(mixing[i, j] * kraus[j] for j in range(len(kraus))) for i in range(len(kraus))]
    f, g = Channel.from_kraus(backend, kraus), Channel.from_kraus(backend, mixed)
    other = Channel.random(backend, level, level, rng)

    ancilla = Channel.identity(backend, level)
    agree = locally_equivalent(f, g, tol)
    extended = f.tensor(ancilla).allclose(g.tensor(ancilla), tol)
    separated = not locally_equivalent(f, other, tol)
    ok = agree and extended and separated
    witnesses = [] if ok else [{'locally_equivalent': agree, 'equal_on_composite': extended,
                                'control_separated': separated}]
    return CheckReport(
        check='process_equivalence',
        backend=backend.label,
        levels=[level],
        verdict=verdict_for(ok),
        witnesses=witnesses,
        tolerances={'check': tol},
        seed=seed,
        samples=1,
        runtime_ms=watch.elapsed_ms,
    )


def _random_kraus(backend, level, rng, count=2):
    G = rng.standard_normal((level * count, level))
    if not backend.real:
        G = G + 1j * rng.standard_normal((level * count, level))
    V, _ = np.linalg.qr(G)
    return [V[k * level:(k + 1) * level] for k in range(count)]
