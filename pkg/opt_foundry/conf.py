"""
Access to opt_foundry settings.

Values come from the ``OPT_FOUNDRY`` dict in Django settings when Django is configured,
otherwise from the defaults below. The library never requires Django to be set up.
"""
import os

DEFAULTS = {
    'TOLERANCE': 1e-9,
    'CONE_TOLERANCE': 1e-9,
    'CHECK_TOLERANCE': 1e-8,
    'LAW_TOLERANCE': 1e-10,
    'SAMPLES': 50,
    'PROBES': 200,
    'SEED': int(os.environ.get('OPT_FOUNDRY_SEED', 0)),
}


def get_setting(name):
    """
    Return the configured value for ``name``.

    Raises:
        KeyError if ``name`` is not a known setting.
    """
    default = DEFAULTS[name]
    try:
        from django.conf import settings
        if not settings.configured:
            return default
        overrides = getattr(settings, 'OPT_FOUNDRY', {}) or {}
    except ImportError:  # pragma: no cover
        return default
    return overrides.get(name, default)
