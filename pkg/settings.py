"""
Test settings for the opt-foundry app.
"""
import os

from django.utils.crypto import get_random_string

DEBUG = True

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': 'opt_foundry_db.sqlite3',
        'TEST': {
            'NAME': 'opt_foundry_test_db',
        }
    },
}

USE_TZ = True

SECRET_KEY = get_random_string(50, 'abcdefghijklmnopqrstuvwxyz0123456789!@#$%^&*(-_=+)')

INSTALLED_APPS = (
    'django.contrib.contenttypes',
    'opt_foundry',
)

OPT_FOUNDRY = {
    'TOLERANCE': 1e-9,
    'CONE_TOLERANCE': 1e-9,
    'CHECK_TOLERANCE': 1e-8,
    'LAW_TOLERANCE': 1e-10,
    'SAMPLES': 20,
    'PROBES': 100,
    'SEED': int(os.environ.get('OPT_FOUNDRY_SEED', 0)),
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
        },
    },
    'loggers': {
        'opt_foundry': {
            'handlers': ['console'],
            'level': os.environ.get('OPT_FOUNDRY_LOG_LEVEL', 'WARNING'),
        },
    },
}
