import sys
import os.path


BASE_DIR = os.path.dirname(os.path.abspath(__file__))


def get_bool(name, default):
    return os.getenv(name, str(default)).lower() == 'true'


def get_intOrNone(name, default):
    """ Parses the env variable, accepts ints and literal None"""
    value = os.getenv(name, str(default))
    if value.lower() == 'none':
        return None
    return int(value)


def get_float(name, default):
    return float(os.getenv(name, str(default)))


DEBUG = get_bool('DEBUG', False)

# no models are stored; results are written to files
DATABASES = {}

TIME_ZONE = 'UTC'

USE_I18N = False

INSTALLED_APPS = [
    'bdwalk.core',
    'bdwalk.drift',
    'bdwalk.classifier',
    'bdwalk.oracle',
    'bdwalk.simulator',
    'bdwalk.experiments',
]


SECRET_KEY = os.getenv('SECRET_KEY', 'bdwalk-not-secret')

if 'pytest' in sys.argv[0]:
    SECRET_KEY = 'test'


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {'format': '%(asctime)s %(name)s %(levelname)s %(message)s'}
    },
    'handlers': {
        'console': {
            'level': os.getenv('LOGGING_CONSOLE_LEVEL', 'DEBUG'),
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        }
    },
    'loggers': {
        'django': {
            'handlers': os.getenv('LOGGING_DJANGO_HANDLERS', 'console').split(),
            'propagate': True,
            'level': os.getenv('LOGGING_DJANGO_LEVEL', 'WARN'),
        },
        'bdwalk': {
            'handlers': os.getenv('LOGGING_BDWALK_HANDLERS', 'console').split(),
            'level': os.getenv('LOGGING_BDWALK_LEVEL', 'WARN'),
        },
        'celery': {
            'handlers': os.getenv('LOGGING_CELERY_HANDLERS', 'console').split(),
            'level': os.getenv('LOGGING_CELERY_LEVEL', 'WARN'),
        },
    },
}

_use_log_file = bool(os.getenv('LOGGING_FILENAME', False))

if _use_log_file:
    LOGGING['handlers']['file'] = {
        'level': 'INFO',
        'class': 'logging.handlers.RotatingFileHandler',
        'filename': os.getenv('LOGGING_FILENAME'),
        'maxBytes': 10_000_000,
        'backupCount': 10,
        'formatter': 'verbose',
    }


# Directory into which the command line tools write their results when no
# --output is given. None means results are written to stdout.
OUTPUT_DIR = os.getenv('OUTPUT_DIR', None)


### Classification

# minimum distance of the witness constant c from 1
DEFAULT_MARGIN = get_float('DEFAULT_MARGIN', 0.05)

# range of n in which the tail of a criterion is scanned
DEFAULT_N_LO = int(os.getenv('DEFAULT_N_LO', 16))
DEFAULT_N_HI = int(os.getenv('DEFAULT_N_HI', 2 ** 20))


### Simulation

# number of replicas that are simulated by one task
ENSEMBLE_CHUNK_SIZE = int(os.getenv('ENSEMBLE_CHUNK_SIZE', 1000))

# number of grid points of a sweep that are evaluated by one task
SWEEP_CHUNK_SIZE = int(os.getenv('SWEEP_CHUNK_SIZE', 8))

# number of uniforms that are drawn at once from each replica's stream
UNIFORM_BLOCK_SIZE = int(os.getenv('UNIFORM_BLOCK_SIZE', 4096))

# maximum number of replicas for which per-replica rows are kept in
# ensemble results; None keeps all of them
MAX_REPLICA_ROWS = get_intOrNone('MAX_REPLICA_ROWS', 100000)


### Celery

CELERY_BROKER_URL = os.getenv('BROKER_URL', 'redis://localhost')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://localhost')

CELERY_RESULT_EXPIRES = 60 * 60  # 1h expiry time in seconds

CELERY_ACCEPT_CONTENT = ['json']

# Tasks are executed in-process unless a worker setup is configured
CELERY_TASK_ALWAYS_EAGER = get_bool('CELERY_TASK_ALWAYS_EAGER', True)


### Sentry

try:
    import sentry_sdk
    from sentry_sdk.integrations.django import DjangoIntegration
    from sentry_sdk.integrations.celery import CeleryIntegration

    # Sentry Data Source Name (DSN)
    sentry_dsn = os.getenv('SENTRY_DSN', '')
    if not sentry_dsn:
        raise ValueError('Could not set up sentry because SENTRY_DSN is not set')

    sentry_sdk.init(
        dsn=sentry_dsn, integrations=[DjangoIntegration(), CeleryIntegration()]
    )

except (ImportError, ValueError):
    pass
