from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = 'tiltlab-local-only-no-web-surface'

DEBUG = False

INSTALLED_APPS = [
    'driven.apps.DrivenConfig',
]

DATABASES = {}

LANGUAGE_CODE = 'ru-RU'

TIME_ZONE = 'Europe/Moscow'

USE_I18N = True

USE_TZ = True

# Lattice and drive.
TILTLAB_WINDOW_HALF_WIDTH = 60

TILTLAB_K_POINTS = 2 ** 12

# Integrators.
TILTLAB_RTOL = 1e-10

TILTLAB_ATOL = 1e-10

TILTLAB_EDGE_LEAK_TOL = 1e-6

TILTLAB_STEPS_PER_PERIOD = 40

TILTLAB_SAMPLES = 200

# Condition solvers.
TILTLAB_ROOT_TOL = 1e-12

TILTLAB_ZERO_TOL = 1e-10

TILTLAB_CDT_RATIO_TOL = 1e-3

TILTLAB_BRACKET_SCAN_POINTS = 64

# Transport protocol.
TILTLAB_FIDELITY_THRESHOLD = 0.5

# Upper bound on rtol/atol of the full model inside a protocol run.
TILTLAB_PROTOCOL_TOL = 1e-12

TILTLAB_WORKERS = 1

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'driven': {
            'handlers': ['stderr'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}
