"""
Django settings for the bogoscatter project.

The project has no web surface: Django provides the settings layer, the
management-command CLI and the test runner for the ``scattering`` app.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals (signing); nothing here is served.
SECRET_KEY = os.getenv('SECRET_KEY', 'bogoscatter-local-only')

DEBUG = os.getenv('DEBUG', 'False').lower() in ('true', '1', 'yes')

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'scattering',
]

# No models, so no database.
DATABASES = {}

USE_I18N = False

USE_TZ = True

TIME_ZONE = 'UTC'


# =============================================================================
# LOGGING
# =============================================================================

LOG_LEVEL = os.getenv('BOGOSCATTER_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'scattering': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


# =============================================================================
# BOGOSCATTER RUN DEFAULTS
# =============================================================================
# Lowest-precedence layer of the run config: command-line flags override a
# --config file, which overrides these.

BOGOSCATTER_CACHE_DIR = os.getenv(
    'BOGOSCATTER_CACHE_DIR', str(BASE_DIR / '.bogoscatter-cache')
)

BOGOSCATTER_DEFAULTS = {
    # quadrature
    'rel_tol': 1e-6,
    'abs_tol': 1e-12,
    'e_max': 40.0,
    'max_subdivisions': 200,
    # modes
    'kernel_form': 'as-printed',
    'dos_form': 'derived',
    'alpha_s_mode': 'consistent',
    # energy grids
    'points': 200,
    'emin_frac': 1e-4,
    'emax': 1e3,
    'population_points': 48,
    'threshold': 1.05,
    # monte carlo
    'samples': 1000000,
    'seed': 42,
    # worker pool; 0 means available parallelism
    'threads': 0,
}
