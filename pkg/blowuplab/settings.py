"""
Django settings for the blowuplab project.

Numerical defaults for every app live in the ``BLOWUPLAB`` dictionary below.
Library functions read them at call time, so ``override_settings`` works in tests.

For more information on this file, see
https://docs.djangoproject.com/en/3.1/topics/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve(strict=True).parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'blowuplab-local-only-0b7d1c5e2f')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = ['localhost', '127.0.0.1', 'blowuplab.local']


# Application definition

INSTALLED_APPS = [
    'params.apps.ParamsConfig',
    'profiles.apps.ProfilesConfig',
    'spectral.apps.SpectralConfig',
    'coupling.apps.CouplingConfig',
    'rates.apps.RatesConfig',
    'meshsim.apps.MeshsimConfig',
    'runs.apps.RunsConfig',
    'rest_framework',
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'blowuplab.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'blowuplab.wsgi.application'


# Database
# https://docs.djangoproject.com/en/3.1/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'data/db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'


# Internationalization
# https://docs.djangoproject.com/en/3.1/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)
# https://docs.djangoproject.com/en/3.1/howto/static-files/

STATIC_URL = '/static/'

# Rest framework
REST_FRAMEWORK = {
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny'
    ],
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer'
    ]
}

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.environ.get('BLOWUPLAB_LOG_LEVEL', 'INFO'),
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
    },
}

# Numerical laboratory
BLOWUPLAB = {
    'OUTPUT_ROOT': Path(os.environ.get('BLOWUPLAB_OUT', BASE_DIR / 'data' / 'runs')),
    'NEUTRAL_TOLERANCE': 1e-12,
    'PROFILE': {
        'TOLERANCE': 1e-12,
        'GRID_STEP': 5e-3,
        'TAIL_WINDOW': 0.3,
        'TAIL_DECAY': 1e-10,
        'MAX_CONDITION': 1e8,
    },
    'SPECTRAL': {
        'NODES': 200,
        'MAX_NODES': 1600,
        'ORTHONORMALITY_TOLERANCE': 1e-8,
        'TAIL_TOLERANCE': 1e-10,
        'QUAD_LIMIT': 500,
    },
    'COUPLING': {
        'RELATIVE_TOLERANCE': 1e-11,
        'QUAD_LIMIT': 500,
    },
    'RATES': {
        'S_MAX': 60.0,
        'SAMPLES': 6001,
        'TOLERANCE': 1e-11,
        'MAX_EPSILON0': 0.1,
    },
    'MESHSIM': {
        'LENGTH': 2.0,
        'NODES': 201,
        'MONITOR_FLOOR': 1.0,
        'UNIFORM_FRACTION': 0.1,
        'SMOOTHING_PASSES': 2,
        'MESH_RELAXATION': 0.1,
        'RTOL': 1e-6,
        'ATOL': 1e-9,
        'MAX_GRADIENT': 1e8,
        'T_MAX': 1.0,
        'ENERGY_TOLERANCE': 1e-6,
        'MAX_RESTARTS': 3,
        'POWER_DECADES': 3.0,
        'LOG_EFOLDINGS': 6.0,
        'WORKERS': 3,
    },
}
