import os

from django.conf import settings
from django.core.checks import register, Error, Warning


POSITIVE_INTS = (
    'DEFAULT_N_LO',
    'DEFAULT_N_HI',
    'ENSEMBLE_CHUNK_SIZE',
    'SWEEP_CHUNK_SIZE',
    'UNIFORM_BLOCK_SIZE',
)


@register()
def check_numeric_settings(app_configs=None, **kwargs):
    errors = []

    for name in POSITIVE_INTS:
        value = getattr(settings, name, None)
        if not isinstance(value, int) or value < 1:
            txt = '{0} must be a positive integer, got {1!r}'.format(name, value)
            errors.append(Error(txt, id='core.E001'))

    if not settings.DEFAULT_N_LO < settings.DEFAULT_N_HI:
        txt = 'DEFAULT_N_LO ({0}) must be smaller than DEFAULT_N_HI ({1})'.format(
            settings.DEFAULT_N_LO, settings.DEFAULT_N_HI
        )
        errors.append(Error(txt, id='core.E002'))

    if not 0 < settings.DEFAULT_MARGIN < 1:
        txt = 'DEFAULT_MARGIN must lie in (0, 1), got {0!r}'.format(
            settings.DEFAULT_MARGIN
        )
        errors.append(Error(txt, id='core.E003'))

    return errors


@register()
def check_output_dir(app_configs=None, **kwargs):
    errors = []

    output_dir = settings.OUTPUT_DIR
    if output_dir and os.path.exists(output_dir) and not os.path.isdir(output_dir):
        txt = 'OUTPUT_DIR {0} exists but is not a directory'.format(output_dir)
        errors.append(Error(txt, id='core.E004'))

    elif output_dir and not os.path.exists(output_dir):
        txt = 'OUTPUT_DIR {0} does not exist; it will be created'.format(output_dir)
        errors.append(Warning(txt, id='core.W001'))

    return errors
