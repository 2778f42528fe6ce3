import pytest

from bdwalk.celery import celery


@pytest.fixture(autouse=True)
def eager_celery():
    """ Run all celery tasks in-process

    Ensembles and sweeps dispatch celery groups; in tests they run eagerly
    so that no broker is needed. """
    previous = celery.conf.task_always_eager
    celery.conf.task_always_eager = True
    yield
    celery.conf.task_always_eager = previous
