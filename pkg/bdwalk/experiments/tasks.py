from celery.utils.log import get_task_logger

from bdwalk.celery import celery
from bdwalk.experiments.spec import parse_spec
from bdwalk.experiments.sweep import evaluate_range

logger = get_task_logger(__name__)


@celery.task
def evaluate_points(spec, first, count):
    """ Records of the grid points first .. first + count - 1 of a sweep """
    spec = parse_spec(spec)
    logger.info(
        'evaluating grid points %d..%d of %s', first, first + count - 1, spec.name
    )
    return evaluate_range(spec, first, count)
