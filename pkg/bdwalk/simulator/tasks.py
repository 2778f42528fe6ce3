from bdwalk.celery import celery
from bdwalk.simulator.config import WalkConfig
from bdwalk.simulator.engine import simulate_batch

from celery.utils.log import get_task_logger

logger = get_task_logger(__name__)


@celery.task
def simulate_chunk(config, first, count, checkpoints=None, cells=None):
    """ Task to simulate a contiguous range of replicas

    Arguments and result are plain JSON data; the result is a serialised
    Batch. """
    cfg = WalkConfig.from_dict(config)
    batch = simulate_batch(cfg, first, count, checkpoints=checkpoints, cells=cells)
    logger.info('simulated replicas %d..%d', first, first + count - 1)
    return batch.to_dict()
