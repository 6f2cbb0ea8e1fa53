import logging
from multiprocessing import Pool
from typing import Callable, Iterable, List, Optional, TypeVar

from core.config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

def ordered_map(func: Callable[[T], R], tasks: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Apply func to every task, results in task order regardless of worker count.

    func must be a module-level callable when workers > 1 (it is pickled).
    """
    tasks = list(tasks)
    workers = workers or get_settings().WORKERS
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]

    workers = min(workers, len(tasks))
    logger.debug(f"Dispatching {len(tasks)} tasks to {workers} workers")
    with Pool(processes=workers) as pool:
        return pool.map(func, tasks)
