"""Run Pool - seed-level parallelism over independent runs"""
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from config import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class RunPool:
    def __init__(self, jobs: Optional[int] = None):
        self.jobs = max(1, int(jobs or config.JOBS))

    def map(self, fn: Callable[[T], R], items: Sequence[T],
            progress: Optional[Callable[[int, int], None]] = None) -> List[R]:
        """Apply fn to every item; results come back in item order whatever finishes first"""
        total = len(items)
        if self.jobs == 1 or total <= 1:
            results = []
            for i, item in enumerate(items, 1):
                results.append(fn(item))
                if progress:
                    progress(i, total)
            return results

        logger.info(f"🔄 Running {total} jobs on {min(self.jobs, total)} workers")
        results: List[Optional[R]] = [None] * total
        with ProcessPoolExecutor(max_workers=min(self.jobs, total)) as executor:
            futures = {executor.submit(fn, item): idx for idx, item in enumerate(items)}
            done = 0
            for future in as_completed(futures):
                results[futures[future]] = future.result()
                done += 1
                if progress:
                    progress(done, total)
        return results
