"""Base experiment class."""

import logging
import os
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, List, Optional, TypeVar

from pydantic import BaseModel, ConfigDict, Field

from .schemas import ResultTable

logger = logging.getLogger(__name__)

JOBS_ENV_VAR = "ROTOR_OPTO_JOBS"

T = TypeVar("T")
R = TypeVar("R")


def default_jobs() -> int:
    """Default worker count, taken from the environment when set."""
    value = os.environ.get(JOBS_ENV_VAR)
    if value is None:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", JOBS_ENV_VAR, value)
        return 1


class RunConfig(BaseModel):
    """Run configuration shared by every experiment."""
    model_config = ConfigDict(extra="forbid")

    jobs: int = Field(default_factory=default_jobs, ge=1)
    random_seed: Optional[int] = None
    output_dir: Path = Path("data/results")
    strict: bool = False


class BaseExperiment(ABC):
    """Base class for experiments. Implement run()."""

    def __init__(self, config: RunConfig):
        self.config = config

    @abstractmethod
    def run(self) -> ResultTable:
        """Run the experiment and return its table."""

    def map_points(self, fn: Callable[[T], R], points: Iterable[T]) -> List[R]:
        """Evaluate fn over points, up to config.jobs at a time, keeping input order."""
        points = list(points)
        if self.config.jobs <= 1 or len(points) <= 1:
            return [fn(p) for p in points]
        workers = min(self.config.jobs, len(points))
        logger.debug("dispatching %d points to %d workers", len(points), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, points))
