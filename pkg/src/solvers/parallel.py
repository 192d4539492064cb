from concurrent.futures import ThreadPoolExecutor
from itertools import islice
from typing import Callable, Iterable, Iterator, List, Optional, TypeVar

from schemas.solution import Solution

T = TypeVar("T")
R = TypeVar("R")

BATCH_SIZE = 32


def batched(items: Iterable[T], size: int = BATCH_SIZE) -> Iterator[List[T]]:
    """Consecutive chunks of ``size`` items; the last may be shorter."""
    iterator = iter(items)
    while True:
        chunk = list(islice(iterator, size))
        if not chunk:
            return
        yield chunk


def ordered_map(fn: Callable[[T], R], items: List[T], executor: Optional[ThreadPoolExecutor] = None) -> List[R]:
    """Apply ``fn`` to every item, in input order, on the executor when one is given."""
    if executor is None:
        return [fn(item) for item in items]
    return list(executor.map(fn, items))


def better(candidate: Optional[Solution], incumbent: Optional[Solution]) -> bool:
    """Canonical order on solutions: smaller size first, then the lexicographically smaller vertex tuple."""
    if candidate is None:
        return False
    return incumbent is None or candidate.key() < incumbent.key()
