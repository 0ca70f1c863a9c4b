from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from event_geoloc.exception import GeolocError, Result

T = TypeVar("T")
U = TypeVar("U")


def map(
    func: Callable[[T], U],
    items: Sequence[T],
    max_concurrency: Optional[int] = None,
) -> List[Result[U]]:
    """Apply `func` to every item, optionally on a thread pool, keeping input order.

    Domain errors raised by `func` are captured in the Result; anything else propagates.
    """
    assert max_concurrency is None or max_concurrency > 0

    def _call(item: T) -> Result[U]:
        try:
            return Result(value=func(item), error=None)
        except GeolocError as e:
            return Result(value=None, error=e)

    if max_concurrency == 1 or len(items) <= 1:
        return [_call(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_concurrency) as executor:
        return list(executor.map(_call, items))
