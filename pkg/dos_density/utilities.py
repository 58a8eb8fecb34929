import math
from datetime import datetime, timezone
from typing import Iterable, List

import numpy as np


def parse_grid(text: str) -> List[float]:
    """
    Parse a sweep grid given either as a comma list or as start:step:stop.

    The start:step:stop form is inclusive of stop (within half a step), so
    '0.002:0.002:0.02' yields ten points. Values are rounded to 12 significant
    digits to keep accumulated float noise out of reports.

    Args:
        text (str): Grid specification.

    Returns:
        list: Grid values in the order given.

    Raises:
        ValueError: If the text is empty, non-numeric or the step is not positive.

    Example:
        >>> parse_grid('20:20:100')
        [20.0, 40.0, 60.0, 80.0, 100.0]
        >>> parse_grid('0.01, 0.02')
        [0.01, 0.02]
    """
    text = (text or '').strip()
    if not text:
        raise ValueError('Grid specification is empty')

    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f'Range grid must be start:step:stop, got {text!r}')
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError('Grid step must be positive')
        count = int(math.floor((stop - start) / step + 0.5)) + 1
        return [float(f'{start + i * step:.12g}') for i in range(max(count, 0))]

    return [float(p) for p in text.split(',') if p.strip()]


def format_float(value: float) -> str:
    """Shortest decimal text that round-trips to the same double."""
    return repr(float(value))


def exact_mean(values: Iterable[float]) -> float:
    """
    Mean with exactly rounded summation.

    math.fsum makes the result independent of the order the values arrive in,
    which keeps aggregated reports identical across worker counts.
    """
    values = [float(v) for v in values]
    if not values:
        return math.nan
    return math.fsum(values) / len(values)


def utc_timestamp() -> str:
    """Current UTC time in ISO-8601 with second precision."""
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def is_strictly_decreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) < 0))


def is_strictly_increasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) > 0))
