import time
from functools import wraps

import numpy as np
from loguru import logger


def generator(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by the seed and a stream path.

    Independent tasks take distinct streams, so results don't depend on which
    thread runs them or in which order.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def derive_seed(seed: int, *stream: int) -> int:
    """Child seed for an independent task, stable across runs and thread counts"""
    return int(np.random.SeedSequence([seed, *stream]).generate_state(1)[0])


def float_stream(value: float) -> int:
    """Stream key from the exact bits of a float"""
    return int(np.float64(value).view(np.uint64))


def log_duration(label):
    def decorator_log_duration(func):
        @wraps(func)
        def inner(*args, **kwargs):
            begin = time.monotonic()
            result = func(*args, **kwargs)
            logger.info(f"{label} finished in {time.monotonic() - begin:.3f}s")
            return result

        return inner

    return decorator_log_duration


def parse_floats(text: str) -> list[float]:
    """'0.1, 0.2,0.3' -> [0.1, 0.2, 0.3]"""
    return [float(item) for item in text.split(",") if item.strip()]


def parse_ints(text: str) -> list[int]:
    """Accepts plain integers and exponent forms such as 1e6"""
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        value = float(item)
        if not value.is_integer():
            raise ValueError(f"not an integer: {item!r}")
        values.append(int(value))
    return values
