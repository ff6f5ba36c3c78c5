import time

import numpy as np
import pytest
from loguru import logger

from statdist import utils


def slow_hello():
    time.sleep(0.2)
    return "hello"


def test_log_duration():
    messages = []
    handler_id = logger.add(messages.append, format="{message}")
    try:
        begin = time.monotonic()
        result = utils.log_duration("greeting")(slow_hello)()
        dur = time.monotonic() - begin
    finally:
        logger.remove(handler_id)

    assert result == "hello"
    assert dur == pytest.approx(0.2, rel=0.5)
    assert any(m.startswith("greeting finished in") for m in messages)


def test_log_duration_keeps_name():
    assert utils.log_duration("x")(slow_hello).__name__ == "slow_hello"


def test_generator_streams():
    a = utils.generator(1, 2).random(4)
    assert np.array_equal(a, utils.generator(1, 2).random(4))
    assert not np.array_equal(a, utils.generator(1, 3).random(4))
    assert not np.array_equal(a, utils.generator(2, 2).random(4))


def test_derive_seed():
    assert utils.derive_seed(3, 1) == utils.derive_seed(3, 1)
    assert len({utils.derive_seed(3, r) for r in range(100)}) == 100
    assert utils.derive_seed(3, 1) >= 0


def test_float_stream():
    assert utils.float_stream(0.5) == utils.float_stream(0.5)
    assert utils.float_stream(0.5) != utils.float_stream(0.5000000000000001)


def test_parse_lists():
    assert utils.parse_floats("0.1, 0.2,0.3") == [0.1, 0.2, 0.3]
    assert utils.parse_ints("1e2, 1e4,") == [100, 10000]
    with pytest.raises(ValueError):
        utils.parse_ints("1.5")
