import math

import pytest
from pydantic import ValidationError

from statdist import laws
from statdist.errors import ConfigError, DomainError, TableError
from statdist.models import LawKind


@pytest.fixture
def cos2():
    return laws.cosine_squared()


def test_cosine_defaults(cos2):
    assert cos2.kind is LawKind.cos2
    assert cos2.domain == (0.0, pytest.approx(math.pi / 2))
    assert laws.probability(cos2, 0.0) == 1.0
    assert laws.probability(cos2, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert laws.probability(cos2, math.pi / 4) == pytest.approx(0.5)


def test_scaled_cosine_domain():
    law = laws.parse_law("cos2:2")
    assert law.kind is LawKind.cos2_scaled
    assert law.frequency == 2.0
    assert law.domain[1] == pytest.approx(math.pi / 4)


def test_parse_law_rejects_unknown():
    with pytest.raises(ConfigError):
        laws.parse_law("gaussian")
    with pytest.raises(ConfigError):
        laws.parse_law("cos2:-1")


def test_angle_outside_domain(cos2):
    with pytest.raises(DomainError) as excinfo:
        laws.probability(cos2, 2.0)
    assert excinfo.value.theta == 2.0


def test_slope(cos2):
    assert laws.slope(cos2, 0.3).value == pytest.approx(-math.sin(0.6))
    assert laws.derivative(cos2, 0.3) == pytest.approx(-math.sin(0.6))


def test_variance_keeps_precision_near_edges(cos2):
    theta = 1e-9
    assert laws.bernoulli_variance(cos2, theta) == pytest.approx(theta**2, rel=1e-6)


def test_load_table():
    law = laws.load_table("test_data/linear_table.csv")
    assert law.kind is LawKind.tabulated
    assert law.domain == (0.0, 1.0)
    assert laws.probability(law, 0.25) == pytest.approx(0.75)
    assert laws.slope(law, 0.25).value == pytest.approx(-1.0)

    edge = laws.slope(law, 0.0)
    assert edge.one_sided
    assert edge.value == pytest.approx(-1.0)


def test_load_table_names_bad_row():
    with pytest.raises(TableError) as excinfo:
        laws.load_table("test_data/bad_table.csv")
    # header is row 1
    assert excinfo.value.row == 4
    assert "row 4" in str(excinfo.value)


def test_load_missing_table():
    with pytest.raises(TableError):
        laws.load_table("test_data/no_such_table.csv")


def test_tabulated_validation():
    with pytest.raises(ValidationError):
        laws.tabulated([0.0, 1.0], [1.0, 0.0])
    with pytest.raises(ValidationError):
        laws.tabulated([0.0, 0.5, 1.0], [1.0, 1.5, 0.0])
    with pytest.raises(ValidationError):
        laws.tabulated([0.0, 0.7, 0.5], [1.0, 0.5, 0.0])


def test_cosine_domain_limited_to_one_period():
    laws.cosine_squared(domain=(0.0, math.pi))
    with pytest.raises(ValidationError):
        laws.cosine_squared(domain=(0.0, 4.0))


def test_monotone(cos2):
    assert laws.is_monotone(cos2)
    assert not laws.is_monotone(laws.cosine_squared(domain=(0.0, math.pi)))
    assert not laws.is_monotone(laws.constant_law(0.5))


def test_breakpoints():
    law = laws.cosine_squared(domain=(0.0, math.pi))
    assert laws.breakpoints(law, 0.5, 2.5) == [pytest.approx(math.pi / 2)]
    assert laws.breakpoints(law, 0.1, 0.5) == []


def test_tabulated_law_passes_through_its_samples():
    thetas = [i / 100 for i in range(158)]
    probs = [math.cos(t) ** 2 for t in thetas]
    law = laws.tabulated(thetas, probs)
    for theta, p in zip(thetas, probs):
        assert laws.probability(law, theta) == pytest.approx(p, abs=1e-15)


def test_tabulated_derivative_matches_cosine():
    thetas = [i / 1000 for i in range(1571)]
    law = laws.tabulated(thetas, [math.cos(t) ** 2 for t in thetas])
    assert laws.derivative(law, 0.3) == pytest.approx(-math.sin(0.6), abs=1e-5)
