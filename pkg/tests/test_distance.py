import math

import numpy as np
import pytest

from statdist import distance, laws
from statdist.errors import DimensionError, InputError, NonIdentifiableError, SingularityError
from statdist.models import DiscreteDistribution, DistanceMethod


@pytest.fixture
def cos2():
    return laws.cosine_squared()


def tabulated_power(power: int):
    """cos^power tabulated every 1e-3 rad, so 0.3, 0.5, 1.2 ... are knots"""
    thetas = [i / 1000 for i in range(1571)]
    return laws.tabulated(thetas, [math.cos(t) ** power for t in thetas])


def random_pairs(count: int, seed: int):
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.uniform(1e-3, math.pi / 2 - 1e-3, size=(count, 2))


def test_quadrature_reproduces_angle_difference(cos2):
    for theta1, theta2 in random_pairs(100, 0):
        report = distance.statistical_distance(cos2, theta1, theta2)
        assert report.value == pytest.approx(abs(theta1 - theta2), abs=1e-8)
        assert report.method is DistanceMethod.quadrature


def test_closed_form_matches_quadrature(cos2):
    for theta1, theta2 in random_pairs(20, 1):
        closed = distance.closed_form_distance(cos2, theta1, theta2)
        assert closed.value == pytest.approx(abs(theta1 - theta2), abs=1e-12)
        assert closed.method is DistanceMethod.closed_form


def test_same_angle(cos2):
    assert distance.statistical_distance(cos2, 0.5, 0.5).value == 0.0
    assert distance.closed_form_distance(cos2, 0.5, 0.5).value == 0.0


def test_whole_monotone_range(cos2):
    assert distance.statistical_distance(cos2, 0.0, math.pi / 2).value == pytest.approx(
        math.pi / 2, abs=1e-8
    )


def test_scaled_frequency():
    law = laws.cosine_squared(2.0)
    assert distance.statistical_distance(law, 0.1, 0.6).value == pytest.approx(1.0, abs=1e-8)
    assert distance.closed_form_distance(law, 0.1, 0.6).value == pytest.approx(1.0, abs=1e-12)


def test_extended_domain_crosses_turning_point():
    law = laws.cosine_squared(domain=(0.0, math.pi))
    assert distance.monotone_segments(law, 0.5, 2.5) == [
        (0.5, pytest.approx(math.pi / 2)),
        (pytest.approx(math.pi / 2), 2.5),
    ]
    assert distance.statistical_distance(law, 0.5, 2.5).value == pytest.approx(2.0, abs=1e-8)
    assert distance.closed_form_distance(law, 0.5, 2.5).value == pytest.approx(2.0, abs=1e-12)


def test_tabulated_distance():
    law = tabulated_power(2)
    quadrature = distance.statistical_distance(law, 0.3, 1.2)
    closed = distance.closed_form_distance(law, 0.3, 1.2)
    assert closed.value == pytest.approx(0.9, abs=1e-6)
    assert quadrature.value == pytest.approx(closed.value, abs=1e-7)
    assert quadrature.diagnostics.segments > 800


def test_tabulated_segments():
    thetas = [i / 100 for i in range(315)]
    law = laws.tabulated(thetas, [math.cos(t) ** 2 for t in thetas])
    assert len(distance.monotone_segments(law, 0.0, 3.14)) == 2


def test_closed_form_falls_back_to_quadrature():
    thetas = [i / 100 for i in range(600)]
    zigzag = laws.tabulated(thetas, [0.2 if i % 2 else 0.8 for i in range(600)])
    report = distance.closed_form_distance(zigzag, 0.0, 5.99)
    assert report.fallback
    assert report.method is DistanceMethod.quadrature
    assert report.value > 0


def test_flat_degenerate_piece():
    law = laws.tabulated([0.0, 0.5, 1.0, 1.5], [1.0, 1.0, 0.5, 0.0])
    with pytest.raises(NonIdentifiableError):
        distance.statistical_distance(law, 0.1, 1.2)


def test_proportionality():
    result = distance.check_proportionality(laws.cosine_squared())
    assert result.proportional
    assert result.constant == pytest.approx(1.0, abs=1e-6)

    result = distance.check_proportionality(laws.cosine_squared(2.0))
    assert result.proportional
    assert result.constant == pytest.approx(2.0, abs=1e-6)

    result = distance.check_proportionality(tabulated_power(4))
    assert not result.proportional
    assert result.constant is None


def test_wootters_measure():
    p = DiscreteDistribution(probabilities=(0.2, 0.3, 0.5))
    assert distance.wootters_measure(p, p) == pytest.approx(0.0, abs=1e-12)

    a = DiscreteDistribution(probabilities=(1.0, 0.0))
    b = DiscreteDistribution(probabilities=(0.0, 1.0))
    assert distance.wootters_measure(a, b) == pytest.approx(math.pi / 2)

    with pytest.raises(DimensionError):
        distance.wootters_measure(p, a)


def test_wootters_measure_of_cosine_outcomes(cos2):
    # Bhattacharyya angle between cos² outcome pairs is the angle difference
    w = distance.wootters_measure(
        distance.outcome_pair(cos2, 0.3), distance.outcome_pair(cos2, 1.1)
    )
    assert w == pytest.approx(0.8, abs=1e-12)


def test_fisher_information(cos2):
    assert distance.fisher_information(cos2, 0.7) == pytest.approx(4.0)
    assert distance.fisher_information(cos2, 0.7, n=100) == pytest.approx(400.0)
    with pytest.raises(SingularityError):
        distance.fisher_information(cos2, 0.0)


def test_fisher_limit_exact_law(cos2):
    assert distance.fisher_limit_ratio(cos2, 0.7, 1e-3) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(InputError):
        distance.fisher_limit_ratio(cos2, 0.7, 0.0)


def test_fisher_limit_tabulated_law():
    law = tabulated_power(4)
    errors = [abs(distance.fisher_limit_ratio(law, 0.5, d) - 1.0) for d in (0.04, 0.02, 0.01)]
    assert errors[0] > errors[1] > errors[2]
    assert errors[0] / errors[2] >= 3


def test_derivative_integral():
    assert distance.derivative_integral(laws.cosine_squared()) == pytest.approx(-1.0, abs=1e-9)

    full_period = laws.cosine_squared(domain=(0.0, math.pi))
    assert distance.derivative_integral(full_period) == pytest.approx(0.0, abs=1e-9)
    assert distance.derivative_integral(full_period, order=2) == pytest.approx(0.0, abs=1e-8)

    with pytest.raises(InputError):
        distance.derivative_integral(tabulated_power(2), order=2)


def test_distance_is_additive(cos2):
    rng = np.random.Generator(np.random.Philox(4))
    for a, b, c in np.sort(rng.uniform(1e-3, math.pi / 2 - 1e-3, size=(20, 3)), axis=1):
        whole = distance.statistical_distance(cos2, a, c).value
        parts = (
            distance.statistical_distance(cos2, a, b).value
            + distance.statistical_distance(cos2, b, c).value
        )
        assert whole == pytest.approx(parts, abs=1e-8)

    law = tabulated_power(4)
    whole = distance.closed_form_distance(law, 0.3, 1.2).value
    parts = (
        distance.closed_form_distance(law, 0.3, 0.7).value
        + distance.closed_form_distance(law, 0.7, 1.2).value
    )
    assert whole == pytest.approx(parts, abs=1e-9)


def test_proportional_law_scales_angle_difference():
    law = laws.cosine_squared(2.0)
    constant = distance.check_proportionality(law).constant
    rng = np.random.Generator(np.random.Philox(9))
    for theta1, theta2 in rng.uniform(1e-3, math.pi / 4 - 1e-3, size=(20, 2)):
        d = distance.statistical_distance(law, theta1, theta2).value
        assert d == pytest.approx(constant * abs(theta1 - theta2), abs=1e-8)


def test_non_proportional_law_has_no_single_rate():
    law = tabulated_power(4)
    near_one = distance.closed_form_distance(law, 0.1, 0.2).value / 0.1
    near_zero = distance.closed_form_distance(law, 1.3, 1.4).value / 0.1
    assert abs(near_one - near_zero) > 0.1
