import math

import pytest
from pydantic import ValidationError

from statdist import ensemble, laws
from statdist.errors import InputError, NonIdentifiableError
from statdist.models import Column, ColumnSheet, MatrixMode, Sampler, TrialRecord
from statdist.utils import derive_seed


@pytest.fixture
def cos2():
    return laws.cosine_squared()


def seeds(count: int, root: int = 0) -> list[int]:
    return [derive_seed(root, r) for r in range(count)]


def test_degenerate_probabilities(cos2):
    for n in (500, 10**5):
        assert ensemble.run_trials(cos2, 0.0, n, seed=1).yes_count == n
        assert ensemble.run_trials(cos2, math.pi / 2, n, seed=1).yes_count == 0


def test_trials_are_deterministic(cos2):
    record = ensemble.run_trials(cos2, 0.6, 10**4, seed=42)
    assert record == ensemble.run_trials(cos2, 0.6, 10**4, seed=42)
    assert 0 <= record.yes_count <= record.n


def test_sampler_choice(cos2):
    assert ensemble.run_trials(cos2, 0.6, 999, seed=0).sampler is Sampler.inversion
    assert ensemble.run_trials(cos2, 0.6, 1000, seed=0).sampler is Sampler.gaussian


def test_record_validation(cos2):
    with pytest.raises(ValidationError):
        TrialRecord(n=10, yes_count=11, law=cos2, theta_true=0.3, seed=0, sampler="inversion")


def test_estimate_inverts_cosine(cos2):
    record = TrialRecord(
        n=1000, yes_count=500, law=cos2, theta_true=0.8, seed=0, sampler="inversion"
    )
    interval = ensemble.estimate_theta(record)
    assert interval.center == pytest.approx(math.pi / 4, abs=1e-12)
    assert interval.halfwidth == pytest.approx(1 / (2 * math.sqrt(1000)))
    assert not interval.boundary


def test_estimate_at_boundary(cos2):
    record = TrialRecord(n=50, yes_count=50, law=cos2, theta_true=0.01, seed=0, sampler="inversion")
    interval = ensemble.estimate_theta(record)
    assert interval.center == 0.0
    assert interval.boundary
    assert interval.halfwidth == 0.0


def test_estimate_tabulated_by_bisection():
    law = laws.tabulated([0.0, 0.5, 1.0], [0.0, 0.5, 1.0])
    record = TrialRecord(n=10, yes_count=3, law=law, theta_true=0.3, seed=0, sampler="inversion")
    assert ensemble.estimate_theta(record).center == pytest.approx(0.3, abs=1e-9)


def test_estimate_rejects_non_monotone_law():
    law = laws.cosine_squared(domain=(0.0, math.pi))
    record = ensemble.run_trials(law, 2.0, 100, seed=0)
    with pytest.raises(NonIdentifiableError):
        ensemble.estimate_theta(record)


def test_replicate_spread_matches_binomial(cos2):
    report = ensemble.coverage_study(cos2, math.pi / 4, 10**5, seeds(1000))
    assert report.p_std_expected == pytest.approx(0.00158, rel=1e-2)
    assert report.p_hat_std == pytest.approx(report.p_std_expected, rel=0.1)
    standard_error = report.p_std_expected / math.sqrt(report.replicates)
    assert abs(report.p_hat_mean - report.p_true) < 3 * standard_error


def test_interval_coverage(cos2):
    report = ensemble.coverage_study(cos2, 0.6, 10**4, seeds(1000, root=7))
    assert report.coverage == pytest.approx(0.68, abs=0.05)
    assert report.boundary_hits == 0


def test_coverage_study_threads(cos2):
    sequential = ensemble.coverage_study(cos2, 0.6, 10**3, seeds(20))
    threaded = ensemble.coverage_study(cos2, 0.6, 10**3, seeds(20), threads=4)
    assert sequential == threaded
    with pytest.raises(InputError):
        ensemble.coverage_study(cos2, 0.6, 10**3, [1])


def test_empirical_distance(cos2):
    result = ensemble.empirical_distance(cos2, 0.2, 1.2, 10**6, seed=3)
    assert result.value == pytest.approx(1.0, abs=0.05)
    assert result.analytic_value == pytest.approx(1.0, abs=0.05)
    assert result.boundary_hits == 0


def test_empirical_distance_seed_stability(cos2):
    a = ensemble.empirical_distance(cos2, 0.2, 1.2, 10**5, seed=1)
    b = ensemble.empirical_distance(cos2, 0.2, 1.2, 10**5, seed=2)
    assert abs(a.value - b.value) < 0.05


def test_empirical_distance_same_angle(cos2):
    result = ensemble.empirical_distance(cos2, 0.7, 0.7, 10**4, seed=0)
    assert result.value == 0.0
    assert result.count == 0


def test_empirical_convergence(cos2):
    points = ensemble.empirical_convergence(cos2, 0.2, 1.2, (10**3, 10**4, 10**5), seed=5)
    assert [p.n for p in points] == [10**3, 10**4, 10**5]
    assert [p.analytic_count for p in points] == [31, 99, 316]
    assert points[-1] == ensemble.empirical_distance(cos2, 0.2, 1.2, 10**5, seed=5)
    assert points[-1].value == pytest.approx(1.0, abs=0.05)

    threaded = ensemble.empirical_convergence(
        cos2, 0.2, 1.2, (10**3, 10**4, 10**5), seed=5, threads=3
    )
    assert threaded == points

    with pytest.raises(InputError):
        ensemble.empirical_convergence(cos2, 0.2, 1.2, (10**4, 10**3), seed=5)


def test_default_sheet():
    sheet = ensemble.default_sheet()
    assert len(sheet.columns) == 18
    assert sheet.columns[0].id == "c00"
    assert sheet.columns[-1].theta == pytest.approx(17 * math.pi / 36)


def test_sheet_validation(cos2):
    with pytest.raises(ValidationError):
        ColumnSheet(columns=[Column(id="a", theta=0.1), Column(id="a", theta=0.2)], law=cos2)
    with pytest.raises(ValidationError):
        ColumnSheet(columns=[Column(id="a", theta=0.1), Column(id="b", theta=2.0)], law=cos2)


def test_analytic_matrix(cos2):
    sheet = ensemble.load_sheet("test_data/sheet.json", cos2)
    matrix = ensemble.column_distance_matrix(sheet)
    thetas = [c.theta for c in sheet.columns]

    assert matrix.ids == ["c1", "c2", "c3"]
    assert not matrix.failed
    for i, a in enumerate(thetas):
        assert matrix.values[i][i] == 0.0
        for j, b in enumerate(thetas):
            assert matrix.values[i][j] == matrix.values[j][i]
            assert matrix.values[i][j] == pytest.approx(abs(a - b), abs=1e-12)


def test_repeated_orientation(cos2):
    sheet = ColumnSheet(columns=[Column(id="a", theta=0.5), Column(id="b", theta=0.5)], law=cos2)
    matrix = ensemble.column_distance_matrix(sheet)
    assert matrix.values == [[0.0, 0.0], [0.0, 0.0]]


def test_empirical_matrix_tracks_analytic(cos2):
    sheet = ensemble.load_sheet("test_data/sheet.json", cos2)
    analytic = ensemble.column_distance_matrix(sheet)
    empirical = ensemble.column_distance_matrix(
        sheet, MatrixMode.empirical, n=10**5, seed=5, threads=2
    )
    for row_a, row_e in zip(analytic.values, empirical.values):
        for a, e in zip(row_a, row_e):
            assert abs(a - e) < 0.05


def test_matrix_marks_failed_entries():
    law = laws.cosine_squared(domain=(0.0, math.pi))
    sheet = ColumnSheet(
        columns=[Column(id="a", theta=0.2), Column(id="b", theta=1.0), Column(id="c", theta=2.0)],
        law=law,
    )
    matrix = ensemble.column_distance_matrix(sheet, MatrixMode.empirical, n=100)
    assert len(matrix.failed) == 3
    assert matrix.values[0][1] is None
    assert matrix.values[1][1] == 0.0


def test_matrix_needs_two_columns(cos2):
    sheet = ColumnSheet(columns=[Column(id="a", theta=0.5)], law=cos2)
    with pytest.raises(InputError):
        ensemble.column_distance_matrix(sheet)


def test_load_sheet_errors(cos2):
    with pytest.raises(InputError):
        ensemble.load_sheet("test_data/no_such_sheet.json", cos2)
    with pytest.raises(InputError):
        ensemble.load_sheet("test_data/linear_table.csv", cos2)
