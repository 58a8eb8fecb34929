import numpy as np
import pytest

from dos_density import suites
from dos_density.errors import DomainError
from dos_density.suites import CheckResult, run_suite


def test_check_result_line():
    assert CheckResult('ks', True, 'p=0.5').line() == 'PASS\tks\tp=0.5'
    assert CheckResult('ks', False, '').line() == 'FAIL\tks\t'


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite('everything')


def test_raising_check_is_reported_as_failure(monkeypatch):
    def broken(seed, trials):
        raise DomainError('rank 0')

    monkeypatch.setitem(suites.SUITES, 'estimators', [broken])
    results = run_suite('estimators', seed=1, trials=10)
    assert results == [CheckResult('broken', False, 'error: rank 0')]


def test_chunked_draws_cover_every_trial(monkeypatch):
    monkeypatch.setattr(suites, 'VALIDATION_CHUNK', 3)
    sizes = []

    def draw(size):
        sizes.append(size)
        return np.arange(size)

    values = suites._chunked(7, draw)
    assert sizes == [3, 3, 1]
    assert values.tolist() == [0, 1, 2, 0, 1, 2, 0]


def test_analytic_checks_pass():
    for check in (suites.check_normalization, suites.check_marginalization):
        for result in check(1, 0):
            assert result.passed, result.line()


@pytest.mark.slow
@pytest.mark.parametrize('suite', ['distributions', 'estimators'])
def test_suites_pass(suite):
    results = run_suite(suite, seed=2016, trials=50_000)
    failed = [r.line() for r in results if not r.passed]
    assert not failed, failed
