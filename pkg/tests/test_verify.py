from cantorlab import make_system
from cantorlab.verify import run_invariants


def test_default_suite_passes():
    res = run_invariants()
    failed = [r for r in res if not r.passed]
    assert not failed, failed
    assert {r.name for r in res} >= {"extrema_agreement", "summation_identities", "fourier_symmetry"}


def test_suite_on_custom_system():
    res = run_invariants([make_system([0, 1, 5, 6])])
    assert all(r.passed for r in res)
