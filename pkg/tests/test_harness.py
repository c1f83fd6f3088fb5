import pytest

from opspec.harness import (
    SUITES,
    Failure,
    GeneratorProfile,
    TrialError,
    VerificationReport,
    derive_seed,
    gen_operator,
    reproduce,
    run_suite,
    st_ts_fixture,
)
from opspec.operators import Atom, DiagonalBlock, is_algebraic, spectral_profile

POINTS_ONLY = {"points": 1}


def test_points_only_mix_gives_finite_diagonal():
    op = gen_operator(GeneratorProfile(seed=1, family_mix=POINTS_ONLY), 0)
    assert all(isinstance(b, DiagonalBlock) for b in op.blocks)
    assert all(isinstance(c, Atom) for b in op.blocks for c in b.components)
    assert spectral_profile(op).sigma.is_finite()


def test_generation_is_deterministic():
    profile = GeneratorProfile(seed=1)
    assert gen_operator(profile, 0) == gen_operator(profile, 0)
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert derive_seed(1, 0) != derive_seed(1, 1)


def test_two_valued_diagonal_is_algebraic():
    profile = GeneratorProfile(seed=2, family_mix=POINTS_ONLY, value_pool=1)
    hits = 0
    for trial in range(40):
        op = gen_operator(profile, trial)
        values = {c.value for b in op.blocks for c in b.components}
        ok, poly = is_algebraic(op)
        assert ok and spectral_profile(op).drazin_spectrum.is_empty()
        if len(values) == 2:
            hits += 1
            assert poly.degree == 2
    assert hits


def test_profile_validation():
    with pytest.raises(ValueError):
        GeneratorProfile(seed=-1)
    with pytest.raises(ValueError):
        GeneratorProfile(max_matrix_dim=0)
    with pytest.raises(ValueError):
        GeneratorProfile(family_mix={"bogus": 1})
    with pytest.raises(ValueError):
        GeneratorProfile(family_mix={"points": 0})


def test_fixtures_suite_passes():
    r = run_suite("FIXTURES", 1, GeneratorProfile(seed=1))
    assert r.status == "pass"
    st, ts = st_ts_fixture()
    assert spectral_profile(st).poles.order(0) == 1 and spectral_profile(ts).poles.order(0) is None


def test_axioms_suite_with_100_matrices():
    r = run_suite("AXIOMS", 100, GeneratorProfile(seed=5))
    assert r.status == "pass" and r.counters["exact"] == 100


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_small_run(name):
    r = run_suite(name, 15, GeneratorProfile(seed=9))
    assert r.status == "pass", (r.failures, r.errors)


def test_reproduce_replays_a_trial():
    profile = GeneratorProfile(seed=3)
    r = run_suite("PROFILE", 3, profile)
    instance, violations = reproduce("PROFILE", derive_seed(3, 2), profile)
    assert violations == []
    assert instance and instance == reproduce("PROFILE", derive_seed(3, 2), profile)[0]
    assert r.status == "pass"


def test_report_status_and_serialization():
    rep = VerificationReport("T1", 3)
    assert rep.status == "pass"
    rep.errors.append(TrialError(1, 7, "", "NumericAmbiguity: x"))
    assert rep.status == "error"
    rep.failures.append(Failure(2, 8, "diag { 0: 1 }", "broken"))
    assert rep.status == "fail"
    d = rep.to_dict()
    assert d["status"] == "fail" and d["failures"][0]["derived_seed"] == 8


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("T4", 1)


def test_segment_forcing_in_t2():
    r = run_suite("T2", 60, GeneratorProfile(seed=1))
    assert r.counters.get("segment_trials", 0) >= 6
