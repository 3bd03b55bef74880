from core.config_manager import SuiteConfig
from core.suite_runner import SUITE_NAMES, SuiteRunner, TrialOutcome, run_suite


class FakeStore:
    def __init__(self):
        self.writes = []

    def write(self, suite, report, target=None):
        self.writes.append((suite, report, target))
        return {"status": "success", "detail": "stored", "path": "memory"}


def _config(**overrides):
    values = {"seed": 42, "trials": 2, "grid_max_n": 3}
    values.update(overrides)
    return SuiteConfig.from_dict(values).validate()


def test_identity_suite_on_divisor_case():
    store = FakeStore()
    report = run_suite("identity", _config(cases=[(6, 3)]), store=store)
    suite = report.suites[0]
    assert suite.name == "identity"
    assert (suite.passed, suite.failed) == (2, 0)
    assert report.all_passed
    assert store.writes and store.writes[0][0] == "identity"
    assert store.writes[0][1]["all_passed"] is True


def test_chain_suites_pass():
    config = _config(cases=[(5, 3), (3, 2)])
    runner = SuiteRunner(config)
    for name in ("equivariance", "fiber", "stabilizer"):
        result = runner.run_suite(name)
        assert result.ok, (name, result.failures)
        assert result.passed >= 4


def test_roundtrip_uses_divisor_cases_only():
    result = SuiteRunner(_config(cases=[(4, 2), (5, 3)])).run_suite("roundtrip")
    assert result.ok, result.failures
    assert result.passed == 2


def test_grid_suites_pass():
    runner = SuiteRunner(_config(trials=1))
    dimension = runner.run_suite("dimension")
    assert dimension.ok, dimension.failures
    assert dimension.passed > 0
    goodness = runner.run_suite("goodness-grid")
    assert goodness.ok, goodness.failures


def test_oracle_suite_never_contradicts_the_oracle():
    result = SuiteRunner(_config()).run_suite("oracle")
    assert result.ok, result.failures
    assert result.trials == 13


def test_runs_are_deterministic():
    first = SuiteRunner(_config(cases=[(5, 2)])).run_suite("fiber").to_json()
    second = SuiteRunner(_config(cases=[(5, 2)])).run_suite("fiber").to_json()
    first.pop("seconds")
    second.pop("seconds")
    assert first == second


def test_replay_reruns_one_trial():
    runner = SuiteRunner(_config(cases=[(6, 3)]))
    witness = {
        "suite": "identity",
        "seed": 42,
        "stream": [SUITE_NAMES.index("identity"), 0, 1],
        "case": {"n": 6, "r": 3},
    }
    outcome = runner.replay(witness)
    assert isinstance(outcome, TrialOutcome)
    assert outcome.passed


def test_configured_algebra_of_wrong_size_is_skipped():
    config = _config(cases=[(5, 3)], algebra={"kind": "monogenic", "poly": ["-2", "0", "0"]})
    result = SuiteRunner(config).run_suite("equivariance")
    assert result.trials == 0
    assert result.notes and "dimension 3" in result.notes[0]


def test_unknown_suite_is_rejected():
    try:
        SuiteRunner(_config()).run("bogus")
    except ValueError as exc:
        assert "unknown suite" in str(exc)
    else:
        raise AssertionError("unknown suite accepted")


# e0 is the unit, (e1·e1)·e1 != e1·(e1·e1)
NON_ASSOCIATIVE = {
    "kind": "table",
    "unit": ["1", "0", "0"],
    "structure": [
        [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
        [["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]],
        [["0", "0", "1"], ["0", "1", "0"], ["0", "0", "0"]],
    ],
}


def test_setup_failure_replays_as_reproduced():
    config = _config(prime=7, toy=True, cases=[(3, 2), (5, 3)], algebra=NON_ASSOCIATIVE)
    runner = SuiteRunner(config)
    result = runner.run_suite("equivariance")
    assert result.failed == 2
    for witness in result.failures:
        assert len(witness["stream"]) == 2
        assert witness["detail"].startswith("setup:")
        outcome = runner.replay(witness)
        assert not outcome.passed
        assert outcome.detail.startswith("setup:")
        assert "not associative" in outcome.detail


def test_suite_without_applicable_case_is_marked_skipped():
    result = SuiteRunner(_config(cases=[(5, 3)])).run_suite("identity")
    assert result.trials == 0
    assert result.skipped and result.ok
    assert result.notes == ["no configured case applies to this suite"]
    assert result.to_json()["skipped"] is True


def test_fiber_suite_covers_grid_cells():
    # n ≤ 3 has ten cells with r != s whose single step stays admissible
    result = SuiteRunner(_config(cases=[(3, 2)], trials=1)).run_suite("fiber")
    assert result.ok, result.failures
    assert result.passed == 1 + 10
