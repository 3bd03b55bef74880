"""Deterministic property suites over the engine.

Every suite is a list of cases. A case is set up once from its own random
stream (algebra, flag, reference subspaces) and then runs its trials, each on
a stream derived from (seed, suite index, case index, trial index). A failing
trial is recorded with that stream path, so it can be replayed alone.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from numpy.random import Generator

from core.config_manager import SuiteConfig
from core.report_store import ReportStore
from euclid_engine.algebra_core import Algebra, etale_from_poly, random_etale, split_algebra
from euclid_engine.errors import DomainViolation, EngineError, OutsideDomainError, RetryBudgetExhausted
from euclid_engine.euclid import (
    REDUCE_DUAL,
    StepPlan,
    big_phi,
    chain_steps,
    duality_inverse,
    duality_map,
    euclid_sequence,
    expected_fiber_total,
    fiber_dimension,
    phi_fiber_sample,
    phi_step,
    plan_fiber_total,
    sample_good_flag,
    step_dimension_balance,
    step_plan,
    steps_balanced,
)
from euclid_engine.exact_linalg import PrimeField
from euclid_engine.incidence import (
    admissible,
    first_projection_fiber,
    good_witness_etale,
    in_G,
    in_G_prime,
    is_good,
    point_stabilizer,
    sample_G_point,
    sample_in_fiber,
    tangent_dimension,
    tangent_theta_rank,
    translate_point,
)
from euclid_engine.rng_streams import derive_rng, stream_label
from euclid_engine.subspace import (
    Side,
    Subspace,
    annihilator,
    dual_product,
    full_subspace,
    gl1_translate,
    primal_span,
    random_extension,
    random_subspace,
    right_product,
    stabilizer_subalgebra,
    unit_line,
)
from euclid_engine.toy_oracle import toy_oracle_goodness

logger = logging.getLogger(__name__)

SUITE_NAMES = (
    "equivariance",
    "dimension",
    "roundtrip",
    "identity",
    "goodness-grid",
    "fiber",
    "stabilizer",
    "oracle",
)

CHAIN_CASES: Tuple[Tuple[int, int], ...] = ((3, 2), (4, 3), (5, 2), (5, 3), (7, 4), (8, 5), (9, 7))
DUALITY_CASES: Tuple[Tuple[int, int], ...] = ((4, 2), (6, 2), (6, 3), (8, 4), (9, 3))
IDENTITY_CASES: Tuple[Tuple[int, int], ...] = ((6, 3), (6, 2), (8, 4))

# Exhaustively checkable instances: field, algebra, U, pair and, where known, the answer.
TOY_INSTANCES: Tuple[Dict[str, Any], ...] = (
    {"prime": 3, "poly": [2, 2, 0], "U": [[1, 0, 0]], "pair": [1, 1]},
    {"prime": 3, "poly": [2, 2, 0], "U": [[1, 0, 0], [0, 1, 0]], "pair": [1, 1]},
    {"prime": 3, "poly": [2, 2, 0], "U": [[0, 1, 0]], "pair": [1, 1]},
    {"prime": 3, "poly": [2, 2, 0], "U": [], "pair": [1, 2], "expected": True},
    {"prime": 3, "split": 3, "U": [[1, 0, 0]], "pair": [1, 1], "expected": False},
    {"prime": 3, "split": 3, "U": [[1, 1, 1]], "pair": [1, 1], "expected": True},
    {"prime": 5, "poly": [3, 0], "U": [[1, 0]], "pair": [1, 1]},
    {"prime": 5, "poly": [3, 0], "U": [[0, 1]], "pair": [1, 1]},
    {"prime": 7, "poly": [5, 0, 0], "U": [[1, 0, 0], [0, 1, 0]], "pair": [1, 1]},
    {"prime": 7, "poly": [5, 0, 0], "U": [[1, 0, 0]], "pair": [1, 2]},
    {"prime": 7, "poly": [5, 0, 0], "U": [[1, 0, 0]], "pair": [2, 1]},
    {"prime": 2, "poly": [1, 1], "U": [[0, 1]], "pair": [1, 1]},
    {"prime": 5, "split": 2, "U": [[1, 0]], "pair": [1, 1], "expected": False},
)

EQUIVARIANCE_RESAMPLE_LIMIT = 0.01


class SkipCase(Exception):
    """The configured algebra cannot serve this case."""


@dataclass
class TrialOutcome:
    passed: bool
    detail: str = ""
    resamples: int = 0
    inputs: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    resampled_trials: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    seconds: float = 0.0
    resample_limit: Optional[float] = None

    @property
    def trials(self) -> int:
        return self.passed + self.failed

    @property
    def skipped(self) -> bool:
        return self.trials == 0

    @property
    def ok(self) -> bool:
        if self.failed:
            return False
        if self.resample_limit is not None and self.trials:
            return self.resampled_trials <= self.resample_limit * self.trials
        return True

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "skipped": self.skipped,
            "passed": self.passed,
            "failed": self.failed,
            "resampled_trials": self.resampled_trials,
            "failures": self.failures,
            "notes": self.notes,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class SuiteReport:
    config: Dict[str, Any]
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(s.ok for s in self.suites)

    def to_json(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "all_passed": self.all_passed,
            "suites": [s.to_json() for s in self.suites],
        }


@dataclass(frozen=True)
class _Suite:
    cases: Callable[["SuiteRunner"], List[Dict[str, Any]]]
    setup: Callable[["SuiteRunner", Dict[str, Any], Generator], Any]
    trial: Callable[["SuiteRunner", Dict[str, Any], Any, Generator], TrialOutcome]
    default_trials: int
    fixed_trials: Optional[int] = None
    resample_limit: Optional[float] = None


class SuiteRunner:
    """Run named suites under one configuration and persist their reports."""

    def __init__(self, config: SuiteConfig, store: Optional[ReportStore] = None) -> None:
        self.config = config.validate()
        self.store = store
        self.field = PrimeField(config.prime, toy=config.toy)
        # label of the stream the current setup or trial draws from
        self.stream: Optional[str] = None

    # -------------------------
    # Entry points
    # -------------------------
    def run(self, name: str) -> SuiteReport:
        names = SUITE_NAMES if name == "all" else (name,)
        for item in names:
            if item not in SUITE_NAMES:
                raise ValueError(f"unknown suite {item!r}; choose from {', '.join(SUITE_NAMES + ('all',))}")
        report = SuiteReport(self.config.to_json())
        for item in names:
            report.suites.append(self.run_suite(item))
        if self.store is not None:
            target = Path(self.config.out) if self.config.out else None
            result = self.store.write(name, report.to_json(), target)
            if result["status"] != "success":
                logger.warning("report not written: %s", result["detail"])
        return report

    def run_suite(self, name: str) -> SuiteResult:
        suite = _SUITES[name]
        suite_index = SUITE_NAMES.index(name)
        result = SuiteResult(name, resample_limit=suite.resample_limit)
        trials = suite.fixed_trials or self.config.trials or suite.default_trials
        logger.info("suite %s: starting (seed %d)", name, self.config.seed)
        started = time.perf_counter()
        cases = suite.cases(self)
        if not cases:
            result.notes.append("no configured case applies to this suite")
            logger.info("suite %s: no applicable case", name)
        for case_index, case in enumerate(cases):
            self.stream = stream_label(self.config.seed, (suite_index, case_index))
            try:
                ctx = suite.setup(self, case, derive_rng(self.config.seed, suite_index, case_index))
            except SkipCase as exc:
                result.notes.append(f"skipped {case}: {exc}")
                continue
            except Exception as exc:
                self._record(result, name, (suite_index, case_index), case, TrialOutcome(False, f"setup: {exc}"))
                continue
            for trial_index in range(min(trials, case.get("trials", trials))):
                path = (suite_index, case_index, trial_index)
                self.stream = stream_label(self.config.seed, path)
                outcome = self._run_trial(suite, case, ctx, derive_rng(self.config.seed, *path))
                self._record(result, name, path, case, outcome)
        result.seconds = time.perf_counter() - started
        level = logging.INFO if result.ok else logging.WARNING
        logger.log(level, "suite %s: %d passed, %d failed, %d resampled", name, result.passed, result.failed, result.resampled_trials)
        return result

    def replay(self, witness: Dict[str, Any]) -> TrialOutcome:
        """Re-execute one recorded trial from its witness alone."""
        name = witness["suite"]
        suite = _SUITES[name]
        path = tuple(int(x) for x in witness["stream"])
        seed = int(witness.get("seed", self.config.seed))
        case = witness["case"]
        self.stream = stream_label(seed, path[:2])
        try:
            ctx = suite.setup(self, case, derive_rng(seed, path[0], path[1]))
        except SkipCase as exc:
            return TrialOutcome(True, f"skipped: {exc}")
        except Exception as exc:
            return TrialOutcome(False, f"setup: {exc}")
        if len(path) < 3:
            return TrialOutcome(True, "setup reproduced without error")
        self.stream = stream_label(seed, path)
        return self._run_trial(suite, case, ctx, derive_rng(seed, *path))

    # -------------------------
    # Helpers
    # -------------------------
    def _run_trial(self, suite: _Suite, case: Dict[str, Any], ctx: Any, rng: Generator) -> TrialOutcome:
        try:
            return suite.trial(self, case, ctx, rng)
        except Exception as exc:
            return TrialOutcome(False, f"{type(exc).__name__}: {exc}")

    def _record(
        self, result: SuiteResult, name: str, path: Sequence[int], case: Dict[str, Any], outcome: TrialOutcome
    ) -> None:
        if outcome.resamples:
            result.resampled_trials += 1
        if outcome.passed:
            result.passed += 1
            return
        result.failed += 1
        witness = {
            "suite": name,
            "seed": self.config.seed,
            "stream": list(path),
            "label": stream_label(self.config.seed, path),
            "case": case,
            "detail": outcome.detail,
            "inputs": outcome.inputs,
        }
        result.failures.append(witness)
        logger.warning("suite %s: failure at %s: %s", name, witness["label"], outcome.detail)

    def algebra_for(self, n: int, rng: Generator, monogenic: bool = False) -> Algebra:
        described = self.config.algebra
        if described.get("kind") == "random":
            return random_etale(n, self.field, rng, self.config.budget)
        payload = dict(described)
        payload.setdefault("prime", str(self.config.prime))
        algebra = Algebra.from_json(payload, toy=self.config.toy)
        if algebra.n != n:
            raise SkipCase(f"configured algebra has dimension {algebra.n}")
        if monogenic and algebra.monogenic is None:
            raise SkipCase("case needs a monogenic algebra")
        return algebra

    def chain_cases(self, default: Sequence[Tuple[int, int]]) -> List[Dict[str, Any]]:
        cases = self.config.cases if self.config.cases is not None else default
        return [{"n": n, "r": r} for n, r in cases]

    def divisor_cases(self, default: Sequence[Tuple[int, int]]) -> List[Dict[str, Any]]:
        if self.config.cases is None:
            return [{"n": n, "r": r} for n, r in default]
        return [{"n": n, "r": r} for n, r in self.config.cases if n % r == 0]

    def random_primal(self, algebra: Algebra, dim: int, rng: Generator):
        return random_subspace(algebra.field, algebra.n, Side.PRIMAL, dim, rng, self.config.budget)


# -------------------------
# equivariance
# -------------------------
def _setup_chain(runner: SuiteRunner, case: Dict[str, Any], rng: Generator):
    algebra = runner.algebra_for(case["n"], rng)
    chain = euclid_sequence(case["n"], case["r"])
    flag = sample_good_flag(
        algebra, chain, rng, runner.config.budget, runner.config.flag_budget, runner.stream
    )
    return algebra, chain, flag


def _trial_equivariance(runner: SuiteRunner, case: Dict[str, Any], ctx, rng: Generator) -> TrialOutcome:
    algebra, chain, flag = ctx
    resamples = 0
    for _ in range(runner.config.budget):
        Y = runner.random_primal(algebra, chain.r, rng)
        a = algebra.random_invertible(rng, runner.config.budget)
        try:
            out, trace = big_phi(algebra, Y, flag, chain)
            moved, moved_trace = big_phi(algebra, gl1_translate(algebra, a, Y), flag, chain)
        except OutsideDomainError as exc:
            resamples += 1
            logger.debug("equivariance: resample after %s", exc)
            continue
        inputs = {"Y": Y.to_json(), "a": [str(x) for x in a]}
        if gl1_translate(algebra, a, out) != moved:
            return TrialOutcome(False, "big_phi(a·Y) differs from a·big_phi(Y)", resamples, inputs)
        for record, moved_record in zip(trace.steps, moved_trace.steps):
            expected = translate_point(algebra, a, record.target)
            if (expected.X, expected.Y) != (moved_record.target.X, moved_record.target.Y):
                return TrialOutcome(False, f"step {record.plan.index} is not equivariant", resamples, inputs)
        return TrialOutcome(True, "", resamples, inputs)
    raise RetryBudgetExhausted("equivariance trial", runner.config.budget)


# -------------------------
# dimension
# -------------------------
def _grid(runner: SuiteRunner, min_u: int) -> List[Dict[str, Any]]:
    cells = []
    for n in range(2, runner.config.grid_max_n + 1):
        for u in range(min_u, n + 1):
            for r in range(1, n + 1):
                for s in range(1, n + 1):
                    if admissible(n, r, s, u):
                        cells.append({"n": n, "r": r, "s": s, "u": u})
    return cells


def _setup_cell(runner: SuiteRunner, case: Dict[str, Any], rng: Generator):
    algebra = runner.algebra_for(case["n"], rng)
    return algebra, runner.random_primal(algebra, case["u"], rng)


def _trial_dimension(runner: SuiteRunner, case: Dict[str, Any], ctx, rng: Generator) -> TrialOutcome:
    algebra, U = ctx
    n, r, s, u = case["n"], case["r"], case["s"], case["u"]
    pt = sample_G_point(algebra, r, s, U, rng, runner.config.budget)
    inputs = {"point": pt.to_json()}
    rank = tangent_theta_rank(algebra, pt)
    if rank != r * s * u:
        return TrialOutcome(False, f"tangent rank {rank}, expected {r * s * u}", inputs=inputs)
    if tangent_dimension(algebra, pt) != r * (n - r) + s * (n - s) - s * r * u:
        return TrialOutcome(False, "tangent dimension off the formula", inputs=inputs)
    a = algebra.random_invertible(rng, runner.config.budget)
    moved = translate_point(algebra, a, pt)
    if not in_G(algebra, moved.X, moved.Y, moved.U):
        inputs["a"] = [str(x) for x in a]
        return TrialOutcome(False, "translated point left G(r,s,U)", inputs=inputs)
    return TrialOutcome(True, inputs=inputs)


# -------------------------
# roundtrip
# -------------------------
def _setup_duality(runner: SuiteRunner, case: Dict[str, Any], rng: Generator):
    n, d = case["n"], case["r"]
    algebra = runner.algebra_for(n, rng)
    for _ in range(runner.config.flag_budget):
        U = runner.random_primal(algebra, n // d - 1, rng)
        certs = is_good(algebra, U, [(d, 0), (0, d)], rng, runner.config.budget, runner.stream)
        if all(c.certified for c in certs):
            return algebra, U
    raise RetryBudgetExhausted("duality subspace", runner.config.flag_budget)


def _trial_roundtrip(runner: SuiteRunner, case: Dict[str, Any], ctx, rng: Generator) -> TrialOutcome:
    algebra, U = ctx
    d = case["r"]
    resamples = 0
    for _ in range(runner.config.budget):
        Y = runner.random_primal(algebra, d, rng)
        X = duality_map(algebra, Y, U)
        if isinstance(X, DomainViolation):
            resamples += 1
            continue
        inputs = {"Y": Y.to_json()}
        back = duality_inverse(algebra, X, U)
        if isinstance(back, DomainViolation) or back != Y:
            return TrialOutcome(False, "(U.((Y.U)^⊥))^⊥ differs from Y", resamples, inputs)
        X2 = random_subspace(algebra.field, algebra.n, Side.DUAL, d, rng, runner.config.budget)
        Y2 = duality_inverse(algebra, X2, U)
        if not isinstance(Y2, DomainViolation):
            if duality_map(algebra, Y2, U) != X2:
                inputs["X"] = X2.to_json()
                return TrialOutcome(False, "duality_map ∘ duality_inverse is not the identity", resamples, inputs)
        a = algebra.random_invertible(rng, runner.config.budget)
        if duality_map(algebra, gl1_translate(algebra, a, Y), U) != gl1_translate(algebra, a, X):
            inputs["a"] = [str(x) for x in a]
            return TrialOutcome(False, "duality_map is not equivariant", resamples, inputs)
        return TrialOutcome(True, "", resamples, inputs)
    raise RetryBudgetExhausted("roundtrip trial", runner.config.budget)


# -------------------------
# identity
# -------------------------
def _trial_identity(runner: SuiteRunner, case: Dict[str, Any], ctx, rng: Generator) -> TrialOutcome:
    algebra, chain, flag = ctx
    resamples = 0
    for _ in range(runner.config.budget):
        Y = runner.random_primal(algebra, chain.r, rng)
        try:
            out, _trace = big_phi(algebra, Y, flag, chain)
        except OutsideDomainError:
            resamples += 1
            continue
        if out != Y:
            return TrialOutcome(False, "big_phi(Y) differs from Y", resamples, {"Y": Y.to_json()})
        return TrialOutcome(True, "", resamples)
    raise RetryBudgetExhausted("identity trial", runner.config.budget)


# -------------------------
# goodness-grid
# -------------------------
def _setup_monogenic(runner: SuiteRunner, case: Dict[str, Any], rng: Generator):
    return runner.algebra_for(case["n"], rng, monogenic=True)


def _trial_goodness(runner: SuiteRunner, case: Dict[str, Any], algebra: Algebra, rng: Generator) -> TrialOutcome:
    r, s, u = case["r"], case["s"], case["u"]
    try:
        U, X, Y = good_witness_etale(algebra, r, s, u)
    except EngineError as exc:
        return TrialOutcome(False, str(exc))
    cert = is_good(algebra, U, [(r, s)], rng, runner.config.budget, runner.stream)[0]
    if not cert.certified:
        return TrialOutcome(False, "sampler did not certify the explicit witness subspace", inputs={"U": U.to_json()})
    return TrialOutcome(True)


# -------------------------
# fiber
# -------------------------
FIBER_CELL_TRIALS = 3


def _fiber_cases(runner: SuiteRunner) -> List[Dict[str, Any]]:
    """Chain cases, then every grid cell whose single step lands in an admissible locus."""
    cases = runner.chain_cases(CHAIN_CASES)
    for cell in _grid(runner, 0):
        n, r, s, u = cell["n"], cell["r"], cell["s"], cell["u"]
        if r == s or min(r, s) == 0:
            continue
        plan = step_plan(r, s, u)
        if u + plan.q > n or not admissible(n, *plan.output_dims, u + plan.q):
            continue
        cases.append({"kind": "cell", **cell, "trials": FIBER_CELL_TRIALS})
    return cases


def _setup_fiber(runner: SuiteRunner, case: Dict[str, Any], rng: Generator):
    if case.get("kind") == "cell":
        return runner.algebra_for(case["n"], rng)
    return _setup_chain(runner, case, rng)


def _trial_fiber(runner: SuiteRunner, case: Dict[str, Any], ctx, rng: Generator) -> TrialOutcome:
    if case.get("kind") == "cell":
        algebra = ctx
        plan = step_plan(case["r"], case["s"], case["u"])
        u_prev = runner.random_primal(algebra, plan.u, rng)
        ambient = full_subspace(algebra.field, algebra.n, Side.PRIMAL)
        u_next = random_extension(u_prev, ambient, plan.u + plan.q, rng, runner.config.budget)
        return _check_step_fiber(runner, algebra, plan, u_prev, u_next, rng)

    algebra, chain, flag = ctx
    if plan_fiber_total(chain) != expected_fiber_total(chain):
        return TrialOutcome(False, f"fiber total {plan_fiber_total(chain)} != {expected_fiber_total(chain)}")
    if not steps_balanced(chain):
        return TrialOutcome(False, "a step does not balance dim G(r,s,U) - fiber against its target")
    plans = chain_steps(chain)
    plan = plans[int(rng.integers(0, len(plans)))]
    u_prev, u_next = flag.subspaces[plan.index - 1], flag.subspaces[plan.index]
    return _check_step_fiber(runner, algebra, plan, u_prev, u_next, rng)


def _check_step_fiber(
    runner: SuiteRunner, algebra: Algebra, plan: StepPlan, u_prev: Subspace, u_next: Subspace, rng: Generator
) -> TrialOutcome:
    """Sample a target, pull it back twice, and measure the fiber it sits under."""
    n = algebra.n
    source, target_dim = step_dimension_balance(n, plan)
    if source != target_dim:
        return TrialOutcome(False, f"step does not balance: {source} != {target_dim}")
    t_r, t_s = plan.output_dims
    target = sample_G_point(algebra, t_r, t_s, u_next, rng, runner.config.budget)
    inputs = {"step": plan.index, "U": u_prev.to_json(), "target": target.to_json()}
    first = phi_fiber_sample(algebra, target, u_prev, u_next, rng, runner.config.budget, plan.case)
    second = phi_fiber_sample(algebra, target, u_prev, u_next, rng, runner.config.budget, plan.case)
    for preimage in (first, second):
        if phi_step(algebra, preimage, u_next, plan.case) != target:
            return TrialOutcome(False, "preimage does not map back to the target", inputs=inputs)

    if plan.case == REDUCE_DUAL:
        ambient = annihilator(right_product(algebra, target.Y, u_prev)).dim - target.X.dim
        k = plan.s * plan.q
    else:
        ambient = annihilator(dual_product(algebra, u_prev, target.X)).dim - target.Y.dim
        k = plan.r * plan.q
    measured = k * (ambient - k)
    expected = fiber_dimension(plan.case, n, plan.r, plan.s, plan.u, plan.q)
    if measured != expected:
        return TrialOutcome(False, f"fiber Grassmannian has dimension {measured}, expected {expected}", inputs=inputs)

    fiber = first_projection_fiber(algebra, first.X, first.U, first.s)
    if fiber.dimension != first.s * (n - first.u * first.r - first.s):
        return TrialOutcome(False, "projection fiber dimension off s(n-ru-s)", inputs=inputs)
    if not in_G_prime(algebra, first.X, sample_in_fiber(fiber, rng, runner.config.budget), first.U):
        return TrialOutcome(False, "fiber point is not incident", inputs=inputs)
    return TrialOutcome(True, inputs=inputs)


# -------------------------
# stabilizer
# -------------------------
def _stabilizer_cases(runner: SuiteRunner) -> List[Dict[str, Any]]:
    cases: List[Dict[str, Any]] = []
    for n in range(2, runner.config.grid_max_n + 1):
        for d in range(1, n):
            cases.append({"kind": "subspace", "n": n, "d": d})
    for item in runner.chain_cases(CHAIN_CASES):
        cases.append({"kind": "chain", **item})
    return cases


def _setup_stabilizer(runner: SuiteRunner, case: Dict[str, Any], rng: Generator):
    if case["kind"] == "chain":
        return _setup_chain(runner, case, rng)
    return runner.algebra_for(case["n"], rng)


def _trial_stabilizer(runner: SuiteRunner, case: Dict[str, Any], ctx, rng: Generator) -> TrialOutcome:
    if case["kind"] == "subspace":
        algebra = ctx
        E = runner.random_primal(algebra, case["d"], rng)
        stab = stabilizer_subalgebra(algebra, E)
        if stab != unit_line(algebra):
            return TrialOutcome(False, f"genericity anomaly: stabilizer of dim {stab.dim}", inputs={"E": E.to_json()})
        return TrialOutcome(True)

    algebra, chain, flag = ctx
    resamples = 0
    for _ in range(runner.config.budget):
        Y = runner.random_primal(algebra, chain.r, rng)
        try:
            _out, trace = big_phi(algebra, Y, flag, chain)
        except OutsideDomainError:
            resamples += 1
            continue
        for record in trace.steps:
            stab = point_stabilizer(algebra, record.target)
            if stab != unit_line(algebra):
                return TrialOutcome(
                    False,
                    f"genericity anomaly at step {record.plan.index}: stabilizer of dim {stab.dim}",
                    resamples,
                    {"Y": Y.to_json()},
                )
        return TrialOutcome(True, "", resamples)
    raise RetryBudgetExhausted("stabilizer trial", runner.config.budget)


# -------------------------
# oracle
# -------------------------
def _toy_algebra(case: Dict[str, Any]) -> Algebra:
    field = PrimeField(int(case["prime"]), toy=True)
    if "split" in case:
        return split_algebra(int(case["split"]), field)
    return etale_from_poly(case["poly"], field)


def _setup_oracle(runner: SuiteRunner, case: Dict[str, Any], rng: Generator):
    algebra = _toy_algebra(case)
    return algebra, primal_span(algebra, [tuple(v) for v in case["U"]])


def _trial_oracle(runner: SuiteRunner, case: Dict[str, Any], ctx, rng: Generator) -> TrialOutcome:
    algebra, U = ctx
    r, s = case["pair"]
    verdict = toy_oracle_goodness(algebra, U, r, s)
    certified = is_good(algebra, U, [(r, s)], rng, runner.config.budget, runner.stream)[0].certified
    inputs = {"oracle": verdict, "certified": certified}
    if certified and not verdict:
        return TrialOutcome(False, "sampler certified an instance the oracle rejects", inputs=inputs)
    if "expected" in case and case["expected"] != verdict:
        return TrialOutcome(False, f"oracle answered {verdict}, expected {case['expected']}", inputs=inputs)
    return TrialOutcome(True, inputs=inputs)


_SUITES: Dict[str, _Suite] = {
    "equivariance": _Suite(
        lambda runner: runner.chain_cases(CHAIN_CASES),
        _setup_chain,
        _trial_equivariance,
        default_trials=100,
        resample_limit=EQUIVARIANCE_RESAMPLE_LIMIT,
    ),
    "dimension": _Suite(lambda runner: _grid(runner, 1), _setup_cell, _trial_dimension, default_trials=10),
    "roundtrip": _Suite(
        lambda runner: runner.divisor_cases(DUALITY_CASES), _setup_duality, _trial_roundtrip, default_trials=50
    ),
    "identity": _Suite(
        lambda runner: runner.divisor_cases(IDENTITY_CASES), _setup_chain, _trial_identity, default_trials=50
    ),
    "goodness-grid": _Suite(
        lambda runner: _grid(runner, 0), _setup_monogenic, _trial_goodness, default_trials=1, fixed_trials=1
    ),
    "fiber": _Suite(_fiber_cases, _setup_fiber, _trial_fiber, default_trials=20),
    "stabilizer": _Suite(_stabilizer_cases, _setup_stabilizer, _trial_stabilizer, default_trials=20),
    "oracle": _Suite(
        lambda runner: [dict(case) for case in TOY_INSTANCES],
        _setup_oracle,
        _trial_oracle,
        default_trials=1,
        fixed_trials=1,
    ),
}


def run_suite(name: str, config: SuiteConfig, store: Optional[ReportStore] = None) -> SuiteReport:
    return SuiteRunner(config, store=store).run(name)
