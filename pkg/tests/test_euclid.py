from euclid_engine.algebra_core import matrix_algebra, random_etale, split_algebra
from euclid_engine.errors import DomainViolation, OutsideDomainError
from euclid_engine.euclid import (
    REDUCE_DUAL,
    REDUCE_PRIMAL,
    GoodFlag,
    big_phi,
    chain_report,
    chain_steps,
    duality_inverse,
    duality_map,
    euclid_sequence,
    expected_fiber_total,
    phi_fiber_sample,
    phi_step,
    plan_fiber_total,
    sample_good_flag,
    step_dimension_balance,
    step_plan,
    steps_balanced,
)
from euclid_engine.exact_linalg import PrimeField
from euclid_engine.incidence import IncidencePoint, point_in_G, sample_G_point, translate_point
from euclid_engine.rng_streams import derive_rng
from euclid_engine.subspace import (
    Side,
    full_subspace,
    gl1_translate,
    is_subspace_of,
    primal_span,
    random_extension,
    random_subspace,
    zero_subspace,
)

BIG = PrimeField()


def _setup(n, r, seed):
    rng = derive_rng(seed)
    algebra = random_etale(n, BIG, rng)
    chain = euclid_sequence(n, r)
    return algebra, chain, sample_good_flag(algebra, chain, rng), rng


def _run(algebra, chain, flag, rng):
    for _ in range(16):
        Y = random_subspace(BIG, algebra.n, Side.PRIMAL, chain.r, rng)
        try:
            return (Y,) + big_phi(algebra, Y, flag, chain)
        except OutsideDomainError:
            continue
    raise AssertionError("no generic subspace found")


def test_euclid_sequence_examples():
    chain = euclid_sequence(6, 3)
    assert chain.remainders == (6, 3, 0)
    assert chain.quotients == (2,)
    assert chain.length == 1 and not chain.needs_dualization

    chain = euclid_sequence(5, 3)
    assert chain.remainders == (5, 3, 2, 1, 0)
    assert chain.quotients == (1, 1, 2)
    assert chain.gcd == 1
    assert chain.flag_dims() == [0, 1, 2, 4]

    chain = euclid_sequence(3, 2)
    assert chain.quotients == (1, 2)
    assert chain.needs_dualization


def test_euclid_sequence_range():
    for n, r in ((5, 0), (5, 5), (3, 7)):
        try:
            euclid_sequence(n, r)
        except ValueError as exc:
            assert "r out of range" in str(exc)
        else:
            raise AssertionError(f"accepted r={r} for n={n}")


def test_alternation_and_fiber_totals():
    plans = chain_steps(euclid_sequence(5, 3))
    assert [p.case for p in plans] == [REDUCE_DUAL, REDUCE_PRIMAL, REDUCE_DUAL]
    assert [p.output_dims for p in plans] == [(2, 3), (2, 1), (0, 1)]
    for n in range(2, 12):
        for r in range(1, n):
            chain = euclid_sequence(n, r)
            assert plan_fiber_total(chain) == expected_fiber_total(chain)
            assert steps_balanced(chain)
    assert expected_fiber_total(euclid_sequence(3, 2)) == 0
    assert expected_fiber_total(euclid_sequence(5, 3)) == 2


def test_flag_shapes():
    algebra, chain, flag, _ = _setup(6, 3, 1)
    assert flag.dims() == [0, 2]
    assert flag.u_dual is None

    algebra, chain, flag, _ = _setup(5, 3, 2)
    assert flag.dims() == [0, 1, 2, 4]
    for small, big in zip(flag.subspaces, flag.subspaces[1:]):
        assert is_subspace_of(small, big)
    assert all(c.certified for c in flag.certificates)

    algebra, chain, flag, _ = _setup(3, 2, 3)
    assert flag.u_dual is not None and flag.u_dual.dim == 2


def test_flag_is_deterministic_under_seed():
    _, _, first, _ = _setup(5, 3, 4)
    _, _, second, _ = _setup(5, 3, 4)
    assert first.subspaces == second.subspaces


def test_divisor_case_is_identity():
    algebra, chain, flag, rng = _setup(6, 3, 5)
    for _ in range(5):
        Y, out, trace = _run(algebra, chain, flag, rng)
        assert out == Y
        step = trace.steps[0]
        assert step.target.X.is_zero()
        assert step.target.Y == Y


def test_first_step_starts_from_full_dual():
    algebra, chain, flag, rng = _setup(5, 3, 6)
    Y, out, trace = _run(algebra, chain, flag, rng)
    first = trace.steps[0]
    assert first.source.X == full_subspace(BIG, 5, Side.DUAL)
    assert first.target.dims() == (2, 3, 1)
    assert trace.steps[1].target.dims() == (2, 1, 2)
    assert out.dim == 1 and out.side is Side.PRIMAL
    assert trace.fiber_total == 2
    for step in trace.steps:
        assert point_in_G(algebra, step.target)


def test_even_chain_dualizes():
    algebra, chain, flag, rng = _setup(3, 2, 7)
    Y, out, trace = _run(algebra, chain, flag, rng)
    assert trace.dualized
    assert out.dim == 1
    assert trace.fiber_total == 0
    report = chain_report(chain, flag, trace, out)
    assert report["gcd"] == 1
    assert [s["case"] for s in report["steps"]] == [REDUCE_DUAL, REDUCE_PRIMAL]


def test_composite_is_equivariant():
    algebra, chain, flag, rng = _setup(5, 2, 8)
    for _ in range(5):
        Y, out, _ = _run(algebra, chain, flag, rng)
        a = algebra.random_invertible(rng)
        moved, _ = big_phi(algebra, gl1_translate(algebra, a, Y), flag, chain)
        assert moved == gl1_translate(algebra, a, out)


def test_step_is_equivariant():
    algebra, chain, flag, rng = _setup(7, 4, 9)
    Y, _, trace = _run(algebra, chain, flag, rng)
    record = trace.steps[1]
    a = algebra.random_invertible(rng)
    moved = phi_step(algebra, translate_point(algebra, a, record.source), flag.subspaces[2], record.plan.case)
    assert isinstance(moved, IncidencePoint)
    assert moved == translate_point(algebra, a, record.target)


def test_fiber_sample_maps_back():
    algebra, chain, flag, rng = _setup(5, 3, 10)
    plans = chain_steps(chain)
    for plan in plans:
        u_prev, u_next = flag.subspaces[plan.index - 1], flag.subspaces[plan.index]
        t_r, t_s = plan.output_dims
        target = sample_G_point(algebra, t_r, t_s, u_next, rng)
        first = phi_fiber_sample(algebra, target, u_prev, u_next, rng, case=plan.case)
        second = phi_fiber_sample(algebra, target, u_prev, u_next, rng, case=plan.case)
        assert first.dims() == (plan.r, plan.s, plan.u)
        assert phi_step(algebra, first, u_next, plan.case) == target
        assert phi_step(algebra, second, u_next, plan.case) == target


def test_duality_roundtrip_and_equivariance():
    rng = derive_rng(11)
    algebra = random_etale(4, BIG, rng)
    U = random_subspace(BIG, 4, Side.PRIMAL, 1, rng)
    for _ in range(20):
        Y = random_subspace(BIG, 4, Side.PRIMAL, 2, rng)
        X = duality_map(algebra, Y, U)
        assert not isinstance(X, DomainViolation)
        assert X.side is Side.DUAL and X.dim == 2
        assert duality_inverse(algebra, X, U) == Y
        a = algebra.random_invertible(rng)
        assert duality_map(algebra, gl1_translate(algebra, a, Y), U) == gl1_translate(algebra, a, X)


def test_duality_flags_degenerate_input():
    field = PrimeField(7, toy=True)
    algebra = split_algebra(4, field)
    U = primal_span(algebra, [(1, 0, 0, 0)])
    Y = primal_span(algebra, [(0, 1, 0, 0), (0, 0, 1, 0)])
    violation = duality_map(algebra, Y, U)
    assert isinstance(violation, DomainViolation)
    assert violation.condition == "a"


def test_phi_step_reports_domain_violation():
    field = PrimeField(7, toy=True)
    algebra = split_algebra(3, field)
    Y = primal_span(algebra, [(0, 1, 0)])
    pt = IncidencePoint.build(algebra, full_subspace(field, 3, Side.DUAL), Y, zero_subspace(field, 3, Side.PRIMAL))
    outcome = phi_step(algebra, pt, primal_span(algebra, [(1, 0, 0)]), REDUCE_DUAL)
    assert isinstance(outcome, DomainViolation)
    assert outcome.condition == "a"


def test_big_phi_reports_failing_step():
    field = PrimeField(7, toy=True)
    algebra = split_algebra(3, field)
    chain = euclid_sequence(3, 1)
    flag = GoodFlag((zero_subspace(field, 3, Side.PRIMAL), primal_span(algebra, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])))
    try:
        big_phi(algebra, primal_span(algebra, [(0, 1, 0)]), flag, chain)
    except OutsideDomainError as exc:
        assert exc.violation.step == 1
        assert "at step 1" in str(exc)
    else:
        raise AssertionError("zero-divisor line passed the chain")


def test_step_plan_outside_a_chain():
    plan = step_plan(3, 2, 1)
    assert (plan.case, plan.q, plan.t) == (REDUCE_DUAL, 1, 1)
    assert plan.output_dims == (1, 2)
    assert plan.fiber_dim(9) == 2 * 1 * (9 - 1 * 2 - 3)
    source, target = step_dimension_balance(9, plan)
    assert source == target

    plan = step_plan(2, 5, 0)
    assert (plan.case, plan.q, plan.t) == (REDUCE_PRIMAL, 2, 1)
    assert plan.output_dims == (2, 1)
    try:
        step_plan(0, 1, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("step with r = 0 accepted")


def test_fiber_sample_off_the_chain():
    rng = derive_rng(16)
    algebra = random_etale(9, BIG, rng)
    plan = step_plan(3, 2, 1)
    u_prev = random_subspace(BIG, 9, Side.PRIMAL, 1, rng)
    u_next = random_extension(u_prev, full_subspace(BIG, 9, Side.PRIMAL), 2, rng)
    target = sample_G_point(algebra, *plan.output_dims, u_next, rng)
    preimage = phi_fiber_sample(algebra, target, u_prev, u_next, rng, case=plan.case)
    assert preimage.dims() == (3, 2, 1)
    assert phi_step(algebra, preimage, u_next, plan.case) == target


def test_flag_certificates_carry_their_stream():
    rng = derive_rng(17)
    algebra = random_etale(5, BIG, rng)
    flag = sample_good_flag(algebra, euclid_sequence(5, 3), rng, stream="17:1001")
    assert flag.certificates
    for cert in flag.certificates:
        assert cert.stream == "17:1001"
        assert cert.attempts >= 1


def test_composite_is_equivariant_on_matrix_algebra():
    rng = derive_rng(18)
    algebra = matrix_algebra(2, BIG)
    chain = euclid_sequence(4, 3)
    flag = sample_good_flag(algebra, chain, rng)
    assert flag.u_dual is not None
    for _ in range(5):
        Y, out, trace = _run(algebra, chain, flag, rng)
        a = algebra.random_invertible(rng)
        moved, moved_trace = big_phi(algebra, gl1_translate(algebra, a, Y), flag, chain)
        assert moved == gl1_translate(algebra, a, out)
        for record, moved_record in zip(trace.steps, moved_trace.steps):
            assert moved_record.target == translate_point(algebra, a, record.target)
