"""The Euclid chain of step maps and its composite.

Starting from (A*, Y) with Y of dimension r, each step shrinks one coordinate
of the incidence point using the next subspace of a good flag. The shrinking
side alternates with the parity of the step, following the remainders of the
Euclidean algorithm on (n, r). When the chain has even length the result sits
in the dual Grassmannian and is brought back with the duality map.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

from numpy.random import Generator

from euclid_engine.algebra_core import Algebra
from euclid_engine.errors import (
    ChainConsistencyError,
    DomainViolation,
    OutsideDomainError,
    RetryBudgetExhausted,
)
from euclid_engine.incidence import (
    GoodnessCertificate,
    IncidencePoint,
    admissible,
    g_dimension,
    in_G,
    is_good,
)
from euclid_engine.subspace import (
    Side,
    Subspace,
    annihilator,
    dual_product,
    full_subspace,
    intersect,
    is_subspace_of,
    random_extension,
    random_subspace,
    right_product,
    zero_subspace,
)

logger = logging.getLogger(__name__)

REDUCE_DUAL = "reduce-dual"
REDUCE_PRIMAL = "reduce-primal"

StepOutcome = Union[IncidencePoint, DomainViolation]


@dataclass(frozen=True)
class EuclidChain:
    n: int
    r: int
    remainders: Tuple[int, ...]
    quotients: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.quotients)

    @property
    def gcd(self) -> int:
        return self.remainders[-2]

    @property
    def needs_dualization(self) -> bool:
        return self.length % 2 == 0

    def flag_dims(self) -> List[int]:
        dims = [0]
        for q in self.quotients:
            dims.append(dims[-1] + q)
        return dims

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "r": self.r,
            "gcd": self.gcd,
            "remainders": list(self.remainders),
            "quotients": list(self.quotients),
        }


def euclid_sequence(n: int, r: int) -> EuclidChain:
    if not 0 < r < n:
        raise ValueError(f"r out of range: need 0 < r < n, got n={n} r={r}")
    remainders = [n, r]
    quotients: List[int] = []
    while remainders[-1] != 0:
        q, rest = divmod(remainders[-2], remainders[-1])
        quotients.append(q)
        remainders.append(rest)
    return EuclidChain(n, r, tuple(remainders), tuple(quotients))


@dataclass(frozen=True)
class StepPlan:
    """Integer data of one step: input dims (r, s, u), increment q, remainder t."""

    index: int
    case: str
    r: int
    s: int
    u: int
    q: int
    t: int

    @property
    def output_dims(self) -> Tuple[int, int]:
        return (self.t, self.s) if self.case == REDUCE_DUAL else (self.r, self.t)

    def fiber_dim(self, n: int) -> int:
        return fiber_dimension(self.case, n, self.r, self.s, self.u, self.q)


def chain_steps(chain: EuclidChain) -> List[StepPlan]:
    """Step i is reduce-dual for odd i and reduce-primal for even i."""
    plans: List[StepPlan] = []
    r_x, s_y, u = chain.n, chain.r, 0
    for index, q in enumerate(chain.quotients, start=1):
        case = REDUCE_DUAL if index % 2 == 1 else REDUCE_PRIMAL
        by_size = REDUCE_DUAL if r_x >= s_y else REDUCE_PRIMAL
        if case != by_size:
            raise ChainConsistencyError(
                f"step {index}: parity gives {case} but dims (r={r_x}, s={s_y}) give {by_size}"
            )
        big, small = (r_x, s_y) if case == REDUCE_DUAL else (s_y, r_x)
        t = big - q * small
        if t != chain.remainders[index + 1]:
            raise ChainConsistencyError(f"step {index}: remainder {t} differs from {chain.remainders[index + 1]}")
        plans.append(StepPlan(index, case, r_x, s_y, u, q, t))
        if case == REDUCE_DUAL:
            r_x = t
        else:
            s_y = t
        u += q
    return plans


def step_plan(r: int, s: int, u: int, index: int = 0) -> StepPlan:
    """The step out of G(r,s,U) for dim U = u, outside any chain.

    The larger of r, s is divided by the smaller; q is the quotient and the
    remainder replaces the larger one.
    """
    if min(r, s) < 1 or u < 0:
        raise ValueError(f"a step needs r, s ≥ 1 and u ≥ 0, got r={r} s={s} u={u}")
    if r >= s:
        q, t = divmod(r, s)
        return StepPlan(index, REDUCE_DUAL, r, s, u, q, t)
    q, t = divmod(s, r)
    return StepPlan(index, REDUCE_PRIMAL, r, s, u, q, t)


def fiber_dimension(case: str, n: int, r: int, s: int, u: int, q: int) -> int:
    """Dimension of a generic fiber of the step map: sq(n-us-r), or rq(n-ur-s) mirrored."""
    if case == REDUCE_DUAL:
        return s * q * (n - u * s - r)
    return r * q * (n - u * r - s)


def step_dimension_balance(n: int, plan: StepPlan) -> Tuple[int, int]:
    """(dim G(r,s,U) - fiber, dim of the target locus); equal for a dominant step."""
    t_r, t_s = plan.output_dims
    source = g_dimension(n, plan.r, plan.s, plan.u) - plan.fiber_dim(n)
    return source, g_dimension(n, t_r, t_s, plan.u + plan.q)


@dataclass(frozen=True)
class GoodFlag:
    """U_0 = {0} ⊂ U_1 ⊂ ... ⊂ U_s, plus U_dual when the chain length is even."""

    subspaces: Tuple[Subspace, ...]
    certificates: Tuple[GoodnessCertificate, ...] = ()
    u_dual: Optional[Subspace] = None

    def dims(self) -> List[int]:
        return [u.dim for u in self.subspaces]

    def to_json(self) -> Dict[str, Any]:
        return {
            "subspaces": [u.to_json() for u in self.subspaces],
            "dual": self.u_dual.to_json() if self.u_dual is not None else None,
            "certificates": [c.to_json() for c in self.certificates],
        }


def sample_good_flag(
    algebra: Algebra,
    chain: EuclidChain,
    rng: Generator,
    budget: int = 64,
    flag_budget: int = 16,
    stream: Optional[str] = None,
) -> GoodFlag:
    """Random nested flag, each U_i certified for the pair its step leaves behind.

    `stream` is copied into every certificate so a flag can be traced back to
    the random stream that produced it.
    """
    n = algebra.n
    plans = chain_steps(chain)
    failing = 0
    for attempt in range(1, flag_budget + 1):
        subspaces = [zero_subspace(algebra.field, n, Side.PRIMAL)]
        ambient = full_subspace(algebra.field, n, Side.PRIMAL)
        certificates: List[GoodnessCertificate] = []
        ok = True
        for plan in plans:
            nxt = random_extension(subspaces[-1], ambient, plan.u + plan.q, rng, budget)
            cert = is_good(algebra, nxt, [plan.output_dims], rng, budget, stream)[0]
            certificates.append(cert)
            if not cert.certified:
                failing = plan.index
                ok = False
                break
            subspaces.append(nxt)
        if not ok:
            logger.debug("sample_good_flag: redraw %d, step %d not certified", attempt, failing)
            continue
        u_dual = None
        if chain.needs_dualization:
            d = chain.gcd
            u_dual = random_subspace(algebra.field, n, Side.PRIMAL, n // d - 1, rng, budget)
            dual_certs = is_good(algebra, u_dual, [(d, 0), (0, d)], rng, budget, stream)
            certificates.extend(dual_certs)
            if not all(c.certified for c in dual_certs):
                failing = chain.length + 1
                logger.debug("sample_good_flag: redraw %d, dual subspace not certified", attempt)
                continue
        return GoodFlag(tuple(subspaces), tuple(certificates), u_dual)
    raise RetryBudgetExhausted(f"sample_good_flag[step {failing}]", flag_budget)


# -------------------------
# Step maps
# -------------------------
def _infer_case(pt: IncidencePoint) -> str:
    return REDUCE_DUAL if pt.r >= pt.s else REDUCE_PRIMAL


def phi_step(algebra: Algebra, pt: IncidencePoint, u_next: Subspace, case: Optional[str] = None) -> StepOutcome:
    """(X, Y) ↦ (X ∩ (Y.U')^⊥, Y) when reducing the dual side, else (X, Y ∩ (U'.X)^⊥).

    Returns a DomainViolation instead of a point when the input lies outside
    the open set where the map is defined.
    """
    case = case or _infer_case(pt)
    if not is_subspace_of(pt.U, u_next):
        raise ValueError("U is not contained in U'")
    n, r, s, u = algebra.n, pt.r, pt.s, pt.U.dim
    q = u_next.dim - u

    if case == REDUCE_DUAL:
        t = r - q * s
        yu = right_product(algebra, pt.Y, u_next)
        if yu.dim != s * (u + q):
            return DomainViolation("a", f"dim Y.U' = {yu.dim}, expected {s * (u + q)}")
        x_new = intersect(pt.X, annihilator(yu))
        if x_new.dim != t:
            return DomainViolation("b", f"dim X ∩ (Y.U')^⊥ = {x_new.dim}, expected {t}")
        X, Y = x_new, pt.Y
    elif case == REDUCE_PRIMAL:
        t = s - q * r
        ux = dual_product(algebra, u_next, pt.X)
        if ux.dim != r * (u + q):
            return DomainViolation("a", f"dim U'.X = {ux.dim}, expected {r * (u + q)}")
        y_new = intersect(pt.Y, annihilator(ux))
        if y_new.dim != t:
            return DomainViolation("b", f"dim Y ∩ (U'.X)^⊥ = {y_new.dim}, expected {t}")
        X, Y = pt.X, y_new
    else:
        raise ValueError(f"unknown step case {case!r}")

    if not admissible(n, X.dim, Y.dim, u_next.dim) or not in_G(algebra, X, Y, u_next):
        return DomainViolation("c", f"image ({X.dim},{Y.dim}) is not in the open locus for U' of dim {u_next.dim}")
    return IncidencePoint.build(algebra, X, Y, u_next)


def phi_fiber_sample(
    algebra: Algebra,
    target: IncidencePoint,
    u_prev: Subspace,
    u_next: Subspace,
    rng: Generator,
    budget: int = 64,
    case: Optional[str] = None,
) -> IncidencePoint:
    """A random preimage of `target` under the step map for U ⊂ U'."""
    if target.U != u_next:
        raise ValueError("target is not a point for U'")
    case = case or (REDUCE_DUAL if target.r < target.s else REDUCE_PRIMAL)
    q = u_next.dim - u_prev.dim
    for attempt in range(1, budget + 1):
        if case == REDUCE_DUAL:
            ambient = annihilator(right_product(algebra, target.Y, u_prev))
            X = random_extension(target.X, ambient, target.X.dim + q * target.s, rng, budget)
            Y = target.Y
        else:
            ambient = annihilator(dual_product(algebra, u_prev, target.X))
            X = target.X
            Y = random_extension(target.Y, ambient, target.Y.dim + q * target.r, rng, budget)
        if not in_G(algebra, X, Y, u_prev):
            logger.debug("phi_fiber_sample: draw %d left the open locus", attempt)
            continue
        candidate = IncidencePoint.build(algebra, X, Y, u_prev)
        image = phi_step(algebra, candidate, u_next, case)
        if isinstance(image, IncidencePoint) and image == target:
            return candidate
        logger.debug("phi_fiber_sample: draw %d does not map back to the target", attempt)
    raise RetryBudgetExhausted("phi_fiber_sample", budget)


# -------------------------
# Duality
# -------------------------
def _duality_dims(algebra: Algebra, dim: int, u: Subspace) -> int:
    q = u.dim + 1
    if dim * q != algebra.n:
        raise ValueError(f"duality needs n = q·d, got n={algebra.n}, d={dim}, q={q}")
    return (q - 1) * dim


def duality_map(algebra: Algebra, Y: Subspace, U: Subspace) -> Union[Subspace, DomainViolation]:
    """Y ↦ (Y.U)^⊥."""
    expected = _duality_dims(algebra, Y.dim, U)
    yu = right_product(algebra, Y, U)
    if yu.dim != expected:
        return DomainViolation("a", f"dim Y.U = {yu.dim}, expected {expected}")
    return annihilator(yu)


def duality_inverse(algebra: Algebra, X: Subspace, U: Subspace) -> Union[Subspace, DomainViolation]:
    """X ↦ (U.X)^⊥."""
    expected = _duality_dims(algebra, X.dim, U)
    ux = dual_product(algebra, U, X)
    if ux.dim != expected:
        return DomainViolation("a", f"dim U.X = {ux.dim}, expected {expected}")
    return annihilator(ux)


# -------------------------
# Composite
# -------------------------
@dataclass(frozen=True)
class StepRecord:
    plan: StepPlan
    source: IncidencePoint
    target: IncidencePoint
    fiber_dim: int

    def to_json(self) -> Dict[str, Any]:
        p = self.plan
        return {
            "index": p.index,
            "case": p.case,
            "dims": [p.r, p.s, p.u, p.q],
            "output_dims": list(p.output_dims),
            "fiber_dim": self.fiber_dim,
        }


@dataclass
class ChainTrace:
    steps: List[StepRecord] = field(default_factory=list)
    dualized: bool = False

    @property
    def fiber_total(self) -> int:
        return sum(step.fiber_dim for step in self.steps)

    def final_point(self) -> Optional[IncidencePoint]:
        return self.steps[-1].target if self.steps else None


def big_phi(
    algebra: Algebra, Y: Subspace, flag: GoodFlag, chain: Optional[EuclidChain] = None
) -> Tuple[Subspace, ChainTrace]:
    """Run the whole chain on Y; raises OutsideDomainError with the failing step."""
    n = algebra.n
    chain = chain or euclid_sequence(n, Y.dim)
    if Y.dim != chain.r or chain.n != n:
        raise ValueError(f"Y of dim {Y.dim} does not match chain (n={chain.n}, r={chain.r})")
    if flag.dims() != chain.flag_dims():
        raise ValueError(f"flag dims {flag.dims()} do not match chain {chain.flag_dims()}")

    trace = ChainTrace()
    pt = IncidencePoint.build(algebra, full_subspace(algebra.field, n, Side.DUAL), Y, flag.subspaces[0])
    for plan in chain_steps(chain):
        image = phi_step(algebra, pt, flag.subspaces[plan.index], plan.case)
        if isinstance(image, DomainViolation):
            raise OutsideDomainError(image.at_step(plan.index))
        if (image.r, image.s) != plan.output_dims:
            raise ChainConsistencyError(f"step {plan.index}: output dims {(image.r, image.s)} != {plan.output_dims}")
        trace.steps.append(StepRecord(plan, pt, image, plan.fiber_dim(n)))
        pt = image

    if not chain.needs_dualization:
        return pt.Y, trace
    if flag.u_dual is None:
        raise ValueError("even chain length needs a dual subspace in the flag")
    out = duality_inverse(algebra, pt.X, flag.u_dual)
    if isinstance(out, DomainViolation):
        raise OutsideDomainError(out.at_step(chain.length + 1))
    trace.dualized = True
    return out, trace


def chain_report(chain: EuclidChain, flag: GoodFlag, trace: ChainTrace, output: Subspace) -> Dict[str, Any]:
    return {
        "n": chain.n,
        "r": chain.r,
        "gcd": chain.gcd,
        "remainders": list(chain.remainders),
        "flag_dims": flag.dims(),
        "dual_dim": flag.u_dual.dim if flag.u_dual is not None else None,
        "steps": [step.to_json() for step in trace.steps],
        "fiber_total": trace.fiber_total,
        "dualized": trace.dualized,
        "output": output.to_json(),
    }


def expected_fiber_total(chain: EuclidChain) -> int:
    """dim 𝔾(r,A) - dim 𝔾(d,A)."""
    n, r, d = chain.n, chain.r, chain.gcd
    return r * (n - r) - d * (n - d)


def plan_fiber_total(chain: EuclidChain) -> int:
    return sum(plan.fiber_dim(chain.n) for plan in chain_steps(chain))


def steps_balanced(chain: EuclidChain) -> bool:
    return all(a == b for a, b in (step_dimension_balance(chain.n, p) for p in chain_steps(chain)))

