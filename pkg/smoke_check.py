# smoke_check.py - quick end-to-end check of the engine on one small chain
import sys
import traceback

from euclid_engine.algebra_core import etale_from_poly
from euclid_engine.euclid import big_phi, euclid_sequence, sample_good_flag
from euclid_engine.exact_linalg import PrimeField
from euclid_engine.rng_streams import derive_rng
from euclid_engine.subspace import Side, random_subspace

try:
    field = PrimeField()
    algebra = etale_from_poly([-2, 0, 0], field)
    print('algebra:', algebra)
    chain = euclid_sequence(3, 2)
    print('remainders:', list(chain.remainders), 'quotients:', list(chain.quotients))
    rng = derive_rng(7)
    flag = sample_good_flag(algebra, chain, rng)
    print('flag dims:', flag.dims(), 'dual:', flag.u_dual.dim if flag.u_dual else None)
    Y = random_subspace(field, 3, Side.PRIMAL, 2, rng)
    out, trace = big_phi(algebra, Y, flag, chain)
    print('output dim:', out.dim, 'fiber total:', trace.fiber_total, 'dualized:', trace.dualized)
except Exception as e:
    print('Smoke check FAILED:', e)
    traceback.print_exc()
    sys.exit(1)
