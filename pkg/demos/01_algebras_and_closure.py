#!/usr/bin/env python3
"""Finite algebras as tables, circuit evaluation, and exhaustive closure.

Every algebra here is a domain {0..n-1} plus named operation tables and a
designated Mal'tsev circuit.  The closure engine generates subpowers by
brute force; it is the reference that everything faster is tested against.
"""

from subpower import (ClosureCapExceeded, eval_circuit, parse_sexpr,
                      smp_oracle, subpower_closure, verify_maltsev)
from subpower.catalog import a6, zmod_algebra, zmod_group_algebra

# --- the three-element affine algebra (Z_3, x - y + z) ---------------------
z3, _ = zmod_algebra(3)
print("Z_3 Mal'tsev identities hold:", verify_maltsev(z3))
print("m(1, 2, 0) =", eval_circuit(z3, z3.maltsev, [(1,), (2,), (0,)])[0])

# --- a six-element wreath product -------------------------------------------
# Pairs (l, u) with l in Z_3, u in Z_2, encoded as l*2 + u.  The single
# operation acts affinely on l, shifted by a function of the u-parts.
spec = a6()
alg = spec.algebra
print("\nA6 is Mal'tsev:", verify_maltsev(alg))
x, y, z = spec.pair(0, 0), spec.pair(1, 0), spec.pair(1, 1)
print("one application:", f"m({x},{y},{z}) =",
      eval_circuit(alg, alg.maltsev, [(x,), (y,), (z,)])[0])

# --- generating subpowers ----------------------------------------------------
zg, _ = zmod_group_algebra(3)
closure = subpower_closure(zg, [(1, 2)])
print("\nZ_3 group closure of {(1,2)}:", sorted(closure))
print("(2,1) generated?", smp_oracle(zg, [(1, 2)], (2, 1)))
print("(1,1) generated?", smp_oracle(zg, [(1, 2)], (1, 1)))

# The closure is exponential in general; a cap turns runaway growth into a
# distinguished signal instead of an out-of-memory session.
z6, _ = zmod_group_algebra(6)
try:
    subpower_closure(z6, [(1, 0), (0, 1)], cap=10)
except ClosureCapExceeded as e:
    print("\ncapped closure says:", e)

# Closures of wreath generators mix both levels: the u-parts close under
# addition mod 2 while each u-pattern carries a coset of l-parts.
members = sorted(subpower_closure(alg, [(0, 1), (3, 2)]))
print("\nA6 closure of {(0,1), (3,2)} has", len(members), "tuples:")
print(members)
