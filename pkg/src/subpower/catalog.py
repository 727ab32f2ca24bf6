"""Ready-made algebras: cyclic affine algebras and small wreath products.

``a6()`` is the six-element desk algebra used throughout the tests: Z_3
extended by Z_2 through a single nontrivial Mal'tsev shift.  ``w15()`` is
the fifteen-element analogue (Z_5 by Z_3) with a polynomial shift pattern,
and ``a6_shift()`` adds a unary symbol whose shift makes the unary part of
the difference clonoid nontrivial.
"""

from __future__ import annotations

import random
from itertools import product

from .affine import AbelianGroupSpec
from .circuits import parse_sexpr
from .core import FiniteAlgebra, Operation
from .wreath import WreathSpec

M_CIRCUIT = "(m x1 x2 x3)"


def maltsev_table_mod(m: int) -> tuple:
    return tuple((x - y + z) % m
                 for x in range(m) for y in range(m) for z in range(m))


def zmod_algebra(m: int):
    """The affine algebra (Z_m, x - y + z) with its group spec."""
    alg = FiniteAlgebra(m, [Operation("m", 3, maltsev_table_mod(m))],
                        parse_sexpr(M_CIRCUIT))
    return alg, AbelianGroupSpec((m,))


def zmod_group_algebra(m: int):
    """Z_m with the full group signature {add, neg, zero} plus m."""
    add = tuple((x + y) % m for x in range(m) for y in range(m))
    neg = tuple((-x) % m for x in range(m))
    alg = FiniteAlgebra(
        m,
        [Operation("add", 2, add), Operation("neg", 1, neg),
         Operation("zero", 0, (0,)), Operation("m", 3, maltsev_table_mod(m))],
        parse_sexpr(M_CIRCUIT))
    return alg, AbelianGroupSpec((m,))


def _hat_key(u1: int, u2: int, u3: int, p: int) -> int:
    return (u1 * p + u2) * p + u3


def a6() -> WreathSpec:
    """L = Z_3, U = Z_2, signature {m}; shift fixed at (0,1,0) -> 1."""
    left, left_group = zmod_algebra(3)
    right, _ = zmod_algebra(2)
    hat = [0] * 8
    hat[_hat_key(0, 1, 0, 2)] = 1
    hat[_hat_key(1, 0, 1, 2)] = 0
    return WreathSpec(left=left, left_group=left_group, right=right,
                      hat={"m": tuple(hat)}, maltsev=parse_sexpr(M_CIRCUIT))


def a6_symmetric() -> WreathSpec:
    """a6 with both free shift slots set to 1.

    Unlike a6, every direct-product term of this algebra lifts to a
    shift-free term, so the representation path that sums direct-product
    members with clonoid images is sound here (checked in the tests at
    arities up to 3).
    """
    left, left_group = zmod_algebra(3)
    right, _ = zmod_algebra(2)
    hat = [0] * 8
    hat[_hat_key(0, 1, 0, 2)] = 1
    hat[_hat_key(1, 0, 1, 2)] = 1
    return WreathSpec(left=left, left_group=left_group, right=right,
                      hat={"m": tuple(hat)}, maltsev=parse_sexpr(M_CIRCUIT))


def a6_shift() -> WreathSpec:
    """a6 plus a unary symbol e with e(l, u) = (l + [u = 1], u + 1).

    The extra symbol gives the difference clonoid a nontrivial unary part
    (e composed with itself shifts the l-coordinate by a constant), which
    the plain three-symbol-free algebra cannot exhibit.
    """
    m3 = maltsev_table_mod(3)
    m2 = maltsev_table_mod(2)
    left = FiniteAlgebra(3, [Operation("m", 3, m3),
                             Operation("e", 1, (0, 1, 2))],
                        parse_sexpr(M_CIRCUIT))
    right = FiniteAlgebra(2, [Operation("m", 3, m2),
                              Operation("e", 1, (1, 0))],
                         parse_sexpr(M_CIRCUIT))
    hat_m = [0] * 8
    hat_m[_hat_key(0, 1, 0, 2)] = 1
    return WreathSpec(left=left, left_group=AbelianGroupSpec((3,)),
                      right=right,
                      hat={"m": tuple(hat_m), "e": (0, 1)},
                      maltsev=parse_sexpr(M_CIRCUIT))


def w15() -> WreathSpec:
    """L = Z_5, U = Z_3, signature {m}; shift (u1-u2)(u2-u3) taken mod 5."""
    left, left_group = zmod_algebra(5)
    right, _ = zmod_algebra(3)
    hat = []
    for u1, u2, u3 in product(range(3), repeat=3):
        hat.append((((u1 - u2) % 3) * ((u2 - u3) % 3)) % 5)
    return WreathSpec(left=left, left_group=left_group, right=right,
                      hat={"m": tuple(hat)}, maltsev=parse_sexpr(M_CIRCUIT))


def random_wreath(p: int, l_order: int, seed: int) -> WreathSpec:
    """A random wreath product of Z_{l_order} by Z_p (signature {m}).

    Shift values at the unconstrained u-triples are drawn uniformly, so
    different seeds give different difference clonoids.
    """
    rng = random.Random(seed)
    left, left_group = zmod_algebra(l_order)
    right, _ = zmod_algebra(p)
    hat = [0] * (p ** 3)
    for u1, u2, u3 in product(range(p), repeat=3):
        if u1 != u2 and u2 != u3:
            hat[_hat_key(u1, u2, u3, p)] = rng.randrange(l_order)
    return WreathSpec(left=left, left_group=left_group, right=right,
                      hat={"m": tuple(hat)}, maltsev=parse_sexpr(M_CIRCUIT))
