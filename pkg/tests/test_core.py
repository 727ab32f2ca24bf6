import random

import pytest

from subpower.catalog import zmod_algebra, zmod_group_algebra
from subpower.circuits import parse_sexpr, variable
from subpower.core import (AlgebraError, ClosureCapExceeded, FiniteAlgebra,
                           Operation, clone_enumerate, eval_circuit,
                           is_congruence, kernel_partition, smp_oracle,
                           subpower_closure, verify_central, verify_maltsev)


def test_eval_projection():
    alg, _ = zmod_algebra(3)
    c = variable(2, 3)
    assert eval_circuit(alg, c, [(0,), (1,), (2,)]) == (1,)


def test_eval_modular_maltsev():
    alg, _ = zmod_algebra(3)
    assert eval_circuit(alg, alg.maltsev, [(1,), (2,), (0,)]) == (2,)


def test_eval_wreath_forced_shift(a6_spec):
    alg = a6_spec.algebra
    args = [(a6_spec.pair(0, 0),), (a6_spec.pair(1, 0),), (a6_spec.pair(1, 1),)]
    assert eval_circuit(alg, alg.maltsev, args) == (a6_spec.pair(0, 1),)


def test_eval_errors():
    alg, _ = zmod_algebra(3)
    with pytest.raises(AlgebraError):
        eval_circuit(alg, parse_sexpr("(nope x1 x2 x3)"), [(0,), (0,), (0,)])
    with pytest.raises(AlgebraError):
        eval_circuit(alg, alg.maltsev, [(0,), (0,)])
    with pytest.raises(AlgebraError):
        eval_circuit(alg, alg.maltsev, [(0,), (0,), (7,)])


def test_closure_idempotent_orbit(a6_spec):
    alg = a6_spec.algebra
    assert subpower_closure(alg, [(3, 1)]) == {(3, 1)}


def test_closure_cyclic_subgroup(z3_group):
    alg, _ = z3_group
    assert subpower_closure(alg, [(1, 2)]) == {(0, 0), (1, 2), (2, 1)}


def test_closure_parity_constraint():
    alg, _ = zmod_algebra(2)
    assert subpower_closure(alg, [(0, 1), (1, 0)]) == {(0, 1), (1, 0)}


def test_closure_cap():
    alg, _ = zmod_group_algebra(6)
    with pytest.raises(ClosureCapExceeded):
        subpower_closure(alg, [(1, 0), (0, 1)], cap=10)


def test_oracle_examples(z3_group):
    alg, _ = z3_group
    gens = [(1, 2)]
    assert smp_oracle(alg, gens, (1, 2)) is True
    assert smp_oracle(alg, gens, (2, 1)) is True
    assert smp_oracle(alg, gens, (1, 1)) is False


def test_oracle_generators_always_members(a6_spec):
    alg = a6_spec.algebra
    rng = random.Random(0)
    for _ in range(10):
        gens = [tuple(rng.randrange(6) for _ in range(3)) for _ in range(3)]
        for g in gens:
            assert smp_oracle(alg, gens, g)


def test_closure_is_closed(a6_spec):
    alg = a6_spec.algebra
    rng = random.Random(1)
    gens = [tuple(rng.randrange(6) for _ in range(3)) for _ in range(3)]
    closed = subpower_closure(alg, gens)
    members = sorted(closed)
    for _ in range(200):
        a, b, c = (rng.choice(members) for _ in range(3))
        val = eval_circuit(alg, alg.maltsev, [a, b, c])
        assert val in closed


def test_clone_enumerate_arity1():
    alg, _ = zmod_algebra(2)
    tables = {t for t, _ in clone_enumerate(alg, 1, 100)}
    assert tables == {(0, 1)}


def test_clone_enumerate_plus_only():
    plus = tuple((x + y) % 3 for x in range(3) for y in range(3))
    alg = FiniteAlgebra(3, [Operation("add", 2, plus)],
                        parse_sexpr("(m x1 x2 x3)"), check=False)
    tables = {t for t, _ in clone_enumerate(alg, 1, 100)}
    assert tables == {(0, 1, 2), (0, 2, 1), (0, 0, 0)}


def test_clone_enumerate_projections_and_circuits(a6_spec):
    alg = a6_spec.algebra
    found = clone_enumerate(alg, 2, cap=1000)
    tables = {t for t, _ in found}
    width = alg.size ** 2
    proj1 = tuple(i // alg.size for i in range(width))
    proj2 = tuple(i % alg.size for i in range(width))
    assert proj1 in tables and proj2 in tables
    domain = [tuple(i // alg.size for i in range(width)),
              tuple(i % alg.size for i in range(width))]
    for table, circuit in found:
        assert eval_circuit(alg, circuit, domain) == table


def test_verify_maltsev_examples(a6_spec):
    alg, _ = zmod_algebra(3)
    assert verify_maltsev(alg)
    assert not verify_maltsev(alg, variable(1, 3))
    assert verify_maltsev(a6_spec.algebra)


def test_congruence_validation(a6_spec):
    alg = a6_spec.algebra
    u_kernel = kernel_partition([x % 2 for x in range(6)])
    assert is_congruence(alg, u_kernel)
    assert not is_congruence(alg, kernel_partition([0, 0, 0, 1, 1, 1]))
    with pytest.raises(AlgebraError):
        verify_central(alg, [0, 0, 0, 1, 1, 1])


def test_verify_central_trivial_and_full(z3_group):
    alg, _ = z3_group
    assert verify_central(alg, list(range(3)))       # identity congruence
    assert verify_central(alg, [0, 0, 0])            # affine: abelian


def test_verify_central_wreath_kernel(a6_spec):
    alg = a6_spec.algebra
    u_kernel = kernel_partition([x % 2 for x in range(6)])
    assert verify_central(alg, u_kernel)


def test_verify_central_relabel_invariance(a6_spec):
    alg = a6_spec.algebra
    base = [x % 2 for x in range(6)]
    relabeled = [1 - b for b in base]
    assert verify_central(alg, kernel_partition(base)) == \
        verify_central(alg, kernel_partition(relabeled))
