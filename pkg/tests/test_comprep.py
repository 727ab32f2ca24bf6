import random
from itertools import product

import pytest

from conftest import oracle_rep
from subpower.comprep import (fix_block, fix_value, fix_values,
                              maltsev_chain_member, signature,
                              thin_to_compact)
from subpower.core import AlgebraError, subpower_closure


def test_signature_singleton():
    assert signature([(2, 1, 0)]) == {(1, 2, 2), (2, 1, 1), (3, 0, 0)}


def test_signature_pair():
    assert signature([(0, 0), (0, 1)]) == \
        {(1, 0, 0), (2, 0, 0), (2, 1, 1), (2, 0, 1), (2, 1, 0)}


def test_signature_empty():
    assert signature([]) == set()


def test_signature_symmetry():
    rng = random.Random(0)
    tuples = [tuple(rng.randrange(3) for _ in range(4)) for _ in range(8)]
    sig = signature(tuples)
    assert all((i, b, a) in sig for (i, a, b) in sig)


def test_thin_preserves_signature_and_bounds(z3_group):
    alg, _ = z3_group
    rng = random.Random(2)
    for _ in range(15):
        k = rng.randint(1, 4)
        tuples = {tuple(rng.randrange(3) for _ in range(k))
                  for _ in range(rng.randint(1, 20))}
        thin = thin_to_compact(sorted(tuples), generators=[(0,) * k])
        sig = signature(sorted(tuples))
        assert signature(thin.tuples()) == sig
        assert len(thin.entries) <= 2 * len(sig)
        assert set(thin.tuples()) <= tuples


def test_thin_bound_on_hypercube():
    # many prefixes, few forks: witnesses must be shared across prefix
    # groups or the size bound breaks
    for k in (4, 6, 7):
        tuples = sorted(product(range(2), repeat=k))
        thin = thin_to_compact(tuples, generators=[(0,) * k])
        sig = signature(tuples)
        assert signature(thin.tuples()) == sig
        assert len(thin.entries) <= 2 * len(sig)


def test_thin_minimal_input_unchanged():
    thin = thin_to_compact([(0, 1)], generators=[(0, 1)])
    assert thin.tuples() == [(0, 1)]


def test_thin_collapses_duplicates():
    thin = thin_to_compact([(1, 2), (1, 2), (1, 2)], generators=[(1, 2)])
    assert thin.tuples() == [(1, 2)]


def test_chain_member_entry_is_trivial(z3_group):
    alg, _ = z3_group
    rep = oracle_rep(alg, [(1, 2)])
    for t in rep.tuples():
        chain = maltsev_chain_member(alg, rep, t)
        assert chain is not None and chain.value == t


def test_chain_member_examples(z3_group):
    alg, _ = z3_group
    rep = oracle_rep(alg, [(1, 2)])
    assert maltsev_chain_member(alg, rep, (2, 1)) is not None
    assert maltsev_chain_member(alg, rep, (1, 1)) is None


def test_chain_member_exhaustive(a6_spec):
    alg = a6_spec.algebra
    rng = random.Random(5)
    for _ in range(6):
        k = rng.randint(1, 3)
        gens = [tuple(rng.randrange(6) for _ in range(k))
                for _ in range(rng.randint(1, 3))]
        closed = subpower_closure(alg, gens)
        rep = oracle_rep(alg, gens)
        for b in product(range(6), repeat=k):
            chain = maltsev_chain_member(alg, rep, b)
            assert (chain is not None) == (b in closed)
            if chain is not None:
                assert chain.value == b
                if chain.node is not None:
                    circuit = rep.bank.extract(chain.node)
                    from subpower.core import eval_circuit
                    assert eval_circuit(alg, circuit, list(rep.generators)) == b


def test_fix_value_missing_start_gives_empty(z3_group, z3):
    alg, _ = z3_group
    rep = oracle_rep(alg, [(1, 2)])
    assert fix_value(alg, rep, 0).is_empty() is False  # (0,0) present
    alg_m, _ = z3
    rep_small = oracle_rep(alg_m, [(1, 1)])   # {m} alone keeps the singleton
    assert fix_value(alg_m, rep_small, 0).is_empty()


def test_fix_value_singleton(z3_group):
    alg, _ = z3_group
    rep = oracle_rep(alg, [(2, 0)])
    fixed = fix_value(alg, rep, 2)
    assert fixed.tuples() == [(2, 0)]


def test_fix_value_full_square(z3):
    alg, group = z3
    full = [tuple(t) for t in product(range(3), repeat=2)]
    rep = oracle_rep(alg, full)
    fixed = fix_value(alg, rep, 1)
    want = signature([t for t in full if t[0] == 1])
    assert fixed.sig() == want
    assert fixed.check_circuits(alg)


@pytest.mark.parametrize("seed", range(6))
def test_fix_value_matches_bruteforce(a6_spec, seed):
    alg = a6_spec.algebra
    rng = random.Random(seed)
    k = rng.randint(2, 4)
    gens = [tuple(rng.randrange(6) for _ in range(k))
            for _ in range(rng.randint(1, 3))]
    closed = subpower_closure(alg, gens)
    rep = oracle_rep(alg, gens)
    for a in range(6):
        fixed = fix_value(alg, rep, a)
        want = signature(sorted(t for t in closed if t[0] == a))
        assert fixed.sig() == want
        assert fixed.check_circuits(alg)
        assert len(fixed.entries) <= 2 * k * alg.size ** 2


def test_fix_values_prefix(a6_spec):
    alg = a6_spec.algebra
    gens = [(0, 1, 2), (3, 4, 5), (1, 1, 1)]
    closed = subpower_closure(alg, gens)
    rep = oracle_rep(alg, gens)
    member = sorted(closed)[len(closed) // 2]
    fixed = fix_values(alg, rep, member)
    assert fixed.tuples() == [member]
    assert fix_values(alg, rep, []).tuples() == rep.tuples()
    outside = next(t for t in product(range(6), repeat=3) if t not in closed)
    assert fix_values(alg, rep, outside).is_empty()


def test_fix_block_examples(a6_spec):
    alg = a6_spec.algebra
    rng = random.Random(11)
    block = [a6_spec.pair(l, 1) for l in range(3)]      # the u = 1 class
    for _ in range(5):
        k = rng.randint(2, 3)
        gens = [tuple(rng.randrange(6) for _ in range(k))
                for _ in range(rng.randint(1, 3))]
        closed = subpower_closure(alg, gens)
        rep = oracle_rep(alg, gens)
        fixed = fix_block(alg, rep, block)
        want = signature(sorted(t for t in closed if t[0] in block))
        assert fixed.sig() == want
        assert fixed.check_circuits(alg)
    # whole-domain block: thinning of the original representation
    rep = oracle_rep(alg, [(0, 1), (2, 3)])
    whole = fix_block(alg, rep, list(range(6)))
    assert whole.sig() == rep.sig()
    # disjoint block gives the empty representation
    rep2 = oracle_rep(alg, [(0, 0)])
    assert fix_block(alg, rep2, [5]).is_empty()
    with pytest.raises(AlgebraError):
        fix_block(alg, rep2, [])


def test_fix_block_u_kernel_class(a6_spec, w15_spec):
    # the block form of fixing used by the solver: one quotient class
    for spec in (a6_spec, w15_spec):
        alg = spec.algebra
        rng = random.Random(spec.size)
        gens = [tuple(rng.randrange(spec.size) for _ in range(2))
                for _ in range(2)]
        closed = subpower_closure(alg, gens)
        rep = oracle_rep(alg, gens)
        for u in range(spec.p):
            block = [spec.pair(l, u) for l in range(spec.left.size)]
            fixed = fix_block(alg, rep, block)
            want = signature(sorted(t for t in closed if t[0] in block))
            assert fixed.sig() == want
