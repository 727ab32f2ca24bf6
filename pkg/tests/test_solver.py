import random

import pytest

from subpower.catalog import random_wreath, zmod_algebra
from subpower.comprep import maltsev_fold
from subpower.core import smp_oracle
from subpower.solver import (SmpInstance, UnsupportedAlgebraError,
                             check_witness, compute_comprep, dispatch,
                             solve_smp_directproduct, solve_smp_wreath,
                             validate_prime_quotient_class)
from subpower.wreath import WreathSpec


def random_member_instance(alg, rng, k, n, bias):
    gens = [tuple(rng.randrange(alg.size) for _ in range(k)) for _ in range(n)]
    if rng.random() < bias:
        b = rng.choice(gens)
        for _ in range(rng.randint(0, 3)):
            b = maltsev_fold(alg, b, rng.choice(gens), rng.choice(gens))
    else:
        b = tuple(rng.randrange(alg.size) for _ in range(k))
    return SmpInstance(tuple(gens), b)


def test_generator_is_member(a6_spec):
    inst = SmpInstance(((0, 1, 5), (2, 2, 2)), (0, 1, 5))
    v = solve_smp_wreath(a6_spec, inst)
    assert v.member
    assert check_witness(a6_spec, inst, v)


def test_quotient_mismatch_is_rejected(a6_spec):
    # target whose quotient components cannot arise from the generators
    inst = SmpInstance(((0, 0), (2, 4)), (1, 0))   # u-parts of gens all 0
    v = solve_smp_wreath(a6_spec, inst)
    assert not v.member
    assert not smp_oracle(a6_spec.algebra, inst.generators, inst.target)


@pytest.mark.parametrize("seed", range(4))
def test_wreath_agrees_with_oracle_a6(a6_spec, seed):
    alg = a6_spec.algebra
    rng = random.Random(seed)
    for _ in range(25):
        k = rng.randint(1, 4)
        n = rng.randint(1, 4)
        inst = random_member_instance(alg, rng, k, n, bias=0.5)
        v = solve_smp_wreath(a6_spec, inst)
        assert v.member == smp_oracle(alg, inst.generators, inst.target)
        if v.member:
            assert check_witness(a6_spec, inst, v)


def test_wreath_agrees_with_oracle_w15(w15_spec):
    alg = w15_spec.algebra
    rng = random.Random(15)
    for _ in range(30):
        n = rng.randint(1, 4)
        k = rng.randint(1, 5) if n <= 2 else rng.randint(1, 2)
        inst = random_member_instance(alg, rng, k, n, bias=0.5)
        v = solve_smp_wreath(w15_spec, inst)
        assert v.member == smp_oracle(alg, inst.generators, inst.target)
        if v.member:
            assert check_witness(w15_spec, inst, v)


def test_wreath_agrees_with_oracle_extra_symbol(a6e_spec):
    alg = a6e_spec.algebra
    rng = random.Random(66)
    for _ in range(25):
        k = rng.randint(1, 3)
        n = rng.randint(1, 3)
        inst = random_member_instance(alg, rng, k, n, bias=0.5)
        v = solve_smp_wreath(a6e_spec, inst)
        assert v.member == smp_oracle(alg, inst.generators, inst.target)
        if v.member:
            assert check_witness(a6e_spec, inst, v)


def test_directproduct_path_agrees():
    from subpower.catalog import a6_symmetric
    spec = a6_symmetric()
    alg = spec.algebra
    rng = random.Random(2)
    member_count = 0
    for _ in range(60):
        k = rng.randint(1, 3)
        n = rng.randint(1, 3)
        inst = random_member_instance(alg, rng, k, n, bias=0.5)
        v1 = solve_smp_wreath(spec, inst)
        v2 = solve_smp_directproduct(spec, inst, verify_hypothesis=True)
        assert v1.member == v2.member
        assert v1.member == smp_oracle(alg, inst.generators, inst.target)
        if v2.member:
            assert check_witness(spec, inst, v2)
            member_count += 1
    assert member_count > 0


def test_containment_hypothesis_holds_for_symmetric_variant():
    from subpower.catalog import a6_symmetric
    from subpower.solver import clone_contains_companion
    assert clone_contains_companion(a6_symmetric())


def test_directproduct_path_on_w15(w15_spec):
    # the fifteen-element algebra passes the containment spot-check, so
    # both decision paths apply and must agree with the oracle
    from subpower.solver import clone_contains_companion
    assert clone_contains_companion(w15_spec)
    alg = w15_spec.algebra
    rng = random.Random(3)
    for _ in range(15):
        n = rng.randint(1, 3)
        k = rng.randint(1, 3)
        inst = random_member_instance(alg, rng, k, n, bias=0.5)
        v = solve_smp_directproduct(w15_spec, inst, verify_hypothesis=True,
                                    want_witness=False)
        assert v.member == smp_oracle(alg, inst.generators, inst.target,
                                      cap=100_000)


def test_containment_hypothesis_fails_for_a6(a6_spec):
    # the class of the term with direct-product behaviour 2x - y contains
    # no shift-free member, so the direct-product construction would be
    # unsound here and must be refused when verification is requested
    from subpower.solver import clone_contains_companion
    assert not clone_contains_companion(a6_spec)
    inst = SmpInstance(((0, 1), (3, 3)), (0, 1))
    with pytest.raises(UnsupportedAlgebraError):
        solve_smp_directproduct(a6_spec, inst, verify_hypothesis=True)


def test_directproduct_zero_hat_reduces_to_affine():
    from subpower.catalog import zmod_algebra
    from subpower.circuits import parse_sexpr
    left, left_group = zmod_algebra(3)
    right, _ = zmod_algebra(2)
    flat = WreathSpec(left=left, left_group=left_group, right=right,
                      hat={"m": (0,) * 8}, maltsev=parse_sexpr("(m x1 x2 x3)"))
    rng = random.Random(8)
    for _ in range(10):
        inst = random_member_instance(flat.algebra, rng, 3, 2, bias=0.5)
        v = solve_smp_directproduct(flat, inst, verify_hypothesis=True)
        assert v.member == smp_oracle(flat.algebra, inst.generators,
                                      inst.target)


def test_monotonicity_appending_generator(a6_spec):
    alg = a6_spec.algebra
    rng = random.Random(5)
    for _ in range(15):
        inst = random_member_instance(alg, rng, 3, 2, bias=0.7)
        v1 = solve_smp_wreath(a6_spec, inst)
        extra = tuple(rng.randrange(6) for _ in range(3))
        bigger = SmpInstance(inst.generators + (extra,), inst.target)
        v2 = solve_smp_wreath(a6_spec, bigger)
        if v1.member:
            assert v2.member


def test_permutation_invariance(a6_spec):
    rng = random.Random(6)
    for _ in range(15):
        k = rng.randint(2, 4)
        inst = random_member_instance(a6_spec.algebra, rng, k, 3, bias=0.5)
        perm = list(range(k))
        rng.shuffle(perm)
        permuted = SmpInstance(
            tuple(tuple(g[i] for i in perm) for g in inst.generators),
            tuple(inst.target[i] for i in perm))
        assert solve_smp_wreath(a6_spec, inst).member == \
            solve_smp_wreath(a6_spec, permuted).member


def test_preconditions_reported_before_work():
    inst = SmpInstance(((0,),), (1,))
    # quotient of non-prime order
    spec4 = random_wreath(4, 3, seed=0)
    with pytest.raises(UnsupportedAlgebraError):
        validate_prime_quotient_class(spec4)
    with pytest.raises(UnsupportedAlgebraError):
        solve_smp_wreath(spec4, inst)
    # common factor between the parts
    shared = random_wreath(3, 6, seed=0)
    with pytest.raises(UnsupportedAlgebraError):
        validate_prime_quotient_class(shared)
    with pytest.raises(UnsupportedAlgebraError):
        solve_smp_wreath(shared, inst)


def test_dispatch_routes(a6_spec, z3):
    alg, group = z3
    affine_inst = SmpInstance(((0, 0), (1, 1)), (2, 2))
    v = dispatch((alg, group), affine_inst)
    assert v.member and v.stats["path"] == "affine"
    assert check_witness((alg, group), affine_inst, v)
    v2 = dispatch((alg, group), SmpInstance(((0, 0), (1, 1)), (1, 0)))
    assert not v2.member

    wreath_inst = SmpInstance(((0, 1), (3, 3)), (0, 1))
    vw = dispatch(a6_spec, wreath_inst)
    assert vw.stats["path"] == "wreath" and vw.member


def test_dispatch_oracle_fallback():
    spec4 = random_wreath(4, 3, seed=1)
    inst = SmpInstance(((0, 1), (2, 2)), (0, 1))
    with pytest.raises(UnsupportedAlgebraError):
        dispatch(spec4, inst)
    with pytest.warns(UserWarning):
        v = dispatch(spec4, inst, allow_oracle=True)
    assert v.member and v.stats["path"] == "oracle"


def test_compute_comprep_matches_oracle():
    from subpower.catalog import a6_symmetric
    from subpower.comprep import signature
    from subpower.core import subpower_closure
    spec = a6_symmetric()
    rng = random.Random(12)
    for _ in range(8):
        k = rng.randint(1, 3)
        gens = tuple(tuple(rng.randrange(6) for _ in range(k))
                     for _ in range(rng.randint(1, 3)))
        rep = compute_comprep(spec, gens)
        closed = subpower_closure(spec.algebra, gens)
        assert set(rep.tuples()) <= closed
        assert signature(rep.tuples()) == signature(sorted(closed))


def test_compute_comprep_a6_falls_back_to_oracle(a6_spec):
    # without the containment the polynomial representation route is not
    # justified; the oracle fallback still produces a faithful result
    from subpower.comprep import signature
    from subpower.core import subpower_closure
    gens = ((0, 1), (3, 2))
    with pytest.raises(UnsupportedAlgebraError):
        compute_comprep(a6_spec, gens)
    rep = compute_comprep(a6_spec, gens, allow_oracle=True)
    closed = subpower_closure(a6_spec.algebra, gens)
    assert signature(rep.tuples()) == signature(sorted(closed))
    assert rep.check_circuits(a6_spec.algebra)


def test_randomized_wreath_families():
    # beyond the fixed catalog: random shifts over several (p, |L|) pairs;
    # extraction is exact or certified, and verdicts track the oracle
    total = 0
    for p, lo in [(2, 3), (2, 9), (3, 5), (5, 2)]:
        spec = random_wreath(p, lo, seed=0)
        alg = spec.algebra
        rng = random.Random(1000 * p + lo)
        for _ in range(8):
            k = rng.randint(1, 3)
            n = rng.randint(1, 3)
            inst = random_member_instance(alg, rng, k, n, bias=0.5)
            v = solve_smp_wreath(spec, inst)
            assert v.member == smp_oracle(alg, inst.generators, inst.target,
                                          cap=200_000)
            if v.member:
                assert check_witness(spec, inst, v)
            total += 1
    assert total == 32


def test_clonoid_extraction_refuses_rather_than_truncates():
    # some shift patterns have generator sets that neither enumerate fully
    # under the cap nor certify; they must raise, never silently truncate
    from subpower.core import ClosureCapExceeded
    from subpower.wreath import diff_clonoid_gens
    spec = random_wreath(3, 4, seed=1)
    with pytest.raises(ClosureCapExceeded):
        diff_clonoid_gens(spec, cap=3000)


def test_solver_stats_present(a6_spec):
    inst = SmpInstance(((0, 1, 2),), (0, 1, 2))
    v = solve_smp_wreath(a6_spec, inst)
    assert "tuples_materialized" in v.stats and "elapsed_ms" in v.stats
    assert v.stats["path"] == "wreath"
