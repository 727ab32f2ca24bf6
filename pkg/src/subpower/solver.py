"""End-to-end subpower membership decision procedures.

Three paths:

* ``solve_smp_wreath``: the polynomial pipeline for coprime wreath products
  with prime-order affine quotient.  The generator matrix is extended by
  rows enumerating all single-nonzero columns, so equality of direct-product
  values on the extended rows pins direct-product terms down exactly; the
  membership question then splits into an affine fix over the quotient
  components and a subgroup test against the difference-clonoid image.
* ``solve_smp_directproduct``: for wreath products whose clone contains the
  direct-product clone, builds a compact representation of the full
  subpower as sums of direct-product members and clonoid image tuples, and
  decides by Mal'tsev chaining.
* ``dispatch``: affine algebras go through elimination, coprime
  prime-quotient wreath products through the wreath path, and anything else
  falls back to the exhaustive oracle (opt-in).
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .affine import (AbelianGroupSpec, Echelon, affine_closure_comprep,
                     affine_span, subgroup_member, tuple_add, tuple_sub,
                     verify_affine)
from .circuits import parse_sexpr, serialize_sexpr
from .comprep import (EnumeratedCompactRep, maltsev_chain_member,
                      maltsev_fold, thin_to_compact)
from .core import (AlgebraError, FiniteAlgebra, eval_circuit, eval_nodes,
                   smp_oracle, verify_central)
from .wreath import (ClonoidGenSet, WreathSpec, clonoid_image_comprep,
                     diff_clonoid_gens)


class UnsupportedAlgebraError(AlgebraError):
    pass


@dataclass(frozen=True)
class SmpInstance:
    generators: tuple
    target: tuple

    def __post_init__(self):
        gens = tuple(tuple(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "target", tuple(self.target))
        if not gens:
            raise AlgebraError("an instance needs at least one generator")
        k = len(self.target)
        if k < 1:
            raise AlgebraError("tuples must have at least one coordinate")
        if any(len(g) != k for g in gens):
            raise AlgebraError("generators and target have unequal lengths")

    @property
    def k(self) -> int:
        return len(self.target)

    @property
    def n(self) -> int:
        return len(self.generators)


@dataclass
class SmpVerdict:
    member: bool
    witness: dict | None = None
    stats: dict = field(default_factory=dict)


def _check_range(inst: SmpInstance, size: int) -> None:
    for t in inst.generators + (inst.target,):
        for v in t:
            if not 0 <= v < size:
                raise AlgebraError(f"element {v} out of range 0..{size - 1}")


# ---------------------------------------------------------------------------
# cached wreath context

@dataclass
class WreathContext:
    spec: WreathSpec
    comp_specs: list
    gens: ClonoidGenSet


def validate_prime_quotient_class(spec: WreathSpec) -> None:
    """Preconditions of the polynomial wreath path, checked before any work."""
    p = spec.p
    if p < 2 or any(p % d == 0 for d in range(2, int(math.isqrt(p)) + 1)):
        raise UnsupportedAlgebraError(f"quotient size {p} is not prime")
    if math.gcd(spec.left.size, p) != 1:
        raise UnsupportedAlgebraError(
            f"left size {spec.left.size} shares a factor with quotient size {p}")
    verify_affine(spec.left, spec.left_group)
    verify_affine(spec.right, AbelianGroupSpec((p,)))


def wreath_context(spec: WreathSpec, clonoid_cap: int = 3000) -> WreathContext:
    ctx = spec.__dict__.get("_solver_context")
    if ctx is None:
        validate_prime_quotient_class(spec)
        comp_specs = verify_affine(spec.companion, spec.companion_group)
        if not verify_central(spec.companion, (0,) * spec.size):
            raise UnsupportedAlgebraError("direct product companion is not abelian")
        gens = diff_clonoid_gens(spec, cap=clonoid_cap)
        ctx = WreathContext(spec=spec, comp_specs=comp_specs, gens=gens)
        spec.__dict__["_solver_context"] = ctx
    return ctx


# ---------------------------------------------------------------------------
# the wreath path

def _extended_rows(spec: WreathSpec, inst: SmpInstance):
    """Append rows enumerating the single-nonzero argument assignments."""
    zero = spec.zero
    n = inst.n
    columns = [list(g) for g in inst.generators]
    for col in columns:
        col.append(zero)                       # the all-zero row
    for i in range(n):
        for a in range(spec.size):
            if a == zero:
                continue
            for j in range(n):
                columns[j].append(a if j == i else zero)
    return [tuple(c) for c in columns]


def solve_smp_wreath(spec: WreathSpec, inst: SmpInstance,
                     gens: ClonoidGenSet | None = None,
                     want_witness: bool = True) -> SmpVerdict:
    """Polynomial-time membership for the coprime prime-quotient class."""
    t_start = time.perf_counter()
    ctx = wreath_context(spec)
    if gens is None:
        gens = ctx.gens
    _check_range(inst, spec.size)
    group = spec.left_group
    comp_group = spec.companion_group
    p = spec.p
    m = comp_group.exponent
    k, n = inst.k, inst.n
    s1 = comp_group.rank

    u_cols = [spec.u_part(g) for g in inst.generators]
    l_b = spec.l_part(inst.target)
    u_b = spec.u_part(inst.target)

    ext = _extended_rows(spec, inst)
    rep = affine_span(spec.companion, comp_group, ext,
                      op_specs=ctx.comp_specs)
    tuples_materialized = rep.tuples_materialized

    def u_residues(flat: np.ndarray) -> np.ndarray:
        # quotient residue of the first k coordinates of an embedded vector
        factor = comp_group.embed_factors()[-1]
        return (flat.reshape(-1, s1)[:k, -1] // factor) % p

    u_target = np.asarray(u_b, dtype=np.int64)
    u_ech = Echelon(p, k, track=max(len(rep.raw), 1))
    for vec, _, _ in rep.raw:
        u_ech.insert(u_residues(vec))
    residue, coeffs = u_ech.reduce((u_target - u_residues(rep.base_flat)) % p)
    stats = {"path": "wreath", "k": k, "n": n}
    if residue.any():
        stats["tuples_materialized"] = tuples_materialized
        stats["elapsed_ms"] = 1000 * (time.perf_counter() - t_start)
        return SmpVerdict(False, None, stats)
    x0_coeffs = (coeffs[:len(rep.raw)] if rep.raw
                 else np.zeros(0, dtype=np.int64)).astype(np.int64)

    # kernel of the quotient components over the first k rows
    kernel_coeffs = []
    if rep.raw:
        width = len(rep.base_flat)
        aug = Echelon(m, k + width, track=len(rep.raw))
        scale = m // p
        for vec, _, _ in rep.raw:
            head = (u_residues(vec) * scale) % m
            aug.insert(np.concatenate([head, vec]))
        aug.canonicalize()
        for ridx in aug.tail_rows(k):
            if np.asarray(aug.rows[ridx][k:]).any():
                kernel_coeffs.append(aug.coeffs[ridx][:len(rep.raw)])
    tuples_materialized += len(kernel_coeffs)

    # evaluate the fixed members on the original tuples inside the product
    alg = spec.algebra
    member_coeffs = [x0_coeffs] + [(x0_coeffs + kc) % m for kc in kernel_coeffs]
    nodes = [rep.member_node(c) for c in member_coeffs]
    args = [np.asarray(g) for g in inst.generators]
    vals = eval_nodes(alg, rep.bank, nodes, args)
    members = [tuple(int(v) for v in vals[node]) for node in nodes]
    tuples_materialized += len(members)
    for t in members:
        if spec.u_part(t) != tuple(u_b):
            raise AssertionError("fixed member has wrong quotient components")

    image = clonoid_image_comprep(gens, u_cols)
    tuples_materialized += image.tuples_materialized

    base_l = spec.l_part(members[0])
    diffs = [tuple_sub(group, spec.l_part(t), base_l) for t in members[1:]]
    diffs.extend(image.generators)
    ok, witness_coeffs = subgroup_member(group, diffs,
                                         tuple_sub(group, l_b, base_l))
    stats["tuples_materialized"] = tuples_materialized
    stats["elapsed_ms"] = 1000 * (time.perf_counter() - t_start)
    if not ok:
        return SmpVerdict(False, None, stats)
    witness = None
    if want_witness:
        n_members = len(members) - 1
        witness = {
            "path": "wreath",
            "base": {"value": list(members[0]),
                     "circuit": serialize_sexpr(rep.bank.extract(nodes[0]))},
            "members": [
                {"coeff": int(witness_coeffs[j]), "value": list(members[j + 1]),
                 "circuit": serialize_sexpr(rep.bank.extract(nodes[j + 1]))}
                for j in range(n_members) if witness_coeffs[j] % m],
            "clonoid": [
                {"coeff": int(witness_coeffs[n_members + j]),
                 "value": [int(v) for v in image.generators[j]]}
                for j in range(len(image.generators))
                if witness_coeffs[n_members + j] % m],
        }
    return SmpVerdict(True, witness, stats)


# ---------------------------------------------------------------------------
# the direct-product path

def clone_contains_companion(spec: WreathSpec, max_arity: int = 2,
                             cap: int = 100_000) -> bool:
    """Spot-check Clo(direct product) inside Clo(product) at small arities.

    The containment is what justifies representing the whole subpower as
    sums of direct-product members and clonoid image tuples; it can fail
    even for coprime affine parts, so the check is cached per spec.
    """
    cache = spec.__dict__.setdefault("_containment_cache", {})
    if max_arity not in cache:
        from .core import clone_enumerate
        ok = True
        for arity in range(1, max_arity + 1):
            comp = {t for t, _ in clone_enumerate(spec.companion, arity, cap)}
            full = {t for t, _ in clone_enumerate(spec.algebra, arity, cap)}
            if not comp <= full:
                ok = False
                break
        cache[max_arity] = ok
    return cache[max_arity]


def solve_smp_directproduct(spec: WreathSpec, inst: SmpInstance,
                            gens: ClonoidGenSet | None = None,
                            hypothesis_asserted: bool = True,
                            verify_hypothesis: bool = False,
                            want_witness: bool = True) -> SmpVerdict:
    """Membership via a compact representation of the whole subpower.

    Requires the clone of the product to contain the clone of the direct
    product (caller-asserted; optionally spot-checked at arity <= 2).
    """
    t_start = time.perf_counter()
    ctx = wreath_context(spec)
    if gens is None:
        gens = ctx.gens
    if not hypothesis_asserted:
        raise UnsupportedAlgebraError(
            "direct-product path requires the clone containment hypothesis")
    if verify_hypothesis and not clone_contains_companion(spec):
        raise UnsupportedAlgebraError(
            "clone containment fails at arity <= 2; the direct-product "
            "path is not applicable")
    _check_range(inst, spec.size)
    group = spec.left_group
    p = spec.p

    comp_rep = affine_closure_comprep(spec.companion, spec.companion_group,
                                      inst.generators, op_specs=ctx.comp_specs)
    u_cols = [spec.u_part(g) for g in inst.generators]
    image = clonoid_image_comprep(gens, u_cols)
    image_tuples = image.compact_rep().tuples()

    combined = EnumeratedCompactRep(inst.generators, [], None)
    meta = []
    for ci, (c, _) in enumerate(comp_rep.entries):
        for ri, r in enumerate(image_tuples):
            shifted = tuple(
                spec.pair(group.add(spec.split(x)[0], rv), spec.split(x)[1])
                for x, rv in zip(c, r))
            combined.add(shifted, None)
            meta.append((ci, ri))
    thinned = thin_to_compact(combined)
    stats = {"path": "directproduct", "k": inst.k, "n": inst.n,
             "tuples_materialized": len(comp_rep.entries) + len(image_tuples)
             + len(combined.entries)}

    chain = maltsev_chain_member(spec.algebra, thinned, inst.target)
    stats["elapsed_ms"] = 1000 * (time.perf_counter() - t_start)
    if chain is None:
        return SmpVerdict(False, None, stats)
    witness = None
    if want_witness:
        entries = thinned.tuples()
        witness = {
            "path": "directproduct",
            "start": list(entries[chain.start]),
            "steps": [[list(entries[ib]), list(entries[ia])]
                      for _, ib, ia in chain.steps],
        }
    return SmpVerdict(True, witness, stats)


# ---------------------------------------------------------------------------
# dispatch and witness checking

def dispatch(algebra_input, inst: SmpInstance, *, allow_oracle: bool = False,
             cap: int = 1_000_000, want_witness: bool = True) -> SmpVerdict:
    """Route an instance to the strongest applicable decision procedure."""
    if isinstance(algebra_input, WreathSpec):
        try:
            return solve_smp_wreath(algebra_input, inst,
                                    want_witness=want_witness)
        except UnsupportedAlgebraError:
            algebra_input = algebra_input.algebra
    alg, group = _as_algebra_group(algebra_input)
    if group is not None:
        try:
            op_specs = verify_affine(alg, group)
        except AlgebraError:
            op_specs = None
        if op_specs is not None:
            return _solve_affine(alg, group, op_specs, inst, want_witness)
    if not allow_oracle:
        raise UnsupportedAlgebraError(
            "algebra is outside the supported classes; "
            "pass allow_oracle=True for the exponential fallback")
    warnings.warn("falling back to the exponential closure oracle",
                  stacklevel=2)
    t_start = time.perf_counter()
    _check_range(inst, alg.size)
    member = smp_oracle(alg, inst.generators, inst.target, cap=cap)
    stats = {"path": "oracle", "k": inst.k, "n": inst.n,
             "elapsed_ms": 1000 * (time.perf_counter() - t_start)}
    return SmpVerdict(member, None, stats)


def _as_algebra_group(algebra_input):
    if isinstance(algebra_input, FiniteAlgebra):
        return algebra_input, None
    if isinstance(algebra_input, tuple) and len(algebra_input) == 2:
        return algebra_input
    raise AlgebraError("expected a wreath spec, an algebra, or (algebra, group)")


def _solve_affine(alg, group, op_specs, inst, want_witness) -> SmpVerdict:
    t_start = time.perf_counter()
    _check_range(inst, alg.size)
    rep = affine_closure_comprep(alg, group, inst.generators, op_specs=op_specs)
    chain = maltsev_chain_member(alg, rep, inst.target)
    stats = {"path": "affine", "k": inst.k, "n": inst.n,
             "tuples_materialized": len(rep.entries),
             "elapsed_ms": 1000 * (time.perf_counter() - t_start)}
    if chain is None:
        return SmpVerdict(False, None, stats)
    witness = None
    if want_witness and chain.node is not None:
        witness = {"path": "affine",
                   "circuit": serialize_sexpr(rep.bank.extract(chain.node))}
    return SmpVerdict(True, witness, stats)


def compute_comprep(algebra_input, generators, *, allow_oracle: bool = False,
                    cap: int = 1_000_000) -> EnumeratedCompactRep:
    """A compact representation of Sg(generators) for the given algebra.

    Affine algebras go through elimination; wreath products through the
    direct-product construction (clone containment asserted); anything else
    through the capped oracle with thinning.
    """
    generators = tuple(tuple(g) for g in generators)
    if isinstance(algebra_input, WreathSpec):
        spec = algebra_input
        if clone_contains_companion(spec):
            ctx = wreath_context(spec)
            comp_rep = affine_closure_comprep(
                spec.companion, spec.companion_group, generators,
                op_specs=ctx.comp_specs)
            u_cols = [spec.u_part(g) for g in generators]
            image = clonoid_image_comprep(ctx.gens, u_cols)
            group = spec.left_group
            combined = EnumeratedCompactRep(generators, [], None)
            for c, _ in comp_rep.entries:
                for r in image.compact_rep().tuples():
                    shifted = tuple(
                        spec.pair(group.add(spec.split(x)[0], rv),
                                  spec.split(x)[1])
                        for x, rv in zip(c, r))
                    combined.add(shifted, None)
            return thin_to_compact(combined)
        # the containment can fail; fall through to the oracle route
        algebra_input = spec.algebra
    alg, group = _as_algebra_group(algebra_input)
    if group is not None:
        try:
            op_specs = verify_affine(alg, group)
        except AlgebraError:
            op_specs = None
        if op_specs is not None:
            return affine_closure_comprep(alg, group, generators,
                                          op_specs=op_specs)
    if not allow_oracle:
        raise UnsupportedAlgebraError(
            "no polynomial representation path for this algebra; "
            "pass allow_oracle=True for the exponential fallback")
    from .core import closure_with_circuits
    tuples, nodes, bank, _ = closure_with_circuits(alg, generators, cap=cap)
    rep = EnumeratedCompactRep(generators, list(zip(tuples, nodes)), bank)
    return thin_to_compact(rep)


def check_witness(algebra_input, inst: SmpInstance,
                  verdict: SmpVerdict) -> bool:
    """Re-derive the target from a verdict's witness, numerically."""
    if not verdict.member or verdict.witness is None:
        return False
    w = verdict.witness
    if w["path"] == "affine":
        alg, _ = _as_algebra_group(algebra_input)
        circuit = parse_sexpr(w["circuit"], arity=inst.n)
        return eval_circuit(alg, circuit, list(inst.generators)) == inst.target
    if w["path"] == "directproduct":
        spec = algebra_input
        alg = spec.algebra
        current = tuple(w["start"])
        for vb, va in w["steps"]:
            current = maltsev_fold(alg, current, tuple(vb), tuple(va))
        return current == inst.target
    if w["path"] == "wreath":
        spec = algebra_input
        group = spec.left_group
        alg = spec.algebra
        base = tuple(w["base"]["value"])
        circuit = parse_sexpr(w["base"]["circuit"], arity=inst.n)
        if eval_circuit(alg, circuit, list(inst.generators)) != base:
            return False
        acc = spec.l_part(base)
        base_l = spec.l_part(base)
        for part in w["members"]:
            value = tuple(part["value"])
            circ = parse_sexpr(part["circuit"], arity=inst.n)
            if eval_circuit(alg, circ, list(inst.generators)) != value:
                return False
            delta = tuple_sub(group, spec.l_part(value), base_l)
            for _ in range(part["coeff"] % group.exponent):
                acc = tuple_add(group, acc, delta)
        for part in w["clonoid"]:
            delta = tuple(part["value"])
            for _ in range(part["coeff"] % group.exponent):
                acc = tuple_add(group, acc, delta)
        expected = tuple(spec.pair(l, u)
                         for l, u in zip(acc, spec.u_part(base)))
        return expected == inst.target
    return False
