"""Signatures, compact representations, chain membership, and Fix-Value.

A compact representation of a subpower R <= A^k is a subset with the same
signature as R and at most 2|Sig(R)| members; with a Mal'tsev operation the
whole subpower is recovered by chaining forks coordinate by coordinate.  An
enumerated representation additionally carries, per member, a circuit over
the original generators that re-evaluates to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, CircuitBank
from .core import AlgebraError, FiniteAlgebra, _Closure, eval_nodes


def signature(tuples) -> set:
    """Sig(S): triples (i, a, b) witnessed by members agreeing before i.

    Coordinates are 1-based.  The empty family has the empty signature.
    """
    tuples = [tuple(t) for t in tuples]
    if not tuples:
        return set()
    k = len(tuples[0])
    if any(len(t) != k for t in tuples):
        raise AlgebraError("tuples have unequal lengths")
    sig = set()
    group_of = [0] * len(tuples)
    for i in range(k):
        buckets: dict = {}
        for idx, t in enumerate(tuples):
            buckets.setdefault(group_of[idx], {}).setdefault(t[i], []).append(idx)
        reassign: dict = {}
        for gid in buckets:
            for a in buckets[gid]:
                for b in buckets[gid]:
                    sig.add((i + 1, a, b))
        for idx, t in enumerate(tuples):
            key = (group_of[idx], t[i])
            if key not in reassign:
                reassign[key] = len(reassign)
            group_of[idx] = reassign[key]
    return sig


def maltsev_table(alg: FiniteAlgebra) -> np.ndarray:
    """The designated Mal'tsev circuit tabulated as an (n, n, n) array."""
    cached = alg.__dict__.get("_maltsev_table")
    if cached is not None:
        return cached
    n = alg.size
    grid = np.indices((n, n, n)).reshape(3, -1)
    bank = CircuitBank(3)
    node = bank.splice(alg.maltsev, [bank.var(1), bank.var(2), bank.var(3)])
    vals = eval_nodes(alg, bank, [node], list(grid))[node]
    table = vals.reshape(n, n, n)
    alg.__dict__["_maltsev_table"] = table
    return table


def maltsev_fold(alg: FiniteAlgebra, x, y, z) -> tuple:
    """Coordinate-wise application of the Mal'tsev operation."""
    tab = maltsev_table(alg)
    return tuple(int(v) for v in
                 tab[np.asarray(x), np.asarray(y), np.asarray(z)])


@dataclass
class EnumeratedCompactRep:
    """Tuples with optional witness circuits over fixed generators."""

    generators: tuple                 # the original tuples X
    entries: list = field(default_factory=list)   # (tuple, node | None)
    bank: CircuitBank | None = None

    def __post_init__(self):
        self.generators = tuple(tuple(g) for g in self.generators)
        if self.bank is None:
            self.bank = CircuitBank(len(self.generators))

    @property
    def arity(self) -> int:
        return len(self.generators)

    def tuples(self) -> list:
        return [t for t, _ in self.entries]

    def sig(self) -> set:
        return signature(self.tuples())

    def circuit(self, idx: int) -> Circuit | None:
        node = self.entries[idx][1]
        return None if node is None else self.bank.extract(node)

    def is_empty(self) -> bool:
        return not self.entries

    def add(self, tup, node) -> None:
        self.entries.append((tuple(tup), node))

    def check_circuits(self, alg: FiniteAlgebra) -> bool:
        """Do all stored circuits re-evaluate to their tuples?"""
        nodes = [n for _, n in self.entries if n is not None]
        if not nodes:
            return True
        args = [np.asarray(g) for g in self.generators]
        vals = eval_nodes(alg, self.bank, nodes, args)
        return all(n is None or tuple(int(v) for v in vals[n]) == t
                   for t, n in self.entries)


def thin_to_compact(rep_or_tuples, generators=None) -> EnumeratedCompactRep:
    """Thin a tuple family to a same-signature subset of size <= 2|Sig|.

    Witness selection is greedy and lexicographic, so outputs are stable
    across runs.  Accepts either an EnumeratedCompactRep (circuits kept) or
    a plain tuple family plus its generators.
    """
    if isinstance(rep_or_tuples, EnumeratedCompactRep):
        rep = rep_or_tuples
    else:
        if generators is None:
            raise AlgebraError("generators required when thinning raw tuples")
        rep = EnumeratedCompactRep(tuple(tuple(g) for g in generators))
        for t in rep_or_tuples:
            rep.add(t, None)
    seen: dict = {}
    for t, n in rep.entries:
        if t not in seen:
            seen[t] = n
    items = sorted(seen.items())
    out = EnumeratedCompactRep(rep.generators, [], rep.bank)
    if not items:
        return out
    k = len(items[0][0])
    keep = set()
    groups: dict = {(): list(range(len(items)))}
    for i in range(k):
        witnessed: dict = {}
        for prefix in sorted(groups):
            members = groups[prefix]
            by_value: dict = {}
            for idx in members:
                by_value.setdefault(items[idx][0][i], []).append(idx)
            for a in sorted(by_value):
                for b in sorted(by_value):
                    if (a, b) not in witnessed:
                        witnessed[(a, b)] = (by_value[a][0], by_value[b][0])
        for ia, ib in witnessed.values():
            keep.add(ia)
            keep.add(ib)
        next_groups: dict = {}
        for prefix, members in groups.items():
            for idx in members:
                next_groups.setdefault(prefix + (items[idx][0][i],), []).append(idx)
        groups = next_groups
    for idx in sorted(keep):
        t, n = items[idx]
        out.add(t, n)
    return out


@dataclass
class Chain:
    """A fork chain: start entry index plus (coordinate, idx_b, idx_a) steps."""

    start: int
    steps: list
    value: tuple
    node: int | None = None


def _fork_index(tuples) -> dict:
    """(i, a, b) -> (idx_a, idx_b): lexicographically first witness pair."""
    if not tuples:
        return {}
    k = len(tuples[0])
    order = sorted(range(len(tuples)), key=lambda j: tuples[j])
    index: dict = {}
    groups: dict = {(): order}
    for i in range(k):
        for prefix in sorted(groups):
            members = groups[prefix]
            by_value: dict = {}
            for idx in members:
                by_value.setdefault(tuples[idx][i], []).append(idx)
            for a in sorted(by_value):
                for b in sorted(by_value):
                    key = (i + 1, a, b)
                    if key not in index:
                        index[key] = (by_value[a][0], by_value[b][0])
        next_groups: dict = {}
        for prefix, members in groups.items():
            for idx in members:
                next_groups.setdefault(prefix + (tuples[idx][i],), []).append(idx)
        groups = next_groups
    return index


def maltsev_chain_member(alg: FiniteAlgebra, rep: EnumeratedCompactRep,
                         target) -> Chain | None:
    """Membership of `target` in the subpower represented by `rep`.

    Walks the coordinates, folding in a fork witness pair with the Mal'tsev
    operation at every disagreement.  Requires `rep` to be a genuine compact
    representation of its subpower; returns None exactly when the target is
    outside.
    """
    target = tuple(target)
    tuples = rep.tuples()
    if not tuples:
        return None
    k = len(tuples[0])
    if len(target) != k:
        raise AlgebraError("target length differs from representation")
    forks = _fork_index(tuples)
    start = None
    for idx in sorted(range(len(tuples)), key=lambda j: tuples[j]):
        if tuples[idx][0] == target[0]:
            start = idx
            break
    if start is None:
        return None

    current = tuples[start]
    node = rep.entries[start][1]
    steps = []
    for i in range(2, k + 1):
        if current[i - 1] == target[i - 1]:
            continue
        witness = forks.get((i, current[i - 1], target[i - 1]))
        if witness is None:
            return None
        idx_b, idx_a = witness
        current = maltsev_fold(alg, current, tuples[idx_b], tuples[idx_a])
        steps.append((i, idx_b, idx_a))
        if node is not None:
            nb = rep.entries[idx_b][1]
            na = rep.entries[idx_a][1]
            node = (None if nb is None or na is None
                    else rep.bank.splice(alg.maltsev, [node, nb, na]))
    if current != target:
        return None
    return Chain(start=start, steps=steps, value=current, node=node)


# ---------------------------------------------------------------------------
# Fix-Value

def _pair_closure(alg: FiniteAlgebra, rep: EnumeratedCompactRep,
                  c: int, j: int) -> dict:
    """Close proj_{c,j} of the entries under the basic operations.

    Returns {(x, y): node}: every pair in the projection of the full
    subpower, with a circuit over the representation's generators whose
    full evaluation projects to that pair.  Projection commutes with
    generation, so closing the projected pairs is exact.
    """
    seeds: list = []
    seed_nodes: list = []
    seen = set()
    for t, node in rep.entries:
        key = (t[c], t[j])
        if key not in seen:
            seen.add(key)
            seeds.append(key)
            seed_nodes.append(node)
    eng = _Closure(alg, seeds, cap=alg.size ** 2 + 1, track=True)
    eng.run()
    out: dict = {}
    node_of: dict = {}
    for idx in range(eng.n):
        tag = eng.prov[idx]
        if tag[0] == "gen":
            node_of[idx] = seed_nodes[tag[1]]
        else:
            children = tuple(node_of[cix] for cix in tag[1:])
            if any(ch is None for ch in children):
                node_of[idx] = None
            else:
                node_of[idx] = rep.bank.app(tag[0], children)
        pair = (int(eng.rows[idx][0]), int(eng.rows[idx][1]))
        out[pair] = node_of[idx]
    return out


def fix_value(alg: FiniteAlgebra, rep: EnumeratedCompactRep, value,
              coord: int = 1) -> EnumeratedCompactRep:
    """Compact representation of {x in R : x(coord) = value}.

    `rep` must be an enumerated compact representation of its subpower and
    all coordinates before `coord` must already be constant on it (fixing
    proceeds front to back).  An empty result is a value, not an error.
    """
    return fix_block(alg, rep, [value], coord=coord)


def fix_block(alg: FiniteAlgebra, rep: EnumeratedCompactRep, block,
              coord: int = 1) -> EnumeratedCompactRep:
    """As fix_value with the membership predicate x(coord) in block."""
    block = sorted(set(block))
    if not block:
        raise AlgebraError("empty block")
    out = EnumeratedCompactRep(rep.generators, [], rep.bank)
    if rep.is_empty():
        return out
    tuples = rep.tuples()
    k = len(tuples[0])
    c = coord - 1
    if not 0 <= c < k:
        raise AlgebraError("coordinate out of range")
    if not any(t[c] in block for t in tuples):
        return out

    forks = _fork_index(tuples)
    args = [np.asarray(g) for g in rep.generators]
    emitted = set()

    def emit(tup, node):
        if tup not in emitted:
            emitted.add(tup)
            out.add(tup, node)

    def materialize(node):
        vals = eval_nodes(alg, rep.bank, [node], args)[node]
        return tuple(int(v) for v in vals)

    # realize every block value occurring at the fixed coordinate
    self_pairs = _pair_closure(alg, rep, c, c)
    for (x, _), pnode in sorted(self_pairs.items()):
        if x in block:
            emit(materialize(pnode), pnode)

    for j in range(c + 1, k):
        pairs = _pair_closure(alg, rep, c, j)
        reachable: dict = {}
        for (x, y), pnode in sorted(pairs.items()):
            if x in block and y not in reachable:
                reachable[y] = pnode
        for (i, a, b), (idx_a, idx_b) in sorted(forks.items()):
            if i != j + 1 or a == b or a not in reachable:
                continue
            pnode = reachable[a]
            t_val = materialize(pnode)
            emit(t_val, pnode)
            s_val = maltsev_fold(alg, t_val, tuples[idx_a], tuples[idx_b])
            s_node = rep.bank.splice(alg.maltsev,
                                     [pnode, rep.entries[idx_a][1],
                                      rep.entries[idx_b][1]]) \
                if rep.entries[idx_a][1] is not None \
                and rep.entries[idx_b][1] is not None and pnode is not None \
                else None
            emit(s_val, s_node)
    return out


def fix_values(alg: FiniteAlgebra, rep: EnumeratedCompactRep,
               values) -> EnumeratedCompactRep:
    """Fix coordinates 1..m to the given values, front to back."""
    current = rep
    for pos, value in enumerate(values, start=1):
        current = fix_value(alg, current, value, coord=pos)
        if current.is_empty():
            return current
    return current
