"""Exact cardinality repair for tractable FD schemas.

:func:`find_crep` mirrors the classifier: it splits the instance into
blocks along the rewrite that applies, repairs each block recursively
under the projected schema, and recombines. Recombination is a plain
union for S1, a best-block choice for S2, and a maximum-weight bipartite
matching over block repair sizes for S3.

Facts handed to a recursive call are projected; inside a block the
projection is injective (all facts agree on the removed columns), so
results map back to original facts without losing cardinality.

Every tie is broken canonically (fact order, block-key order, or the
lexicographically smallest optimal edge set), so repeated runs return
the same repair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .fds import (
    Constant,
    Fact,
    FdSchema,
    Instance,
    SchemaError,
    Signature,
    constant_key,
    normalize,
    project,
)
from .simplify import (
    NotApplicableError,
    SimplificationTrace,
    classify,
    find_s1,
    find_s2,
    find_s3,
)


@dataclass(frozen=True)
class Block:
    """The facts sharing one value tuple on the blocking attributes."""

    key: tuple[Constant, ...]
    facts: Instance


@dataclass(frozen=True)
class RepairResult:
    """A repair, its size, the schema trace, and per-block diagnostics."""

    repair: Instance
    size: int
    trace: SimplificationTrace
    block_sizes: tuple[tuple[tuple[Constant, ...], int], ...] = ()

    @property
    def per_block_sizes(self) -> dict[tuple[Constant, ...], int]:
        return dict(self.block_sizes)


@dataclass(frozen=True)
class BipartiteMatchProblem:
    """Weighted bipartite graph between realized left/right value tuples.

    Nodes and edges are stored canonically sorted; weights must be
    non-negative and at most one edge may join a given node pair.
    """

    left: tuple
    right: tuple
    edges: tuple[tuple[Constant, Constant, int], ...]

    def __init__(self, left: Iterable, right: Iterable, edges: Iterable):
        left = tuple(sorted(set(left), key=constant_key))
        right = tuple(sorted(set(right), key=constant_key))
        edges = tuple(
            sorted(
                (tuple(e) for e in edges),
                key=lambda e: (constant_key(e[0]), constant_key(e[1])),
            )
        )
        left_set, right_set = set(left), set(right)
        seen = set()
        for x, y, w in edges:
            if x not in left_set or y not in right_set:
                raise SchemaError(f"edge ({x!r}, {y!r}) endpoint unknown")
            if not isinstance(w, int) or w < 0:
                raise SchemaError(f"edge weight must be a non-negative int: {w!r}")
            if (x, y) in seen:
                raise SchemaError(f"duplicate edge ({x!r}, {y!r})")
            seen.add((x, y))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "edges", edges)


def blocks_by(instance: Instance, attrs: Iterable[str]) -> tuple[Block, ...]:
    """Partition the instance by its value tuples on the given attributes.

    Blocks come back sorted by key; they are pairwise disjoint and cover
    the instance.
    """
    attrs = instance.signature.sorted_attrs(attrs)
    grouped: dict[tuple, list[Fact]] = {}
    for fact in instance.facts:
        grouped.setdefault(instance.value_of(fact, attrs), []).append(fact)
    return tuple(
        Block(key=key, facts=Instance(instance.signature, facts))
        for key, facts in sorted(
            grouped.items(), key=lambda kv: tuple(constant_key(v) for v in kv[0])
        )
    )


def split_s1(schema: FdSchema, instance: Instance, attr: str) -> tuple[Block, ...]:
    """Blocks of facts sharing a value on the S1 witness attribute."""
    schema.signature.check_attrs([attr])
    return blocks_by(instance, [attr])


def _project_block(
    block_facts: Instance, removed: frozenset[str]
) -> tuple[Instance, dict[Fact, Fact]]:
    """Project a block's facts and keep the (injective) reverse map."""
    sig = block_facts.signature
    keep = [i for i, a in enumerate(sig.attributes) if a not in removed]
    new_sig = Signature(sig.relation, tuple(sig.attributes[i] for i in keep))
    back: dict[Fact, Fact] = {}
    for fact in block_facts.facts:
        projected = tuple(fact[i] for i in keep)
        assert projected not in back, "projection collided inside a block"
        back[projected] = fact
    return Instance(new_sig, back.keys()), back


def find_crep(schema: FdSchema, instance: Instance) -> Optional[RepairResult]:
    """Compute a cardinality repair, or None when the schema is hard.

    Returns None exactly when :func:`fdrepair.simplify.classify` reports
    the schema intractable; otherwise the result is a consistent,
    maximum-size subinstance.
    """
    if schema.signature != instance.signature:
        raise SchemaError("instance signature does not match schema")
    trace = classify(schema)
    if not trace.tractable:
        return None
    norm = normalize(schema)
    if not norm.fds:
        return RepairResult(repair=instance, size=len(instance), trace=trace)
    if find_s1(norm) is not None:
        return repair_s1(norm, instance)
    if find_s2(norm) is not None:
        return repair_s2(norm, instance)
    return repair_s3(norm, instance)


def repair_s1(schema: FdSchema, instance: Instance) -> Optional[RepairResult]:
    """Repair each same-witness-value block recursively; return the union.

    No two facts from different blocks can violate an FD, because every
    lhs contains the witness attribute.
    """
    norm = normalize(schema)
    attr = find_s1(norm)
    if attr is None:
        raise NotApplicableError("S1 does not apply")
    removed = frozenset([attr])
    projected_schema = project(norm, removed)
    chosen: set[Fact] = set()
    sizes = []
    for block in split_s1(norm, instance, attr):
        sub_instance, back = _project_block(block.facts, removed)
        sub = find_crep(projected_schema, sub_instance)
        if sub is None:
            return None
        chosen.update(back[f] for f in sub.repair.facts)
        sizes.append((block.key, sub.size))
    repaired = Instance(schema.signature, chosen)
    return RepairResult(
        repair=repaired,
        size=len(repaired),
        trace=classify(norm),
        block_sizes=tuple(sizes),
    )


def repair_s2(schema: FdSchema, instance: Instance) -> Optional[RepairResult]:
    """Repair each block of the empty-lhs witness; keep only the largest.

    Any consistent subinstance lives inside a single block here, so the
    best block's repair is the global optimum. Ties go to the earliest
    block key.
    """
    norm = normalize(schema)
    witness = find_s2(norm)
    if witness is None:
        raise NotApplicableError("S2 does not apply")
    removed = witness.rhs
    projected_schema = project(norm, removed)
    best: Optional[tuple[frozenset[Fact], int]] = None
    sizes = []
    for block in blocks_by(instance, removed):
        sub_instance, back = _project_block(block.facts, removed)
        sub = find_crep(projected_schema, sub_instance)
        if sub is None:
            return None
        sizes.append((block.key, sub.size))
        if best is None or sub.size > best[1]:
            best = (frozenset(back[f] for f in sub.repair.facts), sub.size)
    chosen = best[0] if best is not None else frozenset()
    repaired = Instance(schema.signature, chosen)
    return RepairResult(
        repair=repaired,
        size=len(repaired),
        trace=classify(norm),
        block_sizes=tuple(sizes),
    )


def _s3_blocks(
    schema: FdSchema, instance: Instance
) -> tuple[frozenset[str], tuple[str, ...], tuple[str, ...], tuple[Block, ...]]:
    witness = find_s3(schema)
    if witness is None:
        raise NotApplicableError("S3 does not apply")
    first, second = witness
    x1 = schema.signature.sorted_attrs(first.lhs)
    x2 = schema.signature.sorted_attrs(second.lhs)
    removed = first.lhs | second.lhs
    grouped: dict[tuple, list[Fact]] = {}
    for fact in instance.facts:
        key = (instance.value_of(fact, x1), instance.value_of(fact, x2))
        grouped.setdefault(key, []).append(fact)
    blocks = tuple(
        Block(key=key, facts=Instance(instance.signature, facts))
        for key, facts in sorted(
            grouped.items(),
            key=lambda kv: (constant_key(kv[0][0]), constant_key(kv[0][1])),
        )
    )
    return removed, x1, x2, blocks


def build_match_problem(
    schema: FdSchema,
    instance: Instance,
    x1: Iterable[str],
    x2: Iterable[str],
) -> Optional[BipartiteMatchProblem]:
    """The weighted bipartite graph driving the S3 recombination.

    One node per realized value tuple on each side, one edge per occupied
    block, weighted by the block's recursive repair size. Returns None if
    any block repair comes back absent.
    """
    norm = normalize(schema)
    x1 = norm.signature.sorted_attrs(x1)
    x2 = norm.signature.sorted_attrs(x2)
    removed, wit_x1, wit_x2, blocks = _s3_blocks(norm, instance)
    if set(x1) != set(wit_x1) or set(x2) != set(wit_x2):
        raise NotApplicableError(
            "given attribute sets do not match the S3 witness pair"
        )
    projected_schema = project(norm, removed)
    edges = []
    for block in blocks:
        sub_instance, _ = _project_block(block.facts, removed)
        sub = find_crep(projected_schema, sub_instance)
        if sub is None:
            return None
        edges.append((block.key[0], block.key[1], sub.size))
    return BipartiteMatchProblem(
        left=(e[0] for e in edges), right=(e[1] for e in edges), edges=edges
    )


def repair_s3(schema: FdSchema, instance: Instance) -> Optional[RepairResult]:
    """Repair blocks keyed by both witness value tuples, then match.

    A consistent subinstance can touch a left value and a right value
    together only once, so the optimum is a maximum-weight matching over
    block repair sizes; the repair is the union of the matched blocks'
    repairs.
    """
    norm = normalize(schema)
    removed, _, _, blocks = _s3_blocks(norm, instance)
    projected_schema = project(norm, removed)
    block_repairs: dict[tuple, frozenset[Fact]] = {}
    edges = []
    sizes = []
    for block in blocks:
        sub_instance, back = _project_block(block.facts, removed)
        sub = find_crep(projected_schema, sub_instance)
        if sub is None:
            return None
        block_repairs[block.key] = frozenset(back[f] for f in sub.repair.facts)
        edges.append((block.key[0], block.key[1], sub.size))
        sizes.append((block.key, sub.size))
    problem = BipartiteMatchProblem(
        left=(e[0] for e in edges), right=(e[1] for e in edges), edges=edges
    )
    matching = max_weight_matching(problem)
    weights = {(x, y): w for x, y, w in problem.edges}
    chosen: set[Fact] = set()
    total = 0
    for x, y in matching:
        chosen.update(block_repairs[(x, y)])
        total += weights[(x, y)]
    repaired = Instance(schema.signature, chosen)
    assert len(repaired) == total, "matching weight must equal repair size"
    return RepairResult(
        repair=repaired,
        size=len(repaired),
        trace=classify(norm),
        block_sizes=tuple(sizes),
    )


def _max_matching_weight(
    edges: Sequence[tuple[Constant, Constant, int]]
) -> int:
    """Maximum total weight of any matching among the given edges."""
    if not edges:
        return 0
    lefts = sorted({e[0] for e in edges}, key=constant_key)
    rights = sorted({e[1] for e in edges}, key=constant_key)
    lindex = {x: i for i, x in enumerate(lefts)}
    rindex = {y: j for j, y in enumerate(rights)}
    weight = np.zeros((len(lefts), len(rights)), dtype=np.int64)
    for x, y, w in edges:
        weight[lindex[x], rindex[y]] = max(weight[lindex[x], rindex[y]], w)
    rows, cols = linear_sum_assignment(weight, maximize=True)
    return int(weight[rows, cols].sum())


def max_weight_matching(
    problem: BipartiteMatchProblem,
) -> tuple[tuple[Constant, Constant], ...]:
    """A maximum-weight matching, deterministically tie-broken.

    Among all maximum-weight matchings, returns the one whose canonically
    sorted edge list is lexicographically smallest (so a zero-weight edge
    is left out rather than matched). The weight maximization itself is
    delegated to an assignment solver; this wrapper only pins the choice
    of edge set.
    """
    edges = problem.edges
    target = _max_matching_weight(edges)
    chosen: list[tuple[Constant, Constant]] = []
    chosen_weight = 0
    used_left: set = set()
    used_right: set = set()
    for i, (x, y, w) in enumerate(edges):
        if chosen_weight == target:
            break
        if x in used_left or y in used_right:
            continue
        rest = [
            e
            for e in edges[i + 1 :]
            if e[0] not in used_left
            and e[0] != x
            and e[1] not in used_right
            and e[1] != y
        ]
        if chosen_weight + w + _max_matching_weight(rest) == target:
            chosen.append((x, y))
            chosen_weight += w
            used_left.add(x)
            used_right.add(y)
    assert chosen_weight == target
    return tuple(chosen)
