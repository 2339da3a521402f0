"""Seeded random generators shared by the test modules."""

from __future__ import annotations

import random

from fdrepair.fds import Fd, FdSchema, Instance, Signature
from fdrepair.repair import BipartiteMatchProblem
from fdrepair.gadgets import CnfFormula
from fdrepair.simplify import classify

NAMES = "ABCDEFGH"


def random_schema(
    rng: random.Random, max_attrs: int = 5, max_fds: int = 4
) -> FdSchema:
    """Arbitrary small schema; FDs may be trivial or share attributes."""
    arity = rng.randint(1, max_attrs)
    attrs = list(NAMES[:arity])
    rng.shuffle(attrs)
    sig = Signature("R", tuple(attrs))
    fds = []
    for _ in range(rng.randint(0, max_fds)):
        lhs = frozenset(a for a in attrs if rng.random() < 0.4)
        rhs = frozenset(a for a in attrs if rng.random() < 0.4)
        fds.append(Fd(lhs, rhs))
    return FdSchema(sig, fds)


def random_intractable_schema(
    rng: random.Random, max_attrs: int = 5, max_fds: int = 4
) -> FdSchema:
    while True:
        schema = random_schema(rng, max_attrs, max_fds)
        if not classify(schema).tractable:
            return schema


def random_tractable_schema(
    rng: random.Random, max_attrs: int = 5, max_fds: int = 4
) -> FdSchema:
    """Schema built by inverting a random rewrite sequence.

    Starting from an empty FD set, each inverse step adds the attributes a
    forward rewrite would remove, so the forward classifier can always
    unwind the construction (checked, since the fixed rule order may pick
    a different path).
    """
    while True:
        schema = _inverted_build(rng, max_attrs, max_fds)
        if (
            schema is not None
            and len(schema.fds) <= max_fds
            and classify(schema).tractable
        ):
            return schema


def _inverted_build(rng, max_attrs, max_fds):
    pool = list(NAMES[:max_attrs])
    rng.shuffle(pool)

    def take(k):
        if len(pool) < k:
            return None
        return [pool.pop() for _ in range(k)]

    fds: list[tuple[set, set]] = []
    used: list[str] = []
    for _ in range(rng.randint(1, 3)):
        kinds = ["S2"]
        if fds:
            kinds.append("S1")
        if len(fds) + 2 <= max_fds:
            kinds.append("S3")
        kind = rng.choice(kinds)
        if kind == "S1":
            got = take(1)
            if got is None:
                break
            (attr,) = got
            used.append(attr)
            for lhs, _ in fds:
                lhs.add(attr)
        elif kind == "S2":
            got = take(rng.randint(1, 2))
            if got is None:
                break
            used.extend(got)
            for lhs, rhs in fds:
                for attr in got:
                    if rng.random() < 0.3:
                        lhs.add(attr)
                    elif rng.random() < 0.3:
                        rhs.add(attr)
            fds.append((set(), set(got)))
            if len(fds) > max_fds:
                return None
        else:
            got = take(2)
            if got is None:
                break
            x1, x2 = got
            used.extend(got)
            for lhs, rhs in fds:
                lhs.add(rng.choice((x1, x2)))
                if rng.random() < 0.3:
                    rhs.add(rng.choice((x1, x2)))
            fds.append(({x1}, {x2}))
            fds.append(({x2}, {x1}))
            if len(fds) > max_fds:
                return None
    if not fds:
        return None
    if pool and rng.random() < 0.3:
        used.append(pool.pop())
    attrs = sorted(used, key=lambda a: NAMES.index(a))
    sig = Signature("R", tuple(attrs))
    return FdSchema(sig, [Fd(frozenset(l), frozenset(r)) for l, r in fds])


def random_chain_schema(
    rng: random.Random, max_attrs: int = 6, max_fds: int = 4
) -> FdSchema:
    """FDs whose left-hand sides form an inclusion chain."""
    arity = rng.randint(1, max_attrs)
    attrs = tuple(NAMES[:arity])
    sig = Signature("R", attrs)
    chain: list[set] = []
    current: set = set()
    for _ in range(rng.randint(1, max_fds)):
        chain.append(set(current))
        growth = [a for a in attrs if a not in current and rng.random() < 0.4]
        current |= set(growth)
    fds = []
    for lhs in chain[: rng.randint(1, len(chain))]:
        rhs = frozenset(a for a in attrs if rng.random() < 0.4)
        fds.append(Fd(frozenset(lhs), rhs))
    return FdSchema(sig, fds)


def random_instance(
    rng: random.Random,
    signature: Signature,
    max_facts: int = 12,
    pool: tuple[str, ...] = ("0", "1", "2"),
) -> Instance:
    count = rng.randint(0, max_facts)
    facts = [
        tuple(rng.choice(pool) for _ in range(signature.arity))
        for _ in range(count)
    ]
    return Instance(signature, facts)


def random_match_problem(
    rng: random.Random,
    max_side: int = 7,
    max_edges: int = 16,
    max_weight: int = 9,
) -> BipartiteMatchProblem:
    lefts = [f"L{i}" for i in range(rng.randint(1, max_side))]
    rights = [f"R{i}" for i in range(rng.randint(1, max_side))]
    pairs = [(x, y) for x in lefts for y in rights]
    rng.shuffle(pairs)
    edges = [
        (x, y, rng.randint(0, max_weight))
        for x, y in pairs[: rng.randint(0, min(max_edges, len(pairs)))]
    ]
    return BipartiteMatchProblem(lefts, rights, edges)


def random_cnf(
    rng: random.Random,
    max_vars: int = 8,
    max_clauses: int = 5,
    max_clause_size: int = 3,
    mixed: bool = True,
) -> CnfFormula:
    num_vars = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        size = rng.randint(1, max_clause_size)
        variables = rng.sample(range(1, num_vars + 1), min(size, num_vars))
        if mixed:
            clause = [v if rng.random() < 0.5 else -v for v in variables]
        else:
            sign = 1 if rng.random() < 0.5 else -1
            clause = [sign * v for v in variables]
        clauses.append(clause)
    return CnfFormula(num_vars, clauses)
