"""Shared fixture data: the seven-process subjective-trust example and oracles.

EX7_FAILPRONE lists each process's fail-prone sets expanded by hand from the
threshold/product notation; EX7_QUORUMS is the expected canonical quorum table.
The oracle helpers work on frozensets of indices, independent of the bitmask
implementation under test.
"""

from __future__ import annotations

import itertools

from asymbft import AsymFailProneSystem, AsymQuorumSystem, ProcessSet, SetFamily

EX7_N = 7

# indices are 0-based: p1 -> 0, ..., p7 -> 6
EX7_FAILPRONE: list[list[set[int]]] = [
    [{1, 3, 5, 6}, {1, 4, 5, 6}, {3, 4, 5, 6}],        # p1: 2-of-{p2,p4,p5} + p6 + p7
    [{2, 3, 5, 6}, {2, 4, 5, 6}, {3, 4, 5, 6}],        # p2: 2-of-{p3,p4,p5} + p6 + p7
    [{0, 3, 5, 6}, {0, 4, 5, 6}, {3, 4, 5, 6}],        # p3: 2-of-{p1,p4,p5} + p6 + p7
    [{0, 5, 6}, {1, 5, 6}, {2, 5, 6}, {4, 5, 6}],      # p4: 1-of-{p1,p2,p3,p5} + p6 + p7
    [{0, 5, 6}, {1, 5, 6}, {2, 5, 6}, {3, 5, 6}],      # p5: 1-of-{p1,p2,p3,p4} + p6 + p7
    [{0, 2, 6}],                                       # p6: {p1,p3,p7}
    [{2, 3, 4}],                                       # p7: {p3,p4,p5}
]

EX7_QUORUMS: list[list[set[int]]] = [
    [{0, 2, 4}, {0, 2, 3}, {0, 1, 2}],                 # Q1
    [{0, 1, 4}, {0, 1, 3}, {0, 1, 2}],                 # Q2
    [{1, 2, 4}, {1, 2, 3}, {0, 1, 2}],                 # Q3
    [{0, 1, 2, 3}, {0, 1, 3, 4}, {0, 2, 3, 4}, {1, 2, 3, 4}],  # Q4
    [{0, 1, 2, 4}, {0, 1, 3, 4}, {0, 2, 3, 4}, {1, 2, 3, 4}],  # Q5
    [{1, 3, 4, 5}],                                    # Q6
    [{0, 1, 5, 6}],                                    # Q7
]

EX7_DSL_ROWS = [
    "theta(2,{p2,p4,p5}) * {p6} * {p7}",
    "theta(2,{p3,p4,p5}) * {p6} * {p7}",
    "theta(2,{p1,p4,p5}) * {p6} * {p7}",
    "theta(1,{p1,p2,p3,p5}) * {p6} * {p7}",
    "theta(1,{p1,p2,p3,p4}) * {p6} * {p7}",
    "theta(3,{p1,p3,p7})",
    "theta(3,{p3,p4,p5})",
]


def ex7_failprone() -> AsymFailProneSystem:
    return AsymFailProneSystem.of(EX7_N, EX7_FAILPRONE)


def ex7_quorums() -> AsymQuorumSystem:
    return AsymQuorumSystem.of(EX7_N, EX7_QUORUMS)


def family_to_sets(fam: SetFamily) -> frozenset[frozenset[int]]:
    return frozenset(frozenset(m) for m in fam.members)


def pset(n: int, *indices: int) -> ProcessSet:
    return ProcessSet.of(n, indices)


# --- frozenset oracles, independent of the bitmask implementation ---

def oracle_hits_all(candidate: set[int], quorums: list[set[int]]) -> bool:
    return all(candidate & q for q in quorums)


def oracle_minimal_hitting_sets(n: int, quorums: list[set[int]]) -> set[frozenset[int]]:
    """Every subset of 0..n-1 that hits all quorums and has no hitting proper subset."""
    hitting = [
        frozenset(combo)
        for size in range(0, n + 1)
        for combo in itertools.combinations(range(n), size)
        if oracle_hits_all(set(combo), quorums)
    ]
    return {
        h for h in hitting
        if not any(other < h for other in hitting)
    }


def oracle_k_subsets(universe: list[int], k: int) -> set[frozenset[int]]:
    return {frozenset(c) for c in itertools.combinations(universe, k)}


def oracle_guild_subsets(
    n: int,
    per_process_quorums: list[list[set[int]]],
    wise: set[int],
) -> list[set[int]]:
    """All nonempty wise subsets containing a quorum for each member."""
    wise_sorted = sorted(wise)
    out = []
    for size in range(1, len(wise_sorted) + 1):
        for combo in itertools.combinations(wise_sorted, size):
            s = set(combo)
            if all(any(q <= s for q in per_process_quorums[i]) for i in s):
                out.append(s)
    return out
