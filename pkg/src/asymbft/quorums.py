"""Set-combinatorial core: fail-prone systems, quorum systems, kernels, guilds.

Processes are identified by indices 0..n-1; subsets of them are stored as
machine-word bitmasks so that the exhaustive oracles used in tests stay fast.
The same types serve both the classic single-trust-assumption setting and the
subjective setting where every process declares its own fail-prone system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

MAX_PROCESSES = 64
KERNEL_ENUM_CAP = 16


class QuorumSystemError(ValueError):
    """Raised when a requested construction does not exist or is out of range."""


@dataclass(frozen=True)
class ProcessSet:
    """Subset of the process universe {0..n-1}, stored as a bitmask."""

    n: int
    bits: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_PROCESSES:
            raise ValueError(f"process count must be in 1..{MAX_PROCESSES}, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("bit set outside the process universe")

    @classmethod
    def of(cls, n: int, indices: Iterable[int] = ()) -> "ProcessSet":
        bits = 0
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"process index {i} out of range for n={n}")
            bits |= 1 << i
        return cls(n, bits)

    @classmethod
    def empty(cls, n: int) -> "ProcessSet":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "ProcessSet":
        return cls(n, (1 << n) - 1)

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.n and (self.bits >> index) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __or__(self, other: "ProcessSet") -> "ProcessSet":
        self._check_universe(other)
        return ProcessSet(self.n, self.bits | other.bits)

    def __and__(self, other: "ProcessSet") -> "ProcessSet":
        self._check_universe(other)
        return ProcessSet(self.n, self.bits & other.bits)

    def __sub__(self, other: "ProcessSet") -> "ProcessSet":
        self._check_universe(other)
        return ProcessSet(self.n, self.bits & ~other.bits)

    def complement(self) -> "ProcessSet":
        return ProcessSet(self.n, ~self.bits & ((1 << self.n) - 1))

    def issubset(self, other: "ProcessSet") -> bool:
        self._check_universe(other)
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "ProcessSet") -> bool:
        self._check_universe(other)
        return self.bits & other.bits == 0

    def add(self, index: int) -> "ProcessSet":
        if not 0 <= index < self.n:
            raise ValueError(f"process index {index} out of range for n={self.n}")
        return ProcessSet(self.n, self.bits | (1 << index))

    def indices(self) -> tuple[int, ...]:
        return tuple(self)

    def _check_universe(self, other: "ProcessSet") -> None:
        if self.n != other.n:
            raise ValueError("process sets over different universes")

    def __repr__(self) -> str:
        return f"ProcessSet({self.n}, {{{','.join(str(i) for i in self)}}})"


@dataclass(frozen=True)
class SetFamily:
    """Ordered collection of process sets over a common universe.

    Raw families may contain duplicates or nested members; pass through
    normalize_antichain before using one as a fail-prone system.
    """

    n: int
    members: tuple[ProcessSet, ...] = ()

    def __post_init__(self) -> None:
        for m in self.members:
            if m.n != self.n:
                raise ValueError("family member over a different universe")

    @classmethod
    def of(cls, n: int, members: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, tuple(ProcessSet.of(n, m) for m in members))

    def __iter__(self) -> Iterator[ProcessSet]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, item: ProcessSet) -> bool:
        return item in self.members

    def is_antichain(self) -> bool:
        ms = self.members
        return all(
            not a.issubset(b)
            for i, a in enumerate(ms)
            for j, b in enumerate(ms)
            if i != j
        )

    def as_sets(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(m) for m in self.members)


@dataclass(frozen=True)
class AsymFailProneSystem:
    """Per-process array of fail-prone systems: entry i is what p_i distrusts."""

    n: int
    systems: tuple[SetFamily, ...]

    def __post_init__(self) -> None:
        if len(self.systems) != self.n:
            raise ValueError("need exactly one fail-prone system per process")
        for fam in self.systems:
            if fam.n != self.n:
                raise ValueError("fail-prone system over a different universe")

    @classmethod
    def of(cls, n: int, families: Iterable[Iterable[Iterable[int]]]) -> "AsymFailProneSystem":
        return cls(n, tuple(_normalize_failprone(SetFamily.of(n, fam)) for fam in families))


@dataclass(frozen=True)
class AsymQuorumSystem:
    """Per-process array of quorum systems: entry i lists the quorums of p_i."""

    n: int
    systems: tuple[SetFamily, ...]

    def __post_init__(self) -> None:
        if len(self.systems) != self.n:
            raise ValueError("need exactly one quorum system per process")
        for fam in self.systems:
            if fam.n != self.n:
                raise ValueError("quorum system over a different universe")

    @classmethod
    def of(cls, n: int, families: Iterable[Iterable[Iterable[int]]]) -> "AsymQuorumSystem":
        return cls(n, tuple(SetFamily.of(n, fam) for fam in families))


@dataclass(frozen=True)
class Classification:
    """Partition of the universe for one execution's actual faulty set."""

    faulty: ProcessSet
    naive: ProcessSet
    wise: ProcessSet
    maximal_guild: Optional[ProcessSet] = None


@dataclass(frozen=True)
class ConsistencyViolation:
    i: Optional[int]
    j: Optional[int]
    quorum_i: ProcessSet
    quorum_j: ProcessSet
    fail_set: ProcessSet


@dataclass(frozen=True)
class AvailabilityViolation:
    i: Optional[int]
    fail_set: ProcessSet


@dataclass
class Report:
    """Verification outcome; violations are data, an empty report means valid."""

    consistency: list[ConsistencyViolation]
    availability: list[AvailabilityViolation]

    @property
    def ok(self) -> bool:
        return not self.consistency and not self.availability


def _sorted_members(members: Iterable[ProcessSet]) -> tuple[ProcessSet, ...]:
    return tuple(sorted(members, key=lambda s: s.bits))


def _normalize_failprone(fam: SetFamily) -> SetFamily:
    # "nothing fails" is one fail-prone set: the empty set
    if not fam.members:
        return SetFamily(fam.n, (ProcessSet.empty(fam.n),))
    return normalize_antichain(fam)


def normalize_antichain(raw: SetFamily) -> SetFamily:
    """Keep the maximal members of a raw family, in canonical bit order."""
    unique = sorted({m.bits for m in raw.members})
    maximal = [
        b for b in unique
        if not any(b != other and b & ~other == 0 for other in unique)
    ]
    return SetFamily(raw.n, tuple(ProcessSet(raw.n, b) for b in maximal))


def check_q3(fail_prone: SetFamily) -> bool:
    """No three (not necessarily distinct) fail-prone sets cover the universe."""
    full = (1 << fail_prone.n) - 1
    bits = [m.bits for m in fail_prone.members]
    for f1, f2, f3 in itertools.combinations_with_replacement(bits, 3):
        if f1 | f2 | f3 == full:
            return False
    return True


def _max_intersections(fa: SetFamily, fb: SetFamily) -> list[int]:
    """Maximal elements of {A & B : A in fa, B in fb}, as bitmasks.

    These generate the downward closure fa* intersect fb*, which suffices for
    every check quantified over that closure (union coverage is monotone).
    """
    a_bits = [m.bits for m in fa.members] or [0]
    b_bits = [m.bits for m in fb.members] or [0]
    raw = sorted({a & b for a in a_bits for b in b_bits})
    return [x for x in raw if not any(x != y and x & ~y == 0 for y in raw)]


def check_b3(af: AsymFailProneSystem) -> bool:
    """Cross-process generalization of the three-set cover condition."""
    full = (1 << af.n) - 1
    inter_cache: dict[tuple[SetFamily, SetFamily], list[int]] = {}
    for i in range(af.n):
        for j in range(i, af.n):
            fi, fj = af.systems[i], af.systems[j]
            key = (fi, fj)
            if key not in inter_cache:
                inter_cache[key] = _max_intersections(fi, fj)
            common = inter_cache[key]
            for a in fi.members or (ProcessSet.empty(af.n),):
                for b in fj.members or (ProcessSet.empty(af.n),):
                    ab = a.bits | b.bits
                    if any(ab | m == full for m in common):
                        return False
    return True


def bijective_complement(family: SetFamily) -> SetFamily:
    """Complement every member within the universe, in canonical order."""
    return SetFamily(family.n, _sorted_members(m.complement() for m in family.members))


def canonical_quorums(fail_prone: SetFamily) -> SetFamily:
    """Quorum system obtained by complementing each fail-prone set.

    Exists exactly when the three-set cover condition holds; an empty
    fail-prone family is read as {emptyset}, yielding the single quorum P.
    """
    fam = _normalize_failprone(fail_prone)
    if not check_q3(fam):
        raise QuorumSystemError("no quorum system exists: three fail-prone sets cover the universe")
    return bijective_complement(fam)


def asym_canonical_quorums(af: AsymFailProneSystem) -> AsymQuorumSystem:
    """Per-process canonical quorum systems; requires the cross-process condition."""
    if not check_b3(af):
        raise QuorumSystemError("no asymmetric quorum system exists: B3 condition violated")
    return AsymQuorumSystem(af.n, tuple(canonical_quorums(f) for f in af.systems))


def verify_quorum_system(fail_prone: SetFamily, quorums: SetFamily) -> Report:
    """Check consistency and availability of a single shared quorum system."""
    report = Report([], [])
    for qi, qj in itertools.combinations_with_replacement(quorums.members, 2):
        overlap = qi.bits & qj.bits
        for f in fail_prone.members:
            if overlap & ~f.bits == 0:
                report.consistency.append(ConsistencyViolation(None, None, qi, qj, f))
    for f in fail_prone.members:
        if not any(q.bits & f.bits == 0 for q in quorums.members):
            report.availability.append(AvailabilityViolation(None, f))
    return report


def verify_asym_quorum_system(af: AsymFailProneSystem, aq: AsymQuorumSystem) -> Report:
    """Check pairwise consistency and per-process availability of aq against af."""
    if af.n != aq.n:
        raise ValueError("mismatched process counts")
    report = Report([], [])
    inter_cache: dict[tuple[SetFamily, SetFamily], list[int]] = {}
    for i in range(af.n):
        for j in range(i, af.n):
            key = (af.systems[i], af.systems[j])
            if key not in inter_cache:
                inter_cache[key] = _max_intersections(af.systems[i], af.systems[j])
            common = inter_cache[key]
            for qi in aq.systems[i].members:
                for qj in aq.systems[j].members:
                    overlap = qi.bits & qj.bits
                    for m in common:
                        if overlap & ~m == 0:
                            report.consistency.append(
                                ConsistencyViolation(i, j, qi, qj, ProcessSet(af.n, m))
                            )
                            break
    for i in range(af.n):
        for f in af.systems[i].members:
            if not any(q.bits & f.bits == 0 for q in aq.systems[i].members):
                report.availability.append(AvailabilityViolation(i, f))
    return report


def is_kernel(candidate: ProcessSet, quorums: SetFamily) -> bool:
    """True when the candidate intersects every quorum of the family."""
    return all(candidate.bits & q.bits for q in quorums.members)


def contains_quorum(candidate: ProcessSet, quorums: SetFamily) -> bool:
    """True when some quorum of the family is contained in the candidate."""
    return any(q.bits & ~candidate.bits == 0 for q in quorums.members)


def minimal_kernels(quorums: SetFamily, enum_cap: int = KERNEL_ENUM_CAP) -> SetFamily:
    """All minimal hitting sets of the quorum family, by exhaustive enumeration.

    Hitting-set is NP-hard in general; the cardinality-ordered search with
    antichain pruning is fine at desk scale but rejected above enum_cap.
    """
    n = quorums.n
    if n > enum_cap:
        raise QuorumSystemError(f"minimal kernel enumeration capped at n={enum_cap}, got n={n}")
    q_bits = [q.bits for q in quorums.members]
    found: list[int] = []
    for size in range(0, n + 1):
        for combo in itertools.combinations(range(n), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if any(k & ~mask == 0 for k in found):
                continue
            if all(mask & q for q in q_bits):
                found.append(mask)
    return SetFamily(n, tuple(ProcessSet(n, b) for b in sorted(found)))


def kernel_within_quorum(faulty: ProcessSet, quorum: ProcessSet) -> ProcessSet:
    """The fault-free part of a quorum; a kernel of any valid system for faulty."""
    return quorum - faulty


def classify(af: AsymFailProneSystem, actual_faulty: ProcessSet) -> Classification:
    """Split the universe into faulty, wise and naive for one execution."""
    if af.n != actual_faulty.n:
        raise ValueError("mismatched process counts")
    wise_bits = 0
    for i in range(af.n):
        if i in actual_faulty:
            continue
        members = af.systems[i].members or (ProcessSet.empty(af.n),)
        if any(actual_faulty.issubset(f) for f in members):
            wise_bits |= 1 << i
    full = (1 << af.n) - 1
    naive_bits = full & ~actual_faulty.bits & ~wise_bits
    return Classification(
        faulty=actual_faulty,
        naive=ProcessSet(af.n, naive_bits),
        wise=ProcessSet(af.n, wise_bits),
        maximal_guild=None,
    )


def maximal_guild(aq: AsymQuorumSystem, wise: ProcessSet) -> Optional[ProcessSet]:
    """Greatest set of wise processes containing a quorum for each member.

    Guilds are closed under union, so the greatest fixpoint of "drop members
    without an internal quorum" is the unique maximal guild; absent when empty.
    """
    if aq.n != wise.n:
        raise ValueError("mismatched process counts")
    current = wise.bits
    changed = True
    while changed and current:
        changed = False
        for i in ProcessSet(aq.n, current):
            if not any(q.bits & ~current == 0 for q in aq.systems[i].members):
                current &= ~(1 << i)
                changed = True
    if not current:
        return None
    return ProcessSet(aq.n, current)


def threshold_system(n: int, f: int) -> AsymFailProneSystem:
    """Common threshold trust: every process tolerates any f failures."""
    if n < 1:
        raise ValueError("need at least one process")
    if f < 0:
        raise ValueError("negative fault bound")
    members = tuple(
        ProcessSet.of(n, combo) for combo in itertools.combinations(range(n), f)
    )
    fam = _normalize_failprone(SetFamily(n, members))
    return AsymFailProneSystem(n, (fam,) * n)
