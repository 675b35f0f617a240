"""Byzantine quorum systems with subjective trust, plus a deterministic
simulator for the randomized binary consensus stack built on them."""

from .quorums import (
    AsymFailProneSystem,
    AsymQuorumSystem,
    Classification,
    ProcessSet,
    QuorumSystemError,
    Report,
    SetFamily,
    asym_canonical_quorums,
    bijective_complement,
    canonical_quorums,
    check_b3,
    check_q3,
    classify,
    contains_quorum,
    is_kernel,
    kernel_within_quorum,
    maximal_guild,
    minimal_kernels,
    normalize_antichain,
    threshold_system,
    verify_asym_quorum_system,
    verify_quorum_system,
)

__all__ = [
    "AsymFailProneSystem",
    "AsymQuorumSystem",
    "Classification",
    "ProcessSet",
    "QuorumSystemError",
    "Report",
    "SetFamily",
    "asym_canonical_quorums",
    "bijective_complement",
    "canonical_quorums",
    "check_b3",
    "check_q3",
    "classify",
    "contains_quorum",
    "is_kernel",
    "kernel_within_quorum",
    "maximal_guild",
    "minimal_kernels",
    "normalize_antichain",
    "threshold_system",
    "verify_asym_quorum_system",
    "verify_quorum_system",
]
