from .alias import AliasTable, build_alias
from .partition import Partition, PartitionPiece, build_partition
from .sampler import (
    RunReport,
    SampleRecord,
    acceptance_lower_bound,
    envelope_at,
    make_rng,
    np_enclosure,
    proposal_sample,
    rejection_sample,
)
from .target import ShapePiece, TargetShape

__all__ = [
    "AliasTable",
    "build_alias",
    "Partition",
    "PartitionPiece",
    "build_partition",
    "RunReport",
    "SampleRecord",
    "acceptance_lower_bound",
    "envelope_at",
    "make_rng",
    "np_enclosure",
    "proposal_sample",
    "rejection_sample",
    "ShapePiece",
    "TargetShape",
]
