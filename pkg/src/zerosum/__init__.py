"""Zero-sum partitions of finite abelian 2-groups."""

from .construct import (
    ConstructionBug,
    NoZeroSumPartition,
    NotATwoGroup,
    SizePrecondition,
    Trace,
    UnsupportedGroup,
    case1_realize,
    case2_realize,
    elementary_realize,
    realize_triple,
    z224_realize,
    zero_sum_partition,
)
from .graphs import (
    Digraph,
    LabelingPrecondition,
    MultipartiteSpec,
    RootedTree,
    antimagic_3tree_labeling,
    digraph_irregular_labeling,
    distance_magic_labeling,
)
from .groups import GroupSpec, GroupSpecError, SubgroupFrame, frame_subgroup, parse_group_spec
from .mappings import CompleteMapping, UniqueInvolution, complete_mapping, is_complete_mapping
from .partition import SizeMultiset, SubsetFamily, VerifyReport, format_annex, parse_annex, verify_family
from .search import SearchProblem, explore_constant_sum, search_partition

__version__ = "0.1.0"

__all__ = [
    "ConstructionBug",
    "NoZeroSumPartition",
    "NotATwoGroup",
    "SizePrecondition",
    "Trace",
    "UnsupportedGroup",
    "case1_realize",
    "case2_realize",
    "elementary_realize",
    "realize_triple",
    "z224_realize",
    "zero_sum_partition",
    "Digraph",
    "LabelingPrecondition",
    "MultipartiteSpec",
    "RootedTree",
    "antimagic_3tree_labeling",
    "digraph_irregular_labeling",
    "distance_magic_labeling",
    "GroupSpec",
    "GroupSpecError",
    "SubgroupFrame",
    "frame_subgroup",
    "parse_group_spec",
    "CompleteMapping",
    "UniqueInvolution",
    "complete_mapping",
    "is_complete_mapping",
    "SizeMultiset",
    "SubsetFamily",
    "VerifyReport",
    "format_annex",
    "parse_annex",
    "verify_family",
    "SearchProblem",
    "explore_constant_sum",
    "search_partition",
]
