from .data import (
    SitePatternData,
    bundled_path,
    format_patterns,
    load_bundled,
    parse_fasta,
    parse_patterns,
    read_fasta,
    read_patterns,
    write_patterns,
)
from .likelihood import (
    PARAM_NAMES,
    QUARTET_TOPOLOGIES,
    TREE_CLASSES,
    TreeLikelihoodShape,
    clocked_triplet_site_likelihood,
    dataset_log_shape,
    default_domain,
    pattern_likelihood_normalization,
    quartet_site_likelihood,
    site_likelihood_bounds,
    triplet_site_likelihood,
)
from .models import NUCLEOTIDES, SubstModel, hky_transition, jc_transition, kappa_from_tstv
from .transforms import (
    clocked_triplet_branches,
    divergence_ratio_transform,
    midpoint_ratio,
    unrooted_equivalent,
)
