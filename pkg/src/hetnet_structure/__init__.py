"""Community structure and node roles in heterogeneous networks."""
# This gets managed by python-semantic-release, don't touch!
__version__ = "0.1.0"

from . import centrality, community, evaluation, graph, io, ranking
from .centrality import (
    CentralityMatrix,
    CentralityParams,
    SpectralInfo,
    bonacich_adaptive,
    bonacich_exact,
    bonacich_series,
    katz,
    max_alpha,
    node_scores,
    radius,
    spectral_radius,
)
from .community import CommunityResult, Partition, detect_communities
from .config import DEFAULT_SETTINGS, Settings
from .evaluation import nmi
from .graph import (
    LayeredGraph,
    LayerWeights,
    NModeMatrix,
    apply_layer_weights,
    build_nmode,
    project_unipartite_binary,
    project_unipartite_weighted,
)
from .io import load_builtin, load_builtin_partition, load_graph, load_gml_subset
from .ranking import alpha_sweep, classify_roles, community_scores, rank_within_groups
