"""Quasirandom hypergraphs, discrepancy over layouts, adaptedness and perfect packings."""

from .adapted import (
    AdaptednessCertificate,
    antichain_implies,
    find_certificate,
    grid_graph,
    verify_certificate,
)
from .constructions import gen_A, gen_gnp, gen_prop19, zero_color_layout
from .counting import EmbedBoundParams, EmbeddingConstraints, count_inj, embedding_bound, estimate_density
from .discrepancy import DiscParams, DiscVerdict, check_witness, edge_density_disc, exhaustive_check, search_violation
from .errors import (
    BudgetExceeded,
    CapExceeded,
    InsufficientAbsorbers,
    InvalidParameters,
    PackingFailure,
    ParseError,
    QuasipackError,
)
from .hypercore import KGraph, complete, degree, induced, link, min_degree
from .layouts import Antichain, Layout, count_cliques, enumerate_cliques, intersect_count, is_full
from .packing import (
    AbsorberParams,
    Packing,
    absorb_pack,
    build_absorbing_family,
    exact_perfect_packing,
    find_absorbers,
    greedy_packing,
    is_absorber,
    is_perfect_packing,
    richness_estimate,
)

__version__ = "0.1.0"
