"""hdopt: reduce bit flips when streaming quantized weight matrices.

Streaming a weight matrix row by row into a spatial array flips weight
register bits on every row transition; the number of flips is the hamming
distance between adjacent rows and tracks dynamic energy linearly. This
package measures that cost, reorders output channels (exactly or greedily)
to shrink it, clusters input channels into array-width segments, simulates
the resulting stream bit-exactly, and emits the address tables and layer
re-layouts needed to deploy a plan without changing any output value.
"""

from .artifacts import (
    AddressLut,
    drain_through_lut,
    emit_lut,
    input_permutation_lut,
    load_lut,
    positional_plan,
    relayout_pair,
    save_lut,
)
from .core import (
    ArrayConfig,
    ChannelOrder,
    ClusterPlan,
    EnergyParams,
    InfeasibleError,
    LayerShape,
    Segment,
    ValidationError,
    WeightMatrix,
    as_order,
    load_plan,
    load_weight_bundle,
    plan_to_obj,
    save_plan,
    save_weight_bundle,
)
from .metrics import (
    HdReport,
    column_hd_with_order,
    hd_matrix,
    hd_plan,
    hd_scalar,
    hd_with_order,
    nhd,
    popcount,
)
from .partition import ClusterTrace, cluster_then_reorder, segment_then_reorder
from .reorder import (
    EXACT_CHANNEL_LIMIT,
    exact_reorder,
    greedy_reorder,
    pairwise_hd,
    reorder_with_fallback,
)
from .sim import (
    ActivationSet,
    StreamReport,
    estimate_energy,
    load_activation_set,
    save_activation_set,
    simulate_stream,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationSet",
    "AddressLut",
    "ArrayConfig",
    "ChannelOrder",
    "ClusterPlan",
    "ClusterTrace",
    "EnergyParams",
    "EXACT_CHANNEL_LIMIT",
    "HdReport",
    "InfeasibleError",
    "LayerShape",
    "Segment",
    "StreamReport",
    "ValidationError",
    "WeightMatrix",
    "as_order",
    "cluster_then_reorder",
    "column_hd_with_order",
    "drain_through_lut",
    "emit_lut",
    "estimate_energy",
    "exact_reorder",
    "greedy_reorder",
    "hd_matrix",
    "hd_plan",
    "hd_scalar",
    "hd_with_order",
    "input_permutation_lut",
    "load_activation_set",
    "load_lut",
    "load_plan",
    "load_weight_bundle",
    "nhd",
    "pairwise_hd",
    "plan_to_obj",
    "popcount",
    "positional_plan",
    "relayout_pair",
    "reorder_with_fallback",
    "save_activation_set",
    "save_lut",
    "save_plan",
    "save_weight_bundle",
    "segment_then_reorder",
    "simulate_stream",
]
