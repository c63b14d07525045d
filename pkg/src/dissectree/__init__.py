"""Random polygon dissections, dual trees, geodesic chains and looptrees.

The package simulates Boltzmann-distributed dissections of convex polygons
through their dual trees (critical Galton-Watson trees conditioned on the
leaf count), explores the geodesic height functional whose value stays
within one of the polygon graph distance, runs the spine exploration chain
behind the distance scaling constant, and measures loop-graph variants of
conditioned trees.  crt_reference holds the continuum moments that the
Monte Carlo studies are compared against; harness and cli drive seeded,
reproducible experiments.
"""

from dissectree.offspring import (
    OffspringDistribution,
    GeometricTail,
    ScalingConstants,
    OffspringError,
    build_uniform_dissection,
    build_p_angulation,
    build_constrained,
    build_custom,
    normalize_to_critical,
    from_descriptor,
    constants,
    c_geo_series,
    stationary_position_law,
)
from dissectree.plane_tree import (
    PlaneTree,
    PlantedTree,
    CapExhausted,
    ATTEMPT_CAP_DEFAULT,
    TreeSampler,
    plant,
    unplant,
    restricted_tree,
    enumerate_no_unary_trees,
    gw_weight,
    sample_gw,
    sample_conditioned_leaves,
    sample_conditioned_vertices,
    serialize_tree,
    deserialize_tree,
)
from dissectree.dissection import (
    Dissection,
    from_tree,
    sample_boltzmann,
    enumerate_dissections,
    enumerate_dissections_direct,
    partition_function,
    serialize_dissection,
    deserialize_dissection,
)
from dissectree.geodesic import (
    geod_step,
    subtree_height,
    height_profile,
    leaf_height_profile,
    distance_height_slack,
)
from dissectree.spine_chain import (
    chain_step,
    joint_step_law,
    driving_matrix,
    stationary,
    two_step_law,
    chain_height_law,
    spine_height_law_exhaustive,
    simulate,
    simulate_ensemble,
    mean_increment_stationary,
)
from dissectree.looptree import loop_graph, loopbar_graph
from dissectree import crt_reference
from dissectree.harness import (
    ExperimentConfig,
    ExperimentReport,
    StatRequest,
    run_scaling_experiment,
    distortion,
    leaf_metric,
    leaf_deviation_statistic,
    leaf_proximity,
    acceptance_probe,
    DEVIATION_P95_THRESHOLD,
)

__version__ = "0.1.0"
