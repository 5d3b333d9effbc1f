"""Finite-alphabet causal models: interventions, affects relations,
non-signalling checks, spacetime embeddings, compatibility and causal-loop
classification."""

from .dist import Distribution
from .graphs import CausalGraph, Trail
from .models import CausalModel, ExogenousLaw, Mechanism, validate
from .affects import (AffectsRelation, AffectsVerdict, affects, ho_affects,
                      cond_affects, is_irreducible, reduce_relation,
                      enumerate_affects, causation_constraints, classify_arrows)
from .signalling import (BellRoles, ClauseReport, NSReport, JammingReport,
                         check_ns2, check_ns3, check_ns3_relaxed, is_jamming,
                         EquivalenceEntry, EquivalenceReport,
                         verify_ns_affects_equivalence)
from .geometry import (MinkowskiEvent, PartialOrder, Embedding,
                       interval_squared, minkowski_precedes, apex_1p1,
                       contain_two_in_one, slice_contained,
                       minkowski_joint_future_contained,
                       BEFORE, AFTER, SPACELIKE, EQUAL,
                       TRUE, FALSE, UNDETERMINED)
from .compat import (COMPATIBLE, INCOMPATIBLE, UNDETERMINED_VERDICT,
                     CompatibilityReport, check_compat, check_model_compat,
                     BipartiteConditions, bipartite_compat_conditions,
                     TripartiteConditions, tripartite_compat_conditions,
                     LoopVerdict, affects_loop_certificate, certify_hidden_loop)
from .scenarios import (Scenario, ScenarioReport, all_scenarios, get_scenario,
                        run_scenario, standard_bipartite_embedding,
                        jamming_embedding, JammingLayout, latent_grid,
                        scenario_model_text)
from .modelfile import (ParsedModel, parse_model_text, parse_model_file,
                        render_model_file)

__all__ = [
    "Distribution", "CausalGraph", "Trail", "CausalModel", "ExogenousLaw",
    "Mechanism", "validate", "AffectsRelation", "AffectsVerdict", "affects",
    "ho_affects", "cond_affects", "is_irreducible", "reduce_relation",
    "enumerate_affects", "causation_constraints", "classify_arrows",
    "BellRoles", "ClauseReport", "NSReport", "JammingReport",
    "check_ns2", "check_ns3", "check_ns3_relaxed", "is_jamming",
    "EquivalenceEntry", "EquivalenceReport", "verify_ns_affects_equivalence",
    "MinkowskiEvent", "PartialOrder", "Embedding", "interval_squared",
    "minkowski_precedes", "apex_1p1", "contain_two_in_one", "slice_contained",
    "minkowski_joint_future_contained",
    "BEFORE", "AFTER", "SPACELIKE", "EQUAL", "TRUE", "FALSE", "UNDETERMINED",
    "COMPATIBLE", "INCOMPATIBLE", "UNDETERMINED_VERDICT",
    "CompatibilityReport", "check_compat", "check_model_compat",
    "BipartiteConditions", "bipartite_compat_conditions",
    "TripartiteConditions", "tripartite_compat_conditions",
    "LoopVerdict", "affects_loop_certificate", "certify_hidden_loop",
    "Scenario", "ScenarioReport", "all_scenarios", "get_scenario",
    "run_scenario", "standard_bipartite_embedding", "jamming_embedding",
    "JammingLayout", "latent_grid", "scenario_model_text",
    "ParsedModel", "parse_model_text", "parse_model_file", "render_model_file",
]
