#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "povmkit/covariant.hpp"
#include "povmkit/povm.hpp"

namespace povmkit {

enum class RefinementDirection { IncreasingToEvent, DecreasingToEmpty, DecreasingToAtom };

struct RefinementSequence {
    RefinementDirection direction = RefinementDirection::IncreasingToEvent;
    std::vector<EventSet> events;
    EventSet limit;  // target of an increasing sequence
};

enum class Norm1Verdict { HasNorm1, Fails, ExcludedByNecessaryCondition };
std::string norm1_verdict_name(Norm1Verdict v);

struct Norm1EventRecord {
    EventSet event;
    bool nonzero = false;
    double norm = 0.0;
    double gap = 0.0;  // 1 - norm
    Vector maximizer;
    double maximizer_value = 0.0;
};

struct Norm1Report {
    std::vector<Norm1EventRecord> records;
    Norm1Verdict verdict = Norm1Verdict::HasNorm1;
    std::vector<int> failing_records;
    double worst_gap = 0.0;
};

// Per-event norms and gaps; verdict HasNorm1 iff every event with norm above
// tol has gap <= tol.
Norm1Report norm1_report(const DiscretePOVM& povm, const std::vector<EventSet>& events,
                         double tol, const Tolerances& cfg = {});

enum class NecessaryConditionVerdict { Excluded, Inconclusive };

struct NecessaryConditionReport {
    NecessaryConditionVerdict verdict = NecessaryConditionVerdict::Inconclusive;
    std::vector<int> witnesses;      // zero-norm atoms adjacent to the support
    double max_atom_norm = 0.0;      // per-atom norm ceiling
    double min_support_norm = 0.0;   // smallest norm among support atoms
};

// A vanishing atom in the closure of the support (all weights here are
// finite) rules the norm-1 property out; otherwise the condition is silent.
NecessaryConditionReport necessary_condition_verdict(const DiscretePOVM& povm, double tol,
                                                     const Tolerances& cfg = {});

struct ContinuityRow {
    double measure = 0.0;   // nu(Delta_i) or nu(limit \ Delta_i)
    double norm_dev = 0.0;  // ||F(Delta_i)|| or ||F(limit) - F(Delta_i)||
    double bound = 0.0;     // c * measure + slack
    bool dominated = false;
    double identity_gap = 0.0;  // ||1 - F(Delta_i)|| for increasing sequences
};

struct ContinuityReport {
    std::vector<ContinuityRow> rows;
    double c = 0.0;
    bool c_finite = true;
    bool all_dominated = false;
    double final_norm_dev = 0.0;
    double final_identity_gap = 0.0;
};

// Norm and measure sequences along a refinement, with the absolute-continuity
// domination ||.|| <= c * nu + 1e-10 checked at every level.
ContinuityReport refinement_check(const DiscretePOVM& povm, const RefinementSequence& seq,
                                  const Tolerances& tol = {});

// Shrinking single-cell events across nested grids (cell size halves per
// level); events[k] lives on levels[k] and must tile inside events[k-1].
ContinuityReport refinement_check_family(const std::vector<DiscretePOVM>& levels,
                                         const std::vector<EventSet>& events,
                                         const Tolerances& tol = {});

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<std::array<double, 2>> points;  // (log mu, log worst-cell norm)
};

// Least-squares fit of log worst-cell norm against log cell measure across
// grid levels; slope 1 is the absolutely-continuous scaling.
ScalingFit cell_shrink_scaling(const std::vector<DiscretePOVM>& levels);

struct JointBound {
    double norm = 0.0;
    double bound = 0.0;  // min(1, c * mu(Delta_q x Delta_p))
    double mu = 0.0;
    Vector maximizer;
};

// Joint localization on a product event Delta_q x Delta_p; dq indexes rows,
// dp indexes columns.
JointBound joint_localization_bound(const DiscretePOVM& povm, const EventSet& dq,
                                    const EventSet& dp, const Tolerances& tol = {});

// Event menu: exhaustive when the space has at most max_exhaustive_atoms
// atoms, otherwise empty + full + all singletons + `random_count` seeded
// random events.
std::vector<EventSet> analysis_events(const OutcomeSpace& space, uint64_t seed,
                                      int random_count = 200, int max_exhaustive_atoms = 12);

}  // namespace povmkit
