#include "povmkit/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "povmkit/rng.hpp"

namespace povmkit {

std::string norm1_verdict_name(Norm1Verdict v) {
    switch (v) {
        case Norm1Verdict::HasNorm1: return "has-norm-1";
        case Norm1Verdict::Fails: return "fails";
        case Norm1Verdict::ExcludedByNecessaryCondition: return "excluded-by-necessary-condition";
    }
    throw std::logic_error("unreachable verdict");
}

Norm1Report norm1_report(const DiscretePOVM& povm, const std::vector<EventSet>& events, double tol,
                         const Tolerances& cfg) {
    Norm1Report rep;
    rep.records.reserve(events.size());
    for (const auto& ev : events) {
        Norm1EventRecord rec;
        rec.event = ev;
        const Effect f = effect_of(povm, ev, cfg);
        rec.norm = spectral_norm(f);
        rec.gap = 1.0 - rec.norm;
        rec.nonzero = rec.norm > tol;
        if (rec.nonzero) {
            auto [psi, value] = maximizing_state(f, cfg);
            rec.maximizer = psi.amplitudes();
            rec.maximizer_value = value;
            if (rec.gap > tol) {
                rep.failing_records.push_back(static_cast<int>(rep.records.size()));
                rep.worst_gap = std::max(rep.worst_gap, rec.gap);
            }
        }
        rep.records.push_back(std::move(rec));
    }
    rep.verdict = rep.failing_records.empty() ? Norm1Verdict::HasNorm1 : Norm1Verdict::Fails;
    return rep;
}

NecessaryConditionReport necessary_condition_verdict(const DiscretePOVM& povm, double tol,
                                                     const Tolerances& cfg) {
    (void)cfg;
    NecessaryConditionReport rep;
    const int n = povm.atom_count();
    std::vector<double> norms(static_cast<size_t>(n));
    std::vector<bool> in_support(static_cast<size_t>(n));
    rep.min_support_norm = 1.0;
    for (int i = 0; i < n; ++i) {
        norms[static_cast<size_t>(i)] = spectral_norm(povm.atom_effect(i));
        in_support[static_cast<size_t>(i)] = norms[static_cast<size_t>(i)] > tol;
        rep.max_atom_norm = std::max(rep.max_atom_norm, norms[static_cast<size_t>(i)]);
        if (in_support[static_cast<size_t>(i)])
            rep.min_support_norm = std::min(rep.min_support_norm, norms[static_cast<size_t>(i)]);
    }
    // A vanishing atom adjacent to the support sits in the support's closure;
    // every atom weight here is finite, so one witness already excludes the
    // norm-1 property. No witnesses only means the condition is silent.
    for (int i = 0; i < n; ++i) {
        if (in_support[static_cast<size_t>(i)]) continue;
        for (int nb : povm.space().neighbors(i)) {
            if (in_support[static_cast<size_t>(nb)]) {
                rep.witnesses.push_back(i);
                break;
            }
        }
    }
    rep.verdict = rep.witnesses.empty() ? NecessaryConditionVerdict::Inconclusive
                                        : NecessaryConditionVerdict::Excluded;
    return rep;
}

namespace {

void validate_nesting(const RefinementSequence& seq) {
    if (seq.events.empty()) throw std::invalid_argument("refinement: empty sequence");
    switch (seq.direction) {
        case RefinementDirection::IncreasingToEvent:
            for (size_t i = 0; i + 1 < seq.events.size(); ++i)
                if (!seq.events[i].subset_of(seq.events[i + 1]))
                    throw std::invalid_argument("refinement: sequence is not increasing");
            if (!seq.events.back().subset_of(seq.limit))
                throw std::invalid_argument("refinement: sequence escapes its limit event");
            break;
        case RefinementDirection::DecreasingToEmpty:
        case RefinementDirection::DecreasingToAtom:
            for (size_t i = 0; i + 1 < seq.events.size(); ++i)
                if (!seq.events[i + 1].subset_of(seq.events[i]))
                    throw std::invalid_argument("refinement: sequence is not decreasing");
            if (seq.direction == RefinementDirection::DecreasingToAtom && seq.events.back().empty())
                throw std::invalid_argument("refinement: atom sequence must stay nonempty");
            break;
    }
}

}  // namespace

ContinuityReport refinement_check(const DiscretePOVM& povm, const RefinementSequence& seq,
                                  const Tolerances& tol) {
    validate_nesting(seq);
    ContinuityReport rep;
    const auto ac = absolute_continuity_constant(povm, tol);
    rep.c = ac.c;
    rep.c_finite = ac.finite;
    rep.all_dominated = ac.finite;

    const bool increasing = seq.direction == RefinementDirection::IncreasingToEvent;
    const Matrix identity = Matrix::Identity(povm.dim(), povm.dim());
    Matrix limit_dense;
    if (increasing) limit_dense = effect_of(povm, seq.limit, tol).to_dense();

    for (const auto& ev : seq.events) {
        ContinuityRow row;
        const Effect f = effect_of(povm, ev, tol);
        if (increasing) {
            const EventSet rest = seq.limit.minus(ev);
            row.measure = povm.space().weight_sum(rest.indices());
            row.norm_dev = hermitian_operator_norm(limit_dense - f.to_dense());
            row.identity_gap = hermitian_operator_norm(identity - f.to_dense());
        } else {
            row.measure = povm.space().weight_sum(ev.indices());
            row.norm_dev = spectral_norm(f);
        }
        row.bound = rep.c * row.measure + 1e-10;
        row.dominated = rep.c_finite && row.norm_dev <= row.bound;
        rep.all_dominated = rep.all_dominated && row.dominated;
        rep.rows.push_back(row);
    }
    rep.final_norm_dev = rep.rows.back().norm_dev;
    rep.final_identity_gap = rep.rows.back().identity_gap;
    return rep;
}

ContinuityReport refinement_check_family(const std::vector<DiscretePOVM>& levels,
                                         const std::vector<EventSet>& events, const Tolerances& tol) {
    if (levels.size() != events.size() || levels.empty())
        throw std::invalid_argument("refinement family: one event per level required");

    // Geometric nesting: every cell of a level's event must lie inside some
    // cell of the previous level's event (grids share the frame, cells halve).
    for (size_t k = 0; k + 1 < levels.size(); ++k) {
        const OutcomeSpace& coarse = levels[k].space();
        const OutcomeSpace& fine = levels[k + 1].space();
        if (coarse.kind() != SpaceKind::PhaseGrid || fine.kind() != SpaceKind::PhaseGrid)
            throw std::invalid_argument("refinement family: levels must be phase grids");
        const double hc = coarse.cell_size();
        for (int idx : events[k + 1].indices()) {
            const auto& cell = fine.atom(idx);
            bool covered = false;
            for (int cdx : events[k].indices()) {
                const auto& parent = coarse.atom(cdx);
                const double slack = 1e-9 * hc;
                if (std::abs(cell.coord[0] - parent.coord[0]) <= 0.5 * (hc - fine.cell_size()) + slack &&
                    std::abs(cell.coord[1] - parent.coord[1]) <= 0.5 * (hc - fine.cell_size()) + slack) {
                    covered = true;
                    break;
                }
            }
            if (!covered)
                throw std::invalid_argument("refinement family: child cells escape the parent event");
        }
    }

    ContinuityReport rep;
    rep.c_finite = true;
    rep.c = 0.0;
    for (const auto& level : levels) {
        const auto ac = absolute_continuity_constant(level, tol);
        rep.c_finite = rep.c_finite && ac.finite;
        rep.c = std::max(rep.c, ac.c);
    }
    rep.all_dominated = rep.c_finite;
    for (size_t k = 0; k < levels.size(); ++k) {
        ContinuityRow row;
        row.measure = levels[k].space().weight_sum(events[k].indices());
        row.norm_dev = spectral_norm(effect_of(levels[k], events[k], tol));
        row.bound = rep.c * row.measure + 1e-10;
        row.dominated = rep.c_finite && row.norm_dev <= row.bound;
        rep.all_dominated = rep.all_dominated && row.dominated;
        rep.rows.push_back(row);
    }
    rep.final_norm_dev = rep.rows.back().norm_dev;
    return rep;
}

ScalingFit cell_shrink_scaling(const std::vector<DiscretePOVM>& levels) {
    if (levels.size() < 2)
        throw std::invalid_argument("cell_shrink_scaling: need at least two grid levels");
    ScalingFit fit;
    for (const auto& level : levels) {
        double worst = 0.0;
        for (int i = 0; i < level.atom_count(); ++i)
            worst = std::max(worst, spectral_norm(level.atom_effect(i)));
        if (!(worst > 0.0))
            throw std::invalid_argument("cell_shrink_scaling: a level has no nonzero cell");
        // Cells are uniform per level; take the shared cell measure.
        fit.points.push_back({std::log(level.space().atom(0).weight), std::log(worst)});
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(fit.points.size());
    for (const auto& p : fit.points) {
        sx += p[0];
        sy += p[1];
        sxx += p[0] * p[0];
        sxy += p[0] * p[1];
    }
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

JointBound joint_localization_bound(const DiscretePOVM& povm, const EventSet& dq, const EventSet& dp,
                                    const Tolerances& tol) {
    const OutcomeSpace& space = povm.space();
    if (!space.is_product())
        throw std::invalid_argument("joint_localization_bound: outcome space is not a product grid");
    if (dq.empty() || dp.empty())
        throw std::invalid_argument("joint_localization_bound: empty side event");
    const int cols = space.cols();
    std::vector<int> atoms;
    atoms.reserve(static_cast<size_t>(dq.size()) * static_cast<size_t>(dp.size()));
    for (int r : dq.indices()) {
        if (r >= space.rows()) throw std::invalid_argument("joint_localization_bound: row out of range");
        for (int c : dp.indices()) {
            if (c >= cols) throw std::invalid_argument("joint_localization_bound: column out of range");
            atoms.push_back(r * cols + c);
        }
    }
    const EventSet event(std::move(atoms));

    JointBound out;
    const Effect f = effect_of(povm, event, tol);
    out.norm = spectral_norm(f);
    out.mu = space.weight_sum(event.indices());
    const auto ac = absolute_continuity_constant(povm, tol);
    out.bound = std::min(1.0, ac.finite ? ac.c * out.mu : 1.0);
    auto [psi, value] = maximizing_state(f, tol);
    (void)value;
    out.maximizer = psi.amplitudes();
    return out;
}

std::vector<EventSet> analysis_events(const OutcomeSpace& space, uint64_t seed, int random_count,
                                      int max_exhaustive_atoms) {
    const int n = space.size();
    std::vector<EventSet> events;
    if (n <= max_exhaustive_atoms) {
        for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
            std::vector<int> idx;
            for (int i = 0; i < n; ++i)
                if (mask & (uint64_t{1} << i)) idx.push_back(i);
            events.emplace_back(std::move(idx));
        }
        return events;
    }
    events.push_back(EventSet{});
    events.push_back(EventSet::full(n));
    for (int i = 0; i < n; ++i) events.push_back(EventSet::single(i));
    Rng rng(seed);
    for (int k = 0; k < random_count; ++k) events.push_back(rng.event(n));
    return events;
}

}  // namespace povmkit
