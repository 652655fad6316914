#include "povmkit/outcome_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace povmkit {

std::string space_kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::WhLattice: return "wh-lattice";
        case SpaceKind::PhaseGrid: return "phase-grid";
        case SpaceKind::Line: return "line";
        case SpaceKind::Abstract: return "abstract";
    }
    throw std::logic_error("unreachable space kind");
}

SpaceKind space_kind_from_name(const std::string& s) {
    if (s == "wh-lattice") return SpaceKind::WhLattice;
    if (s == "phase-grid") return SpaceKind::PhaseGrid;
    if (s == "line") return SpaceKind::Line;
    if (s == "abstract") return SpaceKind::Abstract;
    throw std::invalid_argument("unknown space kind '" + s + "'");
}

std::string measure_kind_name(MeasureKind k) {
    return k == MeasureKind::CountingNormalized ? "counting-normalized" : "lebesgue-cell";
}

MeasureKind measure_kind_from_name(const std::string& s) {
    if (s == "counting-normalized") return MeasureKind::CountingNormalized;
    if (s == "lebesgue-cell") return MeasureKind::LebesgueCell;
    throw std::invalid_argument("unknown measure kind '" + s + "'");
}

OutcomeSpace OutcomeSpace::lattice(int d) {
    if (d < 2) throw std::invalid_argument("OutcomeSpace::lattice: d must be >= 2");
    OutcomeSpace s;
    s.kind_ = SpaceKind::WhLattice;
    s.rows_ = d;
    s.cols_ = d;
    s.measure_ = {MeasureKind::CountingNormalized, static_cast<double>(d), false};
    const double w = 1.0 / d;
    s.atoms_.reserve(static_cast<size_t>(d) * d);
    for (int q = 0; q < d; ++q)
        for (int p = 0; p < d; ++p)
            s.atoms_.push_back({q * d + p, {static_cast<double>(q), static_cast<double>(p)}, 2, w});
    return s;
}

OutcomeSpace OutcomeSpace::phase_grid(int cells_per_side, double half_width, double cell_size) {
    if (cells_per_side < 1) throw std::invalid_argument("phase_grid: need at least one cell");
    if (!(half_width > 0.0) || !(cell_size > 0.0))
        throw std::invalid_argument("phase_grid: half_width and cell_size must be positive");
    OutcomeSpace s;
    s.kind_ = SpaceKind::PhaseGrid;
    s.rows_ = cells_per_side;
    s.cols_ = cells_per_side;
    s.half_width_ = half_width;
    s.cell_size_ = cell_size;
    const double w = cell_size * cell_size / std::numbers::pi;
    const int n = cells_per_side;
    s.measure_ = {MeasureKind::LebesgueCell, w * n * n, true};
    s.atoms_.reserve(static_cast<size_t>(n) * n);
    for (int ix = 0; ix < n; ++ix) {
        const double x = -half_width + (ix + 0.5) * cell_size;
        for (int iy = 0; iy < n; ++iy) {
            const double y = -half_width + (iy + 0.5) * cell_size;
            s.atoms_.push_back({ix * n + iy, {x, y}, 2, w});
        }
    }
    return s;
}

namespace {

// A counting-normalized measure must weight every atom equally.
void check_measure_consistency(const MeasureSpec& measure, const std::vector<double>& weights) {
    if (measure.kind != MeasureKind::CountingNormalized) return;
    const double w0 = weights.front();
    for (double w : weights)
        if (std::abs(w - w0) > 1e-12 * std::max(1.0, std::abs(w0)))
            throw std::invalid_argument("counting-normalized measure requires equal atom weights");
}

}  // namespace

OutcomeSpace OutcomeSpace::line(std::vector<double> coords, std::vector<double> weights, MeasureSpec measure) {
    if (coords.size() != weights.size() || coords.empty())
        throw std::invalid_argument("line: coords and weights must match and be nonempty");
    check_measure_consistency(measure, weights);
    OutcomeSpace s;
    s.kind_ = SpaceKind::Line;
    s.rows_ = static_cast<int>(coords.size());
    s.cols_ = 1;
    s.measure_ = measure;
    for (size_t i = 0; i < coords.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("line: negative atom weight");
        s.atoms_.push_back({static_cast<int>(i), {coords[i], 0.0}, 1, weights[i]});
    }
    return s;
}

OutcomeSpace OutcomeSpace::abstract_space(std::vector<double> weights, MeasureSpec measure) {
    if (weights.empty()) throw std::invalid_argument("abstract_space: no atoms");
    check_measure_consistency(measure, weights);
    OutcomeSpace s;
    s.kind_ = SpaceKind::Abstract;
    s.rows_ = static_cast<int>(weights.size());
    s.cols_ = 1;
    s.measure_ = measure;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("abstract_space: negative atom weight");
        s.atoms_.push_back({static_cast<int>(i), {static_cast<double>(i), 0.0}, 1, weights[i]});
    }
    return s;
}

const SpaceAtom& OutcomeSpace::atom(int i) const {
    if (i < 0 || i >= size()) throw std::invalid_argument("OutcomeSpace::atom: index out of range");
    return atoms_[static_cast<size_t>(i)];
}

std::vector<int> OutcomeSpace::neighbors(int atom_index) const {
    if (atom_index < 0 || atom_index >= size())
        throw std::invalid_argument("OutcomeSpace::neighbors: index out of range");
    std::vector<int> out;
    switch (kind_) {
        case SpaceKind::WhLattice: {
            const int d = rows_;
            const int q = atom_index / d, p = atom_index % d;
            out = {((q + 1) % d) * d + p, ((q + d - 1) % d) * d + p,
                   q * d + (p + 1) % d, q * d + (p + d - 1) % d};
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            break;
        }
        case SpaceKind::PhaseGrid: {
            const int n = rows_;
            const int ix = atom_index / n, iy = atom_index % n;
            if (ix > 0) out.push_back((ix - 1) * n + iy);
            if (ix + 1 < n) out.push_back((ix + 1) * n + iy);
            if (iy > 0) out.push_back(ix * n + iy - 1);
            if (iy + 1 < n) out.push_back(ix * n + iy + 1);
            std::sort(out.begin(), out.end());
            break;
        }
        case SpaceKind::Line: {
            if (atom_index > 0) out.push_back(atom_index - 1);
            if (atom_index + 1 < size()) out.push_back(atom_index + 1);
            break;
        }
        case SpaceKind::Abstract:
            break;
    }
    return out;
}

double OutcomeSpace::weight_sum(const std::vector<int>& atom_indices) const {
    std::vector<double> ws;
    ws.reserve(atom_indices.size());
    for (int i : atom_indices) ws.push_back(atom(i).weight);
    return tree_sum(ws);
}

EventSet::EventSet(std::vector<int> indices) : idx_(std::move(indices)) {
    std::sort(idx_.begin(), idx_.end());
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
        throw std::invalid_argument("EventSet: duplicate atom index");
    if (!idx_.empty() && idx_.front() < 0)
        throw std::invalid_argument("EventSet: negative atom index");
}

EventSet EventSet::full(int atom_count) {
    std::vector<int> v(static_cast<size_t>(atom_count));
    for (int i = 0; i < atom_count; ++i) v[static_cast<size_t>(i)] = i;
    return EventSet(std::move(v));
}

bool EventSet::contains(int i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
}

EventSet EventSet::unite(const EventSet& other) const {
    std::vector<int> v;
    std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(), std::back_inserter(v));
    EventSet e;
    e.idx_ = std::move(v);
    return e;
}

EventSet EventSet::intersect(const EventSet& other) const {
    std::vector<int> v;
    std::set_intersection(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(), std::back_inserter(v));
    EventSet e;
    e.idx_ = std::move(v);
    return e;
}

EventSet EventSet::minus(const EventSet& other) const {
    std::vector<int> v;
    std::set_difference(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(), std::back_inserter(v));
    EventSet e;
    e.idx_ = std::move(v);
    return e;
}

EventSet EventSet::complement(int atom_count) const {
    return full(atom_count).minus(*this);
}

bool EventSet::subset_of(const EventSet& other) const {
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

bool EventSet::disjoint_from(const EventSet& other) const {
    return intersect(other).empty();
}

namespace {

double tree_sum_range(const std::vector<double>& xs, size_t lo, size_t hi) {
    if (hi - lo == 1) return xs[lo];
    const size_t mid = lo + (hi - lo) / 2;
    return tree_sum_range(xs, lo, mid) + tree_sum_range(xs, mid, hi);
}

}  // namespace

double tree_sum(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return tree_sum_range(xs, 0, xs.size());
}

}  // namespace povmkit
