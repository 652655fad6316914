#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "povmkit/types.hpp"

namespace povmkit {

enum class SpaceKind { WhLattice, PhaseGrid, Line, Abstract };
enum class MeasureKind { CountingNormalized, LebesgueCell };

std::string space_kind_name(SpaceKind k);
SpaceKind space_kind_from_name(const std::string& s);
std::string measure_kind_name(MeasureKind k);
MeasureKind measure_kind_from_name(const std::string& s);

struct MeasureSpec {
    MeasureKind kind = MeasureKind::CountingNormalized;
    double total = 0.0;            // finite sum of atom weights
    bool infinite_ambient = false; // grid models a slice of an infinite measure
};

struct SpaceAtom {
    int index = 0;
    std::array<double, 2> coord{0.0, 0.0};
    int coord_arity = 1;
    double weight = 0.0;
};

// Finite outcome space: the atoms generate the event algebra, every event is
// a finite union of atoms. Product kinds (WhLattice, PhaseGrid) index atoms
// row-major as row * cols + col, with rows the q side and cols the p side.
class OutcomeSpace {
public:
    // Z_d x Z_d lattice with per-atom weight 1/d (counting-normalized, total d).
    static OutcomeSpace lattice(int d);

    // Square grid of cells_per_side^2 cells covering [-half_width, half_width]^2,
    // cell weight cell_size^2 / pi (Lebesgue-analog; infinite ambient measure).
    static OutcomeSpace phase_grid(int cells_per_side, double half_width, double cell_size);

    // 1-D space with explicit coordinates and weights.
    static OutcomeSpace line(std::vector<double> coords, std::vector<double> weights, MeasureSpec measure);

    static OutcomeSpace abstract_space(std::vector<double> weights, MeasureSpec measure);

    SpaceKind kind() const { return kind_; }
    const MeasureSpec& measure() const { return measure_; }
    int size() const { return static_cast<int>(atoms_.size()); }
    const SpaceAtom& atom(int i) const;
    const std::vector<SpaceAtom>& atoms() const { return atoms_; }

    bool is_product() const { return kind_ == SpaceKind::WhLattice || kind_ == SpaceKind::PhaseGrid; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double half_width() const { return half_width_; }
    double cell_size() const { return cell_size_; }

    // Cell adjacency: torus neighborhood for lattices, 4-neighborhood for
    // grids, left/right for lines, empty for abstract spaces.
    std::vector<int> neighbors(int atom_index) const;

    double weight_sum(const std::vector<int>& atom_indices) const;

private:
    SpaceKind kind_ = SpaceKind::Abstract;
    MeasureSpec measure_;
    std::vector<SpaceAtom> atoms_;
    int rows_ = 0;
    int cols_ = 0;
    double half_width_ = 0.0;
    double cell_size_ = 0.0;
};

// Sorted, duplicate-free set of atom indices.
class EventSet {
public:
    EventSet() = default;
    explicit EventSet(std::vector<int> indices);

    static EventSet full(int atom_count);
    static EventSet single(int index) { return EventSet({index}); }

    const std::vector<int>& indices() const { return idx_; }
    int size() const { return static_cast<int>(idx_.size()); }
    bool empty() const { return idx_.empty(); }
    bool contains(int i) const;

    EventSet unite(const EventSet& other) const;
    EventSet intersect(const EventSet& other) const;
    EventSet minus(const EventSet& other) const;
    EventSet complement(int atom_count) const;
    bool subset_of(const EventSet& other) const;
    bool disjoint_from(const EventSet& other) const;

    bool operator==(const EventSet& other) const { return idx_ == other.idx_; }

private:
    std::vector<int> idx_;
};

// Pairwise tree reduction over ascending indices; the summation order used
// everywhere effects or probabilities are accumulated, so that recorded
// defects are reproducible bit for bit.
double tree_sum(const std::vector<double>& xs);

}  // namespace povmkit
