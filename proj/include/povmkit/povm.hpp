#pragma once

#include <optional>
#include <string>
#include <vector>

#include "povmkit/operators.hpp"
#include "povmkit/outcome_space.hpp"
#include "povmkit/tolerances.hpp"

namespace povmkit {

// Thrown when a construction's normalization defect exceeds its admissibility
// threshold. Carries the measured defect and, for truncated constructions, a
// suggestion for parameters that would bring it under the threshold.
class ConstructionError : public std::runtime_error {
public:
    ConstructionError(std::string msg, double defect, double threshold, std::string suggestion = {})
        : std::runtime_error(std::move(msg)), defect_(defect), threshold_(threshold),
          suggestion_(std::move(suggestion)) {}
    double defect() const { return defect_; }
    double threshold() const { return threshold_; }
    const std::string& suggestion() const { return suggestion_; }

private:
    double defect_;
    double threshold_;
    std::string suggestion_;
};

// Finite-outcome POVM: one effect per atom. The normalization defect
// || sum of atoms - 1 || is computed once at assembly (balanced tree order)
// and recorded together with the admissibility threshold in force.
class DiscretePOVM {
public:
    // Records the defect and the threshold it will be judged against without
    // enforcing it, so invalid inputs can still be inspected and reported.
    static DiscretePOVM assemble(OutcomeSpace space, int dim, std::vector<Effect> atom_effects,
                                 const Tolerances& tol = {},
                                 std::optional<double> recorded_threshold = std::nullopt);
    // assemble + reject if the defect exceeds the threshold.
    static DiscretePOVM admit(OutcomeSpace space, int dim, std::vector<Effect> atom_effects,
                              double defect_threshold, const Tolerances& tol = {},
                              const std::string& suggestion = {});

    const OutcomeSpace& space() const { return space_; }
    int dim() const { return dim_; }
    int atom_count() const { return static_cast<int>(effects_.size()); }
    const Effect& atom_effect(int i) const;
    double normalization_defect() const { return defect_; }
    double defect_threshold() const { return threshold_; }
    const Matrix& total_matrix() const { return total_; }

private:
    DiscretePOVM() = default;

    OutcomeSpace space_;
    int dim_ = 0;
    std::vector<Effect> effects_;
    double defect_ = 0.0;
    double threshold_ = 0.0;
    Matrix total_;
};

// Sum of the event's atom effects (balanced ascending-index tree).
Effect effect_of(const DiscretePOVM& povm, const EventSet& event, const Tolerances& tol = {});

struct ValidationAtomRow {
    int index = 0;
    double min_eig = 0.0;
    double norm = 0.0;
    bool positive = false;
    bool bounded = false;
};

struct ValidationReport {
    std::vector<ValidationAtomRow> atoms;
    double normalization_defect = 0.0;
    double defect_threshold = 0.0;
    bool atoms_ok = false;
    bool defect_ok = false;
    bool passed = false;
};

ValidationReport validate_povm(const DiscretePOVM& povm, const Tolerances& tol = {});

struct CommutativityResult {
    bool commutative = true;
    int atom_a = -1;
    int atom_b = -1;
    double worst_norm = 0.0;
};

// Pairwise atom commutativity; equivalent to commutativity of all finite
// unions by bilinearity. Returns the worst pair as witness.
CommutativityResult is_commutative(const DiscretePOVM& povm, double tol);

struct ProjectivityResult {
    bool projective = true;
    int atom_a = -1;
    int atom_b = -1;         // atom_a == atom_b flags an idempotence violation
    double worst_violation = 0.0;
};

// F(x)F(y) = 0 for x != y and F(x)^2 = F(x), within tol.
ProjectivityResult is_projective(const DiscretePOVM& povm, double tol);

// Atoms whose effect norm exceeds tol.
EventSet spectrum_support(const DiscretePOVM& povm, double tol);

struct OutcomeProbability {
    double value = 0.0;  // clamped into [0, 1]
    double raw = 0.0;
    bool in_range = true;
};

OutcomeProbability outcome_probability(const DiscretePOVM& povm, const StateVector& psi,
                                       const EventSet& event, const Tolerances& tol = {});

// Sharp position observable {|j><j|} on a line space with counting weight 1.
DiscretePOVM make_sharp_position_pvm(int d, const Tolerances& tol = {});

}  // namespace povmkit
