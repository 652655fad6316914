#pragma once

#include <cstdint>
#include <random>

#include "povmkit/outcome_space.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

// Deterministic random helpers. The transforms on top of mt19937_64 are
// spelled out here rather than taken from std distributions so that a seed
// pins the byte-identical sequence the reports promise.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform();              // [0, 1), 53 bits
    double normal();               // Box-Muller
    int uniform_int(int lo, int hi);  // inclusive bounds

    Vector unit_vector(int dim);   // Haar-distributed

    // Haar-distributed with every component above the floor in magnitude
    // (redraws; the floor is far below typical component sizes).
    Vector full_support_unit_vector(int dim, double floor = 1e-8);

    // Nonempty proper subset: size uniform in [1, atom_count-1] when
    // atom_count > 1, atoms drawn without replacement.
    EventSet event(int atom_count);

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace povmkit
