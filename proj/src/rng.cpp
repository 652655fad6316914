#include "povmkit/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace povmkit {

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

int Rng::uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("Rng::uniform_int: empty range");
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(eng_() % span);
}

Vector Rng::unit_vector(int dim) {
    if (dim < 1) throw std::invalid_argument("Rng::unit_vector: dim must be >= 1");
    Vector v(dim);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < dim; ++i) {
            v[i] = Complex(normal(), normal());
        }
        norm2 = v.squaredNorm();
    } while (!(norm2 > 1e-280));
    return v / std::sqrt(norm2);
}

Vector Rng::full_support_unit_vector(int dim, double floor) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vector v = unit_vector(dim);
        bool ok = true;
        for (int i = 0; i < dim; ++i)
            if (std::abs(v[i]) < floor) ok = false;
        if (ok) return v;
    }
    throw std::runtime_error("Rng::full_support_unit_vector: floor too demanding");
}

EventSet Rng::event(int atom_count) {
    if (atom_count < 1) throw std::invalid_argument("Rng::event: empty space");
    if (atom_count == 1) return EventSet::single(0);
    const int size = uniform_int(1, atom_count - 1);
    // Partial Fisher-Yates over the index range.
    std::vector<int> pool(static_cast<size_t>(atom_count));
    for (int i = 0; i < atom_count; ++i) pool[static_cast<size_t>(i)] = i;
    std::vector<int> picked;
    picked.reserve(static_cast<size_t>(size));
    for (int k = 0; k < size; ++k) {
        const int j = uniform_int(k, atom_count - 1);
        std::swap(pool[static_cast<size_t>(k)], pool[static_cast<size_t>(j)]);
        picked.push_back(pool[static_cast<size_t>(k)]);
    }
    return EventSet(std::move(picked));
}

}  // namespace povmkit
