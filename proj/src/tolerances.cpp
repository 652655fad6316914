#include "povmkit/tolerances.hpp"

#include <stdexcept>

namespace povmkit {

void Tolerances::set(const std::string& key, double value) {
    if (value < 0.0) throw std::invalid_argument("tolerance '" + key + "' must be nonnegative");
    if (key == "hermiticity") hermiticity = value;
    else if (key == "positivity") positivity = value;
    else if (key == "equality") equality = value;
    else if (key == "zero") zero = value;
    else if (key == "normalization-exact") norm_exact = value;
    else if (key == "normalization-coherent") norm_coherent = value;
    else if (key == "commutativity") commutativity = value;
    else if (key == "covariance") covariance = value;
    else if (key == "kernel-row") kernel_row = value;
    else throw std::invalid_argument("unknown tolerance key '" + key + "'");
}

Tolerances Tolerances::from_overrides(const std::map<std::string, double>& kv) {
    Tolerances t;
    for (const auto& [k, v] : kv) t.set(k, v);
    return t;
}

}  // namespace povmkit
