#pragma once

#include <map>
#include <string>

namespace povmkit {

// All tolerances are absolute. Every field can be overridden via config files
// or the CLI's repeatable --tol KEY=VAL flag; keys are the kebab-case names
// listed next to each field.
struct Tolerances {
    double hermiticity = 1e-10;     // "hermiticity": max entry of |E - E^+|
    double positivity = 1e-10;      // "positivity": min eigenvalue >= -positivity, max <= 1+positivity
    double equality = 1e-10;        // "equality": generic numeric equality
    double zero = 1e-12;            // "zero": threshold for "F(event) != 0"
    double norm_exact = 1e-8;       // "normalization-exact": admissibility of exact constructions
    double norm_coherent = 1e-3;    // "normalization-coherent": admissibility of truncated constructions
    double commutativity = 1e-12;   // "commutativity"
    double covariance = 1e-10;      // "covariance"
    double kernel_row = 1e-10;      // "kernel-row": Markov kernel row-sum deviation

    void set(const std::string& key, double value);
    static Tolerances from_overrides(const std::map<std::string, double>& kv);
};

}  // namespace povmkit
