#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "povmkit/marginals.hpp"
#include "povmkit/povm.hpp"

namespace povmkit {

using Json = nlohmann::json;

// POVM object schema (schema 1):
//   { "schema", "dim", "space": {"kind", "shape", "weights", "measure", ["grid"]},
//     "atoms": [{"index", "coord", "effect": [[re,im],...] row-major dense
//               or {"rank1": {"weight", "vector": [[re,im],...]}}}],
//     "normalization_defect" }
// Doubles are emitted in shortest round-trip form; load(dump(p)) reproduces
// every stored double bit for bit.
Json povm_to_json(const DiscretePOVM& povm);
DiscretePOVM povm_from_json(const Json& j, const Tolerances& tol = {});

// Kernel CSV: header row of atom indices, one row per spectral point,
// 17 significant digits, '.' decimal separator, ',' delimiter, LF endings.
std::string kernel_to_csv(const MarkovKernel& kernel);
MarkovKernel kernel_from_csv(const std::string& csv, double row_tol = 1e-10);

std::string format_double_17(double x);

// True if every number in the document is finite.
bool json_all_finite(const Json& j);

// FNV-1a 64-bit over a canonical (sorted-key) dump; stable fingerprint used
// to tie reports to the configs that produced them.
std::string fnv1a_hex(const std::string& bytes);
std::string config_hash(Json config);  // drops "seed" before hashing

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace povmkit
