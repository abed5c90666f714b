#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "distflow/evolution.hpp"

namespace distflow::io {

/// Canonical serialization: 2-space indent, keys in insertion order,
/// shortest-round-trip doubles. Byte-identical for identical inputs.
std::string dump_json(const nlohmann::ordered_json& j);

/// {"d": ..., "N": ..., "order": "graded-lex", "p": ..., "coeffs": [...]}.
nlohmann::ordered_json coeffs_json(const HermiteCoeffs& c, double p);
HermiteCoeffs coeffs_from_json(const nlohmann::json& j);

void write_file(const std::filesystem::path& path, const std::string& content);

/// Rows t, x_1..x_d, alive for every kernel sample.
std::string kernel_csv(const std::vector<EmpiricalKernel>& kernels);

/// Rows t, z_1..z_d, alive for a driving trajectory.
std::string path_csv(const PathResult& path);

/// Generic numeric table with a header row.
std::string table_csv(const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& rows);

}  // namespace distflow::io
