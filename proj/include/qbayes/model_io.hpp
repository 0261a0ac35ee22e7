#pragma once

// JSON model files. Matrices are row-major lists of rows; complex entries are
// [re, im] pairs.

#include <filesystem>
#include <string>
#include <string_view>

#include "qbayes/model.hpp"

namespace qbayes {

/// Parses a model document. Syntax errors carry a line:column location.
StatisticalModel parse_model(std::string_view text);
StatisticalModel load_model(const std::filesystem::path& path);

/// Serializes with round-trip precision, so parse_model(dump_model(m)) is bit-identical.
std::string dump_model(const StatisticalModel& model, int indent = 1);
void save_model(const StatisticalModel& model, const std::filesystem::path& path);

/// Hex SHA-256 of arbitrary bytes (used to fingerprint model files in reports).
std::string sha256_hex(std::string_view bytes);

}  // namespace qbayes
