#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "toposval/contexts.hpp"
#include "toposval/linalg.hpp"
#include "toposval/ocat.hpp"

namespace toposval {

using nlohmann::json;

std::string read_file(const std::string& path);

/// Parses a JSON document; syntax errors report the line and column.
json parse_json(const std::string& text, const std::string& source);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

/// A number, or [re, im].
Complex parse_complex(const json& j, const std::string& where);
/// Rows of entries.
Matrix parse_matrix(const json& j, const std::string& where);
Vector parse_vector(const json& j, const std::string& where);

/// {"id", "dim", "atoms": [matrix...]}, {"id", "dim", "basis": [vector...],
/// "partition": [[index...]...]}, or {"id", "dim", "operators": [matrix...]}.
Context parse_context(const json& j, const std::string& where, double tol_group = tol::group);

struct ContextsFile {
    std::optional<std::size_t> dim;
    std::vector<Context> contexts;
};

/// Either an array of contexts or {"dim": n, "contexts": [...]}.
ContextsFile parse_contexts(const json& j, double tol_group = tol::group);

ContextPoset build_poset(const ContextsFile& file, bool add_trivial, bool close_under_meets);

/// {"type": "pure", "data": vector} or {"type": "density", "data": matrix}.
QuantumState parse_state(const json& j);

/// {"dim": n, "operators": [{"id", "matrix"}...]}.
std::vector<std::pair<std::string, HermitianOperator>> parse_operators(const json& j);

json complex_json(Complex z);
json matrix_json(const Matrix& m);

}  // namespace toposval
