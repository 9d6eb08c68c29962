#include "toposval/json_io.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace toposval {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) {
        throw Error(where + ": expected an object");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        throw Error(where + ": missing field '" + key + "'");
    }
    return *it;
}

std::size_t parse_index(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw Error(where + ": expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

void require_array(const json& j, const std::string& where) {
    if (!j.is_array()) {
        throw Error(where + ": expected an array");
    }
}

void require_dim(const Matrix& m, std::size_t dim, const std::string& where) {
    if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
        throw Error(where + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

Complex parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw Error(where + ": expected a number or [re, im]");
}

Matrix parse_matrix(const json& j, const std::string& where) {
    require_array(j, where);
    if (j.empty()) {
        throw Error(where + ": empty matrix");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::string rw = where + "[" + std::to_string(r) + "]";
        const json& row = j[static_cast<std::size_t>(r)];
        require_array(row, rw);
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(rw + ": ragged matrix row");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

Vector parse_vector(const json& j, const std::string& where) {
    require_array(j, where);
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
    }
    return v;
}

Context parse_context(const json& j, const std::string& where, double tol_group) {
    const json& idj = field(j, "id", where);
    if (!idj.is_string()) {
        throw Error(where + ".id: expected a string");
    }
    const std::string id = idj.get<std::string>();
    const std::size_t dim = parse_index(field(j, "dim", where), where + ".dim");
    if (dim == 0) {
        throw Error(where + ".dim: must be positive");
    }
    try {
        if (j.contains("atoms")) {
            const json& atoms = j["atoms"];
            require_array(atoms, where + ".atoms");
            std::vector<Projector> ps;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                const std::string w = where + ".atoms[" + std::to_string(i) + "]";
                Matrix m = parse_matrix(atoms[i], w);
                require_dim(m, dim, w);
                ps.emplace_back(std::move(m));
            }
            return Context(id, std::move(ps));
        }
        if (j.contains("basis")) {
            const json& basis = j["basis"];
            require_array(basis, where + ".basis");
            std::vector<Vector> vs;
            for (std::size_t i = 0; i < basis.size(); ++i) {
                const std::string w = where + ".basis[" + std::to_string(i) + "]";
                vs.push_back(parse_vector(basis[i], w));
                if (static_cast<std::size_t>(vs.back().size()) != dim) {
                    throw Error(w + ": expected " + std::to_string(dim) + " entries");
                }
            }
            const json& part = field(j, "partition", where);
            require_array(part, where + ".partition");
            std::set<std::size_t> seen;
            std::vector<Projector> ps;
            for (std::size_t b = 0; b < part.size(); ++b) {
                const std::string w = where + ".partition[" + std::to_string(b) + "]";
                require_array(part[b], w);
                std::vector<Vector> block;
                for (std::size_t k = 0; k < part[b].size(); ++k) {
                    const std::size_t idx = parse_index(part[b][k], w + "[" + std::to_string(k) + "]");
                    if (idx >= vs.size() || !seen.insert(idx).second) {
                        throw Error(w + ": index " + std::to_string(idx) + " out of range or repeated");
                    }
                    block.push_back(vs[idx]);
                }
                ps.push_back(projector_from_span(block));
            }
            if (seen.size() != vs.size()) {
                throw Error(where + ".partition: does not cover the basis");
            }
            return Context(id, std::move(ps));
        }
        if (j.contains("operators")) {
            const json& ops = j["operators"];
            require_array(ops, where + ".operators");
            std::vector<HermitianOperator> hs;
            for (std::size_t i = 0; i < ops.size(); ++i) {
                const std::string w = where + ".operators[" + std::to_string(i) + "]";
                Matrix m = parse_matrix(ops[i], w);
                require_dim(m, dim, w);
                hs.emplace_back(std::move(m));
            }
            return context_from_operators(id, hs, tol_group);
        }
    } catch (const Error& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) {
            throw;
        }
        throw Error(where + ": " + msg);
    }
    throw Error(where + ": expected one of 'atoms', 'basis'/'partition', 'operators'");
}

ContextsFile parse_contexts(const json& j, double tol_group) {
    ContextsFile out;
    const json* list = &j;
    std::string prefix = "contexts";
    if (j.is_object()) {
        out.dim = parse_index(field(j, "dim", "<root>"), "dim");
        list = &field(j, "contexts", "<root>");
    }
    require_array(*list, prefix);
    for (std::size_t i = 0; i < list->size(); ++i) {
        const std::string w = prefix + "[" + std::to_string(i) + "]";
        out.contexts.push_back(parse_context((*list)[i], w, tol_group));
        if (out.dim && out.contexts.back().dim() != *out.dim) {
            throw Error(w + ".dim: does not match the declared dimension " + std::to_string(*out.dim));
        }
    }
    return out;
}

ContextPoset build_poset(const ContextsFile& file, bool add_trivial, bool close_under_meets) {
    if (file.contexts.empty()) {
        if (!add_trivial || !file.dim) {
            throw Error("no contexts: an empty file needs a declared dimension and --add-trivial");
        }
        return ContextPoset::build({Context::trivial(*file.dim)}, false, false);
    }
    return ContextPoset::build(file.contexts, add_trivial, close_under_meets);
}

QuantumState parse_state(const json& j) {
    const json& type = field(j, "type", "state");
    const json& data = field(j, "data", "state");
    if (type == "pure") {
        const Vector v = parse_vector(data, "state.data");
        if (std::abs(v.norm() - 1.0) > tol::unit_norm) {
            throw Error("state.data: pure state is not normalized");
        }
        return StateVector(v);
    }
    if (type == "density") {
        return DensityMatrix(parse_matrix(data, "state.data"));
    }
    throw Error("state.type: expected \"pure\" or \"density\"");
}

std::vector<std::pair<std::string, HermitianOperator>> parse_operators(const json& j) {
    const std::size_t dim = parse_index(field(j, "dim", "<root>"), "dim");
    const json& ops = field(j, "operators", "<root>");
    require_array(ops, "operators");
    std::vector<std::pair<std::string, HermitianOperator>> out;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const std::string w = "operators[" + std::to_string(i) + "]";
        const json& idj = field(ops[i], "id", w);
        if (!idj.is_string()) {
            throw Error(w + ".id: expected a string");
        }
        Matrix m = parse_matrix(field(ops[i], "matrix", w), w + ".matrix");
        require_dim(m, dim, w + ".matrix");
        try {
            out.emplace_back(idj.get<std::string>(), HermitianOperator(std::move(m)));
        } catch (const Error& e) {
            throw Error(w + ".matrix: " + e.what());
        }
    }
    return out;
}

json complex_json(Complex z) {
    return json::array({z.real(), z.imag()});
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_json(m(r, c)));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace toposval
