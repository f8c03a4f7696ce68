#include "clt/io.hpp"

#include <algorithm>
#include <fstream>

namespace clt::io {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& what) {
    if (!j.is_object()) {
        throw ValidationError(what + ": expected a JSON object");
    }
    for (const auto& item : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end()) {
            throw ValidationError(what + ": unknown key \"" + item.key() + "\"");
        }
    }
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw ValidationError(what + ": expected an array of rows");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            throw ValidationError(what + ": row " + std::to_string(i) + " has " +
                                  std::to_string(j[i].size()) + " entries, expected " +
                                  std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number()) {
                throw ValidationError(what + ": entry [" + std::to_string(i) + "][" +
                                      std::to_string(c) + "] is not a number");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                j[i][c].get<double>();
        }
    }
    return m;
}

Vector vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) {
        throw ValidationError(what + ": expected a non-empty array");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ValidationError(what + ": entry " + std::to_string(i) + " is not a number");
        }
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

markov::FiniteMarkovChain chain_from_json(const json& j) {
    require_keys(j, {"P", "labels"}, "chain");
    if (!j.contains("P")) throw ValidationError("chain: missing key \"P\"");
    Matrix p = matrix_from_json(j["P"], "chain P");

    std::vector<std::string> labels;
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) throw ValidationError("chain: labels must be an array");
        for (const auto& l : j["labels"]) {
            if (!l.is_string()) throw ValidationError("chain: labels must be strings");
            labels.push_back(l.get<std::string>());
        }
    }
    return markov::FiniteMarkovChain(std::move(p), std::move(labels));
}

markov::RewardMap reward_from_json(const json& j) {
    require_keys(j, {"r", "A"}, "reward");
    if (j.contains("r") == j.contains("A")) {
        throw ValidationError("reward: provide exactly one of \"r\" or \"A\"");
    }
    if (j.contains("r")) {
        const Matrix flat = matrix_from_json(j["r"], "reward r");
        std::vector<Vector> per_state;
        per_state.reserve(static_cast<std::size_t>(flat.rows()));
        for (Eigen::Index i = 0; i < flat.rows(); ++i) {
            per_state.push_back(flat.row(i));
        }
        return markov::RewardMap::from_vectors(per_state);
    }
    const json& a = j["A"];
    if (!a.is_array() || a.empty()) {
        throw ValidationError("reward A: expected one matrix per state");
    }
    std::vector<Matrix> per_state;
    per_state.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        per_state.push_back(matrix_from_json(a[i], "reward A state " + std::to_string(i)));
    }
    return markov::RewardMap::from_matrices(per_state);
}

td::TDModel td_model_from_json(const json& j) {
    require_keys(j, {"chain", "A", "b", "delta"}, "td model");
    for (const char* key : {"chain", "A", "b", "delta"}) {
        if (!j.contains(key)) {
            throw ValidationError(std::string("td model: missing key \"") + key + "\"");
        }
    }
    auto chain = chain_from_json(j["chain"]);
    if (!j["A"].is_array() || !j["b"].is_array()) {
        throw ValidationError("td model: A and b must be arrays with one entry per state");
    }
    std::vector<Matrix> a_map;
    for (std::size_t i = 0; i < j["A"].size(); ++i) {
        a_map.push_back(matrix_from_json(j["A"][i], "td model A state " + std::to_string(i)));
    }
    std::vector<Vector> b_map;
    for (std::size_t i = 0; i < j["b"].size(); ++i) {
        b_map.push_back(vector_from_json(j["b"][i], "td model b state " + std::to_string(i)));
    }
    if (!j["delta"].is_number()) throw ValidationError("td model: delta must be a number");
    return td::TDModel(std::move(chain), std::move(a_map), std::move(b_map),
                       j["delta"].get<double>());
}

}  // namespace clt::io
