#pragma once

#include <string>

#include <json.hpp>

#include "clt/linalg.hpp"
#include "clt/markov.hpp"
#include "clt/td.hpp"

namespace clt::io {

using json = nlohmann::json;

json load_json_file(const std::string& path);

/// Chain file: {"P": [[row-major probabilities]], "labels": ["s0", ...]}.
/// Labels are optional; unknown keys are rejected.
markov::FiniteMarkovChain chain_from_json(const json& j);

/// Reward file: {"r": [[d entries per state]]} for vector rewards or
/// {"A": [[[d x d rows] per state]]} for matrix rewards.
markov::RewardMap reward_from_json(const json& j);

/// TD model file: {"chain": {...}, "A": [[[d x d]] per state],
/// "b": [[d] per state], "delta": 0.75}.
td::TDModel td_model_from_json(const json& j);

Matrix matrix_from_json(const json& j, const std::string& what);
Vector vector_from_json(const json& j, const std::string& what);

json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);

/// Rejects keys outside `allowed`, naming the offender.
void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& what);

}  // namespace clt::io
