#pragma once

#include <string>

#include <json.hpp>

#include "tjk/kripke.hpp"

namespace tjk {

using json = nlohmann::json;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path);

// Edges are transitively closed on load; the closed model is validated.
KripkeModel model_from_json(const json& j);
json model_to_json(const KripkeModel& m);

}  // namespace tjk
