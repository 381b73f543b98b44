#ifndef SLIM_CHECKPOINT_HPP
#define SLIM_CHECKPOINT_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slim/error.hpp"
#include "slim/model.hpp"

namespace slim {

inline constexpr int kCheckpointVersion = 1;

/// Fitted parameters plus the settings that produced them.
struct Checkpoint {
  Params params;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> labels;  // node identifiers, empty when unknown
};

inline nlohmann::json to_json(const Checkpoint& c) {
  const Params& p = c.params;
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& t : p.tensors()) {
    tensors[std::string(t.name)] = {{"rows", t.rows}, {"cols", t.cols},
                                    {"data", std::vector<double>(t.data.begin(), t.data.end())}};
  }
  return {{"format", "slim-checkpoint"},
          {"version", kCheckpointVersion},
          {"variant",
           {{"model", to_string(p.variant.model)},
            {"direction", to_string(p.variant.direction)},
            {"expressive_negative_sign", p.variant.expressive_negative_sign}}},
          {"k", p.k()},
          {"n", p.n()},
          {"seed", c.seed},
          {"config", c.config},
          {"labels", c.labels},
          {"tensors", tensors}};
}

namespace detail {

template <class T>
T checkpoint_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string("checkpoint: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string("checkpoint: field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

/// Parses and validates a checkpoint document; every schema violation is a
/// DataError naming the offending field.
inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  using detail::checkpoint_field;
  if (checkpoint_field<std::string>(j, "format") != "slim-checkpoint") throw DataError("checkpoint: unknown format");
  const int version = checkpoint_field<int>(j, "version");
  if (version != kCheckpointVersion) throw DataError("checkpoint: unsupported version " + std::to_string(version));
  const auto vj = checkpoint_field<nlohmann::json>(j, "variant");
  Variant v;
  try {
    v.model = parse_model_kind(checkpoint_field<std::string>(vj, "model"));
    v.direction = parse_direction(checkpoint_field<std::string>(vj, "direction"));
  } catch (const UsageError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  if (vj.contains("expressive_negative_sign")) {
    v.expressive_negative_sign = checkpoint_field<double>(vj, "expressive_negative_sign");
  }
  const auto k = checkpoint_field<Eigen::Index>(j, "k");
  const auto n = checkpoint_field<Eigen::Index>(j, "n");
  if (k < 1 || n < 0) throw DataError("checkpoint: invalid dimensions");

  Checkpoint c;
  c.seed = checkpoint_field<std::uint64_t>(j, "seed");
  if (j.contains("config")) c.config = j.at("config");
  if (j.contains("labels")) c.labels = checkpoint_field<std::vector<std::string>>(j, "labels");
  if (!c.labels.empty() && static_cast<Eigen::Index>(c.labels.size()) != n) {
    throw DataError("checkpoint: label count does not match n");
  }
  c.params = Params::zeros(v, k, n);
  if (!j.contains("tensors")) throw DataError("checkpoint: missing field 'tensors'");
  const auto& tj = j.at("tensors");
  if (!tj.is_object()) throw DataError("checkpoint: 'tensors' must be an object");
  std::size_t seen = 0;
  for (auto& t : c.params.tensors()) {
    const std::string name(t.name);
    if (!tj.contains(name)) throw DataError("checkpoint: missing tensor '" + name + "'");
    const auto& entry = tj.at(name);
    if (checkpoint_field<Eigen::Index>(entry, "rows") != t.rows ||
        checkpoint_field<Eigen::Index>(entry, "cols") != t.cols) {
      throw DataError("checkpoint: tensor '" + name + "' has the wrong shape");
    }
    const auto data = checkpoint_field<std::vector<double>>(entry, "data");
    if (data.size() != t.data.size()) throw DataError("checkpoint: tensor '" + name + "' has the wrong length");
    std::copy(data.begin(), data.end(), t.data.begin());
    ++seen;
  }
  if (seen != tj.size()) throw DataError("checkpoint: unexpected tensors for variant " + to_string(v));
  c.params.validate();
  return c;
}

inline void save_checkpoint(std::ostream& out, const Checkpoint& c) { out << to_json(c).dump() << '\n'; }

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path);
  save_checkpoint(out, c);
}

inline Checkpoint load_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  return checkpoint_from_json(j);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace slim

#endif  // SLIM_CHECKPOINT_HPP
