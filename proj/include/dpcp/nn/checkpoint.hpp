#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dpcp/nn/network.hpp"
#include "dpcp/nn/params.hpp"

namespace dpcp::nn {

inline nlohmann::ordered_json weights_to_json(const Weights& w) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int i = 0; i < w.tensor_count(); ++i) {
    const Tensor& t = w.tensor(i);
    nlohmann::ordered_json e;
    e["rows"] = t.value.rows;
    e["cols"] = t.value.cols;
    e["data"] = t.value.a;
    j[t.name] = std::move(e);
  }
  return j;
}

inline void weights_from_json(Weights& w, const nlohmann::ordered_json& j) {
  for (int i = 0; i < w.tensor_count(); ++i) {
    Tensor& t = w.tensor(i);
    const auto& e = j.at(t.name);
    if (e.at("rows").get<int>() != t.value.rows ||
        e.at("cols").get<int>() != t.value.cols)
      throw std::invalid_argument("weights_from_json: shape mismatch for " +
                                  t.name);
    t.value.a = e.at("data").get<std::vector<double>>();
  }
}

// Everything needed to resume a run: network config and weights, optimizer
// moments, and trainer bookkeeping. Serialized with a fixed key order so the
// same run always produces byte-identical files.
struct Checkpoint {
  std::string kind;     // "dqn" | "ppo"
  std::string problem;  // "tsptw" | "port"
  NetworkConfig config;
  std::uint64_t seed = 0;
  std::int64_t episodes = 0;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  nlohmann::ordered_json weights = nlohmann::ordered_json::object();
  nlohmann::ordered_json adam;  // null when no optimizer state saved

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format"] = 1;
    j["kind"] = kind;
    j["problem"] = problem;
    j["config"] = config.to_json();
    j["seed"] = seed;
    j["episodes"] = episodes;
    j["metadata"] = metadata;
    j["weights"] = weights;
    j["adam"] = adam;
    return j;
  }

  static Checkpoint from_json(const nlohmann::ordered_json& j) {
    if (j.at("format").get<int>() != 1)
      throw std::invalid_argument("unsupported checkpoint format");
    Checkpoint c;
    c.kind = j.at("kind").get<std::string>();
    c.problem = j.at("problem").get<std::string>();
    c.config = NetworkConfig::from_json(j.at("config"));
    c.seed = j.at("seed").get<std::uint64_t>();
    c.episodes = j.at("episodes").get<std::int64_t>();
    c.metadata = j.at("metadata");
    c.weights = j.at("weights");
    c.adam = j.at("adam");
    return c;
  }
};

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << c.to_json().dump(2) << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return Checkpoint::from_json(nlohmann::ordered_json::parse(ss.str()));
}

}  // namespace dpcp::nn
