#pragma once

// JSON file formats.
//
// Instance:   {"agents": 3 | ["Alice", ...], "items": 3 | ["Renault", ...],
//              "bids": [[1, "8", "3/2"], ...], "utilities": [[...], ...]}
//             Entries are integers, decimal strings or "p/q" strings.
// Allocation: [2, 1, null, 0]   (agent index per item, null = unallocated)
// Experiment: {"agents": 5, "item_counts": [10, 20], "max_util": "m" | 30,
//              "instances": 20, "samples": 2000, "seed": 1,
//              "mechanisms": ["gini", "subjgini", "envy"], "envy_norm": "half",
//              "egalitarian_budget_ms": 60000, "order": "random" | "given",
//              "threads": 0}

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairdiv/experiment.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/online.hpp"

namespace fairdiv {

using json = nlohmann::json;

namespace detail {

inline std::string entry_text(const json& v) {
  if (v.is_number_integer()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    // Shortest representation that round-trips, read back as an exact decimal.
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    std::string text(buf, end);
    if (text.find_first_of("eE") != std::string::npos) {
      throw Error(ErrorCode::MalformedRational, "write '" + text + "' as a decimal or p/q string");
    }
    return text;
  }
  throw Error(ErrorCode::MalformedRational, "matrix entry " + v.dump() + " is not a number");
}

inline std::vector<std::vector<std::string>> matrix_text(const json& m, const char* what) {
  if (!m.is_array()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be a list of rows");
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : m) {
    if (!row.is_array()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " rows must be lists");
    auto& out = rows.emplace_back();
    for (const auto& v : row) out.push_back(entry_text(v));
  }
  return rows;
}

inline void read_count_or_names(const json& v, const char* what, std::size_t& count,
                                std::vector<std::string>& names) {
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
    count = v.get<std::size_t>();
  } else if (v.is_array()) {
    for (const auto& name : v) {
      if (!name.is_string()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " names must be strings");
      names.push_back(name.get<std::string>());
    }
    count = names.size();
  } else {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be a count or a list of names");
  }
}

inline json matrix_json(const Matrix<Rational>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (const auto& v : m.row(i)) {
      if (v.is_integer() && v.numerator().fits_slong_p()) {
        row.push_back(v.numerator().get_si());
      } else {
        row.push_back(v.str());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::IoFailure, where + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path + "' failed");
}

}  // namespace detail

inline RawInstance raw_instance_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::DimensionMismatch, "instance must be a JSON object");
  for (const char* key : {"agents", "items", "bids"}) {
    if (!j.contains(key)) throw Error(ErrorCode::DimensionMismatch, std::string("missing field '") + key + "'");
  }
  RawInstance raw;
  detail::read_count_or_names(j.at("agents"), "agents", raw.agents, raw.agent_names);
  detail::read_count_or_names(j.at("items"), "items", raw.items, raw.item_names);
  raw.bids = detail::matrix_text(j.at("bids"), "bids");
  if (j.contains("utilities") && !j.at("utilities").is_null()) {
    raw.utilities = detail::matrix_text(j.at("utilities"), "utilities");
  }
  return raw;
}

inline Instance instance_from_json(const json& j) { return validate_instance(raw_instance_from_json(j)); }

inline json instance_to_json(const Instance& inst) {
  json j;
  j["agents"] = inst.agent_names().empty() ? json(inst.num_agents()) : json(inst.agent_names());
  j["items"] = inst.item_names().empty() ? json(inst.num_items()) : json(inst.item_names());
  j["bids"] = detail::matrix_json(inst.bids());
  if (inst.has_true_utilities()) j["utilities"] = detail::matrix_json(inst.utilities());
  return j;
}

inline Instance parse_instance(const std::string& text) {
  return instance_from_json(detail::parse_json_text(text, "instance"));
}
inline std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

inline Instance load_instance(const std::string& path) {
  return instance_from_json(detail::parse_json_text(detail::read_file(path), path));
}
inline void save_instance(const Instance& inst, const std::string& path) {
  detail::write_file(path, serialize_instance(inst));
}

inline Allocation allocation_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::DimensionMismatch, "allocation must be a list");
  std::vector<int> owner;
  for (const auto& v : j) {
    if (v.is_null()) {
      owner.push_back(kUnallocated);
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
      owner.push_back(v.get<int>());
    } else {
      throw Error(ErrorCode::IndexOutOfRange, "allocation entry " + v.dump() + " is not an agent index or null");
    }
  }
  return Allocation(std::move(owner));
}

inline json allocation_to_json(const Allocation& a) {
  json j = json::array();
  for (int o : a.owners()) {
    if (o == kUnallocated) {
      j.push_back(nullptr);
    } else {
      j.push_back(o);
    }
  }
  return j;
}

inline Allocation load_allocation(const std::string& path) {
  return allocation_from_json(detail::parse_json_text(detail::read_file(path), path));
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  ExperimentConfig c;
  try {
    if (j.contains("agents")) c.agents = j.at("agents").get<std::size_t>();
    if (j.contains("item_counts")) c.item_counts = j.at("item_counts").get<std::vector<std::size_t>>();
    if (j.contains("max_util")) {
      const auto& v = j.at("max_util");
      if (v.is_string()) {
        if (v.get<std::string>() != "m") throw Error(ErrorCode::InvalidConfig, "max_util must be \"m\" or an integer");
        c.max_util.reset();
      } else {
        c.max_util = v.get<std::uint64_t>();
      }
    }
    if (j.contains("instances")) c.instances = j.at("instances").get<std::size_t>();
    if (j.contains("samples")) c.samples = j.at("samples").get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mechanisms")) {
      c.mechanisms.clear();
      for (const auto& name : j.at("mechanisms")) c.mechanisms.push_back(parse_mechanism(name.get<std::string>()));
    }
    if (j.contains("envy_norm")) c.envy_norm = parse_envy_normalization(j.at("envy_norm").get<std::string>());
    if (j.contains("egalitarian_budget_ms")) {
      c.egalitarian_budget = std::chrono::milliseconds(j.at("egalitarian_budget_ms").get<long long>());
    }
    if (j.contains("order")) {
      auto order = j.at("order").get<std::string>();
      if (order != "random" && order != "given") throw Error(ErrorCode::InvalidConfig, "order must be random or given");
      c.random_order = order == "random";
    }
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_json(detail::parse_json_text(detail::read_file(path), path));
}

}  // namespace fairdiv
