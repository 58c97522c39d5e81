#pragma once

// Random instance generation and the mechanism comparison pipeline: for each
// (mechanism, m) the indices and welfare ratios averaged over instances, each
// instance averaged over sampled runs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <exception>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fairdiv/detail/random.hpp"
#include "fairdiv/exact.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/online.hpp"

namespace fairdiv {

// Integer utilities drawn independently and uniformly from {0, ..., max_util}.
inline Instance generate_instance(std::size_t agents, std::size_t items, std::uint64_t max_util, std::uint64_t seed) {
  if (agents < 1) throw Error(ErrorCode::InvalidArgument, "need at least one agent");
  Matrix<Rational> bids(agents, items);
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j = 0; j < items; ++j) {
      auto v = detail::uniform_below(detail::derive(seed, {detail::kTagEntry, i, j}), max_util + 1);
      bids(i, j) = Rational(mpz_class(static_cast<unsigned long>(v)));
    }
  }
  return Instance(std::move(bids));
}

struct ExperimentConfig {
  std::size_t agents = 5;
  std::vector<std::size_t> item_counts{10, 20, 30};
  std::optional<std::uint64_t> max_util;  // empty: utilities range over {0..m}
  std::size_t instances = 20;
  std::uint64_t samples = 2000;
  std::uint64_t seed = 20190101;
  std::vector<MechanismKind> mechanisms{std::begin(kAllMechanisms), std::end(kAllMechanisms)};
  EnvyNormalization envy_norm = EnvyNormalization::Half;
  std::chrono::milliseconds egalitarian_budget{60'000};
  bool random_order = true;  // false: items arrive in index order
  unsigned threads = 0;      // 0: hardware concurrency

  std::uint64_t max_util_for(std::size_t items) const { return max_util.value_or(items); }

  void validate() const {
    if (agents < 1) throw Error(ErrorCode::InvalidConfig, "agents must be at least 1");
    if (item_counts.empty()) throw Error(ErrorCode::InvalidConfig, "item_counts must not be empty");
    for (auto m : item_counts) {
      if (m < 1) throw Error(ErrorCode::InvalidConfig, "item counts must be at least 1");
    }
    if (instances < 1) throw Error(ErrorCode::InvalidConfig, "instances must be at least 1");
    if (samples < 1) throw Error(ErrorCode::InvalidConfig, "samples must be at least 1");
    if (mechanisms.empty()) throw Error(ErrorCode::InvalidConfig, "mechanisms must not be empty");
  }

  static ExperimentConfig desk_scale() { return {}; }

  static ExperimentConfig full_scale() {
    ExperimentConfig c;
    c.item_counts = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    c.instances = 100;
    c.samples = 100'000;
    return c;
  }
};

struct ExperimentRow {
  std::string mechanism;
  std::size_t n = 0;
  std::size_t m = 0;
  double gini = 0;
  double subjective_gini = 0;
  double envy = 0;
  double utilitarian_ratio = 0;
  double egalitarian_ratio = 0;
  double sd_gini = 0;
  double sd_subjective_gini = 0;
  double sd_envy = 0;
  double sd_utilitarian = 0;
  double sd_egalitarian = 0;
  std::size_t instances = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool egalitarian_exact = true;  // false if some offline optimum timed out
};

namespace detail {

struct InstanceOutcome {
  double gini, subjective_gini, envy, utilitarian_ratio, egalitarian_ratio;
};

struct InstanceTask {
  std::size_t m_index;
  std::size_t instance;
  std::vector<InstanceOutcome> per_mechanism;
  bool egalitarian_exact = true;
};

inline double welfare_ratio(double achieved, const Rational& optimum) {
  // An offline optimum of zero cannot be beaten; call that ratio 1.
  return optimum.is_zero() ? 1.0 : achieved / optimum.to_double();
}

inline void run_instance_task(const ExperimentConfig& config, InstanceTask& task) {
  const std::size_t m = config.item_counts[task.m_index];
  const auto inst = generate_instance(config.agents, m, config.max_util_for(m),
                                      derive(config.seed, {kTagInstance, m, task.instance}));
  const auto util_opt = max_utilitarian(inst);
  const auto egal_opt = max_egalitarian(inst, {Source::Utilities, config.egalitarian_budget});
  task.egalitarian_exact = egal_opt.optimal;

  const auto fixed = identity_order(m);
  std::optional<std::span<const std::size_t>> order;
  if (!config.random_order) order = fixed;

  for (auto mech : config.mechanisms) {
    auto key = derive(config.seed, {kTagSample, static_cast<std::uint64_t>(mech), m, task.instance});
    auto metrics = sample_online_metrics(inst, order, mech, config.envy_norm, config.samples, key);
    task.per_mechanism.push_back({metrics.gini.mean(), metrics.subjective_gini.mean(), metrics.envy.mean(),
                                  welfare_ratio(metrics.utilitarian.mean(), util_opt.value),
                                  welfare_ratio(metrics.egalitarian.mean(), egal_opt.value)});
  }
}

}  // namespace detail

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

// One row per (mechanism, m), mechanisms in config order, then m ascending
// in config order. Output does not depend on the thread count.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config,
                                                 const ProgressCallback& progress = {}) {
  config.validate();
  std::vector<detail::InstanceTask> tasks;
  for (std::size_t mi = 0; mi < config.item_counts.size(); ++mi) {
    for (std::size_t k = 0; k < config.instances; ++k) tasks.push_back({mi, k, {}, true});
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      try {
        detail::run_instance_task(config, tasks[t]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
      auto d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(failure_mutex);
        progress(d, tasks.size());
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ExperimentRow> rows;
  for (std::size_t k = 0; k < config.mechanisms.size(); ++k) {
    for (std::size_t mi = 0; mi < config.item_counts.size(); ++mi) {
      RunningStat gini, subj, envy, util, egal;
      bool exact = true;
      for (const auto& task : tasks) {
        if (task.m_index != mi) continue;
        const auto& o = task.per_mechanism[k];
        gini.push(o.gini);
        subj.push(o.subjective_gini);
        envy.push(o.envy);
        util.push(o.utilitarian_ratio);
        egal.push(o.egalitarian_ratio);
        exact = exact && task.egalitarian_exact;
      }
      ExperimentRow row;
      row.mechanism = std::string(to_string(config.mechanisms[k]));
      row.n = config.agents;
      row.m = config.item_counts[mi];
      row.gini = gini.mean();
      row.subjective_gini = subj.mean();
      row.envy = envy.mean();
      row.utilitarian_ratio = util.mean();
      row.egalitarian_ratio = egal.mean();
      row.sd_gini = gini.stddev();
      row.sd_subjective_gini = subj.stddev();
      row.sd_envy = envy.stddev();
      row.sd_utilitarian = util.stddev();
      row.sd_egalitarian = egal.stddev();
      row.instances = config.instances;
      row.samples = config.samples;
      row.seed = config.seed;
      row.egalitarian_exact = exact;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline constexpr const char* kCsvHeader =
    "mechanism,n,m,gini,subj_gini,envy,util_ratio,egal_ratio,sd_gini,sd_subj_gini,sd_envy,sd_util,sd_egal,"
    "instances,samples,seed,egal_exact";

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

inline void write_csv(const std::vector<ExperimentRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.mechanism << ',' << r.n << ',' << r.m;
    for (double v : {r.gini, r.subjective_gini, r.envy, r.utilitarian_ratio, r.egalitarian_ratio, r.sd_gini,
                     r.sd_subjective_gini, r.sd_envy, r.sd_utilitarian, r.sd_egalitarian}) {
      os << ',' << detail::fixed6(v);
    }
    os << ',' << r.instances << ',' << r.samples << ',' << r.seed << ',' << (r.egalitarian_exact ? 1 : 0) << '\n';
  }
}

inline void write_csv(const std::vector<ExperimentRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path + "' failed");
}

inline std::vector<ExperimentRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw Error(ErrorCode::IoFailure, "missing or unexpected CSV header");
  }
  std::vector<ExperimentRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 17) throw Error(ErrorCode::IoFailure, "CSV row has " + std::to_string(f.size()) + " fields");
    try {
      ExperimentRow r;
      r.mechanism = f[0];
      r.n = std::stoul(f[1]);
      r.m = std::stoul(f[2]);
      double* doubles[] = {&r.gini, &r.subjective_gini, &r.envy, &r.utilitarian_ratio, &r.egalitarian_ratio,
                           &r.sd_gini, &r.sd_subjective_gini, &r.sd_envy, &r.sd_utilitarian, &r.sd_egalitarian};
      for (std::size_t k = 0; k < 10; ++k) *doubles[k] = std::stod(f[3 + k]);
      r.instances = std::stoul(f[13]);
      r.samples = std::stoull(f[14]);
      r.seed = std::stoull(f[15]);
      r.egalitarian_exact = f[16] == "1";
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::IoFailure, "malformed CSV row: " + line);
    }
  }
  return rows;
}

}  // namespace fairdiv
