#pragma once

// Greedy online randomized mechanisms. Items arrive in a given order; each
// item goes to an agent drawn uniformly from the feasible set: the agents
// with a positive bid whose one-step extension of the current allocation
// attains the minimum index (scored on the bids).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "fairdiv/detail/kernel.hpp"
#include "fairdiv/detail/random.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/rational.hpp"

namespace fairdiv {

enum class MechanismKind { Gini, SubjectiveGini, Envy };

inline constexpr MechanismKind kAllMechanisms[] = {MechanismKind::Gini, MechanismKind::SubjectiveGini,
                                                   MechanismKind::Envy};

constexpr IndexKind index_kind(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::Gini: return IndexKind::Gini;
    case MechanismKind::SubjectiveGini: return IndexKind::SubjectiveGini;
    case MechanismKind::Envy: return IndexKind::Envy;
  }
  return IndexKind::Gini;
}

constexpr std::string_view to_string(MechanismKind kind) { return to_string(index_kind(kind)); }

inline MechanismKind parse_mechanism(std::string_view name) {
  for (MechanismKind k : kAllMechanisms) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown mechanism '" + std::string(name) + "'");
}

struct TraceStep {
  std::size_t item = 0;
  std::vector<std::size_t> feasible;
  int chosen = kUnallocated;  // kUnallocated when nobody bids positive
  Rational index_after;       // index of the partial allocation after this step
};

struct RunTrace {
  std::vector<std::size_t> order;
  std::vector<TraceStep> steps;
  Allocation final_allocation;
};

struct SupportOutcome {
  Allocation allocation;
  Rational probability;
};

namespace detail {

// Incremental state of one mechanism run on integer-scaled bids.
template <typename Int>
class OnlineEngine {
 public:
  OnlineEngine(const ScaledMatrix<Int>& bids, IndexKind kind, EnvyNormalization norm)
      : bids_(bids), kind_(kind), norm_(norm), owner_(bids.items, kUnallocated), w_(bids.agents) {}

  void load(const std::vector<int>& owner) {
    owner_ = owner;
    w_ = CrossValues<Int>(bids_, owner_);
  }

  // Fills `out` with the feasible agents for `item`; returns the index value
  // they attain (or the current value when `out` is empty).
  Fraction<Int> feasible(std::size_t item, std::vector<std::size_t>& out) {
    out.clear();
    std::optional<Fraction<Int>> best;
    for (std::size_t i = 0; i < bids_.agents; ++i) {
      if (!(bids_(i, item) > 0)) continue;
      w_.add(bids_, item, i);
      auto value = index_fraction(kind_, norm_, w_);
      w_.remove(bids_, item, i);
      if (!best || fraction_less(value, *best)) {
        best = value;
        out.assign(1, i);
      } else if (fraction_equal(value, *best)) {
        out.push_back(i);
      }
    }
    return best ? *best : index_fraction(kind_, norm_, w_);
  }

  void assign(std::size_t item, std::size_t agent) {
    owner_[item] = static_cast<int>(agent);
    w_.add(bids_, item, agent);
  }
  void unassign(std::size_t item) {
    w_.remove(bids_, item, static_cast<std::size_t>(owner_[item]));
    owner_[item] = kUnallocated;
  }

  const std::vector<int>& owner() const noexcept { return owner_; }
  const CrossValues<Int>& cross() const noexcept { return w_; }

 private:
  const ScaledMatrix<Int>& bids_;
  IndexKind kind_;
  EnvyNormalization norm_;
  std::vector<int> owner_;
  CrossValues<Int> w_;
};

inline void check_order(std::span<const std::size_t> order, std::size_t items) {
  if (order.size() != items) throw Error(ErrorCode::InvalidArgument, "item order must list every item once");
  std::vector<bool> seen(items, false);
  for (std::size_t j : order) {
    if (j >= items || seen[j]) throw Error(ErrorCode::InvalidArgument, "item order must be a permutation");
    seen[j] = true;
  }
}

template <typename Int>
std::vector<int> run_once(OnlineEngine<Int>& engine, std::span<const std::size_t> order, std::uint64_t seed,
                          std::vector<std::size_t>& scratch) {
  engine.load(std::vector<int>(engine.owner().size(), kUnallocated));
  for (std::size_t t = 0; t < order.size(); ++t) {
    engine.feasible(order[t], scratch);
    if (scratch.empty()) continue;
    engine.assign(order[t], scratch[uniform_below(derive(seed, {kTagStep, t}), scratch.size())]);
  }
  return engine.owner();
}

}  // namespace detail

// Uniformly random permutation of 0..items-1, determined by `seed`.
inline std::vector<std::size_t> random_order(std::size_t items, std::uint64_t seed) {
  std::vector<std::size_t> order(items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = items; i > 1; --i) {
    auto k = static_cast<std::size_t>(detail::uniform_below(detail::derive(seed, {detail::kTagOrder, i}), i));
    std::swap(order[i - 1], order[k]);
  }
  return order;
}

inline std::vector<std::size_t> identity_order(std::size_t items) {
  std::vector<std::size_t> order(items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

inline std::vector<std::size_t> feasible_set(const Instance& inst, const Allocation& partial, std::size_t item,
                                             MechanismKind kind,
                                             EnvyNormalization norm = EnvyNormalization::Half) {
  check_allocation(inst, partial);
  if (item >= inst.num_items()) throw Error(ErrorCode::IndexOutOfRange, "item " + std::to_string(item));
  if (partial.owner(item) != kUnallocated) {
    throw Error(ErrorCode::InvalidArgument, "item " + std::to_string(item) + " is already allocated");
  }
  return std::visit(
      [&](const auto& bids) {
        detail::OnlineEngine engine(bids, index_kind(kind), norm);
        engine.load(partial.owners());
        std::vector<std::size_t> out;
        engine.feasible(item, out);
        return out;
      },
      detail::scale_to_integers(inst.bids()));
}

// One seeded run with a full per-step record.
inline RunTrace run_mechanism(const Instance& inst, std::span<const std::size_t> order, MechanismKind kind,
                              EnvyNormalization norm, std::uint64_t seed) {
  detail::check_order(order, inst.num_items());
  RunTrace trace;
  trace.order.assign(order.begin(), order.end());
  std::visit(
      [&](const auto& bids) {
        detail::OnlineEngine engine(bids, index_kind(kind), norm);
        std::vector<std::size_t> feasible;
        for (std::size_t t = 0; t < order.size(); ++t) {
          TraceStep step;
          step.item = order[t];
          auto value = engine.feasible(order[t], feasible);
          step.feasible = feasible;
          if (!feasible.empty()) {
            auto pick = feasible[detail::uniform_below(detail::derive(seed, {detail::kTagStep, t}), feasible.size())];
            engine.assign(order[t], pick);
            step.chosen = static_cast<int>(pick);
          }
          step.index_after = detail::to_rational(value);
          trace.steps.push_back(std::move(step));
        }
        trace.final_allocation = Allocation(engine.owner());
      },
      detail::scale_to_integers(inst.bids()));
  return trace;
}

// Exact outcome distribution of a mechanism on a fixed order. The number of
// leaves of the choice tree is bounded by `cap`.
inline std::vector<SupportOutcome> mechanism_support(const Instance& inst, std::span<const std::size_t> order,
                                                     MechanismKind kind,
                                                     EnvyNormalization norm = EnvyNormalization::Half,
                                                     std::uint64_t cap = 1'000'000) {
  detail::check_order(order, inst.num_items());
  std::map<Allocation, Rational> outcomes;
  std::uint64_t leaves = 0;
  std::visit(
      [&](const auto& bids) {
        using Int = typename std::decay_t<decltype(bids)>::value_type;
        detail::OnlineEngine<Int> engine(bids, index_kind(kind), norm);
        auto expand = [&](auto&& self, std::size_t t, const Rational& p) -> void {
          if (t == order.size()) {
            if (++leaves > cap) {
              throw Error(ErrorCode::SupportTooLarge, "more than " + std::to_string(cap) + " outcomes");
            }
            outcomes[Allocation(engine.owner())] += p;
            return;
          }
          std::vector<std::size_t> feasible;
          engine.feasible(order[t], feasible);
          if (feasible.empty()) {
            self(self, t + 1, p);
            return;
          }
          Rational share = p / Rational(static_cast<long>(feasible.size()));
          for (std::size_t agent : feasible) {
            engine.assign(order[t], agent);
            self(self, t + 1, share);
            engine.unassign(order[t]);
          }
        };
        expand(expand, 0, Rational(1));
      },
      detail::scale_to_integers(inst.bids()));

  std::vector<SupportOutcome> out;
  out.reserve(outcomes.size());
  for (auto& [alloc, p] : outcomes) out.push_back({alloc, p});
  return out;
}

// Streaming mean and sample standard deviation (Welford).
class RunningStat {
 public:
  void push(double x) {
    ++count_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1); }
  double stddev() const { return std::sqrt(variance()); }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct OnlineMetrics {
  RunningStat gini;
  RunningStat subjective_gini;
  RunningStat envy;
  RunningStat utilitarian;
  RunningStat egalitarian;
};

// Averages over `samples` independent runs. Sample s uses the key
// derive(seed, sample, s); with no `order` each sample also draws a fresh
// uniform item order. Metrics are measured on the true utilities.
inline OnlineMetrics sample_online_metrics(const Instance& inst, std::optional<std::span<const std::size_t>> order,
                                           MechanismKind kind, EnvyNormalization norm, std::uint64_t samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be at least 1");
  if (order) detail::check_order(*order, inst.num_items());
  const bool sincere = !inst.has_true_utilities();
  OnlineMetrics metrics;

  auto bids_scaled = detail::scale_to_integers(inst.bids());
  auto util_scaled = sincere ? bids_scaled : detail::scale_to_integers(inst.utilities());
  std::visit(
      [&](const auto& bids, const auto& util) {
        using IntB = typename std::decay_t<decltype(bids)>::value_type;
        using IntU = typename std::decay_t<decltype(util)>::value_type;
        detail::OnlineEngine<IntB> engine(bids, index_kind(kind), norm);
        std::vector<std::size_t> scratch;
        const double scale = util.scale.get_d();

        auto record = [&](const detail::CrossValues<IntU>& w) {
          metrics.gini.push(detail::to_double(detail::gini_fraction(w)));
          metrics.subjective_gini.push(detail::to_double(detail::subjective_gini_fraction(w)));
          metrics.envy.push(detail::to_double(detail::envy_fraction(w, norm)));
          IntU total(0);
          IntU lowest = w(0, 0);
          for (std::size_t i = 0; i < w.agents(); ++i) {
            total += w(i, i);
            if (w(i, i) < lowest) lowest = w(i, i);
          }
          metrics.utilitarian.push(detail::as_double(total) / scale);
          metrics.egalitarian.push(detail::as_double(lowest) / scale);
        };

        for (std::uint64_t s = 0; s < samples; ++s) {
          const std::uint64_t key = detail::derive(seed, {detail::kTagSample, s});
          std::vector<std::size_t> drawn;
          std::span<const std::size_t> run_order;
          if (order) {
            run_order = *order;
          } else {
            drawn = random_order(inst.num_items(), key);
            run_order = drawn;
          }
          auto owner = detail::run_once(engine, run_order, key, scratch);
          if constexpr (std::is_same_v<IntB, IntU>) {
            if (sincere) {
              record(engine.cross());
              continue;
            }
          }
          record(detail::CrossValues<IntU>(util, owner));
        }
      },
      bids_scaled, util_scaled);
  return metrics;
}

// One line per step: item, feasible agents, chosen agent, index as p/q.
inline void write_trace(const RunTrace& trace, std::ostream& os) {
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& s = trace.steps[t];
    os << "step=" << t << " item=" << s.item << " feasible=";
    for (std::size_t k = 0; k < s.feasible.size(); ++k) os << (k ? "," : "") << s.feasible[k];
    os << " chosen=";
    if (s.chosen == kUnallocated) {
      os << "none";
    } else {
      os << s.chosen;
    }
    os << " index=" << s.index_after.fraction_str() << '\n';
  }
}

}  // namespace fairdiv
