#pragma once

// Exact offline optimization over complete allocations.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fairdiv/detail/kernel.hpp"
#include "fairdiv/detail/random.hpp"
#include "fairdiv/hopcroft_karp.hpp"
#include "fairdiv/indices.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/rational.hpp"

namespace fairdiv {

// Input range over all n^m complete allocations, item 0 varying fastest.
class CompleteAllocations {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Allocation;
    using difference_type = std::ptrdiff_t;
    using pointer = const Allocation*;
    using reference = const Allocation&;

    iterator() = default;
    iterator(std::size_t agents, std::size_t items) : agents_(agents), current_(std::vector<int>(items, 0)) {}

    const Allocation& operator*() const { return current_; }
    const Allocation* operator->() const { return &current_; }

    iterator& operator++() {
      auto owners = current_.owners();
      std::size_t j = 0;
      for (; j < owners.size(); ++j) {
        if (static_cast<std::size_t>(++owners[j]) < agents_) break;
        owners[j] = 0;
      }
      if (j == owners.size()) {
        done_ = true;
      } else {
        current_ = Allocation(std::move(owners));
      }
      return *this;
    }
    void operator++(int) { ++*this; }

    friend bool operator==(const iterator& a, const iterator& b) {
      return a.done_ == b.done_ && (a.done_ || a.current_ == b.current_);
    }

   private:
    friend class CompleteAllocations;
    std::size_t agents_ = 0;
    Allocation current_;
    bool done_ = true;
  };

  explicit CompleteAllocations(const Instance& inst, std::uint64_t cap = kDefaultEnumerationCap)
      : agents_(inst.num_agents()),
        items_(inst.num_items()),
        count_(detail::search_space_size(inst.num_agents(), inst.num_items(), cap)) {}

  iterator begin() const {
    iterator it(agents_, items_);
    it.done_ = false;
    return it;
  }
  iterator end() const { return {}; }
  std::uint64_t size() const noexcept { return count_; }

 private:
  std::size_t agents_;
  std::size_t items_;
  std::uint64_t count_;
};

inline CompleteAllocations enumerate_complete_allocations(const Instance& inst,
                                                          std::uint64_t cap = kDefaultEnumerationCap) {
  return CompleteAllocations(inst, cap);
}

struct MinimizationResult {
  Rational min_value;
  std::vector<Allocation> minimizers;  // enumeration order
  std::uint64_t explored = 0;
};

// Exact global minimum of an index over complete allocations, scored on
// `source` (the bids by default, as a mechanism would), with the full
// argmin set.
inline MinimizationResult minimize_index(const Instance& inst, IndexKind kind,
                                         EnvyNormalization norm = EnvyNormalization::Half,
                                         std::uint64_t cap = kDefaultEnumerationCap,
                                         Source source = Source::Bids) {
  detail::search_space_size(inst.num_agents(), inst.num_items(), cap);
  MinimizationResult result;
  std::visit(
      [&](const auto& u) {
        using Int = typename std::decay_t<decltype(u)>::value_type;
        std::optional<detail::Fraction<Int>> best;
        detail::walk_complete_allocations(u, [&](const std::vector<int>& owner, const detail::CrossValues<Int>& w) {
          ++result.explored;
          auto value = detail::index_fraction(kind, norm, w);
          if (!best || detail::fraction_less(value, *best)) {
            best = value;
            result.minimizers.clear();
            result.minimizers.emplace_back(owner);
          } else if (detail::fraction_equal(value, *best)) {
            result.minimizers.emplace_back(owner);
          }
          return true;
        });
        result.min_value = detail::to_rational(*best);
      },
      detail::scale_to_integers(inst.matrix(source)));
  return result;
}

inline std::vector<Allocation> envy_free_allocations(const Instance& inst,
                                                     std::uint64_t cap = kDefaultEnumerationCap,
                                                     Source source = Source::Utilities) {
  detail::search_space_size(inst.num_agents(), inst.num_items(), cap);
  std::vector<Allocation> out;
  std::visit(
      [&](const auto& u) {
        using Int = typename std::decay_t<decltype(u)>::value_type;
        detail::walk_complete_allocations(u, [&](const std::vector<int>& owner, const detail::CrossValues<Int>& w) {
          if (detail::envy_free(w)) out.emplace_back(owner);
          return true;
        });
      },
      detail::scale_to_integers(inst.matrix(source)));
  return out;
}

struct WelfareOptimum {
  Rational value;
  Allocation allocation;
  bool optimal = true;  // false when the search ran out of time
  std::uint64_t nodes = 0;
};

// Each item goes to the lowest-indexed agent with the highest value for it.
inline WelfareOptimum max_utilitarian(const Instance& inst, Source source = Source::Utilities) {
  const auto& values = inst.matrix(source);
  WelfareOptimum out{Rational(0), Allocation(inst.num_items()), true, 0};
  for (std::size_t j = 0; j < inst.num_items(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < inst.num_agents(); ++i) {
      if (values(i, j) > values(best, j)) best = i;
    }
    out.allocation.assign(j, static_cast<int>(best));
    out.value += values(best, j);
  }
  return out;
}

struct EgalitarianOptions {
  Source source = Source::Utilities;
  std::optional<std::chrono::milliseconds> budget;  // unlimited when empty
};

namespace detail {

template <typename Int>
struct Wide {
  using type = mpz_class;
};
template <>
struct Wide<std::int64_t> {
  using type = __int128;
};

// Depth-first branch and bound for max_A min_i u_i(A_i) on integer values.
// Items are branched in descending order of their best value; each item is
// offered to agents that value it, poorest first.
template <typename Int>
class EgalitarianSearch {
  using WideInt = typename Wide<Int>::type;

 public:
  EgalitarianSearch(const ScaledMatrix<Int>& u, std::optional<std::chrono::steady_clock::time_point> deadline)
      : u_(u), n_(u.agents), m_(u.items), deadline_(deadline) {
    order_.resize(m_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::vector<Int> item_max(m_, Int(0));
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t i = 0; i < n_; ++i) item_max[j] = std::max(item_max[j], Int(u(i, j)));
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return item_max[b] < item_max[a]; });

    remaining_.assign((m_ + 1) * n_, Int(0));
    remaining_max_.assign(m_ + 1, Int(0));
    for (std::size_t t = m_; t-- > 0;) {
      for (std::size_t i = 0; i < n_; ++i) remaining_[t * n_ + i] = remaining_[(t + 1) * n_ + i] + u(i, order_[t]);
      remaining_max_[t] = remaining_max_[t + 1] + item_max[order_[t]];
    }
    current_.assign(n_, Int(0));
    owner_.assign(m_, 0);
    init_dual_bound();
    lambda_.assign((m_ + 2) * n_, 0.0);
  }

  void run() {
    greedy_incumbent();
    improve_incumbent();
    dfs(0);
  }

  const Int& best() const { return best_; }
  const std::vector<int>& best_owner() const { return best_owner_; }
  bool timed_out() const { return timed_out_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  void greedy_incumbent() {
    std::vector<Int> x(n_, Int(0));
    std::vector<int> owner(m_, 0);
    for (std::size_t j : order_) {
      int pick = -1;
      for (std::size_t i = 0; i < n_; ++i) {
        if (u_(i, j) > 0 && (pick < 0 || x[i] < x[static_cast<std::size_t>(pick)])) pick = static_cast<int>(i);
      }
      if (pick < 0) pick = 0;
      owner[j] = pick;
      x[static_cast<std::size_t>(pick)] += u_(static_cast<std::size_t>(pick), j);
    }
    best_ = *std::min_element(x.begin(), x.end());
    best_owner_ = owner;
  }

  // For weights w >= 0, min_i x_i <= sum_i w_i x_i / W, and sum_i w_i x_i is at
  // most sum_i w_i c_i plus sum over remaining items of max_i w_i u_ij. The
  // weights approximately minimise the root bound (an LP dual); any choice
  // is valid, and integer weights keep the test exact.
  void init_dual_bound() {
    std::vector<double> lam(n_, 1.0 / static_cast<double>(n_));
    std::vector<double> best_lam = lam;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> g(n_);
    for (int iter = 0; iter < 2000; ++iter) {
      std::fill(g.begin(), g.end(), 0.0);
      double f = 0.0;
      for (std::size_t j = 0; j < m_; ++j) {
        std::size_t arg = 0;
        double top = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
          double v = lam[i] * as_double(u_(i, j));
          if (v > top) top = v, arg = i;
        }
        f += top;
        g[arg] += as_double(u_(arg, j));
      }
      if (f < best_f) best_f = f, best_lam = lam;
      double gmax = *std::max_element(g.begin(), g.end());
      if (gmax <= 0.0) break;
      double eta = 2.0 / std::sqrt(static_cast<double>(iter) + 1.0);
      double total = 0.0;
      for (std::size_t i = 0; i < n_; ++i) total += lam[i] *= std::exp(-eta * g[i] / gmax);
      for (auto& l : lam) l /= total;
    }
    weight_.assign(n_, WideInt(0));
    weight_sum_ = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      weight_[i] = static_cast<long>(std::llround(best_lam[i] * 1048576.0));
      weight_sum_ += weight_[i];
    }
    if (weight_sum_ == 0) {
      std::fill(weight_.begin(), weight_.end(), WideInt(1));
      weight_sum_ = static_cast<long>(n_);
    }
    dual_suffix_.assign(m_ + 1, WideInt(0));
    for (std::size_t t = m_; t-- > 0;) {
      WideInt top(0);
      for (std::size_t i = 0; i < n_; ++i) top = std::max(top, WideInt(weight_[i] * widen(u_(i, order_[t]))));
      dual_suffix_[t] = dual_suffix_[t + 1] + top;
    }
  }

  static WideInt widen(const Int& v) {
    if constexpr (std::is_same_v<Int, std::int64_t>) {
      return static_cast<WideInt>(v);
    } else {
      return v;
    }
  }

  // Leximin hill climbing over single-item moves and pairwise swaps, with a
  // few deterministic random kicks, to start the search from a good bound.
  void improve_incumbent() {
    if (m_ == 0) return;
    std::vector<int> owner = best_owner_;
    std::vector<Int> x(n_, Int(0));
    for (std::size_t j = 0; j < m_; ++j) x[owner[j]] += u_(owner[j], j);

    auto sorted = [](std::vector<Int> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    auto climb = [&] {
      auto key = sorted(x);
      for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t j = 0; j < m_ && !improved; ++j) {
          const auto a = static_cast<std::size_t>(owner[j]);
          for (std::size_t b = 0; b < n_ && !improved; ++b) {
            if (b == a) continue;
            x[a] -= u_(a, j);
            x[b] += u_(b, j);
            auto cand = sorted(x);
            if (key < cand) {
              key = std::move(cand);
              owner[j] = static_cast<int>(b);
              improved = true;
            } else {
              x[a] += u_(a, j);
              x[b] -= u_(b, j);
            }
          }
          for (std::size_t k = j + 1; k < m_ && !improved; ++k) {
            const auto b = static_cast<std::size_t>(owner[k]);
            if (b == a) continue;
            x[a] += u_(a, k) - u_(a, j);
            x[b] += u_(b, j) - u_(b, k);
            auto cand = sorted(x);
            if (key < cand) {
              key = std::move(cand);
              std::swap(owner[j], owner[k]);
              improved = true;
            } else {
              x[a] -= u_(a, k) - u_(a, j);
              x[b] -= u_(b, j) - u_(b, k);
            }
          }
        }
      }
    };

    std::vector<int> best_owner = owner;
    std::vector<Int> best_x = x;
    climb();
    auto best_key = sorted(x);
    best_owner = owner;
    best_x = x;
    for (std::uint64_t round = 0; round < 30; ++round) {
      owner = best_owner;
      x = best_x;
      for (std::uint64_t kick = 0; kick < 3; ++kick) {
        auto j = static_cast<std::size_t>(uniform_below(derive(round, {kick, 0}), m_));
        auto b = static_cast<std::size_t>(uniform_below(derive(round, {kick, 1}), n_));
        auto a = static_cast<std::size_t>(owner[j]);
        x[a] -= u_(a, j);
        x[b] += u_(b, j);
        owner[j] = static_cast<int>(b);
      }
      climb();
      auto key = sorted(x);
      if (best_key < key) {
        best_key = std::move(key);
        best_owner = owner;
        best_x = x;
      }
    }
    if (best_key.front() > best_) {
      best_ = best_key.front();
      best_owner_ = best_owner;
    }
  }

  Int lowest_current() const { return *std::min_element(current_.begin(), current_.end()); }

  // False when no completion from depth t can beat the incumbent.
  bool promising(std::size_t t) {
    const Int target = best_ + 1;
    Int sum(0);
    for (std::size_t i = 0; i < n_; ++i) {
      // No agent can end above its current utility plus everything left.
      if (current_[i] + remaining_[t * n_ + i] < target) return false;
      sum += current_[i];
    }
    // The minimum is at most the average of the best-case utilitarian total.
    if (sum + remaining_max_[t] < target * static_cast<long>(n_)) return false;

    WideInt weighted = dual_suffix_[t];
    for (std::size_t i = 0; i < n_; ++i) weighted += weight_[i] * widen(current_[i]);
    if (weighted < widen(target) * weight_sum_) return false;

    // Each needy agent must still collect `need`; an item supplies at most a
    // v = min(1, u/need) share of one agent's need. Any completion therefore
    // has sum_j max_k lam_k v_kj >= 1 for every weighting lam of the needy
    // agents. Weights are inherited from the parent node and refined by a few
    // exponentiated subgradient steps; the margin absorbs rounding.
    needy_.clear();
    need_.clear();
    for (std::size_t i = 0; i < n_; ++i) {
      if (current_[i] < target) {
        needy_.push_back(i);
        need_.push_back(as_double(Int(target - current_[i])));
      }
    }
    if (needy_.empty()) return true;
    const std::size_t r = needy_.size();
    const std::size_t left = m_ - t;
    share_.resize(r * left);
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t s = 0; s < left; ++s) {
        share_[k * left + s] = std::min(1.0, as_double(u_(needy_[k], order_[t + s])) / need_[k]);
      }
    }
    const double* inherited = &lambda_[t * n_];
    lam_.assign(r, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < r; ++k) total += lam_[k] = inherited[needy_[k]];
    if (!(total > 0.0)) {
      std::fill(lam_.begin(), lam_.end(), 1.0);
      total = static_cast<double>(r);
    }
    for (auto& l : lam_) l /= total;
    constexpr double kMargin = 1e-9;
    grad_.resize(r);
    bool alive = true;
    for (int iter = 0; iter < 12; ++iter) {
      std::fill(grad_.begin(), grad_.end(), 0.0);
      double f = 0.0;
      for (std::size_t s = 0; s < left; ++s) {
        std::size_t arg = 0;
        double top = -1.0;
        for (std::size_t k = 0; k < r; ++k) {
          double val = lam_[k] * share_[k * left + s];
          if (val > top) top = val, arg = k;
        }
        f += top;
        grad_[arg] += share_[arg * left + s];
      }
      if (f < 1.0 - kMargin) {
        alive = false;
        break;
      }
      double gmax = *std::max_element(grad_.begin(), grad_.end());
      if (gmax <= 0.0) break;
      double eta = 1.0 / std::sqrt(static_cast<double>(iter) + 1.0);
      total = 0.0;
      for (std::size_t k = 0; k < r; ++k) total += lam_[k] *= std::exp(-eta * grad_[k] / gmax);
      for (auto& l : lam_) l /= total;
    }
    double* passed = &lambda_[(t + 1) * n_];
    std::fill(passed, passed + n_, 0.0);
    for (std::size_t k = 0; k < r; ++k) passed[needy_[k]] = lam_[k];
    return alive;
  }

  void dfs(std::size_t t) {
    if (timed_out_) return;
    if ((++nodes_ & 0xfff) == 0 && deadline_ && std::chrono::steady_clock::now() > *deadline_) {
      timed_out_ = true;
      return;
    }
    if (t == m_) {
      Int value = lowest_current();
      if (value > best_) {
        best_ = value;
        best_owner_ = owner_;
      }
      return;
    }
    if (!promising(t)) return;

    const std::size_t j = order_[t];
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n_; ++i) {
      if (u_(i, j) > 0) candidates.push_back(i);
    }
    if (candidates.empty()) {
      owner_[j] = 0;
      dfs(t + 1);
      return;
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return current_[a] < current_[b]; });
    for (std::size_t i : candidates) {
      owner_[j] = static_cast<int>(i);
      current_[i] += u_(i, j);
      dfs(t + 1);
      current_[i] -= u_(i, j);
      if (timed_out_) return;
    }
  }

  const ScaledMatrix<Int>& u_;
  std::size_t n_;
  std::size_t m_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::vector<std::size_t> order_;
  std::vector<Int> remaining_;
  std::vector<Int> remaining_max_;
  std::vector<Int> current_;
  std::vector<int> owner_;
  Int best_{0};
  std::vector<int> best_owner_;
  std::vector<WideInt> weight_;
  WideInt weight_sum_{0};
  std::vector<WideInt> dual_suffix_;
  std::vector<double> lambda_;  // per depth, inherited weights for the cover bound
  std::vector<std::size_t> needy_;
  std::vector<double> need_, share_, lam_, grad_;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

// Exact maximum egalitarian welfare over complete allocations. When the
// budget runs out the best allocation found so far is returned with
// optimal = false.
inline WelfareOptimum max_egalitarian(const Instance& inst, const EgalitarianOptions& options = {}) {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (options.budget) deadline = std::chrono::steady_clock::now() + *options.budget;
  return std::visit(
      [&](const auto& u) {
        using Int = typename std::decay_t<decltype(u)>::value_type;
        detail::EgalitarianSearch<Int> search(u, deadline);
        search.run();
        return WelfareOptimum{detail::to_rational(search.best(), u.scale), Allocation(search.best_owner()),
                              !search.timed_out(), search.nodes()};
      },
      detail::scale_to_integers(inst.matrix(options.source)));
}

// Square instances (n = m): for each distinct bid value, highest first, look
// for a perfect matching that gives every agent one item it values at exactly
// that value. Such an allocation has Gini index 0. For SubjectiveGini a
// matching is returned only if it also has subjective Gini index 0.
inline std::optional<Allocation> matching_minimizer_square(const Instance& inst, IndexKind kind) {
  const std::size_t n = inst.num_agents();
  if (n != inst.num_items()) {
    throw Error(ErrorCode::NotSquare, std::to_string(n) + " agents but " + std::to_string(inst.num_items()) + " items");
  }
  if (kind == IndexKind::Envy) {
    throw Error(ErrorCode::InvalidArgument, "the matching fast path covers the Gini indices only");
  }
  std::vector<Rational> values(inst.bids().data());
  std::sort(values.begin(), values.end(), [](const Rational& a, const Rational& b) { return b < a; });
  values.erase(std::unique(values.begin(), values.end()), values.end());

  IndexEvaluator bids(inst, Source::Bids);
  for (const auto& value : values) {
    BipartiteMatcher matcher(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (inst.bid(i, j) == value) matcher.add_edge(i, j);
      }
    }
    if (matcher.solve() != n) continue;
    Allocation alloc(n);
    for (std::size_t i = 0; i < n; ++i) alloc.assign(static_cast<std::size_t>(matcher.match_left()[i]), static_cast<int>(i));
    if (kind == IndexKind::SubjectiveGini && !bids.subjective_gini(alloc).is_zero()) continue;
    return alloc;
  }
  return std::nullopt;
}

// A welfare ratio that may be unbounded.
struct Price {
  std::optional<Rational> value;  // empty = infinite

  bool infinite() const noexcept { return !value.has_value(); }
  std::string str() const { return value ? value->str() : "inf"; }

  friend bool operator==(const Price&, const Price&) = default;
};

struct PriceReport {
  Price utilitarian;
  Price egalitarian;
};

namespace detail {

inline Price welfare_ratio(const Rational& best, const Rational& worst) {
  if (worst.is_zero()) return best.is_zero() ? Price{Rational(1)} : Price{};
  return Price{best / worst};
}

}  // namespace detail

// Best welfare of any Pareto-efficient allocation divided by the worst
// welfare of an index-minimizing one. The index is scored on the bids and
// welfare on the true utilities.
inline PriceReport price_of_index(const Instance& inst, IndexKind kind,
                                  EnvyNormalization norm = EnvyNormalization::Half,
                                  std::uint64_t cap = kDefaultEnumerationCap) {
  auto minimized = minimize_index(inst, kind, norm, cap, Source::Bids);
  IndexEvaluator eval(inst, Source::Utilities);
  std::optional<Rational> worst_util;
  std::optional<Rational> worst_egal;
  for (const auto& a : minimized.minimizers) {
    auto util = eval.utilitarian(a);
    auto egal = eval.egalitarian(a);
    if (!worst_util || util < *worst_util) worst_util = util;
    if (!worst_egal || egal < *worst_egal) worst_egal = egal;
  }

  ParetoFrontier frontier(inst, Source::Utilities, cap);
  std::optional<Rational> best_util;
  std::optional<Rational> best_egal;
  for (const auto& x : frontier.maximal_utilities()) {
    Rational util;
    Rational egal = x.front();
    for (const auto& v : x) {
      util += v;
      if (v < egal) egal = v;
    }
    if (!best_util || util > *best_util) best_util = util;
    if (!best_egal || egal > *best_egal) best_egal = egal;
  }
  return {detail::welfare_ratio(*best_util, *worst_util), detail::welfare_ratio(*best_egal, *worst_egal)};
}

// Expected true utility of `agent` when the outcome is drawn uniformly from
// the allocations minimizing the index of the reported bids.
inline Rational expected_utility_under_minimizer(const Instance& inst, std::size_t agent, IndexKind kind,
                                                 EnvyNormalization norm = EnvyNormalization::Half,
                                                 std::uint64_t cap = kDefaultEnumerationCap) {
  if (agent >= inst.num_agents()) throw Error(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent));
  auto minimized = minimize_index(inst, kind, norm, cap, Source::Bids);
  Rational total;
  for (const auto& a : minimized.minimizers) {
    total += bundle_utility(inst, agent, a.bundle(static_cast<int>(agent)), Source::Utilities);
  }
  return total / Rational(static_cast<long>(minimized.minimizers.size()));
}

}  // namespace fairdiv
