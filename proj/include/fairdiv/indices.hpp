#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "fairdiv/detail/kernel.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/rational.hpp"

namespace fairdiv {

struct IndexReport {
  Rational gini;
  Rational subjective_gini;
  Rational envy;
  Rational utilitarian;
  Rational egalitarian;
  bool envy_free = true;

  friend bool operator==(const IndexReport&, const IndexReport&) = default;
};

// Evaluates indices and welfare of allocations of one instance. The instance
// is rescaled to integers once, so repeated evaluation is cheap. Every index
// is 0 when its denominator is 0.
class IndexEvaluator {
 private:
  template <typename F>
  auto with_cross_values(const Allocation& alloc, F&& f) const {
    check_allocation(*inst_, alloc);
    return std::visit(
        [&](const auto& u) {
          using Int = typename std::decay_t<decltype(u)>::value_type;
          detail::CrossValues<Int> w(u, alloc.owners());
          return f(u, w);
        },
        scaled_);
  }

  const Instance* inst_;
  detail::AnyScaled scaled_;

 public:
  explicit IndexEvaluator(const Instance& inst, Source source = Source::Utilities)
      : inst_(&inst), scaled_(detail::scale_to_integers(inst.matrix(source))) {}

  const Instance& instance() const noexcept { return *inst_; }

  Rational index(IndexKind kind, const Allocation& alloc,
                 EnvyNormalization norm = EnvyNormalization::Half) const {
    return with_cross_values(alloc, [&](const auto&, const auto& w) {
      return detail::to_rational(detail::index_fraction(kind, norm, w));
    });
  }

  Rational gini(const Allocation& alloc) const { return index(IndexKind::Gini, alloc); }
  Rational subjective_gini(const Allocation& alloc) const { return index(IndexKind::SubjectiveGini, alloc); }
  Rational envy(const Allocation& alloc, EnvyNormalization norm = EnvyNormalization::Half) const {
    return index(IndexKind::Envy, alloc, norm);
  }

  std::vector<Rational> agent_utilities(const Allocation& alloc) const {
    return with_cross_values(alloc, [&](const auto& u, const auto& w) {
      std::vector<Rational> out;
      out.reserve(w.agents());
      for (std::size_t i = 0; i < w.agents(); ++i) out.push_back(detail::to_rational(w(i, i), u.scale));
      return out;
    });
  }

  Rational utilitarian(const Allocation& alloc) const {
    Rational total;
    for (const auto& x : agent_utilities(alloc)) total += x;
    return total;
  }

  Rational egalitarian(const Allocation& alloc) const {
    auto xs = agent_utilities(alloc);
    Rational lowest = xs.front();
    for (const auto& x : xs) lowest = x < lowest ? x : lowest;
    return lowest;
  }

  bool envy_free(const Allocation& alloc) const {
    return with_cross_values(alloc, [](const auto&, const auto& w) { return detail::envy_free(w); });
  }

  // Every agent weakly better off under `a` than under `b`, one strictly.
  bool dominates(const Allocation& a, const Allocation& b) const {
    auto xa = agent_utilities(a);
    auto xb = agent_utilities(b);
    bool strict = false;
    for (std::size_t i = 0; i < xa.size(); ++i) {
      if (xa[i] < xb[i]) return false;
      if (xa[i] > xb[i]) strict = true;
    }
    return strict;
  }

  IndexReport report(const Allocation& alloc) const {
    return with_cross_values(alloc, [&](const auto& u, const auto& w) {
      IndexReport r;
      r.gini = detail::to_rational(detail::gini_fraction(w));
      r.subjective_gini = detail::to_rational(detail::subjective_gini_fraction(w));
      r.envy = detail::to_rational(detail::envy_fraction(w, EnvyNormalization::Half));
      r.envy_free = detail::envy_free(w);
      for (std::size_t i = 0; i < w.agents(); ++i) {
        Rational x = detail::to_rational(w(i, i), u.scale);
        r.utilitarian += x;
        if (i == 0 || x < r.egalitarian) r.egalitarian = x;
      }
      return r;
    });
  }
};

inline Rational utilitarian_welfare(const Instance& inst, const Allocation& alloc) {
  return IndexEvaluator(inst).utilitarian(alloc);
}
inline Rational egalitarian_welfare(const Instance& inst, const Allocation& alloc) {
  return IndexEvaluator(inst).egalitarian(alloc);
}
inline Rational gini_index(const Instance& inst, const Allocation& alloc) {
  return IndexEvaluator(inst).gini(alloc);
}
inline Rational subjective_gini_index(const Instance& inst, const Allocation& alloc) {
  return IndexEvaluator(inst).subjective_gini(alloc);
}
inline Rational envy_index(const Instance& inst, const Allocation& alloc,
                           EnvyNormalization norm = EnvyNormalization::Half) {
  return IndexEvaluator(inst).envy(alloc, norm);
}
inline Rational index_value(const Instance& inst, const Allocation& alloc, IndexKind kind,
                            EnvyNormalization norm = EnvyNormalization::Half) {
  return IndexEvaluator(inst).index(kind, alloc, norm);
}
inline bool is_envy_free(const Instance& inst, const Allocation& alloc) {
  return IndexEvaluator(inst).envy_free(alloc);
}
inline bool pareto_dominates(const Instance& inst, const Allocation& a, const Allocation& b) {
  return IndexEvaluator(inst).dominates(a, b);
}
inline IndexReport index_report(const Instance& inst, const Allocation& alloc) {
  return IndexEvaluator(inst).report(alloc);
}

namespace detail {

// Maximal utility vectors over all complete allocations, maintained as a
// skyline while enumerating.
template <typename Int>
class Skyline {
 public:
  void insert(std::vector<Int> v) {
    for (const auto& s : maximal_) {
      if (weakly_above(s, v)) return;
    }
    std::erase_if(maximal_, [&](const std::vector<Int>& s) { return weakly_above(v, s); });
    maximal_.push_back(std::move(v));
  }

  bool dominated(const std::vector<Int>& v) const {
    for (const auto& s : maximal_) {
      if (weakly_above(s, v) && s != v) return true;
    }
    return false;
  }

  const std::vector<std::vector<Int>>& maximal() const noexcept { return maximal_; }

 private:
  static bool weakly_above(const std::vector<Int>& a, const std::vector<Int>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return false;
    }
    return true;
  }

  std::vector<std::vector<Int>> maximal_;
};

template <typename Int>
std::vector<Int> diagonal(const CrossValues<Int>& w) {
  std::vector<Int> x;
  x.reserve(w.agents());
  for (std::size_t i = 0; i < w.agents(); ++i) x.push_back(w(i, i));
  return x;
}

}  // namespace detail

// The Pareto frontier of an instance, computed once by exhaustive
// enumeration (n^m bounded by `cap`), for repeated efficiency queries.
class ParetoFrontier {
 public:
  explicit ParetoFrontier(const Instance& inst, Source source = Source::Utilities,
                          std::uint64_t cap = kDefaultEnumerationCap)
      : inst_(&inst) {
    detail::search_space_size(inst.num_agents(), inst.num_items(), cap);
    std::visit(
        [&](auto&& u) {
          using Int = typename std::decay_t<decltype(u)>::value_type;
          detail::Skyline<Int> sky;
          detail::walk_complete_allocations(u, [&](const std::vector<int>&, const detail::CrossValues<Int>& w) {
            sky.insert(detail::diagonal(w));
            return true;
          });
          state_ = State<Int>{std::move(u), std::move(sky)};
        },
        detail::scale_to_integers(inst.matrix(source)));
  }

  // True iff no complete allocation Pareto-dominates `alloc`.
  bool is_efficient(const Allocation& alloc) const {
    check_allocation(*inst_, alloc);
    return std::visit(
        [&](const auto& s) {
          auto w = make_cross(s.scaled, alloc);
          return !s.skyline.dominated(detail::diagonal(w));
        },
        state_);
  }

  std::size_t size() const {
    return std::visit([](const auto& s) { return s.skyline.maximal().size(); }, state_);
  }

  // Distinct utility vectors of the Pareto-efficient complete allocations.
  std::vector<std::vector<Rational>> maximal_utilities() const {
    return std::visit(
        [](const auto& s) {
          std::vector<std::vector<Rational>> out;
          for (const auto& x : s.skyline.maximal()) {
            auto& row = out.emplace_back();
            for (const auto& v : x) row.push_back(detail::to_rational(v, s.scaled.scale));
          }
          return out;
        },
        state_);
  }

 private:
  template <typename Int>
  struct State {
    detail::ScaledMatrix<Int> scaled;
    detail::Skyline<Int> skyline;
  };

  template <typename Int>
  static detail::CrossValues<Int> make_cross(const detail::ScaledMatrix<Int>& u, const Allocation& a) {
    return detail::CrossValues<Int>(u, a.owners());
  }

  const Instance* inst_;
  std::variant<State<std::int64_t>, State<mpz_class>> state_;
};

inline bool is_pareto_efficient(const Instance& inst, const Allocation& alloc,
                                std::uint64_t cap = kDefaultEnumerationCap) {
  return ParetoFrontier(inst, Source::Utilities, cap).is_efficient(alloc);
}

}  // namespace fairdiv
