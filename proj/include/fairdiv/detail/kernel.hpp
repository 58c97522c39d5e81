#pragma once

// Integer evaluation kernel. All three indices are ratios that are unchanged
// when every value is multiplied by the same positive constant, so an
// instance is rescaled once by the lcm of its denominators and evaluated in
// integers: int64 (with 128-bit cross products) when the totals provably fit,
// GMP integers otherwise.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fairdiv/error.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/rational.hpp"

namespace fairdiv {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

namespace detail {

inline mpz_class to_mpz(std::int64_t v) { return mpz_class(static_cast<signed long>(v)); }
inline const mpz_class& to_mpz(const mpz_class& v) { return v; }

inline double as_double(std::int64_t v) { return static_cast<double>(v); }
inline double as_double(const mpz_class& v) { return v.get_d(); }

template <typename Int>
Rational to_rational(const Int& value, const mpz_class& scale) {
  return Rational(to_mpz(value), scale);
}

template <typename Int>
struct ScaledMatrix {
  using value_type = Int;

  std::size_t agents = 0;
  std::size_t items = 0;
  std::vector<Int> values;  // row-major, original value * scale
  mpz_class scale = 1;

  const Int& operator()(std::size_t agent, std::size_t item) const { return values[agent * items + item]; }
};

using AnyScaled = std::variant<ScaledMatrix<std::int64_t>, ScaledMatrix<mpz_class>>;

inline AnyScaled scale_to_integers(const Matrix<Rational>& m) {
  mpz_class scale = 1;
  for (const auto& r : m.data()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), r.denominator().get_mpz_t());

  ScaledMatrix<mpz_class> big{m.rows(), m.cols(), {}, scale};
  big.values.reserve(m.data().size());
  mpz_class total = 0;
  for (const auto& r : m.data()) {
    mpz_class v = r.numerator() * (scale / r.denominator());
    total += v;
    big.values.push_back(std::move(v));
  }
  // Every numerator and denominator formed by the kernels is bounded by
  // 2 n^2 * total; keep that below 2^62 so cross products fit in 128 bits.
  mpz_class bound = total * 2 * static_cast<unsigned long>(m.rows()) * static_cast<unsigned long>(m.rows());
  mpz_class limit;
  mpz_ui_pow_ui(limit.get_mpz_t(), 2, 62);
  if (bound < limit) {
    ScaledMatrix<std::int64_t> small{m.rows(), m.cols(), {}, scale};
    small.values.reserve(big.values.size());
    for (const auto& v : big.values) small.values.push_back(static_cast<std::int64_t>(v.get_si()));
    return small;
  }
  return big;
}

// w(i, k) = value agent i places on the bundle currently held by agent k.
template <typename Int>
class CrossValues {
 public:
  explicit CrossValues(std::size_t agents) : n_(agents), w_(agents * agents, Int(0)) {}

  CrossValues(const ScaledMatrix<Int>& u, const std::vector<int>& owner) : CrossValues(u.agents) {
    for (std::size_t j = 0; j < owner.size(); ++j) {
      if (owner[j] != kUnallocated) add(u, j, static_cast<std::size_t>(owner[j]));
    }
  }

  std::size_t agents() const noexcept { return n_; }
  const Int& operator()(std::size_t i, std::size_t k) const { return w_[i * n_ + k]; }

  void add(const ScaledMatrix<Int>& u, std::size_t item, std::size_t agent) {
    for (std::size_t i = 0; i < n_; ++i) w_[i * n_ + agent] += u(i, item);
  }
  void remove(const ScaledMatrix<Int>& u, std::size_t item, std::size_t agent) {
    for (std::size_t i = 0; i < n_; ++i) w_[i * n_ + agent] -= u(i, item);
  }

 private:
  std::size_t n_;
  std::vector<Int> w_;
};

template <typename Int>
struct Fraction {
  Int num{0};
  Int den{1};
};

inline bool fraction_less(const Fraction<std::int64_t>& a, const Fraction<std::int64_t>& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}
inline bool fraction_less(const Fraction<mpz_class>& a, const Fraction<mpz_class>& b) {
  return a.num * b.den < b.num * a.den;
}
inline bool fraction_equal(const Fraction<std::int64_t>& a, const Fraction<std::int64_t>& b) {
  return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
}
inline bool fraction_equal(const Fraction<mpz_class>& a, const Fraction<mpz_class>& b) {
  return a.num * b.den == b.num * a.den;
}

template <typename Int>
Rational to_rational(const Fraction<Int>& f) {
  return Rational(to_mpz(f.num), to_mpz(f.den));
}

inline double to_double(const Fraction<std::int64_t>& f) {
  return static_cast<double>(static_cast<long double>(f.num) / static_cast<long double>(f.den));
}
inline double to_double(const Fraction<mpz_class>& f) { return mpq_class(f.num, f.den).get_d(); }

template <typename Int>
Fraction<Int> make_fraction(Int num, Int den) {
  if (den == 0) return {Int(0), Int(1)};
  return {std::move(num), std::move(den)};
}

template <typename Int>
Int abs_diff(const Int& a, const Int& b) {
  return a < b ? Int(b - a) : Int(a - b);
}

template <typename Int>
Fraction<Int> gini_fraction(const CrossValues<Int>& w) {
  const std::size_t n = w.agents();
  Int num(0);
  Int total(0);
  for (std::size_t i = 0; i < n; ++i) {
    total += w(i, i);
    for (std::size_t k = i + 1; k < n; ++k) num += abs_diff(w(i, i), w(k, k));
  }
  num *= 2;  // ordered pairs
  Int den = total * static_cast<long>(2 * n);
  return make_fraction(std::move(num), std::move(den));
}

template <typename Int>
Fraction<Int> subjective_gini_fraction(const CrossValues<Int>& w) {
  const std::size_t n = w.agents();
  Int num(0);
  Int total(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      total += w(i, k);
      if (k != i) num += abs_diff(w(i, i), w(i, k));
    }
  }
  Int den = total * 2;
  return make_fraction(std::move(num), std::move(den));
}

template <typename Int>
Fraction<Int> envy_fraction(const CrossValues<Int>& w, EnvyNormalization norm) {
  const std::size_t n = w.agents();
  Int num(0);
  Int total(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      total += w(i, k);
      if (w(i, i) < w(i, k)) num += w(i, k) - w(i, i);
    }
  }
  Int den = norm == EnvyNormalization::Half ? Int(total * 2) : total;
  return make_fraction(std::move(num), std::move(den));
}

template <typename Int>
Fraction<Int> index_fraction(IndexKind kind, EnvyNormalization norm, const CrossValues<Int>& w) {
  switch (kind) {
    case IndexKind::Gini: return gini_fraction(w);
    case IndexKind::SubjectiveGini: return subjective_gini_fraction(w);
    case IndexKind::Envy: return envy_fraction(w, norm);
  }
  return {};
}

template <typename Int>
bool envy_free(const CrossValues<Int>& w) {
  for (std::size_t i = 0; i < w.agents(); ++i) {
    for (std::size_t k = 0; k < w.agents(); ++k) {
      if (w(i, i) < w(i, k)) return false;
    }
  }
  return true;
}

// n^m, or SearchSpaceTooLarge when it exceeds `cap`.
inline std::uint64_t search_space_size(std::size_t agents, std::size_t items, std::uint64_t cap) {
  std::uint64_t size = 1;
  for (std::size_t j = 0; j < items; ++j) {
    if (agents != 0 && size > cap / agents) {
      throw Error(ErrorCode::SearchSpaceTooLarge, std::to_string(agents) + "^" + std::to_string(items) +
                                                      " allocations exceed the cap of " + std::to_string(cap));
    }
    size *= agents;
  }
  if (size > cap) {
    throw Error(ErrorCode::SearchSpaceTooLarge, std::to_string(size) + " allocations exceed the cap of " +
                                                    std::to_string(cap));
  }
  return size;
}

// Visits every complete allocation in odometer order (item 0 varies fastest),
// keeping `w` in sync incrementally. `visit(owner, w)` returns false to stop.
template <typename Int, typename Visit>
void walk_complete_allocations(const ScaledMatrix<Int>& u, Visit&& visit) {
  const std::size_t n = u.agents;
  const std::size_t m = u.items;
  std::vector<int> owner(m, 0);
  CrossValues<Int> w(u, owner);
  while (true) {
    if (!visit(static_cast<const std::vector<int>&>(owner), static_cast<const CrossValues<Int>&>(w))) return;
    std::size_t j = 0;
    for (; j < m; ++j) {
      w.remove(u, j, static_cast<std::size_t>(owner[j]));
      if (static_cast<std::size_t>(++owner[j]) < n) {
        w.add(u, j, static_cast<std::size_t>(owner[j]));
        break;
      }
      owner[j] = 0;
      w.add(u, j, 0);
    }
    if (j == m) return;
  }
}

}  // namespace detail
}  // namespace fairdiv
