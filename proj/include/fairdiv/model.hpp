#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairdiv/error.hpp"
#include "fairdiv/rational.hpp"

namespace fairdiv {

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

enum class IndexKind { Gini, SubjectiveGini, Envy };

inline constexpr IndexKind kAllIndexKinds[] = {IndexKind::Gini, IndexKind::SubjectiveGini,
                                               IndexKind::Envy};

constexpr std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::Gini: return "gini";
    case IndexKind::SubjectiveGini: return "subjgini";
    case IndexKind::Envy: return "envy";
  }
  return "?";
}

inline IndexKind parse_index_kind(std::string_view name) {
  for (IndexKind k : kAllIndexKinds) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown index '" + std::string(name) + "'");
}

// Denominator of the envy index. Half uses 2 * sum_i sum_j u_i(A_j), which
// keeps envy <= subjective Gini; Full drops the factor 2.
enum class EnvyNormalization { Half, Full };

constexpr std::string_view to_string(EnvyNormalization norm) {
  return norm == EnvyNormalization::Half ? "half" : "full";
}

inline EnvyNormalization parse_envy_normalization(std::string_view name) {
  if (name == "half") return EnvyNormalization::Half;
  if (name == "full") return EnvyNormalization::Full;
  throw Error(ErrorCode::InvalidArgument, "unknown envy normalization '" + std::string(name) + "'");
}

// Which matrix an evaluation reads. Utilities falls back to the bids when the
// instance carries no separate true-utility matrix (sincere play).
enum class Source { Bids, Utilities };

inline constexpr int kUnallocated = -1;

// owner[j] is the agent holding item j, or kUnallocated.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(std::size_t items) : owner_(items, kUnallocated) {}
  explicit Allocation(std::vector<int> owner) : owner_(std::move(owner)) {}

  std::size_t num_items() const noexcept { return owner_.size(); }
  int owner(std::size_t item) const { return owner_.at(item); }
  void assign(std::size_t item, int agent) { owner_.at(item) = agent; }
  const std::vector<int>& owners() const noexcept { return owner_; }

  bool is_complete() const {
    for (int o : owner_) {
      if (o == kUnallocated) return false;
    }
    return true;
  }

  std::vector<std::size_t> bundle(int agent) const {
    std::vector<std::size_t> items;
    for (std::size_t j = 0; j < owner_.size(); ++j) {
      if (owner_[j] == agent) items.push_back(j);
    }
    return items;
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
  friend auto operator<=>(const Allocation&, const Allocation&) = default;

 private:
  std::vector<int> owner_;
};

// A fair-division problem: n agents, m items, the public bid matrix and an
// optional private utility matrix.
class Instance {
 public:
  Instance() = default;

  // Validating constructor; throws DimensionMismatch / NegativeValue.
  Instance(Matrix<Rational> bids, std::optional<Matrix<Rational>> utilities = std::nullopt,
           std::vector<std::string> agent_names = {}, std::vector<std::string> item_names = {})
      : bids_(std::move(bids)),
        utilities_(std::move(utilities)),
        agent_names_(std::move(agent_names)),
        item_names_(std::move(item_names)) {
    if (bids_.rows() < 1) throw Error(ErrorCode::DimensionMismatch, "an instance needs at least one agent");
    check_matrix(bids_, "bids");
    if (utilities_) {
      if (utilities_->rows() != bids_.rows() || utilities_->cols() != bids_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "utilities must have the same shape as bids");
      }
      check_matrix(*utilities_, "utilities");
    }
    if (!agent_names_.empty() && agent_names_.size() != bids_.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "agent name count differs from bid rows");
    }
    if (!item_names_.empty() && item_names_.size() != bids_.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "item name count differs from bid columns");
    }
  }

  static Instance from_rows(const std::vector<std::vector<Rational>>& rows) {
    std::size_t m = rows.empty() ? 0 : rows.front().size();
    Matrix<Rational> bids(rows.size(), m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m) throw Error(ErrorCode::DimensionMismatch, "ragged bid rows");
      for (std::size_t j = 0; j < m; ++j) bids(i, j) = rows[i][j];
    }
    return Instance(std::move(bids));
  }

  std::size_t num_agents() const noexcept { return bids_.rows(); }
  std::size_t num_items() const noexcept { return bids_.cols(); }

  const Matrix<Rational>& bids() const noexcept { return bids_; }
  bool has_true_utilities() const noexcept { return utilities_.has_value(); }
  const Matrix<Rational>& utilities() const noexcept { return utilities_ ? *utilities_ : bids_; }
  const Matrix<Rational>& matrix(Source source) const {
    return source == Source::Bids ? bids_ : utilities();
  }

  const Rational& bid(std::size_t agent, std::size_t item) const { return bids_(agent, item); }
  const Rational& utility(std::size_t agent, std::size_t item) const { return utilities()(agent, item); }

  const std::vector<std::string>& agent_names() const noexcept { return agent_names_; }
  const std::vector<std::string>& item_names() const noexcept { return item_names_; }

  std::string agent_label(std::size_t i) const {
    return agent_names_.empty() ? "a" + std::to_string(i + 1) : agent_names_[i];
  }
  std::string item_label(std::size_t j) const {
    return item_names_.empty() ? "o" + std::to_string(j + 1) : item_names_[j];
  }

  // The same problem after `agent` declares `report` instead of its current
  // bids. True utilities are pinned to the pre-report matrix.
  Instance with_report(std::size_t agent, std::span<const Rational> report) const {
    if (agent >= num_agents()) throw Error(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent));
    if (report.size() != num_items()) throw Error(ErrorCode::DimensionMismatch, "report length differs from item count");
    Matrix<Rational> bids = bids_;
    for (std::size_t j = 0; j < num_items(); ++j) bids(agent, j) = report[j];
    return Instance(std::move(bids), utilities(), agent_names_, item_names_);
  }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  static void check_matrix(const Matrix<Rational>& m, std::string_view what) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (m(i, j).sign() < 0) {
          throw Error(ErrorCode::NegativeValue, std::string(what) + "[" + std::to_string(i) + "][" +
                                                    std::to_string(j) + "] = " + m(i, j).str());
        }
      }
    }
  }

  Matrix<Rational> bids_;
  std::optional<Matrix<Rational>> utilities_;
  std::vector<std::string> agent_names_;
  std::vector<std::string> item_names_;
};

// Instance data as read from a file, before any numeric validation.
struct RawInstance {
  std::size_t agents = 0;
  std::size_t items = 0;
  std::vector<std::string> agent_names;
  std::vector<std::string> item_names;
  std::vector<std::vector<std::string>> bids;
  std::optional<std::vector<std::vector<std::string>>> utilities;
};

namespace detail {

inline Matrix<Rational> parse_matrix(const std::vector<std::vector<std::string>>& rows, std::size_t n,
                                     std::size_t m, std::string_view what) {
  if (rows.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(rows.size()) +
                                                  " rows, expected " + std::to_string(n));
  }
  Matrix<Rational> out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) {
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + " row " + std::to_string(i) + " has " +
                                                    std::to_string(rows[i].size()) + " entries, expected " +
                                                    std::to_string(m));
    }
    for (std::size_t j = 0; j < m; ++j) out(i, j) = Rational::parse(rows[i][j]);
  }
  return out;
}

}  // namespace detail

inline Instance validate_instance(const RawInstance& raw) {
  if (!raw.agent_names.empty() && raw.agent_names.size() != raw.agents) {
    throw Error(ErrorCode::DimensionMismatch, "agent names do not match agent count");
  }
  if (!raw.item_names.empty() && raw.item_names.size() != raw.items) {
    throw Error(ErrorCode::DimensionMismatch, "item names do not match item count");
  }
  auto bids = detail::parse_matrix(raw.bids, raw.agents, raw.items, "bids");
  std::optional<Matrix<Rational>> utilities;
  if (raw.utilities) utilities = detail::parse_matrix(*raw.utilities, raw.agents, raw.items, "utilities");
  return Instance(std::move(bids), std::move(utilities), raw.agent_names, raw.item_names);
}

// Throws unless `alloc` has one entry per item and every owner is an agent
// of `inst` or kUnallocated.
inline void check_allocation(const Instance& inst, const Allocation& alloc) {
  if (alloc.num_items() != inst.num_items()) {
    throw Error(ErrorCode::DimensionMismatch, "allocation has " + std::to_string(alloc.num_items()) +
                                                  " entries for " + std::to_string(inst.num_items()) + " items");
  }
  for (int o : alloc.owners()) {
    if (o != kUnallocated && (o < 0 || static_cast<std::size_t>(o) >= inst.num_agents())) {
      throw Error(ErrorCode::IndexOutOfRange, "owner " + std::to_string(o) + " is not an agent");
    }
  }
}

inline Rational bundle_utility(const Instance& inst, std::size_t agent, std::span<const std::size_t> bundle,
                               Source source = Source::Utilities) {
  if (agent >= inst.num_agents()) throw Error(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent));
  const auto& values = inst.matrix(source);
  Rational total;
  for (std::size_t j : bundle) {
    if (j >= inst.num_items()) throw Error(ErrorCode::IndexOutOfRange, "item " + std::to_string(j));
    total += values(agent, j);
  }
  return total;
}

}  // namespace fairdiv
