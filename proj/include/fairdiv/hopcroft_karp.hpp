#pragma once

#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "fairdiv/error.hpp"

namespace fairdiv {

// Maximum-cardinality matching in a bipartite graph (left vertices
// 0..left-1, right vertices 0..right-1) in O(E sqrt(V)).
class BipartiteMatcher {
 public:
  static constexpr int kFree = -1;

  BipartiteMatcher(std::size_t left, std::size_t right) : adjacency_(left), right_(right) {}

  void add_edge(std::size_t u, std::size_t v) {
    if (u >= adjacency_.size() || v >= right_) {
      throw Error(ErrorCode::IndexOutOfRange, "edge endpoint outside the graph");
    }
    adjacency_[u].push_back(static_cast<int>(v));
  }

  // Returns the matching size; match_left()/match_right() hold the pairs.
  std::size_t solve() {
    const std::size_t left = adjacency_.size();
    match_left_.assign(left, kFree);
    match_right_.assign(right_, kFree);
    dist_.assign(left, 0);
    std::size_t size = 0;
    while (layer()) {
      for (std::size_t u = 0; u < left; ++u) {
        if (match_left_[u] == kFree && augment(static_cast<int>(u))) ++size;
      }
    }
    return size;
  }

  const std::vector<int>& match_left() const noexcept { return match_left_; }
  const std::vector<int>& match_right() const noexcept { return match_right_; }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  // BFS from all free left vertices; true if some free right vertex is reachable.
  bool layer() {
    std::queue<int> queue;
    for (std::size_t u = 0; u < adjacency_.size(); ++u) {
      if (match_left_[u] == kFree) {
        dist_[u] = 0;
        queue.push(static_cast<int>(u));
      } else {
        dist_[u] = kInf;
      }
    }
    bool found = false;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop();
      for (int v : adjacency_[u]) {
        int w = match_right_[v];
        if (w == kFree) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          queue.push(w);
        }
      }
    }
    return found;
  }

  bool augment(int u) {
    for (int v : adjacency_[u]) {
      int w = match_right_[v];
      if (w == kFree || (dist_[w] == dist_[u] + 1 && augment(w))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  std::vector<std::vector<int>> adjacency_;
  std::size_t right_;
  std::vector<int> match_left_;
  std::vector<int> match_right_;
  std::vector<int> dist_;
};

}  // namespace fairdiv
