#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"

namespace hawkes {

// Parent label of an event with no parent (an immigrant).
inline constexpr int kNoParent = -1;

// Latent genealogy over an event log. parent[i] is kNoParent for immigrants
// or the 0-based index of the triggering event, always < i. The redundant
// views (children lists, immigrants per dimension) are kept in sync by
// set_parent so samplers can read them without rescanning.
class BranchingState {
 public:
  BranchingState() = default;

  [[nodiscard]] int size() const noexcept {
    return static_cast<int>(parent_.size());
  }

  [[nodiscard]] int parent(int i) const { return parent_[i]; }
  [[nodiscard]] bool is_immigrant(int i) const { return parent_[i] < 0; }
  [[nodiscard]] const std::vector<int>& parents() const noexcept {
    return parent_;
  }

  // Direct children of event i, ascending.
  [[nodiscard]] const std::vector<int>& children(int i) const {
    return children_[i];
  }

  // Immigrant events in dimension m, ascending.
  [[nodiscard]] const std::vector<int>& immigrants_in_dim(int m) const {
    return immigrants_by_dim_[m];
  }

  [[nodiscard]] int immigrant_count() const noexcept {
    return immigrant_count_;
  }

  [[nodiscard]] std::vector<int> immigrant_counts_per_dim() const {
    std::vector<int> n(immigrants_by_dim_.size());
    for (std::size_t m = 0; m < immigrants_by_dim_.size(); ++m) {
      n[m] = static_cast<int>(immigrants_by_dim_[m].size());
    }
    return n;
  }

  // Events whose offspring reproduce at immigrant strength (label 0).
  [[nodiscard]] std::vector<int> immigrant_events() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
      if (is_immigrant(i)) out.push_back(i);
    }
    return out;
  }

  // Events that were themselves triggered.
  [[nodiscard]] std::vector<int> triggered_events() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
      if (!is_immigrant(i)) out.push_back(i);
    }
    return out;
  }

  // Relabels one event's parent and updates the derived views.
  void set_parent(int child, int new_parent, const EventLog& log) {
    check_label(child, new_parent);
    const int old_parent = parent_[child];
    if (old_parent == new_parent) return;
    if (old_parent < 0) {
      detach(immigrants_by_dim_[log.dim(child)], child);
      --immigrant_count_;
    } else {
      detach(children_[old_parent], child);
    }
    if (new_parent < 0) {
      attach(immigrants_by_dim_[log.dim(child)], child);
      ++immigrant_count_;
    } else {
      attach(children_[new_parent], child);
    }
    parent_[child] = new_parent;
  }

  friend BranchingState rebuild_child_sets(const EventLog& log,
                                           const std::vector<int>& parent);

 private:
  void check_label(int child, int p) const {
    if (child < 0 || child >= size()) {
      throw contract_error("branching child index out of range");
    }
    if (p >= child || (p < 0 && p != kNoParent)) {
      throw structural_error("parent of event " + std::to_string(child + 1) +
                             " must be an earlier event or none");
    }
  }

  static void detach(std::vector<int>& list, int value) {
    auto it = std::lower_bound(list.begin(), list.end(), value);
    if (it == list.end() || *it != value) {
      throw structural_error("branching views out of sync");
    }
    list.erase(it);
  }

  static void attach(std::vector<int>& list, int value) {
    list.insert(std::lower_bound(list.begin(), list.end(), value), value);
  }

  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> immigrants_by_dim_;
  int immigrant_count_{0};
};

// Builds the full state from bare parent labels, validating them against the
// log. This is the only constructor path, so any BranchingState in existence
// satisfies: parent < child, children lists partition the triggered events,
// and immigrant lists partition the rest by dimension.
inline BranchingState rebuild_child_sets(const EventLog& log,
                                         const std::vector<int>& parent) {
  if (static_cast<int>(parent.size()) != log.size()) {
    throw contract_error("parent vector length must match the event log");
  }
  BranchingState state;
  state.parent_ = parent;
  state.children_.assign(parent.size(), {});
  state.immigrants_by_dim_.assign(log.num_dims(), {});
  for (int i = 0; i < log.size(); ++i) {
    const int p = parent[i];
    if (p >= i || (p < 0 && p != kNoParent)) {
      throw structural_error("parent of event " + std::to_string(i + 1) +
                             " must be an earlier event or none");
    }
    if (p < 0) {
      state.immigrants_by_dim_[log.dim(i)].push_back(i);
      ++state.immigrant_count_;
    } else {
      state.children_[p].push_back(i);
    }
  }
  return state;
}

// Every event starts as an immigrant; the standard chain initialiser.
inline BranchingState all_immigrant_state(const EventLog& log) {
  return rebuild_child_sets(log,
                            std::vector<int>(log.size(), kNoParent));
}

}  // namespace hawkes
