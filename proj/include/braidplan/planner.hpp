#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "braidplan/braid.hpp"
#include "braidplan/error.hpp"
#include "braidplan/geometry.hpp"

namespace braidplan {

// Ranks of every robot on the two grid axes (0-based). Each rank vector is a
// bijection robots -> ranks, i.e. one robot per row and per column.
struct PermutationState {
  std::vector<int> pi1;
  std::vector<int> pi2;

  PermutationState() = default;
  PermutationState(std::vector<int> a, std::vector<int> b) : pi1(std::move(a)), pi2(std::move(b)) {}

  static PermutationState identity(int n) {
    PermutationState s;
    for (int i = 0; i < n; ++i) {
      s.pi1.push_back(i);
      s.pi2.push_back(i);
    }
    return s;
  }

  int size() const { return static_cast<int>(pi1.size()); }
  const std::vector<int>& ranks(int axis) const { return axis == 0 ? pi1 : pi2; }
  std::vector<int>& ranks(int axis) { return axis == 0 ? pi1 : pi2; }
  int rank(int axis, int robot) const { return ranks(axis)[static_cast<std::size_t>(robot)]; }

  bool valid() const {
    if (pi1.size() != pi2.size() || pi1.empty()) return false;
    for (const auto* v : {&pi1, &pi2}) {
      std::vector<char> seen(v->size(), 0);
      for (int r : *v) {
        if (r < 0 || r >= size() || seen[static_cast<std::size_t>(r)]) return false;
        seen[static_cast<std::size_t>(r)] = 1;
      }
    }
    return true;
  }

  // robot occupying each rank on `axis`
  std::vector<int> inverse(int axis) const {
    std::vector<int> inv(pi1.size());
    for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(rank(axis, i))] = i;
    return inv;
  }

  friend bool operator==(const PermutationState&, const PermutationState&) = default;
};

// Exchange of the robots at ranks k and k+1 on one axis; `left` holds rank k.
struct SwapAction {
  int axis = 0;
  int left = 0;
  int right = 1;
  friend bool operator==(const SwapAction&, const SwapAction&) = default;
};

inline std::vector<SwapAction> action_space(const PermutationState& perms) {
  std::vector<SwapAction> actions;
  const int n = perms.size();
  actions.reserve(static_cast<std::size_t>(2 * std::max(0, n - 1)));
  for (int axis = 0; axis < 2; ++axis) {
    const auto inv = perms.inverse(axis);
    for (int k = 0; k + 1 < n; ++k)
      actions.push_back({axis, inv[static_cast<std::size_t>(k)], inv[static_cast<std::size_t>(k + 1)]});
  }
  return actions;
}

inline PermutationState apply_action(PermutationState perms, const SwapAction& a) {
  auto& r = perms.ranks(a.axis);
  std::swap(r[static_cast<std::size_t>(a.left)], r[static_cast<std::size_t>(a.right)]);
  return perms;
}

// The two perpendicular projection axes the grid is built on, plus the sign
// relating depth on one axis to the projected coordinate of the other:
// depth_l = orientation(l) * u_other.
class GridAxes {
 public:
  GridAxes() : GridAxes(ProjectionAxis(0.0), ProjectionAxis(std::numbers::pi / 2)) {}
  GridAxes(ProjectionAxis first, ProjectionAxis second) : axes_{first, second} {
    const double c = std::cos(first.angle() - second.angle());
    if (std::abs(c) > 1e-9) throw ConfigError("grid axes must be perpendicular");
    orientation_[0] = std::sin(first.angle() - second.angle()) > 0 ? 1 : -1;
    orientation_[1] = -orientation_[0];
  }

  const ProjectionAxis& axis(int l) const { return axes_[static_cast<std::size_t>(l)]; }
  int orientation(int l) const { return orientation_[static_cast<std::size_t>(l)]; }

 private:
  std::array<ProjectionAxis, 2> axes_;
  std::array<int, 2> orientation_{};
};

// Letter contributed to the braid of `subset` (sorted robot ids, size 2 or 3)
// by a swap. The swapping robots are grid neighbours on the swap axis and hold
// distinct ranks on the other axis, which is the depth direction at the swap.
inline ElementaryBraid braid_letter_for_action(const SwapAction& action, const PermutationState& perms,
                                               std::span<const int> subset, const GridAxes& axes) {
  auto contains = [&](int r) { return std::find(subset.begin(), subset.end(), r) != subset.end(); };
  if ((subset.size() != 2 && subset.size() != 3) || !contains(action.left) || !contains(action.right))
    throw InputError("swap pair is not inside the braid subset");
  const int other = 1 - action.axis;
  const int depth_gap = axes.orientation(action.axis) * (perms.rank(other, action.left) - perms.rank(other, action.right));
  const int sign = depth_gap > 0 ? 1 : -1;
  int index = 1;
  const int left_rank = perms.rank(action.axis, action.left);
  for (int r : subset)
    if (r != action.left && r != action.right && perms.rank(action.axis, r) < left_rank) ++index;
  return {index, sign};
}

// bias * (sum of per-robot Manhattan rank distances) / 2
inline double heuristic(const PermutationState& perms, const PermutationState& targets, double bias) {
  long total = 0;
  for (int i = 0; i < perms.size(); ++i)
    total += std::abs(perms.pi1[static_cast<std::size_t>(i)] - targets.pi1[static_cast<std::size_t>(i)]) +
             std::abs(perms.pi2[static_cast<std::size_t>(i)] - targets.pi2[static_cast<std::size_t>(i)]);
  return bias * static_cast<double>(total) / 2.0;
}

// Lower bound on the swaps a team still needs. Every action exchanges one pair
// on one axis, so summing per-pair minima is admissible. A pair's minimum
// accounts for its winding: with exponent sums confined to [-1, 1] some pairs
// must turn the long way round (3 swaps instead of 1, 2 instead of 0).
class PairWindingBound {
 public:
  explicit PairWindingBound(const GridAxes& axes) {
    // state = (o1, o2, s1, s2); o = 1 when the lower id holds the higher rank
    auto encode = [](int o1, int o2, int s1, int s2) { return ((o1 * 2 + o2) * 3 + (s1 + 1)) * 3 + (s2 + 1); };
    std::array<std::array<int, 2>, 36> next{};
    for (int o1 = 0; o1 < 2; ++o1)
      for (int o2 = 0; o2 < 2; ++o2)
        for (int s1 = -1; s1 <= 1; ++s1)
          for (int s2 = -1; s2 <= 1; ++s2) {
            const std::array<int, 2> o{o1 ? 1 : -1, o2 ? 1 : -1};
            std::array<int, 2> s{s1, s2};
            for (int l = 0; l < 2; ++l) {
              const int sign = -o[static_cast<std::size_t>(l)] * axes.orientation(l) * o[static_cast<std::size_t>(1 - l)];
              const int ns = s[static_cast<std::size_t>(l)] + sign;
              if (ns < -1 || ns > 1) {
                next[static_cast<std::size_t>(encode(o1, o2, s1, s2))][static_cast<std::size_t>(l)] = -1;
                continue;
              }
              auto t = s;
              t[static_cast<std::size_t>(l)] = ns;
              next[static_cast<std::size_t>(encode(o1, o2, s1, s2))][static_cast<std::size_t>(l)] =
                  encode(l == 0 ? 1 - o1 : o1, l == 1 ? 1 - o2 : o2, t[0], t[1]);
            }
          }
    // shortest distance from each state to each goal orientation pair
    for (int goal = 0; goal < 4; ++goal) {
      auto& d = dist_[static_cast<std::size_t>(goal)];
      d.fill(kUnreachable);
      for (int st = 0; st < 36; ++st)
        if (st / 9 == goal) d[static_cast<std::size_t>(st)] = 0;
      // reverse edges by repeated relaxation; the graph is tiny
      for (bool changed = true; changed;) {
        changed = false;
        for (int st = 0; st < 36; ++st)
          for (int l = 0; l < 2; ++l) {
            const int to = next[static_cast<std::size_t>(st)][static_cast<std::size_t>(l)];
            if (to < 0 || d[static_cast<std::size_t>(to)] == kUnreachable) continue;
            if (d[static_cast<std::size_t>(to)] + 1 < d[static_cast<std::size_t>(st)]) {
              d[static_cast<std::size_t>(st)] = d[static_cast<std::size_t>(to)] + 1;
              changed = true;
            }
          }
      }
    }
  }

  static constexpr int kUnreachable = 1 << 20;

  // Minimum swaps of robots i < j given their ranks and exponent sums.
  int pair(const PermutationState& perms, const PermutationState& targets, int i, int j, int s1, int s2) const {
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    const int o1 = perms.pi1[ui] > perms.pi1[uj], o2 = perms.pi2[ui] > perms.pi2[uj];
    const int g1 = targets.pi1[ui] > targets.pi1[uj], g2 = targets.pi2[ui] > targets.pi2[uj];
    const int st = ((o1 * 2 + o2) * 3 + (s1 + 1)) * 3 + (s2 + 1);
    return dist_[static_cast<std::size_t>(g1 * 2 + g2)][static_cast<std::size_t>(st)];
  }

  // pair_sums uses the BraidTable layout (axis-major, colex within)
  long operator()(const PermutationState& perms, const PermutationState& targets,
                  std::span<const std::int8_t> pair_sums) const {
    const int n = perms.size();
    const std::size_t npairs = pair_count(n);
    long total = 0;
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i) {
        const auto slot = pair_rank(i, j);
        total += pair(perms, targets, i, j, pair_sums[slot], pair_sums[npairs + slot]);
      }
    return total;
  }

 private:
  std::array<std::array<int, 36>, 4> dist_{};
};

// Interns triplet braid states by Burau matrix and memoizes checked updates,
// so search nodes carry small ids and equal braids share one state.
class TripletStateCache {
 public:
  static constexpr std::uint32_t kRejected = std::numeric_limits<std::uint32_t>::max();

  TripletStateCache() { intern(Braid3State{}); }

  std::uint32_t intern(const Braid3State& s) {
    auto [it, inserted] = index_.try_emplace(s.canonical_matrix(), static_cast<std::uint32_t>(states_.size()));
    if (inserted) {
      states_.push_back(s);
      transitions_.push_back({kUnknown, kUnknown, kUnknown, kUnknown});
    }
    return it->second;
  }

  const Braid3State& state(std::uint32_t id) const { return states_[id]; }
  std::size_t size() const { return states_.size(); }

  // Id after appending tau, or kRejected when the result is a forbidden braid.
  std::uint32_t step(std::uint32_t id, ElementaryBraid tau) {
    const std::size_t slot = static_cast<std::size_t>((tau.index - 1) * 2 + (tau.sign > 0 ? 0 : 1));
    std::uint32_t& cached = transitions_[id][slot];
    if (cached != kUnknown) return cached;
    auto upd = update_check_3braid(states_[id], tau);
    const std::uint32_t next = upd.valid ? intern(upd.state) : kRejected;
    transitions_[id][slot] = next;  // intern() may have reallocated
    return next;
  }

 private:
  static constexpr std::uint32_t kUnknown = kRejected - 1;

  std::vector<Braid3State> states_;
  std::vector<std::array<std::uint32_t, 4>> transitions_;
  std::unordered_map<LaurentMatrix, std::uint32_t> index_;
};

// Search node: grid positions plus every pair/triplet braid on both axes.
// Layout of the braid vectors matches BraidTable (axis-major, colex within).
namespace detail {
inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
// slot kinds: 0 = pi1, 1 = pi2, 2 = pair sums, 3 = triplet ids
inline std::uint64_t zobrist(std::uint64_t kind, std::size_t slot, std::uint64_t value) {
  return splitmix((kind << 60) ^ (static_cast<std::uint64_t>(slot) << 32) ^ value);
}
}  // namespace detail

struct GridNode {
  PermutationState perms;
  std::vector<std::int8_t> pair_sums;
  std::vector<std::uint32_t> triplet_ids;
  int g = 0;
  double h = 0.0;
  // XOR of per-slot hashes, maintained by apply_checked
  std::uint64_t perm_hash = 0;
  std::uint64_t braid_hash = 0;

  void rehash() {
    perm_hash = braid_hash = 0;
    for (std::size_t i = 0; i < perms.pi1.size(); ++i) {
      perm_hash ^= detail::zobrist(0, i, static_cast<std::uint64_t>(perms.pi1[i]));
      perm_hash ^= detail::zobrist(1, i, static_cast<std::uint64_t>(perms.pi2[i]));
    }
    for (std::size_t i = 0; i < pair_sums.size(); ++i)
      braid_hash ^= detail::zobrist(2, i, static_cast<std::uint64_t>(pair_sums[i] + 2));
    for (std::size_t i = 0; i < triplet_ids.size(); ++i) braid_hash ^= detail::zobrist(3, i, triplet_ids[i]);
  }

  static GridNode from_table(const PermutationState& perms, const BraidTable& table, TripletStateCache& cache) {
    GridNode node;
    node.perms = perms;
    for (const auto& p : table.pairs()) node.pair_sums.push_back(static_cast<std::int8_t>(p.exponent_sum));
    for (const auto& t : table.triplets()) node.triplet_ids.push_back(cache.intern(t));
    node.rehash();
    return node;
  }

  BraidTable braids(const TripletStateCache& cache) const {
    BraidTable table(perms.size(), 2);
    for (int axis = 0; axis < 2; ++axis) {
      for (int j = 1; j < perms.size(); ++j)
        for (int i = 0; i < j; ++i)
          table.pair(axis, i, j).exponent_sum = pair_sums[table.pair_slot(axis, i, j)];
      for (int k = 2; k < perms.size(); ++k)
        for (int j = 1; j < k; ++j)
          for (int i = 0; i < j; ++i)
            table.triplet(axis, i, j, k) = cache.state(triplet_ids[table.triplet_slot(axis, i, j, k)]);
    }
    return table;
  }

  // 64-bit hash of the identity: permutations, plus braid classes when asked.
  std::uint64_t fingerprint(bool with_braids = true) const {
    return with_braids ? perm_hash ^ detail::splitmix(braid_hash) : perm_hash;
  }

  bool same_identity(const GridNode& other, bool with_braids = true) const {
    return perms == other.perms && (!with_braids || (pair_sums == other.pair_sums && triplet_ids == other.triplet_ids));
  }
};

// Applies one swap in place, updating the swapped pair's braid and the n-2
// triplets containing it on the swap axis. Returns false (node left partially
// updated) when any of them becomes forbidden. Letters follow
// braid_letter_for_action: the sign depends only on the swapping pair, the
// index on whether the third robot ranks below the left one.
inline bool apply_checked(GridNode& node, const SwapAction& action, TripletStateCache& cache, const GridAxes& axes,
                          bool check_braids) {
  const auto axis = static_cast<std::size_t>(action.axis);
  const auto ul = static_cast<std::size_t>(action.left), ur = static_cast<std::size_t>(action.right);
  auto& ranks = node.perms.ranks(action.axis);
  if (check_braids) {
    const int n = node.perms.size();
    const std::size_t npairs = pair_count(n), ntrip = triplet_count(n);
    const auto& other = node.perms.ranks(1 - action.axis);
    const int sign = axes.orientation(action.axis) * (other[ul] - other[ur]) > 0 ? 1 : -1;
    const int lo = std::min(action.left, action.right), hi = std::max(action.left, action.right);
    const std::size_t ps = axis * npairs + pair_rank(lo, hi);
    const int next = node.pair_sums[ps] + sign;
    if (next > 1 || next < -1) return false;
    node.braid_hash ^= detail::zobrist(2, ps, static_cast<std::uint64_t>(node.pair_sums[ps] + 2)) ^
                       detail::zobrist(2, ps, static_cast<std::uint64_t>(next + 2));
    node.pair_sums[ps] = static_cast<std::int8_t>(next);
    const int left_rank = ranks[ul];
    for (int c = 0; c < n; ++c) {
      if (c == lo || c == hi) continue;
      std::array<int, 3> trip{lo, hi, c};
      BraidTable::sort3(trip[0], trip[1], trip[2]);
      const ElementaryBraid letter{ranks[static_cast<std::size_t>(c)] < left_rank ? 2 : 1, sign};
      const std::size_t ts = axis * ntrip + triplet_rank(trip[0], trip[1], trip[2]);
      const auto old = node.triplet_ids[ts];
      const auto id = cache.step(old, letter);
      if (id == TripletStateCache::kRejected) return false;
      node.braid_hash ^= detail::zobrist(3, ts, old) ^ detail::zobrist(3, ts, id);
      node.triplet_ids[ts] = id;
    }
  }
  node.perm_hash ^= detail::zobrist(axis, ul, static_cast<std::uint64_t>(ranks[ul])) ^
                    detail::zobrist(axis, ur, static_cast<std::uint64_t>(ranks[ur]));
  std::swap(ranks[ul], ranks[ur]);
  node.perm_hash ^= detail::zobrist(axis, ul, static_cast<std::uint64_t>(ranks[ul])) ^
                    detail::zobrist(axis, ur, static_cast<std::uint64_t>(ranks[ur]));
  ++node.g;
  return true;
}

struct PlanLimits {
  std::size_t max_expansions = 2'000'000;
  double bias = 5.0;
  bool check_braids = true;
  // Closed-list identity includes the braid classes. When false only the
  // permutations are compared, which prunes braid histories (incomplete).
  bool key_on_braids = true;
  // Heuristic counts the swaps forced by pair winding instead of the plain
  // Manhattan estimate. Only used when braids are checked.
  bool winding_heuristic = true;
  // Replaces the pair count by the triplet sub-problem bound (n >= 3).
  bool triplet_heuristic = true;
};

struct SearchStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t rejected_by_braid = 0;
  std::size_t peak_open = 0;
  double root_bound = 0.0;  // unbiased heuristic at the start node
};

struct PlanResult {
  std::vector<PermutationState> path;  // start .. target inclusive; empty when no path was found
  std::vector<SwapAction> actions;
  BraidTable final_braids;
  SearchStats stats;

  bool found() const { return !path.empty(); }
};

inline PlanResult plan(const PermutationState& start, const PermutationState& target, const BraidTable& initial,
                       const PlanLimits& limits = {}, const GridAxes& axes = {});

// Exact distance of each three-robot sub-problem (its own braids, both axes)
// to its target order, memoized. A swap touches n-2 triplets, so the sum over
// triplets divided by n-2 is admissible; each triplet's distance is at least
// its three pair distances, so the bound dominates the pair count.
class TripletBound {
 public:
  TripletBound(const GridAxes& axes, const TripletStateCache& cache, std::size_t inner_limit = 20000)
      : axes_(axes), pairs_(axes), cache_(cache), inner_limit_(inner_limit) {}

  int triplet(const GridNode& node, const PermutationState& targets, int a, int b, int c);

  // Sum over all triplets; fills `parts` (indexed by triplet rank) when given.
  long total(const GridNode& node, const PermutationState& targets, std::vector<int>* parts = nullptr) {
    long sum = 0;
    const int n = node.perms.size();
    if (parts) parts->assign(triplet_count(n), 0);
    for (int k = 2; k < n; ++k)
      for (int j = 1; j < k; ++j)
        for (int i = 0; i < j; ++i) {
          const int d = triplet(node, targets, i, j, k);
          if (parts) (*parts)[triplet_rank(i, j, k)] = d;
          sum += d;
        }
    return sum;
  }

  // total() after `action` turned the parent into `child`; only triplets
  // holding both swapped robots change.
  long total_after(long parent_total, std::span<const int> parent_parts, const GridNode& child,
                   const SwapAction& action, const PermutationState& targets) {
    const int lo = std::min(action.left, action.right), hi = std::max(action.left, action.right);
    long sum = parent_total;
    for (int c = 0; c < child.perms.size(); ++c) {
      if (c == lo || c == hi) continue;
      std::array<int, 3> t{lo, hi, c};
      BraidTable::sort3(t[0], t[1], t[2]);
      sum += triplet(child, targets, t[0], t[1], t[2]) - parent_parts[triplet_rank(t[0], t[1], t[2])];
    }
    return sum;
  }

  std::size_t memo_size() const { return memo_.size(); }

 private:
  struct Key {
    std::uint64_t low;
    std::uint64_t high;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return static_cast<std::size_t>(k.low * 0x9e3779b97f4a7c15ULL ^ (k.high + (k.low >> 29))); }
  };

  const GridAxes& axes_;
  PairWindingBound pairs_;
  const TripletStateCache& cache_;
  std::size_t inner_limit_;
  std::unordered_map<Key, int, KeyHash> memo_;
};

// Heuristic evaluation shared by expand() and plan(); h excludes the bias.
class HeuristicModel {
 public:
  HeuristicModel(const PermutationState& targets, const PlanLimits& limits, const GridAxes& axes,
                 const TripletStateCache& cache)
      : targets_(targets), limits_(limits), winding_(axes), triplets_(axes, cache) {
    const int n = targets.size();
    mode_ = !limits.check_braids || !limits.winding_heuristic ? Mode::manhattan
            : limits.triplet_heuristic && n >= 3             ? Mode::triplet
                                                              : Mode::winding;
  }

  // Prepares per-parent state; returns the unbiased value of `node`.
  double prepare(const GridNode& node) {
    parent_total_ = mode_ == Mode::triplet ? triplets_.total(node, targets_, &parent_parts_) : 0;
    return raw(node, parent_total_);
  }

  double child(const GridNode& child, const SwapAction& action) {
    if (mode_ == Mode::triplet) return raw(child, triplets_.total_after(parent_total_, parent_parts_, child, action, targets_));
    return raw(child, 0);
  }

  double bias() const { return limits_.bias; }

 private:
  enum class Mode { manhattan, winding, triplet };

  double raw(const GridNode& node, long trip_total) const {
    switch (mode_) {
      case Mode::manhattan: return heuristic(node.perms, targets_, 1.0);
      case Mode::winding: return static_cast<double>(winding_(node.perms, targets_, node.pair_sums));
      case Mode::triplet: return static_cast<double>(trip_total) / (node.perms.size() - 2);
    }
    return 0.0;
  }

  const PermutationState& targets_;
  const PlanLimits& limits_;
  PairWindingBound winding_;
  TripletBound triplets_;
  Mode mode_;
  long parent_total_ = 0;
  std::vector<int> parent_parts_;
};

struct Expansion {
  std::vector<std::pair<SwapAction, GridNode>> children;
  std::size_t rejected = 0;
};

// Children of `node` over the full action space; a child is dropped as soon as
// one of its updated braids becomes forbidden.
inline Expansion expand(const GridNode& node, TripletStateCache& cache, const GridAxes& axes, const PlanLimits& limits,
                        HeuristicModel& model) {
  Expansion out;
  model.prepare(node);
  for (const auto& action : action_space(node.perms)) {
    GridNode child = node;
    if (!apply_checked(child, action, cache, axes, limits.check_braids)) {
      ++out.rejected;
      continue;
    }
    child.h = model.bias() * model.child(child, action);
    out.children.emplace_back(action, std::move(child));
  }
  return out;
}

// Best-first search over the permutation grid ordered by g + h (ties: lower h,
// then creation order), with a closed list keyed on exact node identity.
// Records keep only a fingerprint, parent and action; full states are
// rebuilt by replay from the start when needed.
inline PlanResult plan(const PermutationState& start, const PermutationState& target, const BraidTable& initial,
                       const PlanLimits& limits, const GridAxes& axes) {
  if (!start.valid() || !target.valid() || start.size() != target.size())
    throw InputError("plan: start and target must be bijective permutations of the same size");
  if (start.size() > 120) throw InputError("plan: team too large");
  if (initial.robots() != start.size() || initial.axes() != 2)
    throw InputError("plan: initial braid table does not match the team");
  if (initial.any_violated()) throw InputError("plan: initial braids are already violated");
  if (!(limits.bias > 0.0)) throw InputError("plan: bias must be positive");

  TripletStateCache cache;
  PlanResult result;
  HeuristicModel model(target, limits, axes, cache);

  struct Record {
    std::uint64_t fingerprint;
    std::uint32_t parent;
    std::uint8_t axis, left, right;
    bool closed;
    int g;
  };
  struct OpenEntry {
    double f;
    double h;
    std::uint64_t seq;
    std::uint32_t record;
    int g;
  };
  struct Worse {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.h != b.h) return a.h > b.h;
      return a.seq > b.seq;
    }
  };
  constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

  const bool keyed = limits.key_on_braids && limits.check_braids;
  GridNode root = limits.check_braids ? GridNode::from_table(start, initial, cache) : GridNode{start, {}, {}, 0, 0.0};
  root.rehash();
  result.stats.root_bound = model.prepare(root);
  root.h = limits.bias * result.stats.root_bound;

  std::vector<Record> records;
  std::unordered_multimap<std::uint64_t, std::uint32_t> seen;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, Worse> open;
  std::uint64_t seq = 0;

  records.push_back({root.fingerprint(keyed), kNoParent, 0, 0, 0, false, 0});
  seen.emplace(records[0].fingerprint, 0u);
  open.push({root.h, root.h, seq++, 0u, 0});

  std::vector<SwapAction> chain;
  auto actions_to = [&](std::uint32_t r) {
    chain.clear();
    for (; records[r].parent != kNoParent; r = records[r].parent)
      chain.push_back({records[r].axis, records[r].left, records[r].right});
    std::reverse(chain.begin(), chain.end());
    return chain;
  };
  // Full states of every kCheckpoint-th level bound the replay length.
  constexpr int kCheckpoint = 16;
  std::unordered_map<std::uint32_t, GridNode> checkpoints;
  auto rebuild = [&](std::uint32_t r) {
    chain.clear();
    const GridNode* base = &root;
    for (; records[r].parent != kNoParent; r = records[r].parent) {
      if (auto it = checkpoints.find(r); it != checkpoints.end()) {
        base = &it->second;
        break;
      }
      chain.push_back({records[r].axis, records[r].left, records[r].right});
    }
    GridNode node = *base;
    for (auto a = chain.rbegin(); a != chain.rend(); ++a)
      if (!apply_checked(node, *a, cache, axes, limits.check_braids))
        throw Error("plan: replay of a stored path hit a forbidden braid");
    return node;
  };

  while (!open.empty()) {
    result.stats.peak_open = std::max(result.stats.peak_open, open.size());
    const OpenEntry top = open.top();
    open.pop();
    if (records[top.record].closed || records[top.record].g != top.g) continue;
    records[top.record].closed = true;
    GridNode node = rebuild(top.record);
    node.g = top.g;

    if (node.perms == target) {
      result.actions = actions_to(top.record);
      GridNode walk = root;
      result.path.push_back(walk.perms);
      for (const auto& a : result.actions) {
        apply_checked(walk, a, cache, axes, limits.check_braids);
        result.path.push_back(walk.perms);
      }
      result.final_braids = limits.check_braids ? node.braids(cache) : initial;
      return result;
    }
    if (result.stats.expanded >= limits.max_expansions) break;
    ++result.stats.expanded;

    auto expansion = expand(node, cache, axes, limits, model);
    result.stats.rejected_by_braid += expansion.rejected;
    for (auto& [action, child] : expansion.children) {
      ++result.stats.generated;
      const auto fp = child.fingerprint(keyed);
      std::uint32_t match = kNoParent;
      for (auto [it, end] = seen.equal_range(fp); it != end; ++it)
        if (rebuild(it->second).same_identity(child, keyed)) {
          match = it->second;
          break;
        }
      const auto packed = [&](Record& rec) {
        rec.parent = top.record;
        rec.axis = static_cast<std::uint8_t>(action.axis);
        rec.left = static_cast<std::uint8_t>(action.left);
        rec.right = static_cast<std::uint8_t>(action.right);
        rec.g = child.g;
      };
      if (match == kNoParent) {
        const auto idx = static_cast<std::uint32_t>(records.size());
        records.push_back({fp, kNoParent, 0, 0, 0, false, 0});
        packed(records.back());
        seen.emplace(fp, idx);
        if (child.g % kCheckpoint == 0) checkpoints.emplace(idx, child);
        open.push({child.g + child.h, child.h, seq++, idx, child.g});
      } else if (!records[match].closed && child.g < records[match].g) {
        packed(records[match]);
        open.push({child.g + child.h, child.h, seq++, match, child.g});
      }
    }
  }
  result.final_braids = initial;
  return result;
}

inline int TripletBound::triplet(const GridNode& node, const PermutationState& targets, int a, int b, int c) {
  const int n = node.perms.size();
  const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b), uc = static_cast<std::size_t>(c);
  // relative ranks of a, b, c (0..2)
  auto rel = [&](const std::vector<int>& r) {
    const int x = r[ua], y = r[ub], z = r[uc];
    return std::array<int, 3>{(y < x) + (z < x), (x < y) + (z < y), (x < z) + (y < z)};
  };
  const std::array<std::array<int, 3>, 4> orders{rel(node.perms.pi1), rel(node.perms.pi2), rel(targets.pi1),
                                                 rel(targets.pi2)};
  const std::size_t npairs = pair_count(n), ntrip = triplet_count(n);
  const std::array<std::size_t, 3> pslot{pair_rank(a, b), pair_rank(a, c), pair_rank(b, c)};
  std::array<int, 6> sums{};
  for (std::size_t q = 0; q < 6; ++q) sums[q] = node.pair_sums[(q / 3) * npairs + pslot[q % 3]];
  const std::size_t tslot = triplet_rank(a, b, c);
  const std::array<std::uint32_t, 2> tid{node.triplet_ids[tslot], node.triplet_ids[ntrip + tslot]};

  std::uint64_t low = 0;
  for (const auto& o : orders) low = low * 9 + static_cast<std::uint64_t>(o[0] * 3 + o[1]);
  for (int v : sums) low = low * 3 + static_cast<std::uint64_t>(v + 1);
  const Key key{low | (static_cast<std::uint64_t>(tid[0]) << 24), tid[1]};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  BraidTable table(3, 2);
  for (int axis = 0; axis < 2; ++axis) {
    const std::size_t base = static_cast<std::size_t>(axis) * 3;
    table.pair(axis, 0, 1).exponent_sum = sums[base];
    table.pair(axis, 0, 2).exponent_sum = sums[base + 1];
    table.pair(axis, 1, 2).exponent_sum = sums[base + 2];
    table.triplet(axis, 0, 1, 2) = cache_.state(tid[static_cast<std::size_t>(axis)]);
  }
  PlanLimits inner;
  inner.bias = 1.0;
  inner.max_expansions = inner_limit_;
  inner.triplet_heuristic = false;
  auto vec = [](const std::array<int, 3>& o) { return std::vector<int>(o.begin(), o.end()); };
  const PermutationState from(vec(orders[0]), vec(orders[1])), to(vec(orders[2]), vec(orders[3]));
  const auto res = plan(from, to, table, inner, axes_);
  int d = 0;
  if (res.found()) {
    d = static_cast<int>(res.actions.size());
  } else {
    for (auto [i, j, q] : {std::tuple{0, 1, 0}, std::tuple{0, 2, 1}, std::tuple{1, 2, 2}})
      d += pairs_.pair(from, to, i, j, sums[static_cast<std::size_t>(q)], sums[static_cast<std::size_t>(q + 3)]);
  }
  memo_.emplace(key, d);
  return d;
}

}  // namespace braidplan
