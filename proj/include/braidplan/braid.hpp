#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "braidplan/error.hpp"
#include "braidplan/laurent.hpp"

namespace braidplan {

// sigma_index^sign. Generator indices are 1-based, as in the braid group
// presentation; sign is +1 (overpass) or -1 (underpass).
struct ElementaryBraid {
  int index = 1;
  int sign = 1;

  ElementaryBraid inverse() const { return {index, -sign}; }
  friend bool operator==(const ElementaryBraid&, const ElementaryBraid&) = default;
};

inline std::string to_string(ElementaryBraid b) {
  return std::string(b.sign > 0 ? "s" : "S") + std::to_string(b.index);
}

class BraidWord {
 public:
  BraidWord() = default;
  explicit BraidWord(int strands) : strands_(strands) {
    if (strands < 2) throw InputError("braid word needs at least 2 strands, got " + std::to_string(strands));
  }
  BraidWord(int strands, std::vector<ElementaryBraid> letters) : BraidWord(strands) {
    for (auto l : letters) append(l);
  }

  int strands() const { return strands_; }
  const std::vector<ElementaryBraid>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity_word() const { return letters_.empty(); }

  void append(ElementaryBraid b) {
    if (b.index < 1 || b.index >= strands_)
      throw InputError("generator s" + std::to_string(b.index) + " out of range for " + std::to_string(strands_) +
                       " strands");
    if (b.sign != 1 && b.sign != -1) throw InputError("elementary braid sign must be +1 or -1");
    letters_.push_back(b);
  }

  BraidWord concatenated(const BraidWord& other) const {
    BraidWord r = *this;
    for (auto l : other.letters_) r.append(l);
    return r;
  }

  // Reverse of the word with every letter inverted: the group inverse.
  BraidWord inverse() const {
    BraidWord r(strands_);
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) r.letters_.push_back(it->inverse());
    return r;
  }

  BraidWord prefix(std::size_t len) const {
    BraidWord r(strands_);
    r.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(std::min(len, length())));
    return r;
  }

  friend bool operator==(const BraidWord&, const BraidWord&) = default;

 private:
  int strands_ = 2;
  std::vector<ElementaryBraid> letters_;
};

// "s1 S2 s1" (lowercase positive, uppercase inverse); identity is "e".
inline std::string to_string(const BraidWord& w) {
  if (w.is_identity_word()) return "e";
  std::string out;
  for (std::size_t k = 0; k < w.length(); ++k) {
    if (k) out += ' ';
    out += to_string(w.letters()[k]);
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const BraidWord& w) { return os << to_string(w); }

inline BraidWord parse_word(std::string_view text, int strands) {
  BraidWord w(strands);
  std::istringstream in{std::string(text)};
  std::string tok;
  bool saw_identity = false;
  while (in >> tok) {
    if (tok == "e") {
      saw_identity = true;
      continue;
    }
    if (tok.size() < 2 || (tok[0] != 's' && tok[0] != 'S'))
      throw InputError("bad braid token '" + tok + "'");
    char* end = nullptr;
    const long idx = std::strtol(tok.c_str() + 1, &end, 10);
    if (*end != '\0' || idx < 1) throw InputError("bad braid token '" + tok + "'");
    w.append({static_cast<int>(idx), tok[0] == 's' ? 1 : -1});
  }
  if (saw_identity && !w.is_identity_word()) throw InputError("identity marker 'e' mixed with letters");
  return w;
}

// Cancels adjacent inverse pairs until none remain (stack-based, one pass).
inline BraidWord free_reduce(const BraidWord& word) {
  std::vector<ElementaryBraid> stack;
  stack.reserve(word.length());
  for (auto l : word.letters()) {
    if (!stack.empty() && stack.back().index == l.index && stack.back().sign == -l.sign)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return BraidWord(word.strands(), std::move(stack));
}

// Reduced Burau images of the B3 generators, with t as the variable:
//   s1 -> [[-t, 1], [0, 1]]      S1 -> [[-t^-1, t^-1], [0, 1]]
//   s2 -> [[1, 0], [t, -t]]      S2 -> [[1, 0], [1, -t^-1]]
inline const LaurentMatrix& burau_generator(ElementaryBraid b) {
  using P = LaurentPoly;
  static const std::array<LaurentMatrix, 4> images = {
      LaurentMatrix{P::monomial(-1, 1), P::constant(1), P{}, P::constant(1)},
      LaurentMatrix{P::monomial(-1, -1), P::monomial(1, -1), P{}, P::constant(1)},
      LaurentMatrix{P::constant(1), P{}, P::monomial(1, 1), P::monomial(-1, 1)},
      LaurentMatrix{P::constant(1), P{}, P::constant(1), P::monomial(-1, -1)},
  };
  if (b.index != 1 && b.index != 2) throw InputError("Burau image only defined for s1, s2 (3 strands)");
  return images[static_cast<std::size_t>((b.index - 1) * 2 + (b.sign > 0 ? 0 : 1))];
}

inline LaurentMatrix burau(const BraidWord& word) {
  if (word.strands() != 3) throw InputError("burau() requires a 3-strand word");
  LaurentMatrix m = LaurentMatrix::identity();
  for (auto l : word.letters()) m = m * burau_generator(l);
  return m;
}

// s_f^c S_g^c s_f^c for c in {1,-1}, f != g.
inline const std::array<BraidWord, 4>& forbidden_words3() {
  static const std::array<BraidWord, 4> words = {
      BraidWord(3, {{1, 1}, {2, -1}, {1, 1}}),
      BraidWord(3, {{2, 1}, {1, -1}, {2, 1}}),
      BraidWord(3, {{1, -1}, {2, 1}, {1, -1}}),
      BraidWord(3, {{2, -1}, {1, 1}, {2, -1}}),
  };
  return words;
}

inline const std::array<LaurentMatrix, 4>& forbidden_matrices3() {
  static const std::array<LaurentMatrix, 4> mats = [] {
    std::array<LaurentMatrix, 4> m;
    for (std::size_t k = 0; k < 4; ++k) m[k] = burau(forbidden_words3()[k]);
    return m;
  }();
  return mats;
}

inline bool is_forbidden_matrix3(const LaurentMatrix& m) {
  for (const auto& f : forbidden_matrices3())
    if (f == m) return true;
  return false;
}

inline bool is_forbidden3(const BraidWord& word) { return is_forbidden_matrix3(burau(word)); }

// Pairwise braid: B2 is infinite cyclic, so the exponent sum is a complete
// invariant.
struct Braid2State {
  int exponent_sum = 0;
  bool violated = false;

  static Braid2State from_word(const BraidWord& w) {
    if (w.strands() != 2) throw InputError("pair braid needs a 2-strand word");
    Braid2State s;
    for (auto l : w.letters()) s.exponent_sum += l.sign;
    s.violated = s.exponent_sum > 1 || s.exponent_sum < -1;
    return s;
  }

  // Shortest representative: e, s1 or S1 (longer for a violated sum).
  BraidWord word() const {
    BraidWord w(2);
    for (int k = 0; k < std::abs(exponent_sum); ++k) w.append({1, exponent_sum > 0 ? 1 : -1});
    return w;
  }

  friend bool operator==(const Braid2State&, const Braid2State&) = default;
};

template <typename State>
struct CheckedUpdate {
  State state;
  bool valid = true;
};

inline CheckedUpdate<Braid2State> update_check_2braid(const Braid2State& state, ElementaryBraid tau) {
  if (tau.index != 1) throw InputError("pair braid letter must be s1 or S1, got " + to_string(tau));
  if (state.violated) throw StickyViolation("update on a violated pair braid");
  Braid2State next{state.exponent_sum + tau.sign, false};
  const bool valid = next.exponent_sum >= -1 && next.exponent_sum <= 1;
  next.violated = !valid;
  return {next, valid};
}

// Triplet braid in B3. The Burau matrix is the equality key; the freely
// reduced word is kept for reporting and serialization.
class Braid3State {
 public:
  Braid3State() : word_(3), matrix_(LaurentMatrix::identity()) {}

  static Braid3State from_word(const BraidWord& w) {
    Braid3State s;
    s.word_ = free_reduce(w);
    s.matrix_ = burau(s.word_);
    s.violated_ = is_forbidden_matrix3(s.matrix_);
    return s;
  }

  const BraidWord& reduced_word() const { return word_; }
  const LaurentMatrix& canonical_matrix() const { return matrix_; }
  bool violated() const { return violated_; }

  // Braid equivalence.
  bool equivalent(const Braid3State& other) const { return matrix_ == other.matrix_; }

  friend bool operator==(const Braid3State&, const Braid3State&) = default;

 private:
  friend CheckedUpdate<Braid3State> update_check_3braid(const Braid3State&, ElementaryBraid);

  BraidWord word_;
  LaurentMatrix matrix_;
  bool violated_ = false;
};

inline CheckedUpdate<Braid3State> update_check_3braid(const Braid3State& state, ElementaryBraid tau) {
  if (tau.index != 1 && tau.index != 2)
    throw InputError("triplet braid letter must be s1/s2 or inverse, got " + to_string(tau));
  if (state.violated_) throw StickyViolation("update on a violated triplet braid");
  Braid3State next = state;
  auto& letters = next.word_;
  if (!letters.is_identity_word() && letters.letters().back() == tau.inverse())
    letters = letters.prefix(letters.length() - 1);
  else
    letters.append(tau);
  next.matrix_ = state.matrix_ * burau_generator(tau);
  next.violated_ = is_forbidden_matrix3(next.matrix_);
  return {next, !next.violated_};
}

// Combination index of {i < j} (colex order).
inline std::size_t pair_rank(int i, int j) {
  return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(j - 1) / 2;
}

// Combination index of {i < j < k} (colex order).
inline std::size_t triplet_rank(int i, int j, int k) {
  const auto jj = static_cast<std::size_t>(j);
  const auto kk = static_cast<std::size_t>(k);
  return static_cast<std::size_t>(i) + jj * (jj - 1) / 2 + kk * (kk - 1) * (kk - 2) / 6;
}

inline std::size_t pair_count(int n) { return n < 2 ? 0 : static_cast<std::size_t>(n) * (n - 1) / 2; }
inline std::size_t triplet_count(int n) {
  return n < 3 ? 0 : static_cast<std::size_t>(n) * (n - 1) * (n - 2) / 6;
}

// Every pair and triplet braid of an n-robot team, per projection axis.
class BraidTable {
 public:
  BraidTable() = default;
  BraidTable(int robots, int axes)
      : n_(robots),
        axes_(axes),
        pairs_(pair_count(robots) * static_cast<std::size_t>(axes)),
        triplets_(triplet_count(robots) * static_cast<std::size_t>(axes)) {
    if (robots < 1 || axes < 1) throw InputError("braid table needs at least one robot and one axis");
  }

  int robots() const { return n_; }
  int axes() const { return axes_; }

  // Robot ids need not be sorted.
  const Braid2State& pair(int axis, int i, int j) const { return pairs_[pair_slot(axis, i, j)]; }
  Braid2State& pair(int axis, int i, int j) { return pairs_[pair_slot(axis, i, j)]; }
  const Braid3State& triplet(int axis, int i, int j, int k) const { return triplets_[triplet_slot(axis, i, j, k)]; }
  Braid3State& triplet(int axis, int i, int j, int k) { return triplets_[triplet_slot(axis, i, j, k)]; }

  const std::vector<Braid2State>& pairs() const { return pairs_; }
  const std::vector<Braid3State>& triplets() const { return triplets_; }

  bool any_violated() const {
    for (const auto& p : pairs_)
      if (p.violated) return true;
    for (const auto& t : triplets_)
      if (t.violated()) return true;
    return false;
  }

  // Same braid classes on every slot (matrix equality, not word equality).
  bool equivalent(const BraidTable& other) const {
    if (n_ != other.n_ || axes_ != other.axes_) return false;
    if (pairs_ != other.pairs_) return false;
    for (std::size_t k = 0; k < triplets_.size(); ++k)
      if (!triplets_[k].equivalent(other.triplets_[k]) || triplets_[k].violated() != other.triplets_[k].violated())
        return false;
    return true;
  }

  friend bool operator==(const BraidTable&, const BraidTable&) = default;

  std::size_t pair_slot(int axis, int i, int j) const {
    check_axis(axis);
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_ || i == j) throw InputError("bad robot pair");
    return static_cast<std::size_t>(axis) * pair_count(n_) + pair_rank(i, j);
  }

  std::size_t triplet_slot(int axis, int i, int j, int k) const {
    check_axis(axis);
    sort3(i, j, k);
    if (i < 0 || k >= n_ || i == j || j == k) throw InputError("bad robot triplet");
    return static_cast<std::size_t>(axis) * triplet_count(n_) + triplet_rank(i, j, k);
  }

  static void sort3(int& i, int& j, int& k) {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
  }

 private:
  void check_axis(int axis) const {
    if (axis < 0 || axis >= axes_) throw InputError("axis index " + std::to_string(axis) + " out of range");
  }

  int n_ = 0;
  int axes_ = 0;
  std::vector<Braid2State> pairs_;
  std::vector<Braid3State> triplets_;
};

}  // namespace braidplan
