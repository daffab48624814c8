#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "braidplan/error.hpp"

namespace braidplan {

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("Laurent coefficient overflow in addition");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("Laurent coefficient overflow in multiplication");
  return r;
}

inline std::int64_t checked_neg(std::int64_t a) {
  if (a == INT64_MIN) throw ArithmeticOverflow("Laurent coefficient overflow in negation");
  return -a;
}

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace detail

// Laurent polynomial in one variable t with int64 coefficients.
//
// Stored densely as coeffs[k] = coefficient of t^(low + k). The representation
// is normalized: no zero coefficient at either end, and the zero polynomial has
// no coefficients (low = 0). Two equal polynomials therefore compare equal
// member-wise. All arithmetic is overflow-checked.
class LaurentPoly {
 public:
  LaurentPoly() = default;

  // c * t^e
  static LaurentPoly monomial(std::int64_t c, int e) {
    LaurentPoly p;
    if (c != 0) {
      p.low_ = e;
      p.coeffs_.push_back(c);
    }
    return p;
  }

  static LaurentPoly constant(std::int64_t c) { return monomial(c, 0); }

  bool is_zero() const { return coeffs_.empty(); }
  int low_degree() const { return low_; }
  int high_degree() const { return low_ + static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<std::int64_t>& coefficients() const { return coeffs_; }

  std::int64_t coefficient(int e) const {
    if (is_zero() || e < low_ || e > high_degree()) return 0;
    return coeffs_[static_cast<std::size_t>(e - low_)];
  }

  // Number of nonzero terms.
  std::size_t term_count() const {
    std::size_t n = 0;
    for (auto c : coeffs_) n += (c != 0);
    return n;
  }

  // True for +-t^e, the units of Z[t, t^-1].
  bool is_unit() const { return coeffs_.size() == 1 && (coeffs_[0] == 1 || coeffs_[0] == -1); }

  LaurentPoly shifted(int by) const {
    LaurentPoly r = *this;
    if (!r.is_zero()) r.low_ += by;
    return r;
  }

  LaurentPoly operator-() const {
    LaurentPoly r = *this;
    for (auto& c : r.coeffs_) c = detail::checked_neg(c);
    return r;
  }

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const int lo = std::min(a.low_, b.low_);
    const int hi = std::max(a.high_degree(), b.high_degree());
    LaurentPoly r;
    r.low_ = lo;
    r.coeffs_.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) r.coeffs_[k + static_cast<std::size_t>(a.low_ - lo)] = a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) {
      auto& slot = r.coeffs_[k + static_cast<std::size_t>(b.low_ - lo)];
      slot = detail::checked_add(slot, b.coeffs_[k]);
    }
    r.normalize();
    return r;
  }

  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    LaurentPoly r;
    r.low_ = a.low_ + b.low_;
    r.coeffs_.assign(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
        auto& slot = r.coeffs_[i + j];
        slot = detail::checked_add(slot, detail::checked_mul(a.coeffs_[i], b.coeffs_[j]));
      }
    }
    r.normalize();
    return r;
  }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) = default;

  std::size_t hash() const {
    std::size_t seed = std::hash<int>{}(low_);
    for (auto c : coeffs_) detail::hash_combine(seed, std::hash<std::int64_t>{}(c));
    return seed;
  }

  // e.g. "-t^-1 + 2 + t^3"; "0" for the zero polynomial.
  std::string to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      std::int64_t c = coeffs_[k];
      if (c == 0) continue;
      const int e = low_ + static_cast<int>(k);
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      const std::uint64_t mag = c < 0 ? static_cast<std::uint64_t>(-(c + 1)) + 1 : static_cast<std::uint64_t>(c);
      if (e == 0) {
        os << mag;
      } else {
        if (mag != 1) os << mag << "*";
        os << "t";
        if (e != 1) os << "^" << e;
      }
      first = false;
    }
    return os.str();
  }

 private:
  void normalize() {
    std::size_t first = 0;
    while (first < coeffs_.size() && coeffs_[first] == 0) ++first;
    if (first == coeffs_.size()) {
      coeffs_.clear();
      low_ = 0;
      return;
    }
    std::size_t last = coeffs_.size();
    while (coeffs_[last - 1] == 0) --last;
    coeffs_ = std::vector<std::int64_t>(coeffs_.begin() + static_cast<std::ptrdiff_t>(first),
                                        coeffs_.begin() + static_cast<std::ptrdiff_t>(last));
    low_ += static_cast<int>(first);
  }

  int low_ = 0;
  std::vector<std::int64_t> coeffs_;
};

inline std::ostream& operator<<(std::ostream& os, const LaurentPoly& p) { return os << p.to_string(); }

// 2x2 matrix over Z[t, t^-1], row-major: (0,0) (0,1) (1,0) (1,1).
class LaurentMatrix {
 public:
  LaurentMatrix() = default;
  LaurentMatrix(LaurentPoly a, LaurentPoly b, LaurentPoly c, LaurentPoly d)
      : e_{std::move(a), std::move(b), std::move(c), std::move(d)} {}

  static LaurentMatrix identity() {
    return {LaurentPoly::constant(1), LaurentPoly{}, LaurentPoly{}, LaurentPoly::constant(1)};
  }

  const LaurentPoly& at(int row, int col) const { return e_[static_cast<std::size_t>(row * 2 + col)]; }

  LaurentPoly determinant() const { return e_[0] * e_[3] - e_[1] * e_[2]; }

  friend LaurentMatrix operator*(const LaurentMatrix& x, const LaurentMatrix& y) {
    return {x.e_[0] * y.e_[0] + x.e_[1] * y.e_[2], x.e_[0] * y.e_[1] + x.e_[1] * y.e_[3],
            x.e_[2] * y.e_[0] + x.e_[3] * y.e_[2], x.e_[2] * y.e_[1] + x.e_[3] * y.e_[3]};
  }

  friend bool operator==(const LaurentMatrix& a, const LaurentMatrix& b) = default;

  std::size_t hash() const {
    std::size_t seed = 0;
    for (const auto& p : e_) detail::hash_combine(seed, p.hash());
    return seed;
  }

  std::string to_string() const {
    return "[[" + e_[0].to_string() + ", " + e_[1].to_string() + "], [" + e_[2].to_string() + ", " +
           e_[3].to_string() + "]]";
  }

 private:
  std::array<LaurentPoly, 4> e_{};
};

inline std::ostream& operator<<(std::ostream& os, const LaurentMatrix& m) { return os << m.to_string(); }

}  // namespace braidplan

template <>
struct std::hash<braidplan::LaurentMatrix> {
  std::size_t operator()(const braidplan::LaurentMatrix& m) const noexcept { return m.hash(); }
};
