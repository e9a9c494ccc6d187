#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace mqthom {

using Rational = mpq_class;

/// Exact element of Q[pi^(1/2), pi^(-1/2)].
///
/// Stored as a sorted list of (e, r) pairs meaning sum r * pi^(e/2). No stored
/// rational is zero and exponents are strictly increasing, so two equal
/// scalars always have identical representations.
class Scalar {
 public:
  using Term = std::pair<int, Rational>;

  Scalar() = default;
  Scalar(long v) {  // NOLINT(google-explicit-constructor)
    if (v != 0) terms_.emplace_back(0, Rational(v));
  }
  Scalar(const Rational& r) {  // NOLINT(google-explicit-constructor)
    if (sgn(r) != 0) terms_.emplace_back(0, r);
  }
  Scalar(Rational r, int half_pi_exponent) {
    r.canonicalize();
    if (sgn(r) != 0) terms_.emplace_back(half_pi_exponent, std::move(r));
  }

  /// r * pi^(e/2)
  static Scalar pi_power(int half_pi_exponent, const Rational& r = Rational(1)) {
    return Scalar(r, half_pi_exponent);
  }

  static Scalar fraction(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return Scalar(r);
  }

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
  const std::vector<Term>& terms() const { return terms_; }

  /// Rational part (coefficient of pi^0).
  Rational rational_part() const {
    for (const auto& [e, r] : terms_)
      if (e == 0) return r;
    return Rational(0);
  }

  Scalar operator-() const {
    Scalar out = *this;
    for (auto& t : out.terms_) t.second = -t.second;
    return out;
  }

  Scalar& operator+=(const Scalar& o) {
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) {
      terms_ = o.terms_;
      return *this;
    }
    // Fast path for the overwhelmingly common single-term case.
    if (terms_.size() == 1 && o.terms_.size() == 1 && terms_[0].first == o.terms_[0].first) {
      terms_[0].second += o.terms_[0].second;
      if (sgn(terms_[0].second) == 0) terms_.clear();
      return *this;
    }
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
      if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        merged.push_back(std::move(*a++));
      } else if (a == terms_.end() || b->first < a->first) {
        merged.push_back(*b++);
      } else {
        Rational s = a->second + b->second;
        if (sgn(s) != 0) merged.emplace_back(a->first, std::move(s));
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    return *this;
  }

  Scalar& operator-=(const Scalar& o) { return *this += -o; }

  Scalar& operator*=(const Scalar& o) {
    *this = *this * o;
    return *this;
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }

  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar out;
    if (a.terms_.empty() || b.terms_.empty()) return out;
    if (a.terms_.size() == 1 && b.terms_.size() == 1) {
      out.terms_.emplace_back(a.terms_[0].first + b.terms_[0].first, a.terms_[0].second * b.terms_[0].second);
      return out;
    }
    for (const auto& [ea, ra] : a.terms_)
      for (const auto& [eb, rb] : b.terms_) out += Scalar(Rational(ra * rb), ea + eb);
    return out;
  }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.terms_ == b.terms_; }

  /// Numeric value with pi evaluated in double precision.
  double to_double() const {
    double v = 0.0;
    for (const auto& [e, r] : terms_) v += r.get_d() * std::pow(std::numbers::pi, 0.5 * e);
    return v;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, r] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << r.get_str();
      if (e != 0) os << "*pi^(" << e << "/2)";
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

 private:
  std::vector<Term> terms_;
};

}  // namespace mqthom
