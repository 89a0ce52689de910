#pragma once

// Exact arithmetic in Z[lambda_q], lambda_q = 2 cos(pi / q), with certified
// sign decisions through the real embedding.

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <gmpxx.h>

#include "hecke/integer.hpp"

namespace hecke {

using Rational = mpq_class;

/// Parses "7", "-3/4" or a decimal such as "2.5" into an exact rational.
Rational parse_rational(std::string_view text);
std::string rational_to_string(const Rational& r);

/// Monic minimal polynomial of lambda_q over Q, constant term first.
struct MinimalPolynomial {
  int q = 0;
  std::vector<Integer> coeffs;

  [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
};

/// Builds the minimal polynomial of 2cos(pi/q) from the cyclotomic polynomial
/// Phi_{2q} rewritten in x = z + 1/z. Throws DomainError for q < 3.
MinimalPolynomial minimal_polynomial(int q);

/// Closed interval [lo, hi] with rational endpoints.
struct RealInterval {
  Rational lo;
  Rational hi;
  int bits = 0;

  [[nodiscard]] Rational width() const { return hi - lo; }
  [[nodiscard]] bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  [[nodiscard]] bool contains_zero() const { return sgn(lo) <= 0 && sgn(hi) >= 0; }
  [[nodiscard]] double midpoint() const { return Rational((lo + hi) / 2).get_d(); }
};

RealInterval operator+(const RealInterval& a, const RealInterval& b);
RealInterval operator*(const RealInterval& a, const RealInterval& b);

/// Per-q shared state: minimal polynomial, reduction table, and a cached
/// dyadic enclosure of lambda_q. Contexts are interned for the lifetime of the
/// process, so RingElements hold a plain pointer.
class RingContext {
 public:
  static const RingContext& get(int q);

  [[nodiscard]] int q() const noexcept { return poly_.q; }
  [[nodiscard]] int degree() const noexcept { return poly_.degree(); }
  [[nodiscard]] const MinimalPolynomial& minimal_polynomial() const noexcept { return poly_; }
  [[nodiscard]] double lambda_approx() const noexcept { return lambda_; }
  [[nodiscard]] std::span<const double> lambda_powers() const noexcept { return lambda_pow_; }
  /// Row k holds lambda^(degree + k) in the power basis, k = 0 .. degree - 2.
  [[nodiscard]] const std::vector<std::vector<Integer>>& reduction_table() const noexcept { return reduce_; }

  /// Returns L with lambda_q in [L, L + 1] / 2^precision.
  [[nodiscard]] mpz_class lambda_enclosure(int precision) const;

  explicit RingContext(MinimalPolynomial poly);

 private:
  MinimalPolynomial poly_;
  double lambda_ = 0.0;
  std::vector<double> lambda_pow_;
  std::vector<std::vector<Integer>> reduce_;

  mutable std::mutex cache_mutex_;
  mutable mpz_class cached_lo_;
  mutable int cached_precision_ = 0;
};

/// Element of Z[lambda_q] in the power basis, always reduced to `degree`
/// coefficients. Representation is unique per value.
class RingElement {
 public:
  using Coeffs = boost::container::small_vector<Integer, 2>;

  explicit RingElement(const RingContext& ctx);
  RingElement(const RingContext& ctx, std::span<const Integer> coeffs);
  RingElement(const RingContext& ctx, const Integer& value);

  static RingElement lambda(const RingContext& ctx);
  /// Parses "c0+c1*L+c2*L^2"; powers >= degree are reduced.
  static RingElement parse(const RingContext& ctx, std::string_view text);

  [[nodiscard]] const RingContext& context() const noexcept { return *ctx_; }
  [[nodiscard]] int q() const noexcept { return ctx_->q(); }
  [[nodiscard]] std::span<const Integer> coefficients() const noexcept { return {c_.data(), c_.size()}; }
  [[nodiscard]] const Integer& coefficient(std::size_t i) const { return c_[i]; }
  [[nodiscard]] bool is_zero() const noexcept;
  [[nodiscard]] std::size_t max_bit_length() const noexcept;
  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] std::size_t hash() const noexcept;

  friend RingElement operator+(const RingElement& a, const RingElement& b);
  friend RingElement operator-(const RingElement& a, const RingElement& b);
  friend RingElement operator*(const RingElement& a, const RingElement& b);
  friend RingElement operator*(const RingElement& a, const Integer& k);
  friend RingElement operator-(const RingElement& a);
  RingElement& operator+=(const RingElement& b);
  RingElement& operator-=(const RingElement& b);

  friend bool operator==(const RingElement& a, const RingElement& b) noexcept;

 private:
  RingElement(const RingContext& ctx, Coeffs c) : ctx_(&ctx), c_(std::move(c)) {}
  void check_same(const RingElement& other) const;

  const RingContext* ctx_;
  Coeffs c_;
};

inline RingElement operator*(const Integer& k, const RingElement& a) { return a * k; }

/// Lexicographic order on (q, coefficients). Deterministic, not the real order.
struct ExactLess {
  bool operator()(const RingElement& a, const RingElement& b) const noexcept;
};

struct ExactHash {
  std::size_t operator()(const RingElement& a) const noexcept { return a.hash(); }
};

/// Interval of width <= 2^-bits containing the real value of `a`.
RealInterval embed(const RingElement& a, int bits);

/// Exact sign of the real value. Uses a certified floating-point filter and
/// falls back to interval refinement with doubling precision.
int sign(const RingElement& a);
/// sign(a - b)
int compare(const RingElement& a, const RingElement& b);
RingElement abs(const RingElement& a);

/// Double approximation of the real value, accurate to about 2^-40 relative.
double approx(const RingElement& a);

/// Nearest integer to a / b (b != 0); ties may round either way.
Integer round_quotient(const RingElement& a, const RingElement& b);

/// Exact test x <= R^2 for a ring element x and a rational radius R.
class SquaredRadius {
 public:
  explicit SquaredRadius(const Rational& radius);

  [[nodiscard]] const Rational& radius() const noexcept { return radius_; }
  [[nodiscard]] double value_approx() const noexcept { return approx_; }
  /// true iff value <= R^2.
  [[nodiscard]] bool admits(const RingElement& value) const;
  /// R^2 - value, scaled by den(R)^2 so it stays in the ring.
  [[nodiscard]] RingElement scaled_slack(const RingElement& value) const;

 private:
  Rational radius_;
  Integer num2_;
  Integer den2_;
  double approx_;
};

}  // namespace hecke

template <>
struct std::hash<hecke::RingElement> {
  std::size_t operator()(const hecke::RingElement& a) const noexcept { return a.hash(); }
};
