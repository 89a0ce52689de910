#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace hecke {

/// Arbitrary-precision signed integer.
///
/// Values that fit in an int64_t live inline; anything larger spills to a
/// heap-allocated GMP integer and is demoted again as soon as a result fits.
/// Coefficients of orbit vectors are almost always small, so the hot loops
/// never touch GMP, but deep Farey recursion for q > 3 can produce
/// coefficients well beyond 64 bits.
class Integer {
 public:
  Integer() noexcept = default;
  Integer(int v) noexcept : small_(v) {}
  Integer(long v) noexcept : small_(v) {}
  Integer(long long v) noexcept : small_(static_cast<std::int64_t>(v)) {}
  explicit Integer(const mpz_class& v) { assign(v); }

  Integer(const Integer& other)
      : small_(other.small_), big_(other.big_ ? new mpz_class(*other.big_) : nullptr) {}
  Integer(Integer&& other) noexcept : small_(other.small_), big_(other.big_) {
    other.small_ = 0;
    other.big_ = nullptr;
  }
  Integer& operator=(const Integer& other);
  Integer& operator=(Integer&& other) noexcept;
  ~Integer() { delete big_; }

  /// Parses an optionally signed decimal integer. Throws std::invalid_argument.
  static Integer parse(std::string_view text);

  [[nodiscard]] bool is_small() const noexcept { return big_ == nullptr; }
  [[nodiscard]] std::int64_t small_value() const noexcept { return small_; }
  [[nodiscard]] bool is_zero() const noexcept { return big_ == nullptr && small_ == 0; }
  [[nodiscard]] int sign() const noexcept {
    if (big_ == nullptr) return (small_ > 0) - (small_ < 0);
    return mpz_sgn(big_->get_mpz_t());
  }
  /// Number of bits in |x|; 0 for zero.
  [[nodiscard]] std::size_t bit_length() const noexcept;
  [[nodiscard]] double to_double() const noexcept;
  [[nodiscard]] mpz_class to_mpz() const;
  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] std::size_t hash() const noexcept;

  friend Integer operator+(const Integer& a, const Integer& b);
  friend Integer operator-(const Integer& a, const Integer& b);
  friend Integer operator*(const Integer& a, const Integer& b);
  friend Integer operator-(const Integer& a);

  Integer& operator+=(const Integer& b) { return *this = *this + b; }
  Integer& operator-=(const Integer& b) { return *this = *this - b; }
  Integer& operator*=(const Integer& b) { return *this = *this * b; }

  friend bool operator==(const Integer& a, const Integer& b) noexcept;
  friend std::strong_ordering operator<=>(const Integer& a, const Integer& b) noexcept;

 private:
  void assign(const mpz_class& v);

  std::int64_t small_ = 0;
  mpz_class* big_ = nullptr;
};

[[nodiscard]] inline Integer abs(const Integer& a) { return a.sign() < 0 ? -a : a; }

}  // namespace hecke
