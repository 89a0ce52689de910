#pragma once

#include <string>
#include <utility>

#include "hecke/ring.hpp"

namespace hecke {

/// Column vector (x, y) over Z[lambda_q].
struct Vec2 {
  RingElement x;
  RingElement y;

  static Vec2 of(const RingContext& ctx, long x, long y) { return {RingElement(ctx, Integer(x)), RingElement(ctx, Integer(y))}; }

  [[nodiscard]] const RingContext& context() const noexcept { return x.context(); }
  [[nodiscard]] int q() const noexcept { return x.q(); }
  [[nodiscard]] bool is_zero() const noexcept { return x.is_zero() && y.is_zero(); }
  [[nodiscard]] std::string to_string() const { return "(" + x.to_string() + ", " + y.to_string() + ")"; }
  [[nodiscard]] std::size_t hash() const noexcept { return x.hash() * 0x9e3779b97f4a7c15ULL ^ y.hash(); }

  friend bool operator==(const Vec2& a, const Vec2& b) noexcept { return a.x == b.x && a.y == b.y; }
  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(const RingElement& s, const Vec2& v) { return {s * v.x, s * v.y}; }
};

/// det of the matrix with columns u, v.
inline RingElement det(const Vec2& u, const Vec2& v) { return u.x * v.y - v.x * u.y; }
inline RingElement dot(const Vec2& u, const Vec2& v) { return u.x * v.x + u.y * v.y; }
inline RingElement norm_sq(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline RealInterval real_norm_sq(const Vec2& v, int bits = 64) { return embed(norm_sq(v), bits); }

/// Order on (y, x) coefficient tuples; used for deterministic iteration.
struct Vec2Less {
  bool operator()(const Vec2& a, const Vec2& b) const noexcept {
    ExactLess less;
    if (less(a.y, b.y)) return true;
    if (less(b.y, a.y)) return false;
    return less(a.x, b.x);
  }
};

/// 2x2 matrix [[a, b], [c, d]]; columns are (a, c) and (b, d).
struct Mat2 {
  RingElement a, b, c, d;

  static Mat2 identity(const RingContext& ctx);
  static Mat2 from_columns(const Vec2& first, const Vec2& second) { return {first.x, second.x, first.y, second.y}; }

  [[nodiscard]] const RingContext& context() const noexcept { return a.context(); }
  [[nodiscard]] Vec2 column0() const { return {a, c}; }
  [[nodiscard]] Vec2 column1() const { return {b, d}; }
  [[nodiscard]] RingElement determinant() const { return a * d - b * c; }
  /// Inverse of a determinant-one matrix (the adjugate).
  [[nodiscard]] Mat2 inverse_unimodular() const { return {d, -b, -c, a}; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Mat2& l, const Mat2& r) noexcept {
    return l.a == r.a && l.b == r.b && l.c == r.c && l.d == r.d;
  }
  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend Vec2 operator*(const Mat2& m, const Vec2& v) { return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y}; }
  friend Mat2 operator-(const Mat2& m) { return {-m.a, -m.b, -m.c, -m.d}; }
};

/// S = [[0, -1], [1, 0]]
Mat2 generator_s(const RingContext& ctx);
/// T^k = [[1, k lambda], [0, 1]]
Mat2 generator_t_power(const RingContext& ctx, const Integer& k);

/// The Hecke group generators (S, T) for q.
std::pair<Mat2, Mat2> hecke_generators(int q);

}  // namespace hecke
