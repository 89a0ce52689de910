#pragma once

// Brute-force reference for q = 3 on plain machine integers. Shares no code
// with the ring/orbit/moments path.

#include <cstdint>
#include <map>
#include <vector>

namespace hecke::oracle3 {

struct IntVec2 {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const IntVec2&, const IntVec2&) = default;
  friend auto operator<=>(const IntVec2&, const IntVec2&) = default;
};

/// All (a, b) with gcd(|a|, |b|) = 1 and a^2 + b^2 <= R^2, sorted.
std::vector<IntVec2> primitive_vectors(double radius);

std::int64_t std_totient(std::int64_t n);

/// Largest radius the quartic pair scan accepts.
inline constexpr double kMaxPairRadius = 60.0;

/// #{(v1, v2) primitive : det(v1 v2) = n, |v1|^2 + |v2|^2 <= R^2}.
/// Throws BudgetExceededError for R > kMaxPairRadius.
std::uint64_t brute_count_pairs(double radius, std::int64_t n);

/// The same scan tallied for every nonzero determinant at once.
std::map<std::int64_t, std::uint64_t> brute_count_all_pairs(double radius);

}  // namespace hecke::oracle3
