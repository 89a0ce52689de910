#include "hecke/oracle3.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "hecke/errors.hpp"

namespace hecke::oracle3 {

std::vector<IntVec2> primitive_vectors(double radius) {
  std::vector<IntVec2> out;
  const double r2 = radius * radius;
  const auto bound = static_cast<std::int64_t>(std::floor(radius));
  for (std::int64_t a = -bound; a <= bound; ++a) {
    for (std::int64_t b = -bound; b <= bound; ++b) {
      if (static_cast<double>(a * a + b * b) > r2) continue;
      if (std::gcd(a, b) != 1) continue;
      out.push_back({a, b});
    }
  }
  return out;
}

std::int64_t std_totient(std::int64_t n) {
  if (n < 1) throw DomainError("totient of non-positive integer");
  std::int64_t result = n;
  std::int64_t m = n;
  for (std::int64_t p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    result -= result / p;
  }
  if (m > 1) result -= result / m;
  return result;
}

namespace {

template <typename Visit>
void scan_pairs(double radius, Visit&& visit) {
  if (radius > kMaxPairRadius) {
    throw BudgetExceededError("brute pair scan is limited to R <= " + std::to_string(kMaxPairRadius));
  }
  const auto prim = primitive_vectors(radius);
  const double r2 = radius * radius;
  for (const auto& v1 : prim) {
    const std::int64_t n1 = v1.x * v1.x + v1.y * v1.y;
    for (const auto& v2 : prim) {
      const std::int64_t n2 = v2.x * v2.x + v2.y * v2.y;
      if (static_cast<double>(n1 + n2) > r2) continue;
      visit(v1.x * v2.y - v2.x * v1.y);
    }
  }
}

}  // namespace

std::uint64_t brute_count_pairs(double radius, std::int64_t n) {
  std::uint64_t count = 0;
  scan_pairs(radius, [&](std::int64_t det) { count += det == n; });
  return count;
}

std::map<std::int64_t, std::uint64_t> brute_count_all_pairs(double radius) {
  std::map<std::int64_t, std::uint64_t> counts;
  scan_pairs(radius, [&](std::int64_t det) {
    if (det != 0) ++counts[det];
  });
  return counts;
}

}  // namespace hecke::oracle3
