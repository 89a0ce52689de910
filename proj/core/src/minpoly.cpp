#include <cmath>
#include <map>
#include <numbers>

#include "hecke/errors.hpp"
#include "hecke/ring.hpp"

namespace hecke {

namespace {

using Poly = std::vector<Integer>;  // constant term first

// Exact quotient by a monic divisor.
Poly divide_exact(Poly num, const Poly& den) {
  const std::size_t dd = den.size() - 1;
  if (num.size() - 1 < dd) throw ConsistencyError("cyclotomic division underflow");
  Poly quot(num.size() - dd, Integer(0));
  for (std::size_t k = num.size(); k-- > dd;) {
    const Integer c = num[k];
    quot[k - dd] = c;
    if (c.is_zero()) continue;
    for (std::size_t i = 0; i <= dd; ++i) num[k - dd + i] -= c * den[i];
  }
  for (const auto& r : num) {
    if (!r.is_zero()) throw ConsistencyError("cyclotomic division left a remainder");
  }
  return quot;
}

Poly cyclotomic(int n, std::map<int, Poly>& memo) {
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  Poly p(static_cast<std::size_t>(n) + 1, Integer(0));
  p[0] = Integer(-1);
  p[static_cast<std::size_t>(n)] = Integer(1);
  for (int d = 1; d < n; ++d) {
    if (n % d == 0) p = divide_exact(p, cyclotomic(d, memo));
  }
  memo.emplace(n, p);
  return p;
}

// sign of P(m / 2^p) for P with integer coefficients.
int sign_at_dyadic(const MinimalPolynomial& poly, const mpz_class& m, int p) {
  const int d = poly.degree();
  mpz_class acc = 0;
  // Horner on the homogenized form sum_i c_i m^i 2^{p(d-i)}.
  for (int i = d; i >= 0; --i) {
    mpz_class scaled = acc * m;
    mpz_class term = poly.coeffs[static_cast<std::size_t>(i)].to_mpz();
    mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), static_cast<mp_bitcnt_t>(p) * static_cast<mp_bitcnt_t>(d - i));
    acc = scaled + term;
  }
  return sgn(acc);
}

}  // namespace

MinimalPolynomial minimal_polynomial(int q) {
  if (q < 3) throw DomainError("q must be >= 3, got " + std::to_string(q));
  std::map<int, Poly> memo;
  const Poly phi = cyclotomic(2 * q, memo);
  const std::size_t two_d = phi.size() - 1;
  if (two_d % 2 != 0) throw ConsistencyError("cyclotomic polynomial of odd degree");
  const std::size_t d = two_d / 2;

  // z^-d Phi(z) = a_d + sum_k a_{d+k} (z^k + z^-k), and z^k + z^-k = D_k(z + 1/z)
  // with D_0 = 2, D_1 = x, D_k = x D_{k-1} - D_{k-2}.
  std::vector<Poly> dickson;
  dickson.push_back(Poly{Integer(2)});
  dickson.push_back(Poly{Integer(0), Integer(1)});
  for (std::size_t k = 2; k <= d; ++k) {
    Poly next(k + 1, Integer(0));
    for (std::size_t i = 0; i < dickson[k - 1].size(); ++i) next[i + 1] += dickson[k - 1][i];
    for (std::size_t i = 0; i < dickson[k - 2].size(); ++i) next[i] -= dickson[k - 2][i];
    dickson.push_back(std::move(next));
  }
  Poly result(d + 1, Integer(0));
  result[0] = phi[d];
  for (std::size_t k = 1; k <= d; ++k) {
    const Integer& a = phi[d + k];
    if (a.is_zero()) continue;
    for (std::size_t i = 0; i < dickson[k].size(); ++i) result[i] += a * dickson[k][i];
  }
  if (result.back() != Integer(1)) throw ConsistencyError("minimal polynomial is not monic");

  MinimalPolynomial mp{q, result};

  // Numeric validation at the intended root.
  const long double lam = 2.0L * std::cos(std::numbers::pi_v<long double> / q);
  long double value = 0, scale = 0;
  for (std::size_t i = d + 1; i-- > 0;) {
    value = value * lam + static_cast<long double>(result[i].to_double());
  }
  for (std::size_t i = 0; i <= d; ++i) {
    scale += std::fabs(static_cast<long double>(result[i].to_double())) * std::pow(lam, static_cast<long double>(i));
  }
  if (std::fabs(value) > 1e-9L * scale) {
    throw ConsistencyError("minimal polynomial does not vanish at 2cos(pi/q) for q=" + std::to_string(q));
  }
  return mp;
}

RingContext::RingContext(MinimalPolynomial poly) : poly_(std::move(poly)) {
  const int d = degree();
  lambda_ = 2.0 * std::cos(std::numbers::pi / q());
  lambda_pow_.resize(static_cast<std::size_t>(d));
  const long double lam = 2.0L * std::cos(std::numbers::pi_v<long double> / q());
  for (int i = 0; i < d; ++i) lambda_pow_[static_cast<std::size_t>(i)] = static_cast<double>(std::pow(lam, static_cast<long double>(i)));

  // lambda^d = -sum_{i<d} c_i lambda^i, then shift-and-reduce for higher powers.
  if (d >= 2) {
    std::vector<Integer> row(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) row[static_cast<std::size_t>(i)] = -poly_.coeffs[static_cast<std::size_t>(i)];
    reduce_.push_back(row);
    for (int k = 1; k <= d - 2; ++k) {
      const auto& prev = reduce_.back();
      std::vector<Integer> next(static_cast<std::size_t>(d), Integer(0));
      for (int i = 0; i + 1 < d; ++i) next[static_cast<std::size_t>(i) + 1] = prev[static_cast<std::size_t>(i)];
      const Integer top = prev[static_cast<std::size_t>(d) - 1];
      for (int i = 0; i < d; ++i) next[static_cast<std::size_t>(i)] += top * reduce_[0][static_cast<std::size_t>(i)];
      reduce_.push_back(std::move(next));
    }
  }

  // Isolate lambda among the real roots 2cos(k pi / q), k odd and coprime to q.
  const double separation = 2.0 * std::cos(std::numbers::pi / q()) - 2.0 * std::cos(3.0 * std::numbers::pi / q());
  constexpr int kInitialPrecision = 40;
  if (d > 1 && separation < std::ldexp(1.0, -30)) {
    throw DomainError("q=" + std::to_string(q()) + " is too large for root isolation");
  }
  mpz_class lo;
  mpz_set_d(lo.get_mpz_t(), std::floor(std::ldexp(static_cast<double>(lam), kInitialPrecision)));
  lo -= 8;
  mpz_class hi = lo + 16;
  const int s_lo = sign_at_dyadic(poly_, lo, kInitialPrecision);
  const int s_hi = sign_at_dyadic(poly_, hi, kInitialPrecision);
  if (s_lo * s_hi > 0) throw ConsistencyError("lambda is not bracketed by its initial enclosure");
  while (hi - lo > 1) {
    mpz_class mid = (lo + hi) / 2;
    const int s_mid = sign_at_dyadic(poly_, mid, kInitialPrecision);
    if (s_lo == 0) {
      hi = lo + 1;
      break;
    }
    if (s_mid == 0) {
      lo = mid;
      break;
    }
    if (s_mid == s_lo) lo = mid; else hi = mid;
  }
  cached_lo_ = lo;
  cached_precision_ = kInitialPrecision;
}

mpz_class RingContext::lambda_enclosure(int precision) const {
  std::lock_guard lock(cache_mutex_);
  if (precision <= cached_precision_) {
    mpz_class r;
    mpz_fdiv_q_2exp(r.get_mpz_t(), cached_lo_.get_mpz_t(), static_cast<mp_bitcnt_t>(cached_precision_ - precision));
    return r;
  }
  int p = cached_precision_;
  mpz_class lo = cached_lo_;
  int s_lo = sign_at_dyadic(poly_, lo, p);
  while (p < precision) {
    lo *= 2;
    ++p;
    if (s_lo == 0) continue;  // root sits exactly on the left endpoint
    const mpz_class mid = lo + 1;
    const int s_mid = sign_at_dyadic(poly_, mid, p);
    if (s_mid == 0) {
      lo = mid;
      s_lo = 0;
    } else if (s_mid == s_lo) {
      lo = mid;
    }
  }
  cached_lo_ = lo;
  cached_precision_ = p;
  return lo;
}

const RingContext& RingContext::get(int q) {
  static std::mutex registry_mutex;
  static std::map<int, std::unique_ptr<RingContext>> registry;
  std::lock_guard lock(registry_mutex);
  auto it = registry.find(q);
  if (it == registry.end()) {
    it = registry.emplace(q, std::make_unique<RingContext>(hecke::minimal_polynomial(q))).first;
  }
  return *it->second;
}

}  // namespace hecke
