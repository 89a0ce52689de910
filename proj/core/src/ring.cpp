#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "hecke/errors.hpp"
#include "hecke/ring.hpp"

namespace hecke {

namespace {

// Reduces a polynomial in lambda of arbitrary length to the power basis.
RingElement::Coeffs reduce_poly(const RingContext& ctx, std::vector<Integer> poly) {
  const auto d = static_cast<std::size_t>(ctx.degree());
  const auto& mp = ctx.minimal_polynomial().coeffs;
  for (std::size_t k = poly.size(); k-- > d;) {
    const Integer c = poly[k];
    if (c.is_zero()) continue;
    // x^k = x^{k-d} * x^d and x^d = -sum_{i<d} mp_i x^i
    for (std::size_t i = 0; i < d; ++i) poly[k - d + i] -= c * mp[i];
    poly[k] = Integer(0);
  }
  poly.resize(d, Integer(0));
  return RingElement::Coeffs(poly.begin(), poly.end());
}

}  // namespace

RingElement::RingElement(const RingContext& ctx) : ctx_(&ctx), c_(static_cast<std::size_t>(ctx.degree()), Integer(0)) {}

RingElement::RingElement(const RingContext& ctx, std::span<const Integer> coeffs) : ctx_(&ctx) {
  c_ = reduce_poly(ctx, std::vector<Integer>(coeffs.begin(), coeffs.end()));
}

RingElement::RingElement(const RingContext& ctx, const Integer& value)
    : ctx_(&ctx), c_(static_cast<std::size_t>(ctx.degree()), Integer(0)) {
  c_[0] = value;
}

RingElement RingElement::lambda(const RingContext& ctx) {
  std::vector<Integer> x{Integer(0), Integer(1)};
  return RingElement(ctx, std::span<const Integer>(x));
}

bool RingElement::is_zero() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](const Integer& c) { return c.is_zero(); });
}

std::size_t RingElement::max_bit_length() const noexcept {
  std::size_t b = 0;
  for (const auto& c : c_) b = std::max(b, c.bit_length());
  return b;
}

std::size_t RingElement::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(ctx_->q()) * 0x9e3779b97f4a7c15ULL;
  for (const auto& c : c_) h = (h ^ c.hash()) * 0x100000001b3ULL + (h >> 29);
  return h;
}

void RingElement::check_same(const RingElement& other) const {
  if (ctx_ != other.ctx_) {
    throw DomainError("ring elements of different q: " + std::to_string(ctx_->q()) + " vs " +
                      std::to_string(other.ctx_->q()));
  }
}

RingElement operator+(const RingElement& a, const RingElement& b) {
  a.check_same(b);
  RingElement::Coeffs c(a.c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] + b.c_[i];
  return RingElement(*a.ctx_, std::move(c));
}

RingElement operator-(const RingElement& a, const RingElement& b) {
  a.check_same(b);
  RingElement::Coeffs c(a.c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] - b.c_[i];
  return RingElement(*a.ctx_, std::move(c));
}

RingElement operator-(const RingElement& a) {
  RingElement::Coeffs c(a.c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -a.c_[i];
  return RingElement(*a.ctx_, std::move(c));
}

RingElement operator*(const RingElement& a, const Integer& k) {
  RingElement::Coeffs c(a.c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] * k;
  return RingElement(*a.ctx_, std::move(c));
}

RingElement operator*(const RingElement& a, const RingElement& b) {
  a.check_same(b);
  const std::size_t d = a.c_.size();
  if (d == 1) {
    RingElement::Coeffs c(1);
    c[0] = a.c_[0] * b.c_[0];
    return RingElement(*a.ctx_, std::move(c));
  }
  boost::container::small_vector<Integer, 5> prod(2 * d - 1, Integer(0));
  for (std::size_t i = 0; i < d; ++i) {
    if (a.c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (b.c_[j].is_zero()) continue;
      prod[i + j] += a.c_[i] * b.c_[j];
    }
  }
  RingElement::Coeffs c(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(d));
  const auto& table = a.ctx_->reduction_table();
  for (std::size_t k = d; k < 2 * d - 1; ++k) {
    if (prod[k].is_zero()) continue;
    const auto& row = table[k - d];
    for (std::size_t i = 0; i < d; ++i) {
      if (!row[i].is_zero()) c[i] += prod[k] * row[i];
    }
  }
  return RingElement(*a.ctx_, std::move(c));
}

RingElement& RingElement::operator+=(const RingElement& b) {
  check_same(b);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
  return *this;
}

RingElement& RingElement::operator-=(const RingElement& b) {
  check_same(b);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= b.c_[i];
  return *this;
}

bool operator==(const RingElement& a, const RingElement& b) noexcept {
  if (a.ctx_ != b.ctx_) return false;
  return std::equal(a.c_.begin(), a.c_.end(), b.c_.begin(), b.c_.end());
}

bool ExactLess::operator()(const RingElement& a, const RingElement& b) const noexcept {
  if (a.q() != b.q()) return a.q() < b.q();
  const auto ca = a.coefficients();
  const auto cb = b.coefficients();
  return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
}

std::string RingElement::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const Integer& c = c_[i];
    if (c.is_zero()) continue;
    const bool negative = c.sign() < 0;
    const Integer mag = abs(c);
    if (negative) {
      out += '-';
    } else if (!out.empty()) {
      out += '+';
    }
    if (i == 0) {
      out += mag.to_string();
      continue;
    }
    if (mag != Integer(1)) out += mag.to_string() + "*";
    out += 'L';
    if (i > 1) out += "^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

RingElement RingElement::parse(const RingContext& ctx, std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty()) throw DomainError("empty ring element literal");
  auto fail = [&](const std::string& why) -> DomainError {
    return DomainError("cannot parse ring element '" + std::string(text) + "': " + why);
  };

  std::vector<Integer> poly;
  std::size_t pos = 0;
  bool first = true;
  while (pos < s.size()) {
    int term_sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      term_sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!first) {
      throw fail("expected '+' or '-'");
    }
    first = false;
    std::size_t end = pos;
    while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
    const std::string term = s.substr(pos, end - pos);
    pos = end;
    if (term.empty()) throw fail("empty term");

    Integer coeff(1);
    std::size_t power = 0;
    const auto lpos = term.find('L');
    if (lpos == std::string::npos) {
      try {
        coeff = Integer::parse(term);
      } catch (const std::invalid_argument&) {
        throw fail("bad constant '" + term + "'");
      }
    } else {
      std::string head = term.substr(0, lpos);
      std::string tail = term.substr(lpos + 1);
      if (!head.empty()) {
        if (head.back() != '*') throw fail("expected '*' before L");
        head.pop_back();
        try {
          coeff = Integer::parse(head);
        } catch (const std::invalid_argument&) {
          throw fail("bad coefficient '" + head + "'");
        }
      }
      power = 1;
      if (!tail.empty()) {
        if (tail[0] != '^' || tail.size() < 2) throw fail("expected '^k' after L");
        const std::string exp = tail.substr(1);
        if (!std::all_of(exp.begin(), exp.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }) ||
            exp.size() > 4) {
          throw fail("bad exponent '" + exp + "'");
        }
        power = static_cast<std::size_t>(std::stoul(exp));
      }
    }
    if (poly.size() <= power) poly.resize(power + 1, Integer(0));
    poly[power] += term_sign < 0 ? -coeff : coeff;
  }
  return RingElement(ctx, std::span<const Integer>(poly));
}

// ---------------------------------------------------------------------------
// Real embedding

RealInterval operator+(const RealInterval& a, const RealInterval& b) {
  return RealInterval{a.lo + b.lo, a.hi + b.hi, std::min(a.bits, b.bits)};
}

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
  const Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  Rational lo = p[0], hi = p[0];
  for (const auto& x : p) {
    if (x < lo) lo = x;
    if (x > hi) hi = x;
  }
  return RealInterval{lo, hi, std::min(a.bits, b.bits)};
}

RealInterval embed(const RingElement& a, int bits) {
  if (bits < 1) bits = 1;
  const RingContext& ctx = a.context();
  const auto coeffs = a.coefficients();
  const std::size_t d = coeffs.size();
  if (d == 1) {
    // lambda is rational only for q = 3, where it equals 1.
    Rational v(coeffs[0].to_mpz());
    return RealInterval{v, v, bits};
  }
  int precision = bits + static_cast<int>(a.max_bit_length()) + 2 * static_cast<int>(d) + 8;
  for (;;) {
    const mpz_class lam_lo = ctx.lambda_enclosure(precision);
    const mpz_class lam_hi = lam_lo + 1;
    const auto p = static_cast<mp_bitcnt_t>(precision);
    mpz_class pow_lo, pow_hi;
    mpz_ui_pow_ui(pow_lo.get_mpz_t(), 2, p);
    pow_hi = pow_lo;
    mpz_class lo = 0, hi = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (i > 0) {
        // lambda >= 1 > 0, so the power enclosures stay positive.
        pow_lo *= lam_lo;
        mpz_fdiv_q_2exp(pow_lo.get_mpz_t(), pow_lo.get_mpz_t(), p);
        pow_hi *= lam_hi;
        mpz_cdiv_q_2exp(pow_hi.get_mpz_t(), pow_hi.get_mpz_t(), p);
      }
      const mpz_class c = coeffs[i].to_mpz();
      if (sgn(c) >= 0) {
        lo += c * pow_lo;
        hi += c * pow_hi;
      } else {
        lo += c * pow_hi;
        hi += c * pow_lo;
      }
    }
    mpz_class allowed;
    mpz_ui_pow_ui(allowed.get_mpz_t(), 2, static_cast<unsigned long>(precision - bits));
    if (hi - lo <= allowed) {
      mpz_class denom;
      mpz_ui_pow_ui(denom.get_mpz_t(), 2, p);
      RealInterval r{Rational(lo, denom), Rational(hi, denom), bits};
      r.lo.canonicalize();
      r.hi.canonicalize();
      return r;
    }
    precision += 32;
  }
}

namespace {

constexpr double kTwoPowMinus52 = 2.220446049250313e-16;

// Floating-point value of `a` with a rigorous absolute error bound. Returns
// false when coefficients are too large for doubles.
bool float_filter(const RingElement& a, double& value, double& error) {
  const auto coeffs = a.coefficients();
  const auto powers = a.context().lambda_powers();
  if (a.max_bit_length() > 1000) return false;
  double v = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double c = coeffs[i].to_double();
    v += c * powers[i];
    mag += std::fabs(c) * powers[i];
  }
  value = v;
  error = mag * (4.0 * static_cast<double>(coeffs.size()) + 8.0) * kTwoPowMinus52 + 1e-300;
  return true;
}

}  // namespace

int sign(const RingElement& a) {
  const auto coeffs = a.coefficients();
  if (coeffs.size() == 1) return coeffs[0].sign();
  if (a.is_zero()) return 0;
  double v, err;
  if (float_filter(a, v, err) && std::fabs(v) > err) return v > 0 ? 1 : -1;
  for (int bits = 64;; bits *= 2) {
    const RealInterval iv = embed(a, bits);
    if (sgn(iv.lo) > 0) return 1;
    if (sgn(iv.hi) < 0) return -1;
  }
}

int compare(const RingElement& a, const RingElement& b) { return sign(a - b); }

RingElement abs(const RingElement& a) { return sign(a) < 0 ? -a : a; }

double approx(const RingElement& a) {
  const auto coeffs = a.coefficients();
  if (coeffs.size() == 1) return coeffs[0].to_double();
  if (a.is_zero()) return 0.0;
  double v, err;
  if (float_filter(a, v, err) && err <= std::fabs(v) * 0x1p-40) return v;
  for (int bits = 64;; bits *= 2) {
    const RealInterval iv = embed(a, bits);
    if (iv.contains_zero()) continue;
    const Rational mid = (iv.lo + iv.hi) / 2;
    const Rational mag = sgn(mid) < 0 ? Rational(-mid) : mid;
    if (iv.width() <= mag / Rational(mpz_class(1) << 40)) return mid.get_d();
  }
}

Integer round_quotient(const RingElement& a, const RingElement& b) {
  if (b.is_zero()) throw DomainError("round_quotient by zero");
  if (a.is_zero()) return Integer(0);
  const double x = approx(a);
  const double y = approx(b);
  const double r = x / y;
  if (std::fabs(r) < 0x1p30) return Integer(static_cast<long>(std::llround(r)));
  // Large quotients: refine until the rounding is determined to within 1/4.
  for (int bits = 64;; bits *= 2) {
    const RealInterval ia = embed(a, bits);
    const RealInterval ib = embed(b, bits);
    if (ib.contains_zero()) continue;
    const RealInterval inv{1 / (sgn(ib.lo) > 0 ? ib.hi : ib.lo), 1 / (sgn(ib.lo) > 0 ? ib.lo : ib.hi), bits};
    const RealInterval qi = ia * inv;
    if (qi.width() > Rational(1, 4)) continue;
    const Rational mid = (qi.lo + qi.hi) / 2 + Rational(1, 2);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), mid.get_num_mpz_t(), mid.get_den_mpz_t());
    return Integer(fl);
  }
}

// ---------------------------------------------------------------------------
// Radii

SquaredRadius::SquaredRadius(const Rational& radius) : radius_(radius) {
  radius_.canonicalize();
  num2_ = Integer(mpz_class(radius_.get_num() * radius_.get_num()));
  den2_ = Integer(mpz_class(radius_.get_den() * radius_.get_den()));
  approx_ = Rational(radius_ * radius_).get_d();
}

RingElement SquaredRadius::scaled_slack(const RingElement& value) const {
  return RingElement(value.context(), num2_) - value * den2_;
}

bool SquaredRadius::admits(const RingElement& value) const {
  const auto coeffs = value.coefficients();
  if (coeffs.size() == 1) return coeffs[0] * den2_ <= num2_;
  return sign(scaled_slack(value)) >= 0;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return DomainError("cannot parse rational '" + s + "'"); };
  if (s.empty()) throw bad();
  try {
    if (const auto slash = s.find('/'); slash != std::string::npos) {
      Rational r(Integer::parse(s.substr(0, slash)).to_mpz(), Integer::parse(s.substr(slash + 1)).to_mpz());
      if (r.get_den() == 0) throw bad();
      r.canonicalize();
      return r;
    }
    if (const auto dot = s.find('.'); dot != std::string::npos) {
      std::string int_part = s.substr(0, dot);
      const std::string frac = s.substr(dot + 1);
      if (frac.empty() || !std::all_of(frac.begin(), frac.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw bad();
      }
      const bool negative = !int_part.empty() && int_part[0] == '-';
      if (int_part.empty() || int_part == "-" || int_part == "+") int_part += "0";
      mpz_class scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
      const mpz_class ip = Integer::parse(int_part).to_mpz();
      const mpz_class fp(frac, 10);
      mpz_class num = (negative ? -ip : ip) * scale + fp;
      if (negative) num = -num;
      Rational r(num, scale);
      r.canonicalize();
      return r;
    }
    return Rational(Integer::parse(s).to_mpz());
  } catch (const std::invalid_argument&) {
    throw bad();
  }
}

std::string rational_to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace hecke
