#include "hecke/integer.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace hecke {

namespace {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Integer& Integer::operator=(const Integer& other) {
  if (this == &other) return *this;
  if (other.big_ == nullptr) {
    delete big_;
    big_ = nullptr;
    small_ = other.small_;
  } else if (big_ != nullptr) {
    *big_ = *other.big_;
  } else {
    big_ = new mpz_class(*other.big_);
  }
  return *this;
}

Integer& Integer::operator=(Integer&& other) noexcept {
  if (this == &other) return *this;
  delete big_;
  small_ = other.small_;
  big_ = other.big_;
  other.small_ = 0;
  other.big_ = nullptr;
  return *this;
}

void Integer::assign(const mpz_class& v) {
  if (mpz_fits_slong_p(v.get_mpz_t())) {
    delete big_;
    big_ = nullptr;
    small_ = mpz_get_si(v.get_mpz_t());
  } else if (big_ != nullptr) {
    *big_ = v;
  } else {
    big_ = new mpz_class(v);
  }
}

Integer Integer::parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) throw std::invalid_argument("bad integer literal '" + s + "'");
  for (std::size_t i = start; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad integer literal '" + s + "'");
  }
  if (s[0] == '+') s.erase(0, 1);
  return Integer(mpz_class(s, 10));
}

std::size_t Integer::bit_length() const noexcept {
  if (big_ == nullptr) {
    if (small_ == 0) return 0;
    auto mag = small_ < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(small_)
                          : static_cast<std::uint64_t>(small_);
    return static_cast<std::size_t>(std::bit_width(mag));
  }
  return mpz_sizeinbase(big_->get_mpz_t(), 2);
}

double Integer::to_double() const noexcept {
  if (big_ == nullptr) return static_cast<double>(small_);
  return mpz_get_d(big_->get_mpz_t());
}

mpz_class Integer::to_mpz() const {
  if (big_ == nullptr) return mpz_class(static_cast<long>(small_));
  return *big_;
}

std::string Integer::to_string() const {
  if (big_ == nullptr) return std::to_string(small_);
  return big_->get_str(10);
}

std::size_t Integer::hash() const noexcept {
  if (big_ == nullptr) return static_cast<std::size_t>(mix64(static_cast<std::uint64_t>(small_)));
  const mpz_srcptr z = big_->get_mpz_t();
  std::uint64_t h = mix64(static_cast<std::uint64_t>(mpz_sgn(z)) + 0x51);
  const std::size_t limbs = mpz_size(z);
  for (std::size_t i = 0; i < limbs; ++i) {
    h = mix64(h ^ static_cast<std::uint64_t>(mpz_getlimbn(z, static_cast<mp_size_t>(i))));
  }
  return static_cast<std::size_t>(h);
}

Integer operator+(const Integer& a, const Integer& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    std::int64_t r;
    if (!__builtin_add_overflow(a.small_, b.small_, &r)) return Integer(static_cast<long>(r));
  }
  return Integer(mpz_class(a.to_mpz() + b.to_mpz()));
}

Integer operator-(const Integer& a, const Integer& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    std::int64_t r;
    if (!__builtin_sub_overflow(a.small_, b.small_, &r)) return Integer(static_cast<long>(r));
  }
  return Integer(mpz_class(a.to_mpz() - b.to_mpz()));
}

Integer operator*(const Integer& a, const Integer& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    std::int64_t r;
    if (!__builtin_mul_overflow(a.small_, b.small_, &r)) return Integer(static_cast<long>(r));
  }
  return Integer(mpz_class(a.to_mpz() * b.to_mpz()));
}

Integer operator-(const Integer& a) {
  if (a.big_ == nullptr && a.small_ != std::numeric_limits<std::int64_t>::min()) {
    return Integer(static_cast<long>(-a.small_));
  }
  return Integer(mpz_class(-a.to_mpz()));
}

bool operator==(const Integer& a, const Integer& b) noexcept {
  if (a.big_ == nullptr && b.big_ == nullptr) return a.small_ == b.small_;
  // Normalized representation: a big value never fits in int64.
  if (a.big_ == nullptr || b.big_ == nullptr) return false;
  return mpz_cmp(a.big_->get_mpz_t(), b.big_->get_mpz_t()) == 0;
}

std::strong_ordering operator<=>(const Integer& a, const Integer& b) noexcept {
  if (a.big_ == nullptr && b.big_ == nullptr) return a.small_ <=> b.small_;
  int c;
  if (a.big_ == nullptr) {
    c = -mpz_cmp_si(b.big_->get_mpz_t(), static_cast<long>(a.small_));
  } else if (b.big_ == nullptr) {
    c = mpz_cmp_si(a.big_->get_mpz_t(), static_cast<long>(b.small_));
  } else {
    c = mpz_cmp(a.big_->get_mpz_t(), b.big_->get_mpz_t());
  }
  return c <=> 0;
}

}  // namespace hecke
