#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "hecke/errors.hpp"
#include "hecke/oracle3.hpp"
#include "hecke/orbit.hpp"

using namespace hecke;

namespace {

const RingContext& ring(int q) { return RingContext::get(q); }

RingElement el(int q, long c0, long c1 = 0) {
  std::vector<Integer> v{c0, c1};
  v.resize(static_cast<std::size_t>(ring(q).degree()));
  return RingElement(ring(q), v);
}

std::set<std::pair<long, long>> as_int_set(const OrbitSet& s) {
  std::set<std::pair<long, long>> out;
  for (const auto& p : s.expand()) out.emplace(p.v.x.coefficient(0).small_value(), p.v.y.coefficient(0).small_value());
  return out;
}

}  // namespace

TEST_CASE("hecke generators") {
  auto [s3, t3] = hecke_generators(3);
  CHECK(t3 == Mat2{el(3, 1), el(3, 1), el(3, 0), el(3, 1)});
  for (int q : {3, 4, 5, 7}) {
    auto [s, t] = hecke_generators(q);
    CHECK(s.determinant() == el(q, 1));
    CHECK(t.determinant() == el(q, 1));
    // S^2 = -I and (ST)^q = -I
    CHECK(s * s == -Mat2::identity(ring(q)));
    Mat2 st = Mat2::identity(ring(q));
    for (int i = 0; i < q; ++i) st = st * (s * t);
    CHECK(st == -Mat2::identity(ring(q)));
  }
}

TEST_CASE("farey fan seeds") {
  CHECK(farey_fan(Vec2::of(ring(3), 1, 0), Vec2::of(ring(3), 0, 1)) == std::vector<Vec2>{Vec2::of(ring(3), 1, 1)});
  const auto l4 = RingElement::lambda(ring(4));
  CHECK(farey_fan(Vec2::of(ring(4), 1, 0), Vec2::of(ring(4), 0, 1)) ==
        std::vector<Vec2>{Vec2{l4, el(4, 1)}, Vec2{el(4, 1), l4}});
  const auto l5 = RingElement::lambda(ring(5));
  CHECK(farey_fan(Vec2::of(ring(5), 1, 0), Vec2::of(ring(5), 0, 1)) ==
        std::vector<Vec2>{Vec2{l5, el(5, 1)}, Vec2{l5, l5}, Vec2{el(5, 1), l5}});
}

TEST_CASE("q = 3 orbit equals the primitive vectors") {
  CHECK(generate_orbit(3, Rational(5, 2)).size() == 16);
  CHECK(generate_orbit(3, Rational(1)).size() == 4);
  for (long r : {1L, 2L, 7L, 30L}) {
    const auto s = generate_orbit(3, Rational(r));
    std::set<std::pair<long, long>> want;
    for (const auto& v : oracle3::primitive_vectors(static_cast<double>(r))) want.emplace(v.x, v.y);
    CHECK(as_int_set(s) == want);
    CHECK(s.size() == want.size());
  }
  CHECK_THROWS_AS(generate_orbit(3, Rational(1, 2)), EmptyInteriorError);
}

TEST_CASE("q = 4 orbit matches its closed form") {
  // H_4 matrices are [[a, b s], [c s, d]] or [[a s, b], [c, d s]] with s = sqrt 2,
  // so V_4 = {(a, c s): a odd, gcd(a, c) = 1} u {(a s, c): c odd, gcd(a, c) = 1}.
  const long R = 25;
  const auto s = generate_orbit(4, Rational(R));
  std::size_t expected = 0;
  for (long a = -R; a <= R; ++a) {
    for (long c = -R; c <= R; ++c) {
      if (std::gcd(a, c) != 1) continue;
      if ((a & 1) && a * a + 2 * c * c <= R * R) {
        ++expected;
        CHECK(s.contains(Vec2{el(4, a), el(4, 0, c)}));
      }
      if ((c & 1) && 2 * a * a + c * c <= R * R) {
        ++expected;
        CHECK(s.contains(Vec2{el(4, 0, a), el(4, c)}));
      }
    }
  }
  CHECK(s.size() == expected);
}

TEST_CASE("witnesses are H_q elements completing their vector") {
  for (int q : {3, 4, 5, 7}) {
    const auto s = generate_orbit(q, Rational(12));
    for (const auto& p : s.expand()) {
      const Mat2 g = Mat2::from_columns(p.v, p.companion);
      REQUIRE(g.determinant() == el(q, 1));
      REQUIRE(g * Vec2::of(ring(q), 1, 0) == p.v);
      // A conclusive reduction of the witness's first column recovers t = 1.
      const auto red = reduce_vector(p.v);
      REQUIRE(red.conclusive());
      REQUIRE(red.in_orbit());
    }
  }
}

TEST_CASE("orbit symmetry, membership and radius monotonicity") {
  const auto l5 = RingElement::lambda(ring(5));
  const auto s5 = generate_orbit(5, Rational(5, 2));
  CHECK(s5.contains(Vec2{l5, l5}));
  CHECK_FALSE(s5.contains(Vec2::of(ring(5), 1, 1)));
  CHECK(s5.contains(Vec2::of(ring(5), 1, 0)));
  CHECK(generate_orbit(3, Rational(5)).lookup(Vec2::of(ring(3), 2, 4)) == Membership::not_member);
  CHECK(s5.lookup(Vec2::of(ring(5), 40, 1)) == Membership::outside_radius);
  CHECK_FALSE(is_member(Vec2::of(ring(5), 40, 1), s5));

  for (int q : {4, 5, 7}) {
    const auto small = generate_orbit(q, Rational(9));
    const auto big = generate_orbit(q, Rational(15));
    for (const auto& p : small.expand()) {
      REQUIRE(big.contains(p.v));
      REQUIRE(small.contains(-p.v));
      REQUIRE(small.contains(Vec2{-p.v.x, p.v.y}));
    }
    CHECK(small.size() < big.size());
  }
}

TEST_CASE("reduce_vector examples and agreement with lookup") {
  const auto r35 = reduce_vector(Vec2::of(ring(3), 3, 5));
  CHECK(r35.in_orbit());
  CHECK(*r35.witness * Vec2::of(ring(3), 3, 5) == Vec2::of(ring(3), 1, 0));
  const auto r24 = reduce_vector(Vec2::of(ring(3), 2, 4));
  REQUIRE(r24.conclusive());
  CHECK(*r24.t == el(3, 2));
  const auto r10 = reduce_vector(Vec2::of(ring(5), 1, 0));
  CHECK(*r10.witness == Mat2::identity(ring(5)));
  CHECK(*reduce_vector(Vec2::of(ring(5), 1, 1)).t == el(5, -1, 1));
  CHECK_THROWS_AS(reduce_vector(Vec2::of(ring(5), 0, 0)), DomainError);

  // Scan a coefficient box; wherever reduction is conclusive it must agree
  // with the generated set.
  for (int q : {4, 5}) {
    const auto s = generate_orbit(q, Rational(6));
    std::size_t conclusive = 0;
    for (long a0 = -4; a0 <= 4; ++a0)
      for (long a1 = -3; a1 <= 3; ++a1)
        for (long b0 = -4; b0 <= 4; ++b0)
          for (long b1 = -3; b1 <= 3; ++b1) {
            const Vec2 v{el(q, a0, a1), el(q, b0, b1)};
            if (v.is_zero() || s.lookup(v) == Membership::outside_radius) continue;
            const auto red = reduce_vector(v, 48, false);
            if (!red.conclusive()) continue;
            ++conclusive;
            REQUIRE(red.in_orbit() == s.contains(v));
          }
    CHECK(conclusive > 100);
  }
}

TEST_CASE("save and load round trip") {
  for (bool witnesses : {true, false}) {
    const auto s = generate_orbit(5, Rational(7), {witnesses});
    std::stringstream buf;
    s.save(buf);
    const auto t = OrbitSet::load(buf);
    CHECK(t.q() == 5);
    CHECK(t.radius() == Rational(7));
    CHECK(t.size() == s.size());
    CHECK(t.has_witnesses() == witnesses);
    for (const auto& p : s.expand()) REQUIRE(t.contains(p.v));
  }
  std::stringstream bad("q=3 R=2\n3 3\n");
  CHECK_THROWS(OrbitSet::load(bad));
}
