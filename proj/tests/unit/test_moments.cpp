#include <doctest.h>

#include <numbers>

#include "hecke/errors.hpp"
#include "hecke/moments.hpp"
#include "hecke/oracle3.hpp"

using namespace hecke;

namespace {

const RingContext& ring(int q) { return RingContext::get(q); }

RingElement el(int q, long c0, long c1 = 0) {
  std::vector<Integer> v{c0, c1};
  v.resize(static_cast<std::size_t>(ring(q).degree()));
  return RingElement(ring(q), v);
}

const OrbitSet& orbit(int q, long r) {
  static std::map<std::pair<int, long>, OrbitSet> cache;
  auto it = cache.find({q, r});
  if (it == cache.end()) it = cache.emplace(std::pair{q, r}, generate_orbit(q, Rational(r))).first;
  return it->second;
}

}  // namespace

TEST_CASE("constant c(q)") {
  CHECK(sv_constant(3).pi_squared_coefficient == Rational(1, 6));
  CHECK(sv_constant(4).pi_squared_coefficient == Rational(1, 4));
  CHECK(sv_constant(5).pi_squared_coefficient == Rational(3, 10));
  const double pi = std::numbers::pi;
  CHECK(sv_constant(7).value == doctest::Approx(pi * (pi - pi / 7 - pi / 2)));
  CHECK_THROWS_AS(sv_constant(2), DomainError);
  CHECK(parse_phi_mode("fundamental") == PhiMode::fundamental);
  CHECK_THROWS_AS(parse_phi_mode("other"), DomainError);
}

TEST_CASE("q = 3 totient is Euler's") {
  const auto& s = generate_orbit(3, radius_for_totient(ring(3), Rational(120), PhiMode::paper), {false});
  for (long n = 1; n <= 120; ++n) {
    REQUIRE(phi_q(el(3, n), s) == static_cast<std::size_t>(oracle3::std_totient(n)));
    REQUIRE(phi_q(el(3, -n), s) == phi_q(el(3, n), s));
    REQUIRE(phi_q(el(3, n), s, PhiMode::fundamental) == phi_q(el(3, n), s));
  }
  CHECK_THROWS_AS(phi_q(el(3, 0), s), DomainError);
  CHECK_THROWS_AS(phi_q(el(3, 500), s), InsufficientRadiusError);
}

TEST_CASE("q = 5 totient windows") {
  const auto& s = orbit(5, 12);
  const auto l = RingElement::lambda(ring(5));
  // (1, 1) is not in V_5, so the only residue of n = 1 sits in (1, 1 + lambda).
  CHECK(phi_q(el(5, 1), s, PhiMode::paper) == 0);
  CHECK(phi_q(el(5, 1), s, PhiMode::fundamental) == 1);
  CHECK(totient_residues(el(5, 1), s, PhiMode::fundamental) == std::vector<RingElement>{l});
  CHECK(phi_q(l, s, PhiMode::paper) == 2);
  CHECK(phi_q(l, s, PhiMode::fundamental) == 2);
  CHECK(enumerate_Nq(s, Rational(3), PhiMode::fundamental) == std::vector<RingElement>{-l, el(5, -1), el(5, 1), l});
  CHECK_FALSE(n_in_Nq(el(5, 1), s));
  CHECK(n_in_Nq(el(5, 1), s, PhiMode::fundamental));
}

TEST_CASE("pair normal forms") {
  const auto& s = orbit(3, 6);
  auto check = [&](Vec2 v1, Vec2 v2, long n, long m) {
    const auto c = canonicalize_pair(v1, v2, s);
    CHECK(c.n == el(3, n));
    CHECK(c.m == el(3, m));
    CHECK(c.witness.determinant() == el(3, 1));
    CHECK(c.witness * v1 == Vec2::of(ring(3), 1, 0));
    CHECK(c.witness * v2 == Vec2::of(ring(3), m, n));
  };
  check(Vec2::of(ring(3), 1, 0), Vec2::of(ring(3), 0, 1), 1, 1);
  check(Vec2::of(ring(3), 1, 0), Vec2::of(ring(3), 1, 2), 2, 1);
  check(Vec2::of(ring(3), 2, 1), Vec2::of(ring(3), 1, 1), 1, 1);
  check(Vec2::of(ring(3), 1, 0), Vec2::of(ring(3), 3, -5), -5, 3);
  CHECK_THROWS_AS(canonicalize_pair(Vec2::of(ring(3), 1, 0), Vec2::of(ring(3), 2, 0), s), DegeneratePairError);
  CHECK_THROWS_AS(canonicalize_pair(Vec2::of(ring(3), 2, 2), Vec2::of(ring(3), 0, 1), s), NotAMemberError);

  const auto [m, j] = fundamental_residue(el(5, 7), el(5, 2));
  const auto lam = RingElement::lambda(ring(5));
  CHECK(m + lam * el(5, 2) * RingElement(ring(5), j) == el(5, 7));
  CHECK(compare(m, el(5, 1)) >= 0);
  CHECK(compare(m, el(5, 1) + lam * el(5, 2)) < 0);
}

TEST_CASE("tuple classification") {
  const auto& s = orbit(3, 6);
  const Vec2 e1 = Vec2::of(ring(3), 1, 0), e2 = Vec2::of(ring(3), 0, 1), e12 = Vec2::of(ring(3), 1, 1);
  const std::vector<Vec2> li{e1, e2, e12};
  CHECK(classify_tuple(li, s).key() == "LI;j=2;n=1;m=1;lambda=(1);n*alpha=(0,1);n*beta=(1,1)");
  const std::vector<Vec2> ld{e1, -e1};
  CHECK(classify_tuple(ld, s).key() == "LD;lambda=(1,-1)");
  const std::vector<Vec2> late{e1, e1, e2};
  const auto c = classify_tuple(late, s);
  CHECK(c.kind == TupleKind::independent);
  CHECK(c.j == 3);
  const std::vector<Vec2> bad{e1, Vec2::of(ring(3), 2, 2)};
  CHECK_THROWS_AS(classify_tuple(bad, s), NotAMemberError);
}

TEST_CASE("exhaustive pair counts match the q = 3 brute force") {
  const auto counts = count_pairs(orbit(3, 14), Rational(14));
  const auto brute = oracle3::brute_count_all_pairs(14.0);
  CHECK(counts.by_n.size() == brute.size());
  for (const auto& [n, c] : brute) REQUIRE(counts.by_n.at(el(3, n)) == c);
  // (v, +-v) with 2 |v|^2 <= R^2
  CHECK(counts.dependent == 2 * oracle3::primitive_vectors(14.0 / std::numbers::sqrt2).size());
}

TEST_CASE("line enumeration agrees with the exhaustive scan") {
  for (int q : {4, 5, 7}) {
    const Rational r(9);
    const auto& s = orbit(q, 9);
    const auto all = count_pairs(s, r, {true, 1});
    for (const auto& [n, c] : all.by_n) {
      if (compare(abs(n), el(q, 3)) > 0) continue;
      const Rational radii[] = {Rational(5), r};
      const auto d = count_pairs_with_determinant(s, radii, n);
      REQUIRE(d.totals.back() == c);
      REQUIRE(d.totals.front() <= d.totals.back());
      REQUIRE(pairs_with_determinant(s, r, n).size() == c);
      // The per-orbit split is the m refinement of the exhaustive scan.
      std::uint64_t sum = 0;
      for (std::size_t i = 0; i < d.residues.size(); ++i) {
        sum += d.by_residue.back()[i];
        const auto it = all.by_nm.find({n, d.residues[i]});
        REQUIRE(it != all.by_nm.end());
        REQUIRE(it->second == d.by_residue.back()[i]);
      }
      REQUIRE(sum == c);
      // Orbits are labelled by the fundamental-window residues of n.
      REQUIRE(d.residues.size() == phi_q(n, s, PhiMode::fundamental));
      // Count(R, -n) = Count(R, n)
      REQUIRE(all.by_n.at(-n) == c);
    }
  }
}

TEST_CASE("worker count does not change results") {
  const auto& s = orbit(5, 8);
  const auto a = count_pairs(s, Rational(8), {true, 1});
  const auto b = count_pairs(s, Rational(8), {true, 3});
  CHECK(a.by_n == b.by_n);
  CHECK(a.by_nm == b.by_nm);
  CHECK(a.dependent == b.dependent);
  const auto lam = RingElement::lambda(ring(5));
  CHECK(pairs_with_determinant(s, Rational(8), lam, 1) == pairs_with_determinant(s, Rational(8), lam, 4));
  const auto t1 = tuple_census(s, Rational(5), 3, {1'000'000, 1, false});
  const auto t3 = tuple_census(s, Rational(5), 3, {1'000'000, 3, false});
  CHECK(t1.classes == t3.classes);
  CHECK(t1.tuples == t3.tuples);
}

TEST_CASE("density predictions") {
  const auto& s3 = orbit(3, 20);
  for (long n : {1L, 5L, 7L, 12L}) {
    const auto p = predicted_pair_density(el(3, n), s3);
    CHECK(p.coefficient == Rational(6 * oracle3::std_totient(n)));
    CHECK(p.value == doctest::Approx(6.0 * static_cast<double>(oracle3::std_totient(n)) / static_cast<double>(n)));
  }
  CHECK(predicted_orbit_density(el(3, 5)) == doctest::Approx(6.0 / 5.0));
  const auto p5 = predicted_pair_density(el(5, 1), orbit(5, 12), PhiMode::paper);
  CHECK_FALSE(p5.in_Nq);
  CHECK(p5.value == 0.0);
  const auto r = make_density_report(3, "x", Rational(10), 600, 6.0);
  CHECK(r.empirical == doctest::Approx(6.0));
  CHECK(r.relative_error == doctest::Approx(0.0));
}

TEST_CASE("census basics") {
  const auto& s = orbit(4, 7);
  const auto c1 = tuple_census(s, Rational(7), 1);
  CHECK(c1.tuples == s.size());
  CHECK(c1.dependent == s.size());
  CHECK(c1.classes.size() == 1);

  const auto pairs = count_pairs(s, Rational(7));
  std::uint64_t independent = 0;
  for (const auto& [n, c] : pairs.by_n) independent += c;
  const auto c2 = tuple_census(s, Rational(7), 2, {1'000'000, 1, true});
  CHECK(c2.independent == independent);
  CHECK(c2.dependent == pairs.dependent);
  CHECK(c2.round_trip_fail == 0);
  CHECK(c2.round_trip_pass == c2.tuples);

  const auto c3 = tuple_census(s, Rational(4), 3, {1'000'000, 1, true});
  CHECK(c3.criterion_fail == 0);
  CHECK(c3.criterion_pass > 0);
  CHECK(c3.round_trip_fail == 0);

  try {
    (void)tuple_census(s, Rational(7), 3, {100, 1, false});
    FAIL("budget not enforced");
  } catch (const TupleBudgetExceeded& e) {
    CHECK(e.partial().tuples <= 100);
  }
  CHECK_THROWS_AS(tuple_census(s, Rational(7), 5), DomainError);
  CHECK_THROWS_AS(tuple_census(s, Rational(8), 2), InsufficientRadiusError);
}
