#pragma once

// Ingredients of the Siegel-Veech moment formulas for H_q: the constant c(q),
// the q-geometric totient, the determinant set N_q, J_{n,m} normal forms of
// vector pairs, pair counting in the R^4 ball, and k-tuple classification.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hecke/errors.hpp"
#include "hecke/orbit.hpp"

namespace hecke {

/// Residue window for the totient. `paper` counts 1 <= a <= |n|;
/// `fundamental` counts 1 <= a < 1 + lambda |n|, one representative per
/// T-shift class.
enum class PhiMode { paper, fundamental };

std::string_view to_string(PhiMode mode);
PhiMode parse_phi_mode(std::string_view text);

/// c(q) = pi (pi - pi/q - pi/2) = (1/2 - 1/q) pi^2.
struct SvConstant {
  int q = 0;
  Rational pi_squared_coefficient;
  double value = 0.0;
};

SvConstant sv_constant(int q);

/// Elements a with (a, n)^T in V_q inside the residue window, in increasing
/// real order. Throws InsufficientRadiusError if `s` cannot see the window.
std::vector<RingElement> totient_residues(const RingElement& n, const OrbitSet& s, PhiMode mode);

/// phi_q(n) = #totient_residues(n, s, mode).
std::size_t phi_q(const RingElement& n, const OrbitSet& s, PhiMode mode = PhiMode::paper);

/// n in N_q iff phi_q(n) >= 1 under the chosen window.
bool n_in_Nq(const RingElement& n, const OrbitSet& s, PhiMode mode = PhiMode::paper);

/// Every n in N_q with |n| <= bound, in increasing real order (negatives first).
std::vector<RingElement> enumerate_Nq(const OrbitSet& s, const Rational& bound, PhiMode mode = PhiMode::paper);

/// Smallest integer radius an orbit set needs for totient queries up to |n| <= bound.
Rational radius_for_totient(const RingContext& ctx, const Rational& bound, PhiMode mode);

/// The stored witness g in H_q with first column v. Throws NotAMemberError.
Mat2 complete_to_matrix(const Vec2& v, const OrbitSet& s);

/// h (v1 | v2) = [[1, m], [0, n]] with h in H_q and 1 <= m < 1 + lambda |n|.
struct CanonicalPair {
  RingElement n;
  RingElement m;
  Mat2 witness;
};

CanonicalPair canonicalize_pair(const Vec2& v1, const Vec2& v2, const OrbitSet& s);

/// Same normal form given a witness g with g (1, 0)^T = v1. No membership checks.
CanonicalPair canonicalize_with_witness(const Mat2& g, const Vec2& v2);

/// Representative of l modulo lambda n in [1, 1 + lambda |n|), and the j with
/// m = l - j lambda n.
std::pair<RingElement, Integer> fundamental_residue(const RingElement& l, const RingElement& n);

// ---------------------------------------------------------------------------
// Pair counting

struct PairKeyLess {
  bool operator()(const std::pair<RingElement, RingElement>& a, const std::pair<RingElement, RingElement>& b) const noexcept {
    ExactLess less;
    if (less(a.first, b.first)) return true;
    if (less(b.first, a.first)) return false;
    return less(a.second, b.second);
  }
};

struct PairCountOptions {
  bool refine_m = false;
  unsigned workers = 1;
};

struct PairCounts {
  std::map<RingElement, std::uint64_t, ExactLess> by_n;
  std::map<std::pair<RingElement, RingElement>, std::uint64_t, PairKeyLess> by_nm;
  /// Ordered pairs with determinant 0 (v2 = +-v1).
  std::uint64_t dependent = 0;
};

/// Exhaustive scan of ordered pairs with |v1|^2 + |v2|^2 <= R^2, bucketed by
/// exact determinant (and canonical m when refine_m is set). Cost grows like R^4.
PairCounts count_pairs(const OrbitSet& s, const Rational& radius, const PairCountOptions& options = {});

/// Count_q(R, n) for one determinant across a radius sweep, split by orbit.
struct DeterminantCounts {
  RingElement n;
  std::vector<Rational> radii;
  /// Canonical m labels of the H_q orbits in D_n (fundamental window).
  std::vector<RingElement> residues;
  /// totals[r] = Count_q(radii[r], n)
  std::vector<std::uint64_t> totals;
  /// by_residue[r][i] = pairs in the orbit labelled residues[i]
  std::vector<std::vector<std::uint64_t>> by_residue;
};

/// Enumerates only pairs on the determinant-n lines: for each v1 with witness
/// (v1 | w), v2 = l v1 + n w with l = m + j lambda n. Linear in the number of
/// hits instead of quadratic in the orbit size. Radii must be increasing.
DeterminantCounts count_pairs_with_determinant(const OrbitSet& s, std::span<const Rational> radii, const RingElement& n,
                                               unsigned workers = 1);

/// The pairs themselves at a single radius, sorted by (v1, v2) under Vec2Less.
std::vector<std::pair<Vec2, Vec2>> pairs_with_determinant(const OrbitSet& s, const Rational& radius, const RingElement& n,
                                                          unsigned workers = 1);

/// phi_q(n) pi^2 / (|n| c(q)) = (2q phi / (q - 2)) / |n|.
struct PairDensityPrediction {
  RingElement abs_n;
  std::size_t phi = 0;
  bool in_Nq = false;
  PhiMode mode = PhiMode::paper;
  /// value = coefficient / |n|
  Rational coefficient;
  double value = 0.0;
};

PairDensityPrediction predicted_pair_density(const RingElement& n, const OrbitSet& s, PhiMode mode = PhiMode::paper);

/// Density of a single orbit E_n^(m): pi^2 / (|n| c(q)).
double predicted_orbit_density(const RingElement& n);

struct DensityReport {
  int q = 0;
  std::string label;
  Rational radius;
  double empirical = 0.0;
  double predicted = 0.0;
  double relative_error = 0.0;
};

DensityReport make_density_report(int q, std::string label, const Rational& radius, std::uint64_t count, double predicted);

// ---------------------------------------------------------------------------
// k-tuples

enum class TupleKind { dependent, independent };

/// Orbit-decomposition class of a k-tuple (v_1, ..., v_k) of V_q vectors.
///
/// Dependent tuples are (v, +-v, ..., +-v). Independent tuples are
/// (lambda v_1, alpha v_1 + beta v_j) with j the first index independent of
/// v_1; alpha_i and beta_i are stored as numerators over n, since they are
/// in general fractions.
struct TupleClass {
  TupleKind kind = TupleKind::dependent;
  std::vector<int> signs;
  std::size_t j = 0;  ///< 1-based
  std::optional<RingElement> n;
  std::optional<RingElement> m;
  std::vector<RingElement> alpha_num;  ///< n * alpha_i, first entry 0
  std::vector<RingElement> beta_num;   ///< n * beta_i, first entry n
  std::optional<Mat2> witness;         ///< h with h v_1 = (1,0), h v_j = (m, n)

  [[nodiscard]] std::string key() const;
};

struct ClassifyOptions {
  /// Decide membership of entries beyond the orbit radius by reduce_vector
  /// instead of rejecting them.
  bool reduce_outside_radius = false;
};

/// Throws NotAMemberError for entries outside V_q and ConsistencyError if the
/// J_{n,m}^{-1} V_q criterion fails for some entry.
TupleClass classify_tuple(std::span<const Vec2> vs, const OrbitSet& s, const ClassifyOptions& options = {});

struct TupleCensusOptions {
  std::uint64_t budget = 50'000'000;
  unsigned workers = 1;
  /// Also move every tuple by its class witness (g^-1 for dependent tuples)
  /// and check that it reclassifies to the same key.
  bool verify_round_trip = false;
};

struct TupleCensus {
  std::size_t k = 0;
  Rational radius;
  std::map<std::string, std::uint64_t> classes;
  std::uint64_t tuples = 0;
  std::uint64_t dependent = 0;
  std::uint64_t independent = 0;
  std::uint64_t criterion_pass = 0;
  std::uint64_t criterion_fail = 0;
  std::uint64_t round_trip_pass = 0;
  std::uint64_t round_trip_fail = 0;
};

class TupleBudgetExceeded : public BudgetExceededError {
 public:
  TupleBudgetExceeded(const std::string& what, TupleCensus partial)
      : BudgetExceededError(what), partial_(std::move(partial)) {}
  [[nodiscard]] const TupleCensus& partial() const noexcept { return partial_; }

 private:
  TupleCensus partial_;
};

/// Classifies every ordered k-tuple with sum |v_i|^2 <= R^2. k must be in 1..4.
TupleCensus tuple_census(const OrbitSet& s, const Rational& radius, std::size_t k, const TupleCensusOptions& options = {});

}  // namespace hecke
