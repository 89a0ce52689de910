#pragma once

// Generation of V_q = H_q (1, 0)^T inside a Euclidean disk, by recursive
// Farey-fan insertion in the first quadrant plus the 4-fold symmetry.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hecke/linalg.hpp"

namespace hecke {

enum class Membership { member, not_member, outside_radius };

/// One element of the full orbit set, with its witness column and norm.
struct OrbitPoint {
  Vec2 v;
  Vec2 companion;  ///< second column of a witness (v | companion) in H_q; zero when witnesses are off
  RingElement norm;
  double norm_approx = 0.0;
};

/// V_q intersected with the closed disk of radius R. Immutable once built.
///
/// Only the closed first-quadrant representatives (|x|, |y|) are stored; the
/// other three images are produced on lookup and iteration.
class OrbitSet {
 public:
  OrbitSet(int q, Rational radius, std::vector<Vec2> representatives, std::vector<Vec2> companions);

  [[nodiscard]] int q() const noexcept { return ctx_->q(); }
  [[nodiscard]] const RingContext& context() const noexcept { return *ctx_; }
  [[nodiscard]] const Rational& radius() const noexcept { return radius_; }
  [[nodiscard]] bool has_witnesses() const noexcept { return !companions_.empty(); }
  /// #{V_q ∩ B(0, R)}
  [[nodiscard]] std::size_t size() const noexcept;
  /// First-quadrant representatives ordered by Vec2Less.
  [[nodiscard]] std::span<const Vec2> representatives() const noexcept { return reps_; }
  /// Representatives whose second coordinate equals y exactly.
  [[nodiscard]] std::span<const Vec2> with_second_coordinate(const RingElement& y) const;

  /// True iff norm <= R^2.
  [[nodiscard]] bool covers(const RingElement& norm) const { return bound_.admits(norm); }
  [[nodiscard]] Membership lookup(const Vec2& v) const;
  [[nodiscard]] bool contains(const Vec2& v) const { return lookup(v) == Membership::member; }
  /// g in H_q with g (1, 0)^T = v, or nullopt for non-members / no witnesses.
  [[nodiscard]] std::optional<Mat2> witness(const Vec2& v) const;

  /// All elements, representatives in order, each followed by its images
  /// (+,+), (-,+), (+,-), (-,-) with duplicates on the axes dropped.
  [[nodiscard]] std::vector<OrbitPoint> expand() const;

  /// Line format: header "q=<q> R=<R>", then "x y" or "x y wx wy" per element.
  void save(std::ostream& out) const;
  static OrbitSet load(std::istream& in);

 private:
  [[nodiscard]] std::optional<std::size_t> find_representative(const Vec2& rep) const;

  const RingContext* ctx_;
  Rational radius_;
  SquaredRadius bound_;
  std::vector<Vec2> reps_;
  std::vector<Vec2> companions_;
  std::vector<std::uint32_t> slots_;  // open addressing, index + 1, 0 = empty
};

struct GenerateOptions {
  bool witnesses = true;
};

/// The q - 2 vectors a_2 .. a_{q-1} of a_i = lambda a_{i-1} - a_{i-2},
/// seeded with a_1 = u, a_0 = -v.
std::vector<Vec2> farey_fan(const Vec2& u, const Vec2& v);

/// V_q ∩ B(0, R). Throws EmptyInteriorError for R < 1.
OrbitSet generate_orbit(int q, const Rational& radius, const GenerateOptions& options = {});

/// Exact membership; false (with Membership::outside_radius from lookup) when
/// v lies beyond the generated radius.
bool is_member(const Vec2& v, const OrbitSet& s);

enum class ReductionStatus { success, inconclusive };

struct Reduction {
  ReductionStatus status = ReductionStatus::inconclusive;
  /// h v = (t, 0)^T with t > 0, valid on success.
  std::optional<RingElement> t;
  std::optional<Mat2> witness;
  std::size_t steps = 0;

  [[nodiscard]] bool conclusive() const noexcept { return status == ReductionStatus::success; }
  /// Meaningful only when conclusive.
  [[nodiscard]] bool in_orbit() const;
};

/// Nearest-multiple slope reduction by T^-j and S. Budget defaults to
/// 64 * (bit size of v + 1) steps. With track_witness off only t is computed.
Reduction reduce_vector(const Vec2& v, std::optional<std::size_t> step_budget = std::nullopt, bool track_witness = true);

}  // namespace hecke
