#include "hecke/linalg.hpp"

namespace hecke {

Mat2 Mat2::identity(const RingContext& ctx) {
  return {RingElement(ctx, Integer(1)), RingElement(ctx), RingElement(ctx), RingElement(ctx, Integer(1))};
}

std::string Mat2::to_string() const {
  return "[[" + a.to_string() + ", " + b.to_string() + "], [" + c.to_string() + ", " + d.to_string() + "]]";
}

Mat2 generator_s(const RingContext& ctx) {
  return {RingElement(ctx), RingElement(ctx, Integer(-1)), RingElement(ctx, Integer(1)), RingElement(ctx)};
}

Mat2 generator_t_power(const RingContext& ctx, const Integer& k) {
  return {RingElement(ctx, Integer(1)), RingElement::lambda(ctx) * k, RingElement(ctx), RingElement(ctx, Integer(1))};
}

std::pair<Mat2, Mat2> hecke_generators(int q) {
  const RingContext& ctx = RingContext::get(q);
  return {generator_s(ctx), generator_t_power(ctx, Integer(1))};
}

}  // namespace hecke
