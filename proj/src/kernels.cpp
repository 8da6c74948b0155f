#include "gpattr/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpattr/error.hpp"

namespace gpattr {

KernelShape parse_kernel_shape(std::string_view name) {
  if (name == "boxcar") return KernelShape::Boxcar;
  if (name == "exp" || name == "exp_decay") return KernelShape::ExpDecay;
  if (name == "half_gaussian") return KernelShape::HalfGaussian;
  throw InvalidArgument("unknown kernel shape '" + std::string(name) + "'");
}

std::string_view to_string(KernelShape shape) {
  switch (shape) {
    case KernelShape::Boxcar: return "boxcar";
    case KernelShape::ExpDecay: return "exp";
    case KernelShape::HalfGaussian: return "half_gaussian";
  }
  return "exp";
}

Kernel::Kernel(KernelShape shape, double scale) : shape_(shape), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("kernel scale T0 must be positive");
}

double Kernel::operator()(double u) const noexcept {
  if (u <= 0.0) return 0.0;
  switch (shape_) {
    case KernelShape::Boxcar: return u <= scale_ ? 1.0 / scale_ : 0.0;
    case KernelShape::ExpDecay: return std::exp(-u / scale_) / scale_;
    case KernelShape::HalfGaussian: {
      const double z = u / scale_;
      return std::sqrt(2.0 / std::numbers::pi) / scale_ * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

double Kernel::right_limit(double u) const noexcept {
  if (u < 0.0) return 0.0;
  if (shape_ == KernelShape::Boxcar) return u < scale_ ? 1.0 / scale_ : 0.0;
  if (u == 0.0) {
    return shape_ == KernelShape::ExpDecay ? 1.0 / scale_ : std::sqrt(2.0 / std::numbers::pi) / scale_;
  }
  return (*this)(u);
}

double Kernel::cumulative(double u) const noexcept {
  if (u <= 0.0) return 0.0;
  switch (shape_) {
    case KernelShape::Boxcar: return u >= scale_ ? 1.0 : u / scale_;
    case KernelShape::ExpDecay: return -std::expm1(-u / scale_);
    case KernelShape::HalfGaussian: return std::erf(u / (scale_ * std::numbers::sqrt2));
  }
  return 0.0;
}

}  // namespace gpattr
