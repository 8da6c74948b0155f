#pragma once

#include <string_view>

namespace gpattr {

enum class KernelShape { Boxcar, ExpDecay, HalfGaussian };

KernelShape parse_kernel_shape(std::string_view name);
std::string_view to_string(KernelShape shape);

/// Impact kernel psi with unit mass on (0, inf). psi(u) = 0 for u <= 0.
///
///   Boxcar:       psi(u) = 1/T0 on (0, T0]
///   ExpDecay:     psi(u) = exp(-u/T0) / T0
///   HalfGaussian: psi(u) = sqrt(2 / (pi T0^2)) exp(-u^2 / (2 T0^2))
class Kernel {
 public:
  Kernel(KernelShape shape, double scale);

  KernelShape shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }

  /// psi(u); left-continuous.
  double operator()(double u) const noexcept;
  /// lim_{v -> u+} psi(v).
  double right_limit(double u) const noexcept;
  /// int_0^u psi.
  double cumulative(double u) const noexcept;

  bool operator==(const Kernel&) const = default;

 private:
  KernelShape shape_;
  double scale_;
};

}  // namespace gpattr
