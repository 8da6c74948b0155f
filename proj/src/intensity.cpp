#include "gpattr/intensity.hpp"

#include "gpattr/error.hpp"

namespace gpattr {
namespace {

bool masked(const EventMask& removed, std::size_t i) { return i < removed.size() && removed[i] != 0; }

}  // namespace

double excitation(const Path& path, const KernelTable& kernels, TypeIndex target, TypeIndex source, double t,
                  const EventMask& removed) {
  const Kernel& psi = kernels(source, target);
  double sum = 0.0;
  for (std::size_t i = 0; i < path.events.size(); ++i) {
    const Event& ev = path.events[i];
    if (ev.t >= t) break;
    if (ev.type == source && !masked(removed, i)) sum += psi(t - ev.t);
  }
  return sum;
}

double feature(const Path& path, const KernelTable& kernels, TypeIndex target, int column, double t) {
  if (column == 0) return 1.0;
  if (column < 0 || column > kernels.num_types()) throw InvalidArgument("feature column out of range");
  return excitation(path, kernels, target, column - 1, t);
}

double intensity(const Path& path, const ModelParams& params, TypeIndex target, double t, const EventMask& removed) {
  if (!params.is_customer(target)) throw InvalidArgument("intensity target must be customer-initiated");
  double lambda = params.mu(target);
  for (std::size_t i = 0; i < path.events.size(); ++i) {
    const Event& ev = path.events[i];
    if (ev.t >= t) break;
    if (masked(removed, i)) continue;
    const double a = params.alpha(ev.type, target);
    if (a != 0.0) lambda += a * params.kernels(ev.type, target)(t - ev.t);
  }
  return lambda;
}

double intensity_right_limit(const Path& path, const ModelParams& params, TypeIndex target, double t) {
  double lambda = params.mu(target);
  for (const Event& ev : path.events) {
    if (ev.t > t) break;
    const double a = params.alpha(ev.type, target);
    if (a != 0.0) lambda += a * params.kernels(ev.type, target).right_limit(t - ev.t);
  }
  return lambda;
}

double compensator(const Path& path, const ModelParams& params, TypeIndex target, double a, double b) {
  if (b < a) throw InvalidArgument("compensator interval is reversed");
  double total = params.mu(target) * (b - a);
  for (const Event& ev : path.events) {
    if (ev.t >= b) break;
    const double w = params.alpha(ev.type, target);
    if (w == 0.0) continue;
    const Kernel& psi = params.kernels(ev.type, target);
    total += w * (psi.cumulative(b - ev.t) - psi.cumulative(a - ev.t));
  }
  return total;
}

}  // namespace gpattr
