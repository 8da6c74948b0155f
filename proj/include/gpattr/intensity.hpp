#pragma once

#include <cstdint>
#include <vector>

#include "gpattr/catalog.hpp"
#include "gpattr/model.hpp"

namespace gpattr {

/// Per-position flag; nonzero marks an event as removed from the history.
using EventMask = std::vector<std::uint8_t>;

/// sum_{t_i < t, e_i = source} psi_{source,target}(t - t_i), skipping masked events.
double excitation(const Path& path, const KernelTable& kernels, TypeIndex target, TypeIndex source, double t,
                  const EventMask& removed = {});

/// Design feature X_k(t) for the intensity of `target`: column 0 is the
/// constant 1, column k >= 1 is the excitation from type k - 1.
double feature(const Path& path, const KernelTable& kernels, TypeIndex target, int column, double t);

/// lambda_target(t | H_t). Only events strictly before t enter the history.
double intensity(const Path& path, const ModelParams& params, TypeIndex target, double t,
                 const EventMask& removed = {});

/// lim_{s -> t+} lambda_target(s): events at t are included, kernels taken from the right.
double intensity_right_limit(const Path& path, const ModelParams& params, TypeIndex target, double t);

/// int_a^b lambda_target(s) ds for a <= b, history fixed to `path`.
double compensator(const Path& path, const ModelParams& params, TypeIndex target, double a, double b);

}  // namespace gpattr
