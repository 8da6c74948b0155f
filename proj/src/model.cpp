#include "gpattr/model.hpp"

#include <algorithm>
#include <cmath>

#include "gpattr/error.hpp"

namespace gpattr {

KernelTable::KernelTable(int num_types, int num_customer, Kernel shared)
    : p_(num_types), q_(num_customer), kernels_() {
  if (num_customer < 1 || num_customer > num_types) throw InvalidArgument("kernel table needs 1 <= q <= p");
  kernels_.assign(static_cast<std::size_t>(p_) * static_cast<std::size_t>(q_), shared);
}

std::size_t KernelTable::index(TypeIndex source, TypeIndex target) const {
  if (source < 0 || source >= p_ || target < 0 || target >= q_) throw InvalidArgument("kernel index out of range");
  return static_cast<std::size_t>(source) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(target);
}

bool KernelTable::uniform() const noexcept {
  return std::all_of(kernels_.begin(), kernels_.end(), [&](const Kernel& k) { return k == kernels_.front(); });
}

ModelParams::ModelParams(int num_types, int num_customer, Kernel shared)
    : ModelParams(KernelTable(num_types, num_customer, shared)) {}

ModelParams::ModelParams(KernelTable table)
    : mu(Eigen::VectorXd::Zero(table.num_customer())),
      alpha(Eigen::MatrixXd::Zero(table.num_types(), table.num_customer())),
      kernels(std::move(table)) {}

void ModelParams::validate() const {
  if (mu.size() != num_customer() || alpha.rows() != num_types() || alpha.cols() != num_customer())
    throw InvalidArgument("model parameter shapes do not match the kernel table");
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (!ok(mu(i))) throw InvalidArgument("baseline intensities must be finite and nonnegative");
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    if (!ok(alpha.data()[i])) throw InvalidArgument("Granger coefficients must be finite and nonnegative");
}

bool GrangerGraph::contains(TypeIndex source, TypeIndex target) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(source, target));
}

std::vector<TypeIndex> GrangerGraph::parents(TypeIndex target) const {
  std::vector<TypeIndex> out;
  for (const auto& [s, t] : edges)
    if (t == target) out.push_back(s);
  return out;
}

GrangerGraph extract_graph(const ModelParams& params, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("graph threshold must be nonnegative");
  GrangerGraph g;
  for (TypeIndex s = 0; s < params.num_types(); ++s)
    for (TypeIndex t = 0; t < params.num_customer(); ++t)
      if (params.alpha(s, t) > threshold) g.edges.emplace_back(s, t);
  return g;
}

}  // namespace gpattr
