#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "gpattr/catalog.hpp"
#include "gpattr/kernels.hpp"

namespace gpattr {

/// Kernel assignment psi_{e'e} for every source type e' (p rows) and
/// customer-initiated target e (q columns).
class KernelTable {
 public:
  KernelTable(int num_types, int num_customer, Kernel shared);

  int num_types() const noexcept { return p_; }
  int num_customer() const noexcept { return q_; }

  const Kernel& operator()(TypeIndex source, TypeIndex target) const {
    return kernels_[index(source, target)];
  }
  void set(TypeIndex source, TypeIndex target, Kernel k) { kernels_[index(source, target)] = k; }

  /// The kernel shared by every pair, if there is one.
  bool uniform() const noexcept;

  bool operator==(const KernelTable&) const = default;

 private:
  std::size_t index(TypeIndex source, TypeIndex target) const;

  int p_;
  int q_;
  std::vector<Kernel> kernels_;
};

/// Parameters of the customer-initiated intensities
///   lambda_e(t) = mu_e + sum_{e'} alpha_{e'e} sum_{t_i < t, e_i = e'} psi_{e'e}(t - t_i).
struct ModelParams {
  Eigen::VectorXd mu;     // q
  Eigen::MatrixXd alpha;  // p x q
  KernelTable kernels;

  ModelParams(int num_types, int num_customer, Kernel shared);
  explicit ModelParams(KernelTable table);

  int num_types() const noexcept { return kernels.num_types(); }
  int num_customer() const noexcept { return kernels.num_customer(); }
  bool is_customer(TypeIndex e) const noexcept { return e >= 0 && e < num_customer(); }

  /// Throws InvalidArgument on shape mismatch, negative or non-finite entries.
  void validate() const;
};

/// Edges e' -> e of the Granger causality graph among customer-initiated targets.
struct GrangerGraph {
  std::vector<std::pair<TypeIndex, TypeIndex>> edges;  // sorted (source, target)

  bool contains(TypeIndex source, TypeIndex target) const;
  std::vector<TypeIndex> parents(TypeIndex target) const;
  std::size_t size() const noexcept { return edges.size(); }

  bool operator==(const GrangerGraph&) const = default;
};

/// Edge e' -> e iff alpha(e', e) > threshold.
GrangerGraph extract_graph(const ModelParams& params, double threshold = 0.0);

}  // namespace gpattr
