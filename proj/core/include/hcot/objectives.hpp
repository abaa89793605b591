#pragma once

#include <span>
#include <vector>

#include "hcot/hierarchy.hpp"
#include "hcot/types.hpp"

namespace hcot {

/// Non-owning view of an N x K logit matrix and its N ground-truth fine
/// labels. The referenced matrix and label storage must outlive the view.
class LogitBatch {
 public:
  /// Throws std::invalid_argument when the row count and label count
  /// disagree, a label is outside [0, K), or any logit is non-finite.
  LogitBatch(const Matrix& values, std::span<const Index> labels);

  const Matrix& values() const noexcept { return *values_; }
  std::span<const Index> labels() const noexcept { return labels_; }
  Index rows() const noexcept { return static_cast<Index>(values_->rows()); }
  Index classes() const noexcept { return static_cast<Index>(values_->cols()); }
  std::span<const double> row(Index i) const noexcept {
    return {values_->row(static_cast<Eigen::Index>(i)).data(), classes()};
  }

 private:
  const Matrix* values_;
  std::span<const Index> labels_;
};

/// Softmax restricted to `indices`; probs[k] belongs to class indices[k].
struct SubsetDistribution {
  std::vector<Index> indices;
  std::vector<double> probs;
};

/// Batch-mean objective value, per-sample values, and d(value)/d(logits).
struct ObjectiveResult {
  double value = 0.0;
  std::vector<double> per_sample;
  Matrix grad;
};

struct EntropyOptions {
  /// Divide each subset entropy by log|S| (skipped when |S| <= 1), mapping
  /// every term to [0, 1]. Off by default.
  bool normalize_by_subset_size = false;
};

/// exp(z_j) / sum_{k in subset} exp(z_k) with the subset maximum shifted out.
/// An empty subset yields an empty distribution. Throws std::invalid_argument
/// on duplicate or out-of-range indices.
SubsetDistribution subset_softmax(std::span<const double> z, std::span<const Index> subset);

/// -sum p log p in nats; 0 for empty and singleton distributions.
double shannon_entropy(const SubsetDistribution& d);

/// Mean of -log softmax(z_i)[g_i]; grad row = (softmax(z_i) - onehot(g_i)) / N.
/// Throws std::invalid_argument on an empty batch.
ObjectiveResult cross_entropy(const LogitBatch& batch);

/// Complement entropy: mean over samples of H(softmax over K \ {g}).
/// Throws std::invalid_argument when K < 2 or the batch is empty.
ObjectiveResult complement_entropy(const LogitBatch& batch, EntropyOptions options = {});

/// Hierarchical complement entropy: mean over samples of
/// H(softmax over G \ {g}) + H(softmax over K \ G), where G is g's coarse
/// group. Empty subsets contribute 0 to value and gradient.
/// Throws std::invalid_argument when h.num_fine() != K or the batch is empty.
ObjectiveResult hierarchical_complement_entropy(const LogitBatch& batch, const LabelHierarchy& h,
                                                EntropyOptions options = {});

/// value and grad of `lhs - rhs`. Shapes must agree.
ObjectiveResult difference(const ObjectiveResult& lhs, const ObjectiveResult& rhs);

/// Cross entropy minus complement entropy.
ObjectiveResult cot_loss(const LogitBatch& batch, EntropyOptions options = {});

/// Cross entropy minus hierarchical complement entropy.
ObjectiveResult hcot_loss(const LogitBatch& batch, const LabelHierarchy& h,
                          EntropyOptions options = {});

}  // namespace hcot
