#include "hcot/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hcot {

namespace {

// Probabilities below this are kept out of the log argument so 0 * log 0 = 0.
constexpr double kLogFloor = 1e-300;

// Entropy of the subset softmax of `z` over `subset`, with
// scale * dH/dz accumulated into `grad` (dH/dz_j = -p_j (log p_j + H)).
// `probs` is scratch storage of at least subset.size() elements.
double accumulate_subset_entropy(std::span<const double> z, std::span<const Index> subset,
                                 double scale, EntropyOptions options, double* grad,
                                 std::vector<double>& probs) {
  const std::size_t m = subset.size();
  if (m <= 1) return 0.0;

  double zmax = -std::numeric_limits<double>::infinity();
  for (Index j : subset) zmax = std::max(zmax, z[j]);
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    probs[k] = std::exp(z[subset[k]] - zmax);
    sum += probs[k];
  }
  double entropy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    probs[k] /= sum;
    entropy -= probs[k] * std::log(std::max(probs[k], kLogFloor));
  }

  double norm = 1.0;
  if (options.normalize_by_subset_size) norm = 1.0 / std::log(static_cast<double>(m));

  for (std::size_t k = 0; k < m; ++k) {
    const double p = probs[k];
    grad[subset[k]] += scale * norm * (-p * (std::log(std::max(p, kLogFloor)) + entropy));
  }
  return entropy * norm;
}

void require_non_empty(const LogitBatch& batch, const char* objective) {
  if (batch.rows() == 0) throw std::invalid_argument(std::string(objective) + ": empty batch");
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

LogitBatch::LogitBatch(const Matrix& values, std::span<const Index> labels)
    : values_(&values), labels_(labels) {
  if (static_cast<Index>(values.rows()) != labels.size()) {
    throw std::invalid_argument("logit batch: " + std::to_string(values.rows()) + " rows but " +
                                std::to_string(labels.size()) + " labels");
  }
  const Index k = classes();
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) {
      throw std::invalid_argument("logit batch: label " + std::to_string(labels[i]) + " at row " +
                                  std::to_string(i) + " outside [0, " + std::to_string(k) + ")");
    }
  }
  if (!values.allFinite()) throw std::invalid_argument("logit batch: non-finite logit");
}

SubsetDistribution subset_softmax(std::span<const double> z, std::span<const Index> subset) {
  std::vector<bool> seen(z.size(), false);
  for (Index j : subset) {
    if (j >= z.size()) {
      throw std::invalid_argument("subset index " + std::to_string(j) + " out of range [0, " +
                                  std::to_string(z.size()) + ")");
    }
    if (seen[j]) throw std::invalid_argument("duplicate subset index " + std::to_string(j));
    seen[j] = true;
  }

  SubsetDistribution d;
  d.indices.assign(subset.begin(), subset.end());
  d.probs.resize(subset.size());
  if (subset.empty()) return d;

  double zmax = -std::numeric_limits<double>::infinity();
  for (Index j : subset) zmax = std::max(zmax, z[j]);
  double sum = 0.0;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    d.probs[k] = std::exp(z[subset[k]] - zmax);
    sum += d.probs[k];
  }
  for (double& p : d.probs) p /= sum;
  return d;
}

double shannon_entropy(const SubsetDistribution& d) {
  if (d.probs.size() <= 1) return 0.0;
  double h = 0.0;
  for (double p : d.probs) h -= p * std::log(std::max(p, kLogFloor));
  return h;
}

ObjectiveResult cross_entropy(const LogitBatch& batch) {
  require_non_empty(batch, "cross_entropy");
  const Index n = batch.rows();
  const Index k = batch.classes();
  const double inv_n = 1.0 / static_cast<double>(n);

  ObjectiveResult r;
  r.per_sample.resize(n);
  r.grad.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Index i = 0; i < n; ++i) {
    const auto z = batch.row(i);
    const Index g = batch.labels()[i];
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double log_norm = zmax + std::log(sum);
    r.per_sample[i] = log_norm - z[g];

    double* grad = r.grad.row(static_cast<Eigen::Index>(i)).data();
    for (Index j = 0; j < k; ++j) grad[j] = std::exp(z[j] - log_norm) * inv_n;
    grad[g] -= inv_n;
  }
  r.value = mean_of(r.per_sample);
  return r;
}

ObjectiveResult complement_entropy(const LogitBatch& batch, EntropyOptions options) {
  require_non_empty(batch, "complement_entropy");
  const Index n = batch.rows();
  const Index k = batch.classes();
  if (k < 2) throw std::invalid_argument("complement_entropy: needs at least 2 classes");
  const double inv_n = 1.0 / static_cast<double>(n);

  ObjectiveResult r;
  r.per_sample.resize(n);
  r.grad.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  std::vector<Index> complement(k - 1);
  std::vector<double> scratch(k);
  for (Index i = 0; i < n; ++i) {
    const Index g = batch.labels()[i];
    for (Index j = 0, m = 0; j < k; ++j) {
      if (j != g) complement[m++] = j;
    }
    r.per_sample[i] = accumulate_subset_entropy(batch.row(i), complement, inv_n, options,
                                                r.grad.row(static_cast<Eigen::Index>(i)).data(),
                                                scratch);
  }
  r.value = mean_of(r.per_sample);
  return r;
}

ObjectiveResult hierarchical_complement_entropy(const LogitBatch& batch, const LabelHierarchy& h,
                                                EntropyOptions options) {
  require_non_empty(batch, "hierarchical_complement_entropy");
  const Index n = batch.rows();
  const Index k = batch.classes();
  if (h.num_fine() != k) {
    throw std::invalid_argument("hierarchical_complement_entropy: hierarchy has " +
                                std::to_string(h.num_fine()) + " fine classes but logits have " +
                                std::to_string(k));
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  ObjectiveResult r;
  r.per_sample.resize(n);
  r.grad.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  std::vector<double> scratch(k);
  for (Index i = 0; i < n; ++i) {
    const auto slices = h.slices_for(batch.labels()[i]);
    double* grad = r.grad.row(static_cast<Eigen::Index>(i)).data();
    const double inner =
        accumulate_subset_entropy(batch.row(i), slices.inner, inv_n, options, grad, scratch);
    const double outer =
        accumulate_subset_entropy(batch.row(i), slices.outer, inv_n, options, grad, scratch);
    r.per_sample[i] = inner + outer;
  }
  r.value = mean_of(r.per_sample);
  return r;
}

ObjectiveResult difference(const ObjectiveResult& lhs, const ObjectiveResult& rhs) {
  if (lhs.grad.rows() != rhs.grad.rows() || lhs.grad.cols() != rhs.grad.cols() ||
      lhs.per_sample.size() != rhs.per_sample.size()) {
    throw std::invalid_argument("difference: objective shapes disagree");
  }
  ObjectiveResult r;
  r.value = lhs.value - rhs.value;
  r.per_sample.resize(lhs.per_sample.size());
  for (std::size_t i = 0; i < r.per_sample.size(); ++i) {
    r.per_sample[i] = lhs.per_sample[i] - rhs.per_sample[i];
  }
  r.grad = lhs.grad - rhs.grad;
  return r;
}

ObjectiveResult cot_loss(const LogitBatch& batch, EntropyOptions options) {
  return difference(cross_entropy(batch), complement_entropy(batch, options));
}

ObjectiveResult hcot_loss(const LogitBatch& batch, const LabelHierarchy& h,
                          EntropyOptions options) {
  return difference(cross_entropy(batch), hierarchical_complement_entropy(batch, h, options));
}

}  // namespace hcot
