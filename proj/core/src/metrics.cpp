#include "hcot/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace hcot {

Index argmax(std::span<const double> row) noexcept {
  Index best = 0;
  for (Index j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

namespace {

double fraction(Index count, Index total) {
  return static_cast<double>(count) / static_cast<double>(total);
}

void require_rows(const LogitBatch& logits, const char* what) {
  if (logits.rows() == 0) throw std::invalid_argument(std::string(what) + ": empty batch");
}

}  // namespace

double fine_error(const LogitBatch& logits) {
  require_rows(logits, "fine_error");
  Index wrong = 0;
  for (Index i = 0; i < logits.rows(); ++i) {
    if (argmax(logits.row(i)) != logits.labels()[i]) ++wrong;
  }
  return fraction(wrong, logits.rows());
}

double coarse_error(const LogitBatch& logits, const LabelHierarchy& h) {
  require_rows(logits, "coarse_error");
  if (h.num_fine() != logits.classes()) {
    throw std::invalid_argument("coarse_error: hierarchy size does not match logits");
  }
  Index wrong = 0;
  for (Index i = 0; i < logits.rows(); ++i) {
    if (h.coarse_of(argmax(logits.row(i))) != h.coarse_of(logits.labels()[i])) ++wrong;
  }
  return fraction(wrong, logits.rows());
}

double topk_error(const LogitBatch& logits, Index k) {
  require_rows(logits, "topk_error");
  if (k == 0 || k > logits.classes()) {
    throw std::invalid_argument("topk_error: k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(logits.classes()) + "]");
  }
  Index wrong = 0;
  for (Index i = 0; i < logits.rows(); ++i) {
    const auto z = logits.row(i);
    const Index g = logits.labels()[i];
    Index rank = 0;  // classes ranked ahead of g
    for (Index j = 0; j < z.size(); ++j) {
      if (z[j] > z[g] || (z[j] == z[g] && j < g)) ++rank;
    }
    if (rank >= k) ++wrong;
  }
  return fraction(wrong, logits.rows());
}

ProbabilityProfile probability_profile(const LogitBatch& logits, const LabelHierarchy& h) {
  require_rows(logits, "probability_profile");
  const Index k = logits.classes();
  if (h.num_fine() != k) {
    throw std::invalid_argument("probability_profile: hierarchy size does not match logits");
  }
  ProbabilityProfile prof;
  prof.rows = logits.rows();
  std::vector<double> inner_sum, outer_sum;
  std::vector<Index> inner_count, outer_count;
  std::vector<double> p(k), sorted;

  auto accumulate = [&](const std::vector<Index>& idx, std::vector<double>& sums,
                        std::vector<Index>& counts, double& mass, double& class_mean) {
    sorted.clear();
    double total = 0.0;
    for (Index j : idx) {
      sorted.push_back(p[j]);
      total += p[j];
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (sums.size() < sorted.size()) {
      sums.resize(sorted.size(), 0.0);
      counts.resize(sorted.size(), 0);
    }
    for (Index r = 0; r < sorted.size(); ++r) {
      sums[r] += sorted[r];
      ++counts[r];
    }
    mass += total;
    if (!idx.empty()) class_mean += total / static_cast<double>(idx.size());
  };

  for (Index i = 0; i < logits.rows(); ++i) {
    const auto z = logits.row(i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (Index j = 0; j < k; ++j) sum += (p[j] = std::exp(z[j] - zmax));
    for (double& v : p) v /= sum;

    const auto s = h.slices_for(logits.labels()[i]);
    prof.mass_g += p[s.g];
    accumulate(s.inner, inner_sum, inner_count, prof.mass_inner, prof.inner_class_mean);
    accumulate(s.outer, outer_sum, outer_count, prof.mass_outer, prof.outer_class_mean);
  }

  const auto n = static_cast<double>(prof.rows);
  prof.mass_g /= n;
  prof.ground_truth = prof.mass_g;
  prof.mass_inner /= n;
  prof.mass_outer /= n;
  prof.inner_class_mean /= n;
  prof.outer_class_mean /= n;
  for (Index r = 0; r < inner_sum.size(); ++r) {
    prof.inner.push_back(inner_sum[r] / static_cast<double>(inner_count[r]));
  }
  for (Index r = 0; r < outer_sum.size(); ++r) {
    prof.outer.push_back(outer_sum[r] / static_cast<double>(outer_count[r]));
  }
  return prof;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_profile_csv(std::ostream& out, const ProbabilityProfile& profile) {
  out << "rank_group,rank,mean_probability\n";
  out << "g,0," << format_double(profile.ground_truth) << '\n';
  for (Index r = 0; r < profile.inner.size(); ++r) {
    out << "inner," << r << ',' << format_double(profile.inner[r]) << '\n';
  }
  for (Index r = 0; r < profile.outer.size(); ++r) {
    out << "outer," << r << ',' << format_double(profile.outer[r]) << '\n';
  }
}

MetricsRecord evaluate_logits(Index epoch, const LogitBatch& logits, const LabelHierarchy& h,
                              double xe, double hce) {
  MetricsRecord r;
  r.epoch = epoch;
  r.fine_error = fine_error(logits);
  r.coarse_error = coarse_error(logits, h);
  r.top5_error = topk_error(logits, std::min<Index>(5, logits.classes()));
  const auto prof = probability_profile(logits, h);
  r.mean_mass_g = prof.mass_g;
  r.mean_mass_inner = prof.mass_inner;
  r.mean_mass_outer = prof.mass_outer;
  r.xe = xe;
  r.hce = hce;
  return r;
}

std::string metrics_csv_header() {
  return "epoch,fine_error,coarse_error,top5_error,mean_mass_g,mean_mass_inner,mean_mass_outer,"
         "xe,hce";
}

void write_metrics_row(std::ostream& out, const MetricsRecord& r) {
  out << r.epoch << ',' << format_double(r.fine_error) << ',' << format_double(r.coarse_error)
      << ',' << format_double(r.top5_error) << ',' << format_double(r.mean_mass_g) << ','
      << format_double(r.mean_mass_inner) << ',' << format_double(r.mean_mass_outer) << ','
      << format_double(r.xe) << ',' << format_double(r.hce) << '\n';
}

Matrix penultimate_activations(const Network& net, const Matrix& inputs) {
  if (net.layer_count() < 2) {
    throw std::invalid_argument("export_embeddings: network needs at least two layers");
  }
  auto fwd = net.forward(inputs);
  return std::move(fwd.cache.layer_inputs.back());
}

void export_embeddings(std::ostream& out, const Network& net, const Dataset& data,
                       const LabelHierarchy& h) {
  const Matrix emb = penultimate_activations(net, data.inputs);
  for (Eigen::Index j = 0; j < emb.cols(); ++j) out << "dim_" << j << ',';
  out << "fine_label,coarse_label\n";
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    for (Eigen::Index j = 0; j < emb.cols(); ++j) out << format_double(emb(i, j)) << ',';
    const Index y = data.fine_labels[static_cast<Index>(i)];
    out << y << ',' << h.coarse_of(y) << '\n';
  }
}

}  // namespace hcot
