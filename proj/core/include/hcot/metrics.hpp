#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcot/data.hpp"
#include "hcot/hierarchy.hpp"
#include "hcot/network.hpp"
#include "hcot/objectives.hpp"

namespace hcot {

/// Row-wise argmax; ties go to the lowest index.
Index argmax(std::span<const double> row) noexcept;

/// Fraction of rows whose argmax differs from the label.
double fine_error(const LogitBatch& logits);

/// Fraction of rows where the coarse group of the fine argmax differs from
/// the coarse group of the label.
double coarse_error(const LogitBatch& logits, const LabelHierarchy& h);

/// Fraction of rows whose label is not among the k highest logits (ties
/// rank the lower index first). Throws std::invalid_argument unless 1 <= k <= K.
double topk_error(const LogitBatch& logits, Index k);

/// Full-softmax probabilities averaged over rows, split by hierarchy
/// relation to the label.
///
/// `inner[r]` / `outer[r]` are the mean r-th largest sibling / non-relative
/// probabilities, averaged over the rows that have an r-th element.
/// The `mass_*` fields are mean summed masses (they add to 1), and
/// `*_class_mean` are mean per-class probabilities, where a row with an
/// empty set contributes 0.
struct ProbabilityProfile {
  Index rows = 0;
  double ground_truth = 0.0;
  std::vector<double> inner;
  std::vector<double> outer;
  double mass_g = 0.0;
  double mass_inner = 0.0;
  double mass_outer = 0.0;
  double inner_class_mean = 0.0;
  double outer_class_mean = 0.0;

  /// Mean sibling probability minus mean non-relative probability.
  double staircase_gap() const noexcept { return inner_class_mean - outer_class_mean; }
};

ProbabilityProfile probability_profile(const LogitBatch& logits, const LabelHierarchy& h);

/// Columns: rank_group,rank,mean_probability (rank_group in {g, inner, outer}).
void write_profile_csv(std::ostream& out, const ProbabilityProfile& profile);

struct MetricsRecord {
  Index epoch = 0;
  double fine_error = 0.0;
  double coarse_error = 0.0;
  double top5_error = 0.0;
  double mean_mass_g = 0.0;
  double mean_mass_inner = 0.0;
  double mean_mass_outer = 0.0;
  double xe = 0.0;
  double hce = 0.0;
};

/// Evaluates test logits; xe/hce are copied through from training.
MetricsRecord evaluate_logits(Index epoch, const LogitBatch& logits, const LabelHierarchy& h,
                              double xe, double hce);

/// Column order of metrics.csv.
std::string metrics_csv_header();
void write_metrics_row(std::ostream& out, const MetricsRecord& r);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Activations feeding the last layer, one row per sample.
/// Throws std::invalid_argument for a single-layer network.
Matrix penultimate_activations(const Network& net, const Matrix& inputs);

/// CSV with columns dim_0..dim_{m-1},fine_label,coarse_label.
void export_embeddings(std::ostream& out, const Network& net, const Dataset& data,
                       const LabelHierarchy& h);

}  // namespace hcot
