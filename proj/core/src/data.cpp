#include "hcot/data.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "binary_io.hpp"
#include "hcot/seed.hpp"

namespace hcot {

const char* to_string(Split split) noexcept { return split == Split::train ? "train" : "test"; }

void Dataset::validate(Index num_fine) const {
  if (fine_labels.empty()) throw DataError("dataset is empty");
  if (static_cast<Index>(inputs.rows()) != fine_labels.size()) {
    throw DataError("dataset: input rows and label count disagree");
  }
  if (!inputs.allFinite()) throw DataError("dataset: non-finite input value");
  for (Index i = 0; i < fine_labels.size(); ++i) {
    if (fine_labels[i] >= num_fine) {
      throw DataError("dataset: label " + std::to_string(fine_labels[i]) + " at row " +
                      std::to_string(i) + " outside [0, " + std::to_string(num_fine) + ")");
    }
  }
}

Matrix Dataset::gather_inputs(std::span<const Index> rows) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  for (Index r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = inputs.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

std::vector<Index> Dataset::gather_labels(std::span<const Index> rows) const {
  std::vector<Index> out(rows.size());
  for (Index r = 0; r < rows.size(); ++r) out[r] = fine_labels[rows[r]];
  return out;
}

void SyntheticSpec::validate() const {
  if (num_coarse == 0 || fines_per_coarse == 0 || dim == 0 || samples_per_fine == 0 ||
      test_samples_per_fine == 0) {
    throw ConfigError("synthetic spec: counts and dim must be positive");
  }
  if (!(fine_spread > 0.0) || !(coarse_spread > fine_spread)) {
    throw ConfigError("synthetic spec: requires coarse_spread > fine_spread > 0");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("synthetic spec: noise_sigma must be finite and >= 0");
  }
}

namespace {

Dataset sample_split(const Matrix& centers, Index per_fine, double sigma, Split split,
                     std::mt19937_64& rng) {
  const auto k = centers.rows();
  const auto d = centers.cols();
  Dataset data;
  data.split = split;
  data.inputs.resize(k * static_cast<Eigen::Index>(per_fine), d);
  data.fine_labels.resize(static_cast<Index>(k) * per_fine);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Index s = 0; s < per_fine; ++s, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) data.inputs(row, j) = centers(c, j) + sigma * noise(rng);
      data.fine_labels[static_cast<Index>(row)] = static_cast<Index>(c);
    }
  }
  return data;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.dim);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix centers(static_cast<Eigen::Index>(spec.num_fine()), d);
  std::vector<Index> fine_to_coarse(spec.num_fine());
  Eigen::RowVectorXd coarse_center(d);
  for (Index c = 0; c < spec.num_coarse; ++c) {
    for (Eigen::Index j = 0; j < d; ++j) {
      coarse_center(j) = spec.coarse_spread * normal(rng);
    }
    for (Index f = 0; f < spec.fines_per_coarse; ++f) {
      const Index fine = c * spec.fines_per_coarse + f;
      fine_to_coarse[fine] = c;
      for (Eigen::Index j = 0; j < d; ++j) {
        centers(static_cast<Eigen::Index>(fine), j) =
            coarse_center(j) + spec.fine_spread * normal(rng);
      }
    }
  }

  std::mt19937_64 train_rng(derive_seed(spec.seed, 1));
  std::mt19937_64 test_rng(derive_seed(spec.seed, 2));
  return SyntheticData{
      sample_split(centers, spec.samples_per_fine, spec.noise_sigma, Split::train, train_rng),
      sample_split(centers, spec.test_samples_per_fine, spec.noise_sigma, Split::test, test_rng),
      LabelHierarchy(std::move(fine_to_coarse)),
      std::move(centers),
  };
}

namespace {
constexpr char kDataMagic[8] = {'H', 'C', 'O', 'T', 'D', 'A', 'T', '1'};
}

void write_dataset(std::ostream& out, const Dataset& data, const LabelHierarchy& h) {
  data.validate(h.num_fine());
  out.write(kDataMagic, sizeof kDataMagic);
  io::write_u64_le(out, data.size());
  io::write_u64_le(out, data.dim());
  io::write_u64_le(out, h.num_fine());
  for (Index c : h.fine_to_coarse()) io::write_u64_le(out, c);
  for (Index y : data.fine_labels) io::write_u64_le(out, y);
  for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.inputs.cols(); ++j) io::write_f64_le(out, data.inputs(i, j));
  }
  io::write_u64_le(out, data.split == Split::train ? 0 : 1);
  if (!out) throw DataError("dataset: write failed");
}

StoredDataset read_dataset(std::istream& in) {
  try {
    char magic[8];
    if (!in.read(magic, 8) || std::string_view(magic, 8) != std::string_view(kDataMagic, 8)) {
      throw DataError("dataset: bad magic");
    }
    const auto n = io::read_u64_le(in);
    const auto d = io::read_u64_le(in);
    const auto k = io::read_u64_le(in);
    constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
    if (n == 0 || d == 0 || k == 0 || n >= kLimit || d >= kLimit || k >= kLimit) {
      throw DataError("dataset: implausible header");
    }
    std::vector<Index> map(k);
    for (auto& c : map) c = io::read_u64_le(in);
    Dataset data;
    data.fine_labels.resize(n);
    for (auto& y : data.fine_labels) y = io::read_u64_le(in);
    data.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.inputs.cols(); ++j) data.inputs(i, j) = io::read_f64_le(in);
    }
    data.split = io::read_u64_le(in) == 0 ? Split::train : Split::test;
    LabelHierarchy h(std::move(map));
    data.validate(h.num_fine());
    return {std::move(data), std::move(h)};
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("dataset: ") + e.what());
  } catch (const DataError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw DataError(std::string("dataset: ") + e.what());
  }
}

}  // namespace hcot
