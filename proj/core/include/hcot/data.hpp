#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "hcot/hierarchy.hpp"
#include "hcot/types.hpp"

namespace hcot {

enum class Split { train, test };

const char* to_string(Split split) noexcept;

/// N x D inputs with one fine label per row.
struct Dataset {
  Matrix inputs;
  std::vector<Index> fine_labels;
  Split split = Split::train;

  Index size() const noexcept { return fine_labels.size(); }
  Index dim() const noexcept { return static_cast<Index>(inputs.cols()); }

  /// Throws DataError if empty, shapes disagree, an input is non-finite, or
  /// a label is outside [0, num_fine).
  void validate(Index num_fine) const;

  /// Copies the given rows, in order, into a new matrix.
  Matrix gather_inputs(std::span<const Index> rows) const;
  std::vector<Index> gather_labels(std::span<const Index> rows) const;
};

/// Gaussian clusters arranged as a two-level tree: coarse centers, fine
/// centers offset around their coarse center, samples around fine centers.
/// Center offsets are isotropic Gaussians with per-coordinate standard
/// deviation `coarse_spread` (around the origin) and `fine_spread` (around
/// the coarse center).
struct SyntheticSpec {
  Index num_coarse = 3;
  Index fines_per_coarse = 3;
  Index dim = 16;
  Index samples_per_fine = 200;
  Index test_samples_per_fine = 100;
  double coarse_spread = 10.0;
  double fine_spread = 2.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  Index num_fine() const noexcept { return num_coarse * fines_per_coarse; }
  /// Throws ConfigError unless counts are positive, noise_sigma >= 0 and
  /// coarse_spread > fine_spread > 0.
  void validate() const;
};

struct SyntheticData {
  Dataset train;
  Dataset test;
  LabelHierarchy hierarchy;
  Matrix fine_centers;  ///< num_fine x dim
};

/// Fine class c * fines_per_coarse + f belongs to coarse class c.
/// Deterministic in spec.seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Flat binary dataset container (integers little-endian):
///   magic "HCOTDAT1", u64 N, u64 D, u64 num_fine,
///   num_fine x u64 fine->coarse map, N x u64 fine labels,
///   N*D float64 inputs row-major, u64 split (0 train, 1 test).
void write_dataset(std::ostream& out, const Dataset& data, const LabelHierarchy& h);
struct StoredDataset {
  Dataset data;
  LabelHierarchy hierarchy;
};
StoredDataset read_dataset(std::istream& in);

// ---- CIFAR-100 -------------------------------------------------------------

inline constexpr Index kCifarImageSide = 32;
inline constexpr Index kCifarChannels = 3;
inline constexpr Index kCifarPixels = kCifarImageSide * kCifarImageSide * kCifarChannels;  // 3072
inline constexpr Index kCifarRecordBytes = 2 + kCifarPixels;                                  // 3074
inline constexpr Index kCifarFineClasses = 100;
inline constexpr Index kCifarCoarseClasses = 20;

struct CifarOptions {
  /// Require exactly 50,000 (train) / 10,000 (test) records.
  bool require_official_counts = true;
  /// Read at most this many records (0 = all). Implies
  /// require_official_counts = false when non-zero.
  Index max_records = 0;
};

struct CifarSplit {
  Dataset data;
  std::vector<Index> coarse_labels;
};

/// Reads `train.bin` or `test.bin` from `dir` (or from `dir/cifar-100-binary`).
/// Each record is <coarse byte><fine byte><3072 channel-planar pixel bytes>;
/// pixels are scaled to [0, 1]. Throws DataError on a missing file, a length
/// that is not a multiple of 3074, or an out-of-range label byte.
CifarSplit load_cifar100(const std::filesystem::path& dir, Split split, CifarOptions options = {});

/// Path of the split file that load_cifar100 would read, or empty if absent.
std::filesystem::path find_cifar100_file(const std::filesystem::path& dir, Split split);

std::array<double, 3> channel_means(const Dataset& data);
void subtract_channel_means(Dataset& data, const std::array<double, 3>& means);

/// Mirror of one channel-planar 32x32x3 image.
std::vector<double> flip_horizontal(std::span<const double> image);
/// Zero-pads by `pad` on every side and crops the 32x32 window whose
/// top-left corner is (dy, dx) in padded coordinates; (pad, pad) is identity.
std::vector<double> crop_padded(std::span<const double> image, Index dy, Index dx, Index pad = 4);

/// Pad-4 random crop plus horizontal flip with probability 1/2, per row.
/// Deterministic in `seed`. Throws std::invalid_argument unless rows are 3072 wide.
Matrix augment_crop_flip(const Matrix& batch, std::uint64_t seed);

}  // namespace hcot
