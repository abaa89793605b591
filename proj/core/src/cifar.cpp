#include "hcot/data.hpp"

#include <fstream>
#include <random>
#include <string>

#include "hcot/seed.hpp"

namespace hcot {

namespace {

constexpr Index kPlane = kCifarImageSide * kCifarImageSide;

const char* split_file(Split split) { return split == Split::train ? "train.bin" : "test.bin"; }

Index official_count(Split split) { return split == Split::train ? 50000 : 10000; }

}  // namespace

std::filesystem::path find_cifar100_file(const std::filesystem::path& dir, Split split) {
  for (const auto& candidate : {dir / split_file(split), dir / "cifar-100-binary" / split_file(split)}) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(candidate, ec)) return candidate;
  }
  return {};
}

CifarSplit load_cifar100(const std::filesystem::path& dir, Split split, CifarOptions options) {
  const auto path = find_cifar100_file(dir, split);
  if (path.empty()) {
    throw DataError("CIFAR-100: " + std::string(split_file(split)) + " not found under " +
                    dir.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("CIFAR-100: cannot open " + path.string());
  const auto bytes = static_cast<Index>(std::filesystem::file_size(path));
  if (bytes == 0 || bytes % kCifarRecordBytes != 0) {
    throw DataError("CIFAR-100: " + path.string() + " has " + std::to_string(bytes) +
                    " bytes, not a positive multiple of " + std::to_string(kCifarRecordBytes));
  }
  Index records = bytes / kCifarRecordBytes;
  if (options.max_records == 0 && options.require_official_counts &&
      records != official_count(split)) {
    throw DataError("CIFAR-100: " + path.string() + " holds " + std::to_string(records) +
                    " records, expected " + std::to_string(official_count(split)));
  }
  if (options.max_records != 0) records = std::min(records, options.max_records);

  CifarSplit out;
  out.data.split = split;
  out.data.inputs.resize(static_cast<Eigen::Index>(records), static_cast<Eigen::Index>(kCifarPixels));
  out.data.fine_labels.resize(records);
  out.coarse_labels.resize(records);

  std::vector<unsigned char> record(kCifarRecordBytes);
  for (Index r = 0; r < records; ++r) {
    if (!in.read(reinterpret_cast<char*>(record.data()), kCifarRecordBytes)) {
      throw DataError("CIFAR-100: short read at record " + std::to_string(r));
    }
    const Index coarse = record[0];
    const Index fine = record[1];
    if (coarse >= kCifarCoarseClasses) {
      throw DataError("CIFAR-100: coarse label " + std::to_string(coarse) + " at record " +
                      std::to_string(r));
    }
    if (fine >= kCifarFineClasses) {
      throw DataError("CIFAR-100: fine label " + std::to_string(fine) + " at record " +
                      std::to_string(r));
    }
    out.coarse_labels[r] = coarse;
    out.data.fine_labels[r] = fine;
    double* row = out.data.inputs.row(static_cast<Eigen::Index>(r)).data();
    for (Index p = 0; p < kCifarPixels; ++p) row[p] = record[2 + p] / 255.0;
  }
  return out;
}

std::array<double, 3> channel_means(const Dataset& data) {
  if (data.dim() != kCifarPixels) throw std::invalid_argument("channel_means: expected 3072-wide rows");
  std::array<double, 3> means{};
  for (Index c = 0; c < kCifarChannels; ++c) {
    means[c] = data.inputs.middleCols(static_cast<Eigen::Index>(c * kPlane),
                                      static_cast<Eigen::Index>(kPlane)).mean();
  }
  return means;
}

void subtract_channel_means(Dataset& data, const std::array<double, 3>& means) {
  if (data.dim() != kCifarPixels) {
    throw std::invalid_argument("subtract_channel_means: expected 3072-wide rows");
  }
  for (Index c = 0; c < kCifarChannels; ++c) {
    data.inputs.middleCols(static_cast<Eigen::Index>(c * kPlane), static_cast<Eigen::Index>(kPlane))
        .array() -= means[c];
  }
}

std::vector<double> flip_horizontal(std::span<const double> image) {
  if (image.size() != kCifarPixels) throw std::invalid_argument("flip_horizontal: expected 3072 values");
  std::vector<double> out(kCifarPixels);
  constexpr Index side = kCifarImageSide;
  for (Index c = 0; c < kCifarChannels; ++c) {
    for (Index y = 0; y < side; ++y) {
      for (Index x = 0; x < side; ++x) {
        out[c * kPlane + y * side + x] = image[c * kPlane + y * side + (side - 1 - x)];
      }
    }
  }
  return out;
}

std::vector<double> crop_padded(std::span<const double> image, Index dy, Index dx, Index pad) {
  if (image.size() != kCifarPixels) throw std::invalid_argument("crop_padded: expected 3072 values");
  if (dy > 2 * pad || dx > 2 * pad) throw std::invalid_argument("crop_padded: offset exceeds padding");
  std::vector<double> out(kCifarPixels, 0.0);
  constexpr auto side = static_cast<std::ptrdiff_t>(kCifarImageSide);
  const auto oy = static_cast<std::ptrdiff_t>(dy) - static_cast<std::ptrdiff_t>(pad);
  const auto ox = static_cast<std::ptrdiff_t>(dx) - static_cast<std::ptrdiff_t>(pad);
  for (Index c = 0; c < kCifarChannels; ++c) {
    for (std::ptrdiff_t y = 0; y < side; ++y) {
      const auto sy = y + oy;
      if (sy < 0 || sy >= side) continue;
      for (std::ptrdiff_t x = 0; x < side; ++x) {
        const auto sx = x + ox;
        if (sx < 0 || sx >= side) continue;
        out[c * kPlane + static_cast<Index>(y * side + x)] =
            image[c * kPlane + static_cast<Index>(sy * side + sx)];
      }
    }
  }
  return out;
}

Matrix augment_crop_flip(const Matrix& batch, std::uint64_t seed) {
  if (static_cast<Index>(batch.cols()) != kCifarPixels) {
    throw std::invalid_argument("augment_crop_flip: rows must be 32x32x3 images (3072 values)");
  }
  constexpr Index pad = 4;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> offset(0, 2 * pad);
  std::bernoulli_distribution flip(0.5);
  Matrix out(batch.rows(), batch.cols());
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const std::span<const double> src(batch.row(i).data(), kCifarPixels);
    const Index dy = offset(rng);
    const Index dx = offset(rng);
    auto img = crop_padded(src, dy, dx, pad);
    if (flip(rng)) img = flip_horizontal(img);
    std::copy(img.begin(), img.end(), out.row(i).data());
  }
  return out;
}

}  // namespace hcot
