#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "hcot/network.hpp"

namespace hcot {

/// On-disk layout (all integers little-endian):
///
///   bytes 0..7    magic "HCOTCKP1"
///   bytes 8..15   uint64 header length H
///   next H bytes  UTF-8 JSON header:
///                 {"format":"hcot-checkpoint","version":1,
///                  "layers":"<layer spec string>","seed":<u64>,
///                  "epoch":<u64>,"num_parameters":<u64>}
///   remainder     num_parameters IEEE-754 float64 values, little-endian,
///                 in Network::parameters() order
struct Checkpoint {
  Network network;
  std::uint64_t epoch = 0;
};

void write_checkpoint(std::ostream& out, const Network& net, std::uint64_t epoch);
void save_checkpoint(const std::filesystem::path& path, const Network& net, std::uint64_t epoch);

/// Throws std::runtime_error on a malformed or truncated container.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hcot
