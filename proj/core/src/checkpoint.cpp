#include "hcot/checkpoint.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "binary_io.hpp"

namespace hcot {

namespace {
constexpr char kMagic[8] = {'H', 'C', 'O', 'T', 'C', 'K', 'P', '1'};
constexpr std::uint64_t kMaxHeader = 1 << 20;
}  // namespace

void write_checkpoint(std::ostream& out, const Network& net, std::uint64_t epoch) {
  const nlohmann::ordered_json header = {
      {"format", "hcot-checkpoint"},
      {"version", 1},
      {"layers", format_layer_specs(net.specs())},
      {"seed", net.seed()},
      {"epoch", epoch},
      {"num_parameters", net.parameter_count()},
  };
  const std::string text = header.dump();
  out.write(kMagic, sizeof kMagic);
  io::write_u64_le(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double p : net.parameters()) io::write_f64_le(out, p);
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint(const std::filesystem::path& path, const Network& net, std::uint64_t epoch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  write_checkpoint(out, net, epoch);
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::string_view(magic, 8) != std::string_view(kMagic, 8)) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const auto header_len = io::read_u64_le(in);
  if (header_len > kMaxHeader) throw std::runtime_error("checkpoint: header too large");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw std::runtime_error("checkpoint: truncated header");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: bad header: ") + e.what());
  }
  if (header.value("format", "") != "hcot-checkpoint" || header.value("version", 0) != 1) {
    throw std::runtime_error("checkpoint: unsupported format or version");
  }

  auto net = Network::init(parse_layer_specs(header.at("layers").get<std::string>()),
                           header.at("seed").get<std::uint64_t>());
  const auto count = header.at("num_parameters").get<std::uint64_t>();
  if (count != net.parameter_count()) {
    throw std::runtime_error("checkpoint: parameter count does not match layer spec");
  }
  auto params = net.mutable_parameters();
  try {
    for (auto& p : params) p = io::read_f64_le(in);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("checkpoint: truncated parameter data");
  }
  return {std::move(net), header.at("epoch").get<std::uint64_t>()};
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace hcot
