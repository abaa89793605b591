#include "hcot/network.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hcot {

namespace {

std::uint64_t next_network_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<Eigen::RowVectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::RowVectorXd>;

Index parse_width(std::string_view field, std::string_view token) {
  Index value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || value == 0) {
    throw std::invalid_argument("layer spec: bad width in '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? s.size() - pos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

void check_specs(const std::vector<LayerSpec>& specs) {
  if (specs.empty()) throw std::invalid_argument("network: no layers");
  for (Index l = 0; l < specs.size(); ++l) {
    const auto& s = specs[l];
    if (s.in == 0 || s.out == 0) {
      throw std::invalid_argument("network: layer " + std::to_string(l) + " has zero width");
    }
    if (s.kind != LayerKind::dense && s.in != s.out) {
      throw std::invalid_argument("network: layer " + std::to_string(l) +
                                  " must preserve width");
    }
    if (l > 0 && specs[l - 1].out != s.in) {
      throw std::invalid_argument("network: layer " + std::to_string(l) + " expects width " +
                                  std::to_string(s.in) + " but previous layer emits " +
                                  std::to_string(specs[l - 1].out));
    }
  }
}

}  // namespace

std::vector<LayerSpec> parse_layer_specs(std::string_view text) {
  std::vector<LayerSpec> specs;
  for (auto token : split(text, ',')) {
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    const auto parts = split(token, ':');
    const auto kind = parts[0];
    if (kind == "dense") {
      if (parts.size() != 3) throw std::invalid_argument("layer spec: expected dense:<in>:<out>");
      specs.push_back(LayerSpec::dense(parse_width(parts[1], token), parse_width(parts[2], token)));
    } else if (kind == "relu" || kind == "flatten") {
      Index width = 0;
      if (parts.size() == 2) {
        width = parse_width(parts[1], token);
      } else if (parts.size() == 1 && !specs.empty()) {
        width = specs.back().out;
      } else {
        throw std::invalid_argument("layer spec: '" + std::string(token) +
                                    "' needs an explicit width");
      }
      specs.push_back(kind == "relu" ? LayerSpec::relu(width) : LayerSpec::flatten(width));
    } else {
      throw std::invalid_argument("layer spec: unknown layer '" + std::string(token) + "'");
    }
  }
  check_specs(specs);
  return specs;
}

std::string format_layer_specs(const std::vector<LayerSpec>& specs) {
  std::string out;
  for (const auto& s : specs) {
    if (!out.empty()) out += ',';
    switch (s.kind) {
      case LayerKind::dense:
        out += "dense:" + std::to_string(s.in) + ':' + std::to_string(s.out);
        break;
      case LayerKind::relu:
        out += "relu:" + std::to_string(s.in);
        break;
      case LayerKind::flatten:
        out += "flatten:" + std::to_string(s.in);
        break;
    }
  }
  return out;
}

Index parameter_count(const std::vector<LayerSpec>& specs) {
  Index n = 0;
  for (const auto& s : specs) {
    if (s.kind == LayerKind::dense) n += s.in * s.out + s.out;
  }
  return n;
}

Network::Network(std::vector<LayerSpec> specs, std::uint64_t seed)
    : specs_(std::move(specs)), seed_(seed), id_(next_network_id()) {
  check_specs(specs_);
  offsets_.reserve(specs_.size());
  Index offset = 0;
  for (const auto& s : specs_) {
    offsets_.push_back(offset);
    if (s.kind == LayerKind::dense) offset += s.in * s.out + s.out;
  }
  params_.assign(offset, 0.0);
  grads_.assign(offset, 0.0);
}

Network Network::init(std::vector<LayerSpec> specs, std::uint64_t seed) {
  Network net(std::move(specs), seed);
  std::mt19937_64 rng(seed);
  for (Index l = 0; l < net.specs_.size(); ++l) {
    const auto& s = net.specs_[l];
    if (s.kind != LayerKind::dense) continue;
    const double bound = std::sqrt(6.0 / static_cast<double>(s.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* w = net.params_.data() + net.offsets_[l];
    for (Index k = 0; k < s.in * s.out; ++k) w[k] = dist(rng);
  }
  return net;
}

Network::Network(const Network& other)
    : specs_(other.specs_),
      offsets_(other.offsets_),
      params_(other.params_),
      grads_(other.grads_),
      seed_(other.seed_),
      id_(next_network_id()),
      version_(0) {}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    specs_ = other.specs_;
    offsets_ = other.offsets_;
    params_ = other.params_;
    grads_ = other.grads_;
    seed_ = other.seed_;
    id_ = next_network_id();
    version_ = 0;
  }
  return *this;
}

std::span<double> Network::mutable_parameters() noexcept {
  ++version_;
  return params_;
}

void Network::zero_gradients() noexcept { std::fill(grads_.begin(), grads_.end(), 0.0); }

ForwardResult Network::forward(const Matrix& inputs) const {
  if (static_cast<Index>(inputs.cols()) != input_dim()) {
    throw std::invalid_argument("forward: input width " + std::to_string(inputs.cols()) +
                                " but network expects " + std::to_string(input_dim()));
  }
  ForwardResult result;
  result.cache.network_id = id_;
  result.cache.parameter_version = version_;
  result.cache.layer_inputs.reserve(specs_.size());

  Matrix x = inputs;
  for (Index l = 0; l < specs_.size(); ++l) {
    const auto& s = specs_[l];
    result.cache.layer_inputs.push_back(x);
    switch (s.kind) {
      case LayerKind::dense: {
        const auto in = static_cast<Eigen::Index>(s.in);
        const auto out = static_cast<Eigen::Index>(s.out);
        ConstMatrixMap w(params_.data() + offsets_[l], out, in);
        ConstVectorMap b(params_.data() + offsets_[l] + s.in * s.out, out);
        Matrix y = x * w.transpose();
        y.rowwise() += b;
        x = std::move(y);
        break;
      }
      case LayerKind::relu:
        x = x.cwiseMax(0.0);
        break;
      case LayerKind::flatten:
        break;
    }
  }
  result.logits = std::move(x);
  return result;
}

void Network::backward(const ForwardCache& cache, const Matrix& logit_grad) {
  if (cache.network_id != id_) throw std::invalid_argument("backward: cache from another network");
  if (cache.parameter_version != version_) {
    throw std::invalid_argument("backward: stale cache (parameters changed since forward)");
  }
  if (cache.layer_inputs.size() != specs_.size()) {
    throw std::invalid_argument("backward: cache depth does not match layer count");
  }
  const auto n = cache.layer_inputs.front().rows();
  if (logit_grad.rows() != n || static_cast<Index>(logit_grad.cols()) != output_dim()) {
    throw std::invalid_argument("backward: logit gradient shape does not match forward pass");
  }

  Matrix delta = logit_grad;
  for (Index l = specs_.size(); l-- > 0;) {
    const auto& s = specs_[l];
    const Matrix& x = cache.layer_inputs[l];
    switch (s.kind) {
      case LayerKind::dense: {
        const auto in = static_cast<Eigen::Index>(s.in);
        const auto out = static_cast<Eigen::Index>(s.out);
        ConstMatrixMap w(params_.data() + offsets_[l], out, in);
        MatrixMap dw(grads_.data() + offsets_[l], out, in);
        VectorMap db(grads_.data() + offsets_[l] + s.in * s.out, out);
        dw.noalias() = delta.transpose() * x;
        db = delta.colwise().sum();
        if (l > 0) {
          Matrix next = delta * w;
          delta = std::move(next);
        }
        break;
      }
      case LayerKind::relu:
        delta = (x.array() > 0.0).select(delta, 0.0);
        break;
      case LayerKind::flatten:
        break;
    }
  }
}

}  // namespace hcot
