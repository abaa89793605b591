#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcot/types.hpp"

namespace hcot {

enum class LayerKind { dense, relu, flatten };

/// One layer of a feed-forward stack. `in`/`out` are the input and output
/// widths; for relu and flatten they are equal.
struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  Index in = 0;
  Index out = 0;

  static LayerSpec dense(Index in, Index out) { return {LayerKind::dense, in, out}; }
  static LayerSpec relu(Index width) { return {LayerKind::relu, width, width}; }
  static LayerSpec flatten(Index width) { return {LayerKind::flatten, width, width}; }

  bool operator==(const LayerSpec&) const = default;
};

/// Parses "dense:8:16,relu,dense:16:4". Widths of relu/flatten are taken
/// from the preceding layer (or must be given as "relu:16" when first).
/// Throws std::invalid_argument on malformed or inconsistent input.
std::vector<LayerSpec> parse_layer_specs(std::string_view text);
std::string format_layer_specs(const std::vector<LayerSpec>& specs);

/// Per-layer inputs recorded by Network::forward, consumed by backward.
struct ForwardCache {
  std::vector<Matrix> layer_inputs;  ///< layer_inputs[l] is the input of layer l
  std::uint64_t network_id = 0;
  std::uint64_t parameter_version = 0;
};

struct ForwardResult {
  Matrix logits;
  ForwardCache cache;
};

/// Dense/relu/flatten feed-forward classifier.
///
/// Parameters live in one flat buffer, layer by layer; a dense layer stores
/// its out x in row-major weight matrix followed by its bias. A gradient
/// buffer of the same length mirrors it. Any mutable access to the
/// parameters invalidates outstanding ForwardCache objects.
///
/// Not thread-safe for concurrent mutation; const member functions may run
/// concurrently.
class Network {
 public:
  /// He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases,
  /// fully determined by `seed`. Throws std::invalid_argument on an empty or
  /// inconsistent spec.
  static Network init(std::vector<LayerSpec> specs, std::uint64_t seed);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Index input_dim() const noexcept { return specs_.front().in; }
  Index output_dim() const noexcept { return specs_.back().out; }
  Index layer_count() const noexcept { return specs_.size(); }
  Index parameter_count() const noexcept { return params_.size(); }

  std::span<const double> parameters() const noexcept { return params_; }
  /// Mutable view; bumps the parameter version.
  std::span<double> mutable_parameters() noexcept;
  std::span<const double> gradients() const noexcept { return grads_; }
  std::span<double> mutable_gradients() noexcept { return grads_; }
  void zero_gradients() noexcept;

  /// Throws std::invalid_argument when inputs.cols() != input_dim().
  ForwardResult forward(const Matrix& inputs) const;

  /// Overwrites the gradient buffer with d(objective)/d(parameters) given
  /// d(objective)/d(logits). Parameters are not touched. Throws
  /// std::invalid_argument when the cache is stale, belongs to another
  /// network, or does not match `logit_grad`'s shape.
  void backward(const ForwardCache& cache, const Matrix& logit_grad);

 private:
  Network(std::vector<LayerSpec> specs, std::uint64_t seed);

  std::vector<LayerSpec> specs_;
  std::vector<Index> offsets_;  ///< start of each layer's parameters
  std::vector<double> params_;
  std::vector<double> grads_;
  std::uint64_t seed_ = 0;
  std::uint64_t id_ = 0;
  std::uint64_t version_ = 0;
};

/// Number of parameters implied by a layer stack.
Index parameter_count(const std::vector<LayerSpec>& specs);

}  // namespace hcot
