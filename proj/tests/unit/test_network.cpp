#include <doctest.h>

#include <random>
#include <sstream>

#include "generators.hpp"
#include "hcot/checkpoint.hpp"
#include "hcot/network.hpp"
#include "hcot/objectives.hpp"
#include "oracle.hpp"

using namespace hcot;

TEST_CASE("layer spec parsing and parameter count") {
  const auto specs = parse_layer_specs("dense:8:16,relu,dense:16:4");
  REQUIRE(specs.size() == 3);
  CHECK(specs[1] == LayerSpec::relu(16));
  CHECK(parameter_count(specs) == 8 * 16 + 16 + 16 * 4 + 4);
  CHECK(parse_layer_specs(format_layer_specs(specs)) == specs);
  CHECK(Network::init(specs, 1).parameter_count() == 212);
  CHECK(Network::init(specs, 1).output_dim() == 4);

  CHECK_THROWS_AS(parse_layer_specs("dense:8:16,dense:15:4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_layer_specs("relu"), std::invalid_argument);
  CHECK_THROWS_AS(parse_layer_specs("conv:3:3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_layer_specs("dense:0:3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_layer_specs(""), std::invalid_argument);
}

TEST_CASE("init is seed-determined with zero biases and He-uniform bounds") {
  const auto specs = parse_layer_specs("dense:6:10,relu,dense:10:3");
  const auto a = Network::init(specs, 42);
  const auto b = Network::init(specs, 42);
  const auto c = Network::init(specs, 43);
  CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  CHECK(!std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
  const auto p = a.parameters();
  for (Index i = 0; i < 60; ++i) CHECK(std::abs(p[i]) <= std::sqrt(6.0 / 6.0));
  for (Index i = 60; i < 70; ++i) CHECK(p[i] == 0.0);  // first bias
  for (Index i = 100; i < 103; ++i) CHECK(p[i] == 0.0);
}

TEST_CASE("forward examples") {
  std::mt19937_64 rng(3);
  const Matrix x = gen::random_logits(rng, 5, 4);

  auto zero = Network::init({LayerSpec::dense(4, 3)}, 1);
  for (auto& p : zero.mutable_parameters()) p = 0.0;
  CHECK(zero.forward(x).logits.isZero(0.0));

  auto ident = Network::init({LayerSpec::flatten(4), LayerSpec::dense(4, 4)}, 1);
  auto p = ident.mutable_parameters();
  std::fill(p.begin(), p.end(), 0.0);
  for (Index i = 0; i < 4; ++i) p[i * 4 + i] = 1.0;
  CHECK(ident.forward(x).logits == x);

  const auto net = Network::init(parse_layer_specs("dense:4:8,relu,dense:8:3"), 9);
  CHECK(net.forward(x).logits == net.forward(x).logits);
  CHECK_THROWS_AS(net.forward(Matrix::Zero(2, 5)), std::invalid_argument);
}

TEST_CASE("backward examples and cache checks") {
  std::mt19937_64 rng(4);
  const Matrix x = gen::random_logits(rng, 1, 4);
  auto net = Network::init({LayerSpec::dense(4, 3)}, 2);
  auto fwd = net.forward(x);

  net.backward(fwd.cache, Matrix::Zero(1, 3));
  for (double g : net.gradients()) CHECK(g == 0.0);

  Matrix dy(1, 3);
  dy << 0.5, -1.0, 2.0;
  net.backward(fwd.cache, dy);
  const auto g = net.gradients();
  for (Index o = 0; o < 3; ++o) {
    for (Index i = 0; i < 4; ++i) CHECK(g[o * 4 + i] == doctest::Approx(dy(0, o) * x(0, i)));
    CHECK(g[12 + o] == doctest::Approx(dy(0, o)));
  }
  const std::vector<double> before(net.parameters().begin(), net.parameters().end());
  net.backward(fwd.cache, dy);
  CHECK(std::equal(before.begin(), before.end(), net.parameters().begin()));

  CHECK_THROWS_AS(net.backward(fwd.cache, Matrix::Zero(2, 3)), std::invalid_argument);
  auto other = Network::init({LayerSpec::dense(4, 3)}, 2);
  CHECK_THROWS_AS(other.backward(fwd.cache, dy), std::invalid_argument);
  net.mutable_parameters()[0] += 1.0;
  CHECK_THROWS_AS(net.backward(fwd.cache, dy), std::invalid_argument);
}

TEST_CASE("property: full-pipeline parameter gradients match finite differences") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 8; ++trial) {
    const Index k = gen::uniform(rng, 3, 8);
    const Index d = gen::uniform(rng, 2, 6);
    const Index hidden = gen::uniform(rng, 3, 10);
    const Index n = gen::uniform(rng, 1, 6);
    auto net = Network::init({LayerSpec::dense(d, hidden), LayerSpec::relu(hidden), LayerSpec::dense(hidden, k)},
                             rng());
    REQUIRE(net.parameter_count() <= 500);
    const Matrix x = gen::random_logits(rng, n, d, 1.0);
    const auto y = gen::random_labels(rng, n, k);
    const auto h = gen::random_hierarchy(rng, k);

    auto objectives = std::vector<std::function<ObjectiveResult(const LogitBatch&)>>{
        [](const LogitBatch& b) { return cross_entropy(b); },
        [](const LogitBatch& b) { return complement_entropy(b); },
        [&](const LogitBatch& b) { return hierarchical_complement_entropy(b, h); },
        [&](const LogitBatch& b) { return hcot_loss(b, h); },
    };
    for (const auto& objective : objectives) {
      auto fwd = net.forward(x);
      net.backward(fwd.cache, objective(LogitBatch(fwd.logits, y)).grad);
      const std::vector<double> analytic(net.gradients().begin(), net.gradients().end());

      const std::vector<double> theta(net.parameters().begin(), net.parameters().end());
      auto f = [&](const std::vector<double>& params) {
        auto probe = net;
        auto dst = probe.mutable_parameters();
        std::copy(params.begin(), params.end(), dst.begin());
        const auto out = probe.forward(x);
        return objective(LogitBatch(out.logits, y)).value;
      };
      const auto numeric = oracle::central_difference(f, theta, 1e-6);
      CHECK(oracle::max_relative_error(analytic, numeric) < 1e-5);
    }
  }
}

TEST_CASE("checkpoint round-trip and corruption") {
  const auto net = Network::init(parse_layer_specs("dense:5:7,relu,dense:7:3"), 77);
  std::stringstream buf;
  write_checkpoint(buf, net, 12);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 8) == "HCOTCKP1");
  CHECK(bytes.size() > net.parameter_count() * 8);

  std::stringstream in(bytes);
  const auto ck = read_checkpoint(in);
  CHECK(ck.epoch == 12);
  CHECK(ck.network.specs() == net.specs());
  CHECK(std::equal(net.parameters().begin(), net.parameters().end(), ck.network.parameters().begin()));

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_checkpoint(truncated), std::runtime_error);
  std::stringstream bad_magic("XXXXXXXX" + bytes.substr(8));
  CHECK_THROWS_AS(read_checkpoint(bad_magic), std::runtime_error);
}
