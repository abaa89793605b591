#pragma once

// Reference evaluations used only by tests. Straight loops over the
// definitions: no max-shift, no shared code with the library objectives.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

template <typename T>
using Row = std::vector<T>;

/// exp(z_j) / sum_{k in S} exp(z_k) for j in S.
template <typename T>
std::vector<T> softmax_over(const Row<T>& z, const std::vector<std::size_t>& subset) {
  using std::exp;
  T denom = 0;
  for (auto k : subset) denom += exp(z[k]);
  std::vector<T> p;
  for (auto j : subset) p.push_back(exp(z[j]) / denom);
  return p;
}

template <typename T>
T entropy(const std::vector<T>& p) {
  using std::log;
  T h = 0;
  for (const auto& x : p) {
    if (x > 0) h -= x * log(x);
  }
  return h;
}

template <typename T>
T cross_entropy(const std::vector<Row<T>>& z, const std::vector<std::size_t>& labels) {
  using std::log;
  T total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::vector<std::size_t> all(z[i].size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    total += -log(softmax_over(z[i], all)[labels[i]]);
  }
  return total / T(z.size());
}

template <typename T>
T complement_entropy(const std::vector<Row<T>>& z, const std::vector<std::size_t>& labels) {
  T total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::vector<std::size_t> comp;
    for (std::size_t j = 0; j < z[i].size(); ++j) {
      if (j != labels[i]) comp.push_back(j);
    }
    total += entropy(softmax_over(z[i], comp));
  }
  return total / T(z.size());
}

/// fine_to_coarse defines the groups; G is the group of the label.
template <typename T>
T hierarchical_complement_entropy(const std::vector<Row<T>>& z, const std::vector<std::size_t>& labels,
                                  const std::vector<std::size_t>& fine_to_coarse) {
  T total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto g = labels[i];
    std::vector<std::size_t> inner, outer;
    for (std::size_t j = 0; j < z[i].size(); ++j) {
      if (fine_to_coarse[j] == fine_to_coarse[g]) {
        if (j != g) inner.push_back(j);
      } else {
        outer.push_back(j);
      }
    }
    T term = 0;
    if (!inner.empty()) term += entropy(softmax_over(z[i], inner));
    if (!outer.empty()) term += entropy(softmax_over(z[i], outer));
    total += term;
  }
  return total / T(z.size());
}

/// Central differences of `f` at `x`, one coordinate at a time.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

/// max_i |a_i - b_i| / max(max_i |a_i|, max_i |b_i|, 1e-6): error relative to
/// the gradient's scale, so tiny entries do not dominate.
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, scale = 1e-6;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / scale;
}

}  // namespace oracle
