#pragma once

// Slow, direct reference computations used to check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "npglm/hetnet.hpp"
#include "npglm/survival.hpp"

namespace npglm::oracle {

// Breslow cumulative hazard by explicit double loop over the sorted samples:
// H_i = sum_{j<=i} y_j / sum_{k>=j} exp(z_k); tied times share the largest value.
inline std::vector<double> BreslowDoubleLoop(const Dataset& data, const Eigen::VectorXd& z) {
  const std::size_t n = data.size();
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = std::exp(std::clamp(z[static_cast<Eigen::Index>(k)], -50.0, 50.0));
  std::vector<double> h(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      if (data[j].y != 1) continue;
      double risk = 0.0;
      for (std::size_t k = n; k-- > j;) risk += g[k];
      total += 1.0 / risk;
    }
    h[i] = total;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (data[k].t == data[i].t) h[i] = std::max(h[i], h[k]);
    }
  }
  return h;
}

// Negative log-likelihood for fixed H written straight from its definition.
inline double DirectNegativeLogLikelihood(const Dataset& data, const Eigen::VectorXd& w,
                                          const Eigen::VectorXd& h) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double z = w[w.size() - 1];
    for (Eigen::Index j = 0; j < data.dim(); ++j) z += w[j] * data[i].x[j];
    total += std::exp(z) * h[static_cast<Eigen::Index>(i)] - data[i].y * z;
  }
  return total;
}

inline Eigen::VectorXd CentralDifference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double step = 1e-5) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    grad[i] = (f(hi) - f(lo)) / (2.0 * step);
  }
  return grad;
}

// Max over components of |a - b| / max(|b|, floor).
inline double RelativeError(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1.0) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), floor));
  }
  return worst;
}

// Counts meta-path instances by depth-first enumeration over the raw edge
// list. Edges with a timestamp after t0 are invisible; duplicates count once.
inline std::uint64_t EnumeratePaths(const HetNet& net, Timestamp t0, const MetaPath& path, NodeId from,
                                    NodeId to) {
  std::set<std::tuple<std::size_t, NodeId, NodeId>> visible;
  for (const HetEdge& e : net.edges()) {
    if (!e.timestamp || *e.timestamp <= t0) visible.insert({e.relation, e.src, e.dst});
  }
  std::function<std::uint64_t(std::size_t, NodeId)> walk = [&](std::size_t step, NodeId at) -> std::uint64_t {
    if (step == path.steps.size()) return at == to ? 1 : 0;
    const MetaPathStep& s = path.steps[step];
    std::uint64_t count = 0;
    for (NodeId next = 0; next < net.node_count(); ++next) {
      if (net.TypeOf(next) != s.to_type) continue;
      const bool linked = s.forward ? visible.contains({s.relation, at, next}) : visible.contains({s.relation, next, at});
      if (linked) count += walk(step + 1, next);
    }
    return count;
  };
  if (net.TypeOf(from) != path.start_type() || net.TypeOf(to) != path.end_type()) return 0;
  return walk(0, from);
}

}  // namespace npglm::oracle
