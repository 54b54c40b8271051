#include "homrate/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

namespace homrate {

namespace {

// Orthonormal Hermite function psi_{n-1}(x) = H_{n-1}(x) e^{-x^2/2} /
// sqrt(2^{n-1} (n-1)! sqrt(pi)), evaluated by the stable upward recurrence.
double hermite_function(int degree, double x) {
  double prev = 0.0;
  double cur = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  for (int k = 1; k <= degree; ++k) {
    const double next =
        x * std::sqrt(2.0 / k) * cur - std::sqrt((k - 1.0) / k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

GaussHermiteRule build_rule(int n) {
  // Nodes from the Golub-Welsch Jacobi matrix (eigenvalues only; the
  // eigenvector route loses the edge weights to rounding once exp(+x^2)
  // is folded in).  Off-diagonal beta_j = sqrt(j/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    const double beta = std::sqrt(0.5 * j);
    jacobi(j, j - 1) = beta;
    jacobi(j - 1, j) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi,
                                                        Eigen::EigenvaluesOnly);
  GaussHermiteRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = solver.eigenvalues()[i];
    rule.x[i] = x;
    // Bare-integral weight w * exp(+x^2) = 1 / (n psi_{n-1}(x)^2), with the
    // normalized Hermite function staying O(1) at every node.
    const double psi = hermite_function(n - 1, x);
    rule.w[i] = 1.0 / (n * psi * psi);
  }
  rule.x_max = std::abs(rule.x.back());
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  if (n < 2) throw validation_error("gauss_hermite: order must be >= 2");
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::scoped_lock lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

}  // namespace homrate
