#ifndef SWCP_CHAIN_HPP_
#define SWCP_CHAIN_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swcp/params.hpp"

namespace swcp {

/// Critical value of the branching random walk on the comb, for ratio
/// r = alpha/beta. Independent of m; tends to 1 as r grows.
inline double comb_brw_critical(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw invalid_parameter("r must be positive and finite");
  return 2.0 * (r + 1.0) / (r + std::sqrt(r * r + 4.0));
}

/// Positive root of (1/(1+r)^2) x^2 + (r/(r+1)) x - 1 = 0, the lambda-form of
/// the comb eigenvalue equation. Computed by the cancellation-free quadratic
/// formula, independently of comb_brw_critical.
inline double comb_quadratic_root(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw invalid_parameter("r must be positive and finite");
  const double a = 1.0 / ((1.0 + r) * (1.0 + r));
  const double b = r / (r + 1.0);
  const double c = -1.0;
  // b > 0, so the positive root is 2c / (-b - sqrt(b^2 - 4ac)).
  return 2.0 * c / (-b - std::sqrt(b * b - 4.0 * a * c));
}

/// Largest eigenvalue of [[alpha, beta], [beta, 0]], the root of
/// x^2 - alpha x - beta^2 = 0. Exceeds 1 exactly when alpha + beta^2 > 1.
inline double level_matrix_eigenvalue(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw invalid_parameter("alpha and beta must be nonnegative");
  return (alpha + std::sqrt(alpha * alpha + 4.0 * beta * beta)) / 2.0;
}

struct transition {
  std::uint64_t state;
  double probability;
};

/// Kernel of the birth-death chain R_k = phi(S_k) on {0, 1, 2, ...}.
/// Odd states step down with probability u, even states >= 2 step up.
inline std::vector<transition> chain_kernel(std::uint64_t j, double u, double M) {
  if (!(u > 0.0 && u < 1.0)) throw invalid_parameter("u must lie in (0,1)");
  if (!(M >= 2.0)) throw invalid_parameter("M must be >= 2");
  if (j == 0) return {{0, 1.0 - u}, {1, u}};
  const double stay_local = (1.0 - u) / M;
  const double move_local = (1.0 - u) * (1.0 - 1.0 / M);
  if (j % 2 == 1) return {{j - 1, u}, {j, stay_local}, {j + 1, move_local}};
  return {{j - 1, stay_local}, {j, move_local}, {j + 1, u}};
}

struct chain_coeffs {
  double a, b, c;
};

/// Coefficients of a h(2n+2) - b h(2n) + c h(2n-2) = 0.
inline chain_coeffs chain_coefficients(double lambda, double u, double M) {
  if (!(lambda > 0.0)) throw invalid_parameter("lambda must be positive");
  if (!(u > 0.0 && u < 1.0)) throw invalid_parameter("u must lie in (0,1)");
  if (!(M >= 2.0)) throw invalid_parameter("M must be >= 2");
  const double l2 = lambda * lambda;
  const double q = 1.0 - u;
  const double keep = 1.0 - 1.0 / M;
  chain_coeffs k{};
  k.a = l2 * u * q * keep;
  k.b = 1.0 - lambda * q / M - (lambda - l2 * q / M) * q * keep - l2 * q * q * keep / M - l2 * u * u;
  k.c = l2 * u * q / M;
  return k;
}

/// Smaller root of a x^2 - b x + c = 0, via 2c / (b + sqrt(b^2 - 4ac)).
inline double chain_theta2(double lambda, double u, double M) {
  const auto k = chain_coefficients(lambda, u, M);
  const double disc = k.b * k.b - 4.0 * k.a * k.c;
  if (disc < 0.0)
    throw domain_error("complex roots: b^2 - 4ac = " + std::to_string(disc) +
                       " (outside the radius of convergence)");
  if (!(k.b > 0.0)) throw domain_error("b <= 0: no decaying solution");
  return 2.0 * k.c / (k.b + std::sqrt(disc));
}

inline double chain_theta1(double lambda, double u, double M) {
  const auto k = chain_coefficients(lambda, u, M);
  const double disc = k.b * k.b - 4.0 * k.a * k.c;
  if (disc < 0.0) throw domain_error("complex roots");
  return (k.b + std::sqrt(disc)) / (2.0 * k.a);
}

/// All birth-death chain quantities at one (lambda, u, M).
struct chain_analysis {
  double lambda = 0, u = 0, M = 0;
  double a = 0, b = 0, c = 0;
  double theta2 = 0;
  double h1 = 0;
  double F = 0;                  // first-return generating function
  std::optional<double> G;       // Green function 1/(1-F), when F < 1
  double r() const { return (1.0 - u) / u; }
};

inline chain_analysis chain_F(double lambda, double u, double M) {
  chain_analysis out;
  out.lambda = lambda;
  out.u = u;
  out.M = M;
  const auto k = chain_coefficients(lambda, u, M);
  out.a = k.a;
  out.b = k.b;
  out.c = k.c;
  out.theta2 = chain_theta2(lambda, u, M);
  const double denom = 1.0 - lambda * (1.0 - u) / M;
  if (!(denom > 0.0)) throw domain_error("1 - lambda(1-u)/M <= 0");
  out.h1 = lambda * (u + (1.0 - u) * (1.0 - 1.0 / M) * out.theta2) / denom;
  out.F = lambda * (1.0 - u + u * out.h1);
  if (out.F < 1.0) out.G = 1.0 / (1.0 - out.F);
  return out;
}

/// Limit of F as M -> infinity: lambda (1-u) + u^2 lambda^2.
inline double chain_F_limit(double lambda, double u) {
  return lambda * (1.0 - u) + u * u * lambda * lambda;
}

/// sup{lambda : F^lambda < 1} by bisection. Points outside the real-root
/// regime count as "not below 1" (the generating function has diverged).
inline double lambda2_brw_lower_bound(double r, double M, double tol = 1e-9) {
  if (!(r > 0.0) || !std::isfinite(r)) throw invalid_parameter("r must be positive and finite");
  if (!(M >= 2.0)) throw invalid_parameter("M must be >= 2");
  const double u = 1.0 / (1.0 + r);
  auto below = [&](double lambda) {
    try {
      return chain_F(lambda, u, M).F < 1.0;
    } catch (const domain_error&) {
      return false;
    }
  };
  double lo = 1e-6, hi = 1.0;
  if (!below(lo)) throw domain_error("F >= 1 already at the lower bracket end");
  while (below(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw domain_error("no upper bracket for F = 1");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace swcp

#endif  // SWCP_CHAIN_HPP_
