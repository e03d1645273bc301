#ifndef SWCP_PARAMS_HPP_
#define SWCP_PARAMS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace swcp {

// Error categories. invalid_parameter maps to CLI exit code 2, resource_error
// to exit code 3.
struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (2m+1)^d, throwing if it does not fit comfortably in 32 bits.
inline std::uint64_t ball_volume(int m, int d) {
  if (m < 0 || d < 1) throw invalid_parameter("ball_volume: need m >= 0, d >= 1");
  std::uint64_t v = 1;
  for (int i = 0; i < d; ++i) {
    v *= static_cast<std::uint64_t>(2 * m + 1);
    if (v > (std::uint64_t{1} << 31)) throw invalid_parameter("(2m+1)^d too large");
  }
  return v;
}

/// Infection parameters of the discrete-time contact process.
///
/// A site infects itself and each of its (2m+1)^d - 1 short-range neighbours
/// with probability alpha/(2m+1)^d, its long-range partner with probability
/// beta, and (small world only) a uniformly random grid vertex with
/// probability gamma.
struct model_params {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int m = 1;
  int d = 1;
  // The model is studied for alpha > beta > 0; degenerate settings (zero
  // rates, beta >= alpha) are only accepted when this is cleared.
  bool require_ordering = true;

  static model_params from_lambda(double lambda, double ratio, int m, int d,
                                  double gamma = 0.0) {
    if (!(ratio > 0.0) || !std::isfinite(ratio))
      throw invalid_parameter("ratio r must be positive and finite");
    model_params p;
    p.beta = lambda / (1.0 + ratio);
    p.alpha = lambda - p.beta;
    p.gamma = gamma;
    p.m = m;
    p.d = d;
    p.require_ordering = ratio > 1.0;
    return p;
  }

  std::uint64_t ball() const { return ball_volume(m, d); }
  double short_prob() const { return alpha / static_cast<double>(ball()); }
  double lambda() const { return alpha + beta; }
  double ratio() const {
    return beta > 0.0 ? alpha / beta : std::numeric_limits<double>::infinity();
  }
  // u = 1/(1+r) = beta/(alpha+beta)
  double u() const { return lambda() > 0.0 ? beta / lambda() : 0.0; }

  void validate() const {
    if (m < 1) throw invalid_parameter("m must be a positive integer");
    if (d < 1) throw invalid_parameter("d must be a positive integer");
    auto unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
    if (!(alpha >= 0.0) || !unit(short_prob()))
      throw invalid_parameter("alpha/(2m+1)^d must lie in [0,1]");
    if (!unit(beta)) throw invalid_parameter("beta must lie in [0,1]");
    if (!unit(gamma)) throw invalid_parameter("gamma must lie in [0,1]");
    if (require_ordering && !(alpha > beta && beta > 0.0))
      throw invalid_parameter("alpha > beta > 0 required (clear require_ordering to override)");
  }
};

}  // namespace swcp

#endif  // SWCP_PARAMS_HPP_
