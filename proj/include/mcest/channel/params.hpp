#ifndef MCEST_CHANNEL_PARAMS_HPP
#define MCEST_CHANNEL_PARAMS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "mcest/errors.hpp"
#include "mcest/numerics/quadrature.hpp"

namespace mcest::channel {

/// Receiver index. RX1 sits upstream at -d1, RX2 downstream at +d2; the
/// transmitter is at the origin and the flow points from RX1 to RX2.
enum class Receiver { rx1 = 1, rx2 = 2 };

inline int index(Receiver r) { return static_cast<int>(r); }

/// Physical parameters of the channel. Lengths in um, times in s.
struct EnvParams {
  double d1 = 20.0;         ///< TX -> RX1 distance
  double d2 = 20.0;         ///< TX -> RX2 distance
  double v = 6.0;           ///< flow velocity, RX1 -> RX2
  double diffusion = 79.4;  ///< D, um^2/s
  double k = 0.8;           ///< degradation rate, 1/s
  double mu = 1000.0;       ///< emission rate, 1/s
  double delta = 0.5;       ///< observation window length, s
  double xi = 0.0;          ///< mean noise count per window

  /// Distance between the two receivers.
  double separation() const { return d1 + d2; }

  /// sqrt(v^2 / 4D^2 + k / D).
  double kappa() const {
    return std::sqrt(v * v / (4.0 * diffusion * diffusion) + k / diffusion);
  }

  /// Degradation rate seen after removing the drift: k + v^2 / 4D.
  double effective_k() const { return k + v * v / (4.0 * diffusion); }

  double distance(Receiver r) const { return r == Receiver::rx1 ? d1 : d2; }

  /// +1 for RX2 (flow toward it), -1 for RX1.
  static double flow_sign(Receiver r) { return r == Receiver::rx1 ? -1.0 : 1.0; }

  void validate() const {
    auto need = [](bool ok, const char* msg) {
      if (!ok) throw validation_error(std::string("EnvParams: ") + msg);
    };
    need(std::isfinite(d1) && d1 > 0.0, "d1 must be > 0");
    need(std::isfinite(d2) && d2 > 0.0, "d2 must be > 0");
    need(std::isfinite(v) && v > 0.0, "v must be > 0");
    need(std::isfinite(diffusion) && diffusion > 0.0, "D must be > 0");
    need(std::isfinite(k) && k > 0.0, "k must be > 0");
    need(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
    need(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
    need(std::isfinite(xi) && xi >= 0.0, "xi must be >= 0");
  }

  /// Looser check for the particle simulator, which also accepts the
  /// degenerate limits mu = 0, D = 0, k = 0 and any flow sign.
  void validate_for_simulation() const {
    auto need = [](bool ok, const char* msg) {
      if (!ok) throw validation_error(std::string("EnvParams: ") + msg);
    };
    need(std::isfinite(d1) && d1 > 0.0, "d1 must be > 0");
    need(std::isfinite(d2) && d2 > 0.0, "d2 must be > 0");
    need(std::isfinite(v), "v must be finite");
    need(std::isfinite(diffusion) && diffusion >= 0.0, "D must be >= 0");
    need(std::isfinite(k) && k >= 0.0, "k must be >= 0");
    need(std::isfinite(mu) && mu >= 0.0, "mu must be >= 0");
    need(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
    need(std::isfinite(xi) && xi >= 0.0, "xi must be >= 0");
  }
};

/// Truncation control for the image series of the cumulative absorption.
struct SeriesSpec {
  double rel_term_tol = 1e-12;
  int max_terms = 200;
  numerics::QuadratureSpec quad{1e-13, 1e-11, 1 << 12};

  void validate() const {
    if (!(rel_term_tol > 0.0)) throw validation_error("SeriesSpec: rel_term_tol must be > 0");
    if (max_terms < 1) throw validation_error("SeriesSpec: max_terms must be >= 1");
    quad.validate();
  }
};

/// Expected-count curves sampled on a time grid.
struct CirCurve {
  std::vector<double> times;
  std::vector<double> values_rx1;
  std::vector<double> values_rx2;
};

}  // namespace mcest::channel

#endif  // MCEST_CHANNEL_PARAMS_HPP
