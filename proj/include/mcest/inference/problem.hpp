#ifndef MCEST_INFERENCE_PROBLEM_HPP
#define MCEST_INFERENCE_PROBLEM_HPP

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "mcest/channel/params.hpp"
#include "mcest/errors.hpp"
#include "mcest/numerics/roots.hpp"

namespace mcest::inference {

using channel::EnvParams;
using channel::Receiver;

/// The single unknown parameter. d2 is varied with the receiver separation
/// d = d1 + d2 held fixed, so moving RX2 away moves RX1 closer.
enum class Unknown { d2, mu, v, k };

inline constexpr std::array<Unknown, 4> all_unknowns{Unknown::d2, Unknown::mu, Unknown::v, Unknown::k};

inline std::string_view name(Unknown u) {
  switch (u) {
    case Unknown::d2: return "d2";
    case Unknown::mu: return "mu";
    case Unknown::v: return "v";
    case Unknown::k: return "k";
  }
  return "?";
}

inline Unknown parse_unknown(std::string_view s) {
  for (Unknown u : all_unknowns)
    if (name(u) == s) return u;
  throw validation_error("unknown parameter '" + std::string(s) + "' (expected d2, mu, v or k)");
}

inline double value_of(Unknown u, const EnvParams& p) {
  switch (u) {
    case Unknown::d2: return p.d2;
    case Unknown::mu: return p.mu;
    case Unknown::v: return p.v;
    case Unknown::k: return p.k;
  }
  return 0.0;
}

/// Copy of p with the unknown set to x (d2 keeps d1 + d2 constant).
inline EnvParams with_value(Unknown u, EnvParams p, double x) {
  switch (u) {
    case Unknown::d2: {
      const double d = p.separation();
      p.d2 = x;
      p.d1 = d - x;
      break;
    }
    case Unknown::mu: p.mu = x; break;
    case Unknown::v: p.v = x; break;
    case Unknown::k: p.k = x; break;
  }
  return p;
}

/// Values the unknown may physically take (open interval, slightly shrunk).
inline numerics::BracketExpansion physical_limits(Unknown u, const EnvParams& p) {
  numerics::BracketExpansion ex;
  ex.lo_limit = std::numeric_limits<double>::min();
  if (u == Unknown::d2) {
    ex.lo_limit = 1e-9 * p.separation();
    ex.hi_limit = (1.0 - 1e-9) * p.separation();
  }
  return ex;
}

struct EstimationProblem {
  Unknown unknown = Unknown::d2;
  EnvParams known;  ///< the unknown's own field is ignored
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// Estimators never use xi; this only gates reporting.
  bool noise_known = false;

  void validate() const {
    known.validate();
    if (!(bracket_lo < bracket_hi) || !std::isfinite(bracket_lo) || !std::isfinite(bracket_hi))
      throw validation_error("EstimationProblem: bracket must satisfy lo < hi, both finite");
    const auto lim = physical_limits(unknown, known);
    if (bracket_lo < lim.lo_limit || bracket_hi > lim.hi_limit)
      throw validation_error("EstimationProblem: bracket outside the physical range of " +
                             std::string(name(unknown)));
  }

  /// Known parameters evaluated at a candidate value of the unknown.
  EnvParams at(double x) const { return with_value(unknown, known, x); }
};

/// Default study bracket [truth / 4, 4 truth], capped inside (0, d) for d2.
inline EstimationProblem default_problem(Unknown u, const EnvParams& truth) {
  EstimationProblem prob;
  prob.unknown = u;
  prob.known = truth;
  const double x = value_of(u, truth);
  const auto lim = physical_limits(u, truth);
  prob.bracket_lo = std::max(0.25 * x, lim.lo_limit);
  prob.bracket_hi = std::min(4.0 * x, u == Unknown::d2 ? 0.999 * truth.separation() : lim.hi_limit);
  return prob;
}

}  // namespace mcest::inference

#endif  // MCEST_INFERENCE_PROBLEM_HPP
