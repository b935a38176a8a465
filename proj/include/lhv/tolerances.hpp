#pragma once

#include "lhv/errors.hpp"

namespace lhv {

/// Numerical tolerances used by validation and all property checkers.
///
/// tau_norm     bounds acceptable drift of probability sums from 1
/// tau_prop     default tolerance when deciding whether a property holds
/// tau_support  weights at or below this are treated as zero support
struct ToleranceConfig {
  double tau_norm = 1e-9;
  double tau_prop = 1e-9;
  double tau_support = 1e-12;

  void check() const {
    if (!(tau_norm > 0.0) || !(tau_prop > 0.0) || !(tau_support > 0.0)) {
      fail(ErrorCode::BadParams, "tolerances must be strictly positive");
    }
  }
};

}  // namespace lhv
