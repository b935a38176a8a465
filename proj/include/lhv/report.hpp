#pragma once

#include <optional>
#include <string>

namespace lhv {

enum class Property {
  WeakLocality,
  OutcomeIndependence,
  LocalCausality,
  MeasurementIndependence,
  Determinism,
  PerfectCorrelation,
  Consistency,
  OneWayForm,
};

inline const char* to_string(Property p) {
  switch (p) {
    case Property::WeakLocality: return "weak_locality";
    case Property::OutcomeIndependence: return "outcome_independence";
    case Property::LocalCausality: return "local_causality";
    case Property::MeasurementIndependence: return "measurement_independence";
    case Property::Determinism: return "determinism";
    case Property::PerfectCorrelation: return "perfect_correlation";
    case Property::Consistency: return "consistency";
    case Property::OneWayForm: return "oneway_form";
  }
  return "unknown";
}

/// Coordinates of the cell attaining a property's maximum violation.
/// x_alt / y_alt carry the second (primed) setting for checks that compare
/// two settings against each other.
struct Witness {
  std::optional<std::string> x, y, lambda, a, b;
  std::optional<std::string> x_alt, y_alt;
};

/// Verdict for one statistical property of a model or behavior.
struct PropertyReport {
  Property property = Property::Consistency;
  bool holds = true;
  double max_violation = 0.0;
  double tolerance_used = 0.0;
  std::optional<Witness> witness;
};

inline PropertyReport make_report(Property property, double max_violation, double tolerance,
                                  std::optional<Witness> witness = std::nullopt) {
  PropertyReport r;
  r.property = property;
  r.max_violation = max_violation;
  r.tolerance_used = tolerance;
  r.holds = max_violation <= tolerance;
  r.witness = std::move(witness);
  return r;
}

}  // namespace lhv
