#pragma once

#include "lhv/errors.hpp"

#include <Eigen/Core>

#include <string>
#include <unordered_map>
#include <vector>

namespace lhv {

/// An ordered list of distinct labels with O(1) label -> index lookup.
class LabelAxis {
 public:
  using Index = Eigen::Index;

  LabelAxis() = default;

  LabelAxis(std::string name, std::vector<std::string> labels)
      : name_(std::move(name)), labels_(std::move(labels)) {
    for (Index i = 0; i < size(); ++i) {
      const std::string& label = labels_[static_cast<std::size_t>(i)];
      if (label.find('|') != std::string::npos) {
        fail(ErrorCode::BadParams, "label '" + label + "' in " + name_ + " contains '|'");
      }
      if (!index_.emplace(label, i).second) {
        fail(ErrorCode::BadParams, "duplicate label '" + label + "' in " + name_);
      }
    }
  }

  Index size() const { return static_cast<Index>(labels_.size()); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::string& name() const { return name_; }

  Index find(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? Index{-1} : it->second;
  }

  Index require(const std::string& label) const {
    Index i = find(label);
    if (i < 0) fail(ErrorCode::UnknownLabel, "no label '" + label + "' in " + name_);
    return i;
  }

  bool operator==(const LabelAxis& other) const { return labels_ == other.labels_; }

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Index> index_;
};

/// The finite label sets of a bipartite measurement scenario: settings and
/// outcomes per side, plus optional hidden-variable labels.
class ScenarioShape {
 public:
  using Index = Eigen::Index;

  ScenarioShape() = default;

  ScenarioShape(std::vector<std::string> settings_a, std::vector<std::string> settings_b,
                std::vector<std::string> outcomes_a, std::vector<std::string> outcomes_b,
                std::vector<std::string> lambdas = {})
      : settings_a_("settings_a", std::move(settings_a)),
        settings_b_("settings_b", std::move(settings_b)),
        outcomes_a_("outcomes_a", std::move(outcomes_a)),
        outcomes_b_("outcomes_b", std::move(outcomes_b)),
        lambdas_("lambdas", std::move(lambdas)) {
    if (settings_a_.empty() || settings_b_.empty() || outcomes_a_.empty() || outcomes_b_.empty()) {
      fail(ErrorCode::BadParams, "setting and outcome label lists must be non-empty");
    }
  }

  const LabelAxis& settings_a() const { return settings_a_; }
  const LabelAxis& settings_b() const { return settings_b_; }
  const LabelAxis& outcomes_a() const { return outcomes_a_; }
  const LabelAxis& outcomes_b() const { return outcomes_b_; }
  const LabelAxis& lambdas() const { return lambdas_; }

  Index num_settings_a() const { return settings_a_.size(); }
  Index num_settings_b() const { return settings_b_.size(); }
  Index num_outcomes_a() const { return outcomes_a_.size(); }
  Index num_outcomes_b() const { return outcomes_b_.size(); }
  Index num_lambdas() const { return lambdas_.size(); }

  bool has_lambdas() const { return !lambdas_.empty(); }

  bool operator==(const ScenarioShape& other) const {
    return settings_a_ == other.settings_a_ && settings_b_ == other.settings_b_ &&
           outcomes_a_ == other.outcomes_a_ && outcomes_b_ == other.outcomes_b_ &&
           lambdas_ == other.lambdas_;
  }

  /// Shape with the lambda axis dropped (for behavior-level views).
  ScenarioShape without_lambdas() const {
    return ScenarioShape(settings_a_.labels(), settings_b_.labels(), outcomes_a_.labels(),
                         outcomes_b_.labels());
  }

  /// Shape with the lambda axis replaced.
  ScenarioShape with_lambdas(std::vector<std::string> lambdas) const {
    return ScenarioShape(settings_a_.labels(), settings_b_.labels(), outcomes_a_.labels(),
                         outcomes_b_.labels(), std::move(lambdas));
  }

 private:
  LabelAxis settings_a_;
  LabelAxis settings_b_;
  LabelAxis outcomes_a_;
  LabelAxis outcomes_b_;
  LabelAxis lambdas_;
};

}  // namespace lhv
