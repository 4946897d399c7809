#pragma once

#include <string>
#include <vector>

#include "mmdp/core/mmdp.hpp"

namespace mmdp {

enum class IssueKind { kTransition, kInitial, kWeights, kReward, kDiscount, kBundle };

struct ValidationIssue {
  IssueKind kind;
  std::string location;  // e.g. "training (model 0, state 3, action 1)"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(IssueKind kind) const;
  /// One issue per line, "location: message".
  std::string to_string() const;
};

/// Lists every violated invariant; never throws. `label` prefixes locations.
ValidationReport validate(const Mmdp& mmdp, double tolerance = 1e-9, const std::string& label = "");
ValidationReport validate(const DomainBundle& bundle, double tolerance = 1e-9);

}  // namespace mmdp
