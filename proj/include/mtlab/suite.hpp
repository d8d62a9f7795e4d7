#pragma once

#include <string>
#include <vector>

#include "mtlab/lab.hpp"

namespace mtlab {

struct CriterionOutcome {
  int id = 0;
  CheckResult check;
  std::string csv_name;  // file name inside the output directory
  std::string body;      // CSV body
};

CriterionOutcome criterion_special_functions(const LabConfig& config);
CriterionOutcome criterion_bellman_bound(const LabConfig& config);
CriterionOutcome criterion_classical(const LabConfig& config);
CriterionOutcome criterion_linearization(const LabConfig& config);
CriterionOutcome criterion_sharp(const LabConfig& config);
CriterionOutcome criterion_gphi(const LabConfig& config);
CriterionOutcome criterion_extremal_trend(const LabConfig& config);
CriterionOutcome criterion_negative_control(const LabConfig& config);
CriterionOutcome criterion_oracle(const LabConfig& config);

/// Criteria 1 through 9 in order.
std::vector<CriterionOutcome> run_criteria(const LabConfig& config);

/// Criterion 10 compares the bodies of two runs of criteria 1 through 9.
CriterionOutcome criterion_determinism(const std::vector<CriterionOutcome>& first,
                                       const std::vector<CriterionOutcome>& second);

/// Every criterion, one consolidated report. When config.outdir is set, each
/// criterion's CSV and report.json are written there.
RunReport run_full_suite(const LabConfig& config);

}  // namespace mtlab
