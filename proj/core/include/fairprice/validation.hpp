#pragma once

#include <functional>
#include <string>
#include <vector>

// The acceptance suite: every check the library is held to, runnable from
// the test binary and from `fairprice validate`.
namespace fairprice::validation {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id = 0;
  std::string name;
  std::function<CriterionResult()> run;
};

struct SuiteOptions {
  /// Worker threads for episode-heavy checks.
  int threads = 1;
  /// Restrict to these ids; empty runs everything.
  std::vector<int> only;
};

CriterionResult closed_form_golden();
CriterionResult oracle_matches_closed_form();
CriterionResult surface_consistency();
CriterionResult brute_force_equivalence();
CriterionResult lp_kernel_agreement();
CriterionResult exact_procedural_fairness(int threads = 1);
CriterionResult desk_scale_sublinearity(int threads = 1);
CriterionResult optimal_policy_retention(int threads = 1);
CriterionResult metric_properties();
CriterionResult determinism(int threads = 1);
CriterionResult lower_bound_environments();

std::vector<Criterion> criteria(int threads);

/// Runs the selected criteria in id order; `report` is called after each.
std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                       const std::function<void(const CriterionResult&)>& report = {});

/// "PASS  3  surface consistency  (0.01 s)  <detail>"
std::string format(const CriterionResult& result);

}  // namespace fairprice::validation
