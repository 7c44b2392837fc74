#pragma once

#include <map>
#include <string>

#include "parageo/chart.hpp"

namespace parageo {

enum class CheckStatus { Pass, Fail, Vacuous };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Vacuous: return "vacuous";
  }
  return "fail";
}

// Result of one named check aggregated over the sample set.
struct CheckOutcome {
  std::string suite;
  std::string id;
  CheckStatus status = CheckStatus::Pass;
  double worst = 0.0;      // worst scaled residual seen
  int worst_sample = -1;   // sample index of the worst residual
  int samples = 0;         // number of residuals evaluated
  double tolerance = 0.0;
  std::string note;
};

// Default tolerances. Identity checks are tight for exact and dual
// derivatives and loosened for central differences; classification flags
// use a separate, coarser pair.
struct Tolerances {
  double identity_exact = 1e-9;
  double identity_fd = 1e-6;
  double class_exact = 1e-6;
  double class_fd = 1e-4;
  double curvature = 1e-4;
  double rank_rel = 1e-8;
  double det_min = 1e-10;
  double sym = 1e-10;
  double plane_min = 1e-8;
  double condition_flag = 1e8;

  double identity(DerivStrategy s) const {
    return s == DerivStrategy::CentralDifference ? identity_fd : identity_exact;
  }
  double classification(DerivStrategy s) const {
    return s == DerivStrategy::CentralDifference ? class_fd : class_exact;
  }
};

struct RunSettings {
  DerivStrategy strategy = DerivStrategy::ExactClosedForm;
  Tolerances tol;
  // Per-check or per-suite tolerance overrides from the command line;
  // a check id wins over its suite name.
  std::map<std::string, double> overrides;

  double resolve(const std::string& suite, const std::string& id,
                 double fallback) const {
    if (auto it = overrides.find(id); it != overrides.end()) return it->second;
    if (auto it = overrides.find(suite); it != overrides.end()) return it->second;
    return fallback;
  }
};

// Accumulates the worst residual over samples for one check.
struct ResidualTracker {
  double worst = 0.0;
  int worst_sample = -1;
  int count = 0;

  void add(double r, int sample) {
    ++count;
    if (r > worst) {
      worst = r;
      worst_sample = sample;
    }
  }
};

inline CheckOutcome finish_check(const std::string& suite, const std::string& id,
                                 const ResidualTracker& t, double tolerance,
                                 std::string note = "") {
  CheckOutcome o;
  o.suite = suite;
  o.id = id;
  o.worst = t.worst;
  o.worst_sample = t.worst_sample;
  o.samples = t.count;
  o.tolerance = tolerance;
  o.status = t.worst <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  o.note = std::move(note);
  return o;
}

inline CheckOutcome vacuous_check(const std::string& suite, const std::string& id,
                                  std::string note) {
  CheckOutcome o;
  o.suite = suite;
  o.id = id;
  o.status = CheckStatus::Vacuous;
  o.note = std::move(note);
  return o;
}

}  // namespace parageo
