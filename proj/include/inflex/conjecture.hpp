#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inflex/polyext.hpp"
#include "inflex/report.hpp"

namespace inflex {

enum class JetMode { generic, positive };

/// Jet entries uniform in [-10, 10] with |a_0| >= 0.1, or uniform in [0.1, 10] (positive).
std::vector<double> random_jet(int n, std::uint64_t seed, JetMode mode = JetMode::generic);

/// Replayable seed of one trial.
std::uint64_t trial_seed(std::uint64_t base, int n, int trial);

struct ConjectureTrial {
  int n = 0;
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<double> jet;
  int collar_exponent = 1;
  std::vector<double> m_schedule;
  std::vector<SignClass> signs;
  /// Real roots of h^(n) divided by m, sorted, one list per schedule entry.
  std::vector<std::vector<double>> scaled_roots;
  /// min over roots of |root/m - 1|; infinity without roots.
  std::vector<double> min_distance;
  /// First schedule m from which every later entry is definite.
  std::optional<double> m_min;
  /// Schedule indices i where entry i-1 was definite and entry i is not.
  std::vector<int> violations;
  bool flagged = false;
  std::string note;
};

ConjectureTrial run_trial(int n, const std::vector<double>& jet, std::span<const double> m_schedule,
                          int collar_exponent = 1);

struct ConjectureSummary {
  int n = 0;
  int trials = 0;
  double definite_fraction = 0.0;  // at the largest m
  double min_distance = 0.0;       // over trials, at the largest m
  double shrinking_fraction = 0.0;  // trials whose successive scaled-root changes shrink
  int flagged = 0;
};

struct ConjectureReport {
  std::uint64_t seed = 0;
  JetMode mode = JetMode::generic;
  int collar_exponent = 1;
  std::vector<double> m_schedule;
  std::vector<ConjectureSummary> summaries;
  std::vector<ConjectureTrial> trials;  // sorted by (n, index)

  /// Trials with a definite-then-indefinite step.
  std::vector<const ConjectureTrial*> counterexample_candidates() const;
  Json to_json() const;
};

/// 2^4, ..., 2^14
std::vector<double> default_conjecture_schedule();

ConjectureReport conjecture_scan(std::span<const int> n_values, int trials_per_n,
                                 std::span<const double> m_schedule, std::uint64_t seed,
                                 JetMode mode = JetMode::generic, int collar_exponent = 1);

struct ScaledRootRow {
  double m = 0.0;
  std::vector<double> roots;  // roots of h^(n) divided by m
};

struct ScaledRootTable {
  int n = 0;
  std::vector<ScaledRootRow> rows;
  /// Richardson in 1/m over consecutive rows with equal root counts, last pair first.
  std::vector<double> extrapolated;
  std::vector<double> previous_extrapolated;  // from the pair before, when available
  bool flagged = false;
  std::string note;

  Json to_json() const;
};

ScaledRootTable scaled_root_table(const std::vector<double>& jet, std::span<const double> m_schedule,
                                  int collar_exponent = 1);

}  // namespace inflex
