#include "inflex/conjecture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "inflex/errors.hpp"
#include "inflex/format.hpp"
#include "inflex/random.hpp"

namespace inflex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

// roots of h^(n) as unit-collar positions t, so x = a + s w t
std::vector<double> unit_roots(const CollarPolynomial& poly) {
  if (poly.jet().is_zero()) return {};
  const RationalPoly p = poly.exact_unit_nth();
  if (p.is_zero()) return {};
  return real_roots(p);
}

void check_schedule(std::span<const double> m_schedule) {
  if (m_schedule.empty()) throw InvalidInput("empty m schedule");
  for (std::size_t i = 0; i < m_schedule.size(); ++i) {
    if (!(m_schedule[i] > 0) || !std::isfinite(m_schedule[i])) throw InvalidInput("m must be positive");
    if (i > 0 && !(m_schedule[i] > m_schedule[i - 1])) throw InvalidInput("m schedule must increase");
  }
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, int n, int trial) {
  return splitmix64(splitmix64(base ^ (static_cast<std::uint64_t>(n) << 32)) + static_cast<std::uint64_t>(trial));
}

std::vector<double> random_jet(int n, std::uint64_t seed, JetMode mode) {
  std::mt19937_64 rng(seed);
  std::vector<double> jet(static_cast<std::size_t>(n));
  for (double& a : jet) a = mode == JetMode::positive ? uniform(rng, 0.1, 10.0) : uniform(rng, -10.0, 10.0);
  while (mode == JetMode::generic && std::abs(jet[0]) < 0.1) jet[0] = uniform(rng, -10.0, 10.0);
  return jet;
}

ConjectureTrial run_trial(int n, const std::vector<double>& jet, std::span<const double> m_schedule,
                          int collar_exponent) {
  check_schedule(m_schedule);
  if (static_cast<int>(jet.size()) != n) throw InvalidInput("jet length must equal n");
  ConjectureTrial t;
  t.n = n;
  t.jet = jet;
  t.collar_exponent = collar_exponent;
  t.m_schedule.assign(m_schedule.begin(), m_schedule.end());
  const BoundaryJet bj(jet);
  for (double m : m_schedule) {
    const CollarPolynomial poly(bj, Collar::for_m(m, collar_exponent));
    SignClass sign = SignClass::indefinite;
    std::vector<double> scaled;
    double dist = kInf;
    try {
      sign = check_sign_definite(poly);
      const double w = poly.collar().width();
      for (double u : unit_roots(poly)) {
        scaled.push_back(poly.collar().from_unit(u) / m);
        dist = std::min(dist, std::abs(w * u) / m);
      }
    } catch (const std::exception& e) {
      t.flagged = true;
      t.note = "root isolation failed at m=" + shortest(m) + ": " + e.what();
    }
    std::sort(scaled.begin(), scaled.end());
    t.signs.push_back(sign);
    t.scaled_roots.push_back(std::move(scaled));
    t.min_distance.push_back(dist);
  }
  for (std::size_t i = 1; i < t.signs.size(); ++i)
    if (is_definite(t.signs[i - 1]) && !is_definite(t.signs[i])) t.violations.push_back(static_cast<int>(i));
  for (std::size_t i = t.signs.size(); i-- > 0;) {
    if (!is_definite(t.signs[i])) break;
    t.m_min = m_schedule[i];
  }
  return t;
}

std::vector<double> default_conjecture_schedule() {
  std::vector<double> m;
  for (int k = 4; k <= 14; ++k) m.push_back(std::ldexp(1.0, k));
  return m;
}

ConjectureReport conjecture_scan(std::span<const int> n_values, int trials_per_n,
                                 std::span<const double> m_schedule, std::uint64_t seed, JetMode mode,
                                 int collar_exponent) {
  check_schedule(m_schedule);
  if (trials_per_n < 1) throw InvalidInput("at least one trial per n");
  if (collar_exponent < 0) throw InvalidInput("collar exponent must be non-negative");
  ConjectureReport rep;
  rep.seed = seed;
  rep.mode = mode;
  rep.collar_exponent = collar_exponent;
  rep.m_schedule.assign(m_schedule.begin(), m_schedule.end());
  std::vector<int> ns(n_values.begin(), n_values.end());
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty()) throw InvalidInput("empty n range");
  for (int n : ns) {
    if (n < 2 || n > 10) throw InvalidInput("n must lie in 2..10, got " + std::to_string(n));
    if (n == 2 && mode == JetMode::generic)
      throw InvalidInput("n = 2 is only scanned with positive jets");
  }
  for (int n : ns) {
    ConjectureSummary s;
    s.n = n;
    s.trials = trials_per_n;
    s.min_distance = kInf;
    int definite = 0, shrinking = 0, judged = 0;
    for (int i = 0; i < trials_per_n; ++i) {
      const std::uint64_t ts = trial_seed(seed, n, i);
      ConjectureTrial t = run_trial(n, random_jet(n, ts, mode), m_schedule, collar_exponent);
      t.index = i;
      t.seed = ts;
      if (is_definite(t.signs.back())) ++definite;
      s.min_distance = std::min(s.min_distance, t.min_distance.back());
      if (t.flagged) ++s.flagged;
      std::vector<double> diffs;
      for (std::size_t k = 1; k < t.scaled_roots.size(); ++k) {
        const auto& a = t.scaled_roots[k - 1];
        const auto& b = t.scaled_roots[k];
        if (a.size() != b.size() || a.empty()) continue;
        double d = 0;
        for (std::size_t r = 0; r < a.size(); ++r) d = std::max(d, std::abs(a[r] - b[r]));
        diffs.push_back(d);
      }
      if (diffs.size() >= 2) {
        ++judged;
        bool ok = true;
        for (std::size_t k = 1; k < diffs.size(); ++k) ok = ok && diffs[k] <= diffs[k - 1];
        if (ok) ++shrinking;
      }
      rep.trials.push_back(std::move(t));
    }
    s.definite_fraction = static_cast<double>(definite) / trials_per_n;
    s.shrinking_fraction = judged ? static_cast<double>(shrinking) / judged : std::nan("");
    rep.summaries.push_back(s);
  }
  return rep;
}

std::vector<const ConjectureTrial*> ConjectureReport::counterexample_candidates() const {
  std::vector<const ConjectureTrial*> out;
  for (const auto& t : trials)
    if (!t.violations.empty()) out.push_back(&t);
  return out;
}

Json ConjectureReport::to_json() const {
  Json j;
  j["evidence_only"] = true;
  j["seed"] = seed;
  j["jet_mode"] = mode == JetMode::positive ? "positive" : "generic";
  j["collar_exponent"] = collar_exponent;
  j["m_schedule"] = m_schedule;
  Json sums = Json::array();
  for (const auto& s : summaries)
    sums.push_back({{"n", s.n},
                    {"trials", s.trials},
                    {"definite_fraction_at_largest_m", s.definite_fraction},
                    {"min_distance_to_1_at_largest_m", number(s.min_distance)},
                    {"shrinking_root_steps_fraction", number(s.shrinking_fraction)},
                    {"flagged", s.flagged}});
  j["summary"] = sums;
  Json cands = Json::array();
  for (const auto* t : counterexample_candidates()) {
    Json at = Json::array();
    for (int v : t->violations) at.push_back(t->m_schedule[static_cast<std::size_t>(v)]);
    cands.push_back({{"n", t->n}, {"trial", t->index}, {"seed", t->seed}, {"indefinite_after_definite_at_m", at}});
  }
  j["counterexample_candidates"] = cands;
  Json ts = Json::array();
  for (const auto& t : trials) {
    Json per_m = Json::array();
    for (std::size_t k = 0; k < t.m_schedule.size(); ++k)
      per_m.push_back({{"m", t.m_schedule[k]},
                       {"sign", std::string(to_string(t.signs[k]))},
                       {"scaled_roots", t.scaled_roots[k]},
                       {"min_distance_to_1", number(t.min_distance[k])}});
    Json tj = {{"n", t.n}, {"trial", t.index}, {"seed", t.seed}, {"jet", t.jet}};
    tj["m_min"] = t.m_min ? Json(*t.m_min) : Json(nullptr);
    tj["flagged"] = t.flagged;
    if (!t.note.empty()) tj["note"] = t.note;
    tj["per_m"] = per_m;
    ts.push_back(tj);
  }
  j["trials"] = ts;
  return j;
}

ScaledRootTable scaled_root_table(const std::vector<double>& jet, std::span<const double> m_schedule,
                                  int collar_exponent) {
  check_schedule(m_schedule);
  if (jet.empty()) throw InvalidInput("empty jet");
  ScaledRootTable table;
  table.n = static_cast<int>(jet.size());
  const ConjectureTrial t = run_trial(table.n, jet, m_schedule, collar_exponent);
  table.flagged = t.flagged;
  table.note = t.note;
  for (std::size_t k = 0; k < m_schedule.size(); ++k) table.rows.push_back({m_schedule[k], t.scaled_roots[k]});
  auto extrapolate = [&](std::size_t hi) {
    const auto& a = table.rows[hi - 1];
    const auto& b = table.rows[hi];
    std::vector<double> out;
    if (a.roots.size() != b.roots.size()) return out;
    for (std::size_t r = 0; r < a.roots.size(); ++r)
      out.push_back((b.m * b.roots[r] - a.m * a.roots[r]) / (b.m - a.m));
    return out;
  };
  const std::size_t rows = table.rows.size();
  if (rows >= 2) table.extrapolated = extrapolate(rows - 1);
  if (rows >= 3) table.previous_extrapolated = extrapolate(rows - 2);
  return table;
}

Json ScaledRootTable::to_json() const {
  Json j;
  j["n"] = n;
  Json rs = Json::array();
  for (const auto& r : rows) rs.push_back({{"m", r.m}, {"scaled_roots", r.roots}});
  j["rows"] = rs;
  j["extrapolated"] = extrapolated;
  j["previous_extrapolated"] = previous_extrapolated;
  j["flagged"] = flagged;
  if (!note.empty()) j["note"] = note;
  return j;
}

}  // namespace inflex
