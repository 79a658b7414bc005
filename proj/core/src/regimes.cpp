#include "ovm/regimes.hpp"

#include <string>

#include "ovm/asymptotics.hpp"
#include "ovm/error.hpp"
#include "ovm/experiments.hpp"

namespace ovm {

std::string_view to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::Thm32: return "thm32";
    case RegimeKind::Thm34: return "thm34";
    case RegimeKind::Prop45: return "prop45";
  }
  return "?";
}

RegimeKind regime_from_string(std::string_view name) {
  if (name == "thm32") return RegimeKind::Thm32;
  if (name == "thm34") return RegimeKind::Thm34;
  if (name == "prop45") return RegimeKind::Prop45;
  fail(ErrorKind::ConfigError, "unknown regime '" + std::string(name) + "'");
}

RegimeParams default_regime_params(RegimeKind kind) {
  RegimeParams p;
  switch (kind) {
    case RegimeKind::Thm32:
      p.n_ladder = {128, 256, 512, 1024};
      p.replicates = 200;
      p.seed = 32;
      break;
    case RegimeKind::Thm34:
      p.n_ladder = {256, 512, 1024};
      p.replicates = 200;
      p.seed = 34;
      break;
    case RegimeKind::Prop45:
      p.n_ladder = {513};
      p.replicates = 300;
      p.seed = 45;
      break;
  }
  return p;
}

RegimeReport regime_check(RegimeKind kind, const RegimeParams& params) {
  if (params.n_ladder.empty()) fail(ErrorKind::ConfigError, "N ladder must not be empty");
  ExperimentConfig config;
  config.name = std::string(to_string(kind));
  config.n_grid = params.n_ladder;
  config.replicates = params.replicates;
  config.base_seed = params.seed;
  config.workers = params.workers;
  switch (kind) {
    case RegimeKind::Thm32:
      if (!(params.c_prime >= 0.0 && params.c_prime < 0.5)) fail(ErrorKind::ConfigError, "c' must lie in [0, 1/2)");
      config.q_schedule.kind = QScheduleKind::InverseSqrt;
      break;
    case RegimeKind::Thm34:
      if (!(params.kappa > 0.0 && params.kappa < 1.0)) fail(ErrorKind::ConfigError, "kappa must lie in (0, 1)");
      config.q_schedule = {QScheduleKind::OneMinusPower, params.delta};
      break;
    case RegimeKind::Prop45:
      if (params.k < 3) fail(ErrorKind::ConfigError, "prop45 needs K >= 3");
      if (!(params.level >= 0.0 && params.level * params.k < 1.0)) fail(ErrorKind::ConfigError, "level must lie in [0, 1/K)");
      config.k = params.k;
      config.q_grid = {params.q};
      break;
  }
  const SweepResult sweep = run_sweep(config);

  RegimeReport report;
  report.kind = kind;
  for (std::size_t ni = 0; ni < params.n_ladder.size(); ++ni) {
    RegimePoint point;
    point.n = params.n_ladder[ni];
    point.q = config.q_at(0, ni);
    const double dn = static_cast<double>(point.n);
    for (const RunRecord& rec : sweep.records) {
      if (rec.n_index != ni || rec.status != RunStatus::Ok) continue;
      ++point.trials;
      const RunOutcome& o = rec.outcome;
      bool hit = false;
      switch (kind) {
        case RegimeKind::Thm32: hit = static_cast<double>(o.z_min_final) > params.c_prime * dn; break;
        case RegimeKind::Thm34:
          hit = o.outcome_class == OutcomeClass::ConnectedConsensus &&
                static_cast<double>(o.min_degree_final) >= params.kappa * dn;
          break;
        case RegimeKind::Prop45: hit = static_cast<double>(o.z_min_final) > params.level * dn; break;
      }
      point.successes += hit;
    }
    if (point.trials > 0) {
      point.p_hat = static_cast<double>(point.successes) / static_cast<double>(point.trials);
      point.ci = wilson_interval(point.successes, point.trials);
    }
    if (kind == RegimeKind::Thm32 && point.q > 0.0 && point.q < 1.0) {
      point.prediction = theorem31_bound(point.q, 0.5, params.c_prime);
    }
    if (!report.points.empty() && point.p_hat < report.points.back().p_hat) report.monotone_non_decreasing = false;
    report.points.push_back(point);
  }
  return report;
}

}  // namespace ovm
