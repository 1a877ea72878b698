#include "wassval/certificates/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "wassval/core/parallel.hpp"
#include "wassval/densities/cdf.hpp"
#include "wassval/dynamics/liouville.hpp"
#include "wassval/transport/wasserstein.hpp"

namespace wassval {

namespace {

void validate_eps_delta(double epsilon, double delta, const char* who) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0) || !(delta > 0.0) ||
      !(delta < 1.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": epsilon and delta must lie in (0, 1)");
  }
}

// Rounds a sample-count bound up, with a one-ulp-scale guard so that a bound
// landing exactly on an integer is not pushed to the next one by the last
// floating-point operation.
std::int64_t ceil_count(double raw) {
  return static_cast<std::int64_t>(std::ceil(raw - 1e-9));
}

void validate_finite_law(const FiniteDensityLaw& law) {
  if (law.members.empty()) {
    throw std::invalid_argument("density law: no members");
  }
  const int d = dimension(law.members.front());
  for (const auto& m : law.members) {
    if (dimension(m) != d) {
      throw std::invalid_argument("density law: member dimensions differ");
    }
  }
  if (!law.probabilities.empty()) {
    if (law.probabilities.size() != law.members.size()) {
      throw std::invalid_argument(
          "density law: probabilities do not match members");
    }
    double sum = 0.0;
    for (double p : law.probabilities) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument(
            "density law: probabilities must be nonnegative");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("density law: probabilities must sum to 1");
    }
  }
}

int pick_member(const FiniteDensityLaw& law, double u) {
  const int m = static_cast<int>(law.members.size());
  if (law.probabilities.empty()) {
    const int idx = static_cast<int>(u * m);
    return std::min(idx, m - 1);
  }
  double cum = 0.0;
  for (int j = 0; j < m; ++j) {
    cum += law.probabilities[static_cast<std::size_t>(j)];
    if (u < cum) return j;
  }
  return m - 1;
}

int model_output_dim(const OdeModel& model) {
  return model.output_dim == 0 ? model.dim : model.output_dim;
}

void validate_setup(const CertificateSetup& setup) {
  if (setup.model.dim < 1 || !setup.model.drift) {
    throw std::invalid_argument("certificate: model is missing drift or dim");
  }
  if (setup.t_grid.empty()) {
    throw std::invalid_argument("certificate: empty snapshot grid");
  }
  double prev = 0.0;
  for (double t : setup.t_grid) {
    if (!(t > prev) || !std::isfinite(t)) {
      throw std::invalid_argument(
          "certificate: snapshot times must be strictly increasing and > 0");
    }
    prev = t;
  }
  if (setup.particles < 1) {
    throw std::invalid_argument("certificate: need at least one particle");
  }
  if (!(setup.dt > 0.0) || !std::isfinite(setup.dt)) {
    throw std::invalid_argument("certificate: dt must be positive");
  }
  if (setup.threads < 0) {
    throw std::invalid_argument("certificate: negative thread count");
  }
}

void validate_data(const CertificateData& data, const CertificateSetup& setup) {
  const int out_dim = model_output_dim(setup.model);
  if (const auto* fixed = std::get_if<FixedSnapshotData>(&data)) {
    if (fixed->snapshots.size() != setup.t_grid.size()) {
      throw std::invalid_argument(
          "certificate: data snapshot count does not match the time grid");
    }
    for (const auto& e : fixed->snapshots) {
      if (e.size() == 0 || e.dim != out_dim) {
        throw std::invalid_argument(
            "certificate: data ensemble dimension mismatch");
      }
    }
  } else {
    const auto& truth = std::get<PairedTruthData>(data).truth;
    if (truth.dim != setup.model.dim || !truth.drift) {
      throw std::invalid_argument(
          "certificate: reference dynamics must share the model state space");
    }
    if (model_output_dim(truth) != out_dim) {
      throw std::invalid_argument(
          "certificate: reference output dimension mismatch");
    }
  }
}

struct DrawPlan {
  DensityFamily family;
  std::uint64_t particle_seed = 0;
  int member_index = -1;  // finite laws only
};

std::vector<DrawPlan> plan_draws(const InitialDensityLaw& law, std::int64_t n,
                                 std::uint64_t seed) {
  std::vector<DrawPlan> plans;
  plans.reserve(static_cast<std::size_t>(n));
  const Rng master(seed);
  for (std::int64_t i = 0; i < n; ++i) {
    Rng sub = master.substream(static_cast<std::uint64_t>(i));
    DrawPlan plan;
    if (const auto* fin = std::get_if<FiniteDensityLaw>(&law)) {
      plan.member_index = pick_member(*fin, sub.next_open01());
      plan.family =
          fin->members[static_cast<std::size_t>(plan.member_index)];
    } else {
      plan.family = std::get<ParametricDensityLaw>(law).draw(sub);
    }
    plan.particle_seed = sub.next_u64();
    plans.push_back(std::move(plan));
  }
  return plans;
}

double ensemble_distance(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  if (a.dim == 1) {
    return w2_1d(Cdf1D::from_ensemble(a), Cdf1D::from_ensemble(b));
  }
  return w2_lp(a, b, {}).distance;
}

[[noreturn]] void fail_draw(std::int64_t draw, double t) {
  throw std::runtime_error(
      "certificate: propagation failed for density draw " +
      std::to_string(draw) + " at t=" + std::to_string(t));
}

void check_finite(const ParticleEnsemble& e, std::int64_t draw, double t) {
  for (double v : e.coords) {
    if (!std::isfinite(v)) fail_draw(draw, t);
  }
}

// Distances for one sampled density: propagate the model (and, when paired,
// the reference dynamics) from the same initial particles and measure the
// output-space gap at every snapshot.
std::vector<double> gap_row(const CertificateData& data,
                            const CertificateSetup& setup,
                            const DensityFamily& family,
                            std::uint64_t particle_seed, std::int64_t draw) {
  const ParticleEnsemble pts0 =
      sample(family, setup.particles, particle_seed, setup.scheme);
  if (pts0.dim != setup.model.dim) {
    throw std::invalid_argument(
        "certificate: sampled density dimension does not match the model");
  }
  const std::vector<double> ones(static_cast<std::size_t>(pts0.size()), 1.0);
  LiouvilleOptions lop;
  lop.dt = setup.dt;
  const auto model_snaps =
      propagate_liouville(setup.model, pts0, ones, setup.t_grid, lop);

  std::vector<ParticleEnsemble> data_side;
  if (const auto* fixed = std::get_if<FixedSnapshotData>(&data)) {
    data_side = fixed->snapshots;
  } else {
    const auto& truth = std::get<PairedTruthData>(data).truth;
    const auto truth_snaps =
        propagate_liouville(truth, pts0, ones, setup.t_grid, lop);
    data_side.reserve(truth_snaps.size());
    for (const auto& snap : truth_snaps) {
      data_side.push_back(push_output(snap.ensemble, truth));
    }
  }

  std::vector<double> gaps;
  gaps.reserve(setup.t_grid.size());
  for (std::size_t k = 0; k < setup.t_grid.size(); ++k) {
    const double t = setup.t_grid[k];
    const ParticleEnsemble out =
        push_output(model_snaps[k].ensemble, setup.model);
    check_finite(out, draw, t);
    check_finite(data_side[k], draw, t);
    gaps.push_back(ensemble_distance(out, data_side[k]));
  }
  return gaps;
}

// All N rows. Finite laws sampled by the deterministic low-discrepancy scheme
// repeat members across draws, and a repeated member reproduces its row
// bit-for-bit, so those rows are computed once per distinct member and shared.
std::vector<std::vector<double>> compute_gaps(const CertificateData& data,
                                              const CertificateSetup& setup,
                                              const InitialDensityLaw& law,
                                              std::int64_t n,
                                              std::uint64_t seed,
                                              CertificateTrace* trace) {
  if (const auto* fin = std::get_if<FiniteDensityLaw>(&law)) {
    validate_finite_law(*fin);
  } else if (!std::get<ParametricDensityLaw>(law).draw) {
    throw std::invalid_argument("density law: missing sampler");
  }
  const std::vector<DrawPlan> plans = plan_draws(law, n, seed);
  const int threads =
      setup.threads == 0 ? hardware_threads() : setup.threads;

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
  const bool shareable = std::holds_alternative<FiniteDensityLaw>(law) &&
                         setup.scheme == SampleScheme::kHalton;
  if (shareable) {
    // first draw index per distinct member, for failure provenance
    std::map<int, std::int64_t> first_draw;
    for (std::int64_t i = 0; i < n; ++i) {
      first_draw.emplace(plans[static_cast<std::size_t>(i)].member_index, i);
    }
    std::vector<std::pair<int, std::int64_t>> jobs(first_draw.begin(),
                                                   first_draw.end());
    std::vector<std::vector<double>> member_rows(jobs.size());
    parallel_for(static_cast<std::int64_t>(jobs.size()), threads,
                 [&](std::int64_t j) {
                   const auto& [member, draw] =
                       jobs[static_cast<std::size_t>(j)];
                   const auto& plan = plans[static_cast<std::size_t>(draw)];
                   member_rows[static_cast<std::size_t>(j)] =
                       gap_row(data, setup, plan.family, plan.particle_seed,
                               draw);
                 });
    std::map<int, const std::vector<double>*> by_member;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      by_member[jobs[j].first] = &member_rows[j];
    }
    for (std::int64_t i = 0; i < n; ++i) {
      rows[static_cast<std::size_t>(i)] =
          *by_member[plans[static_cast<std::size_t>(i)].member_index];
    }
  } else {
    parallel_for(n, threads, [&](std::int64_t i) {
      const auto& plan = plans[static_cast<std::size_t>(i)];
      rows[static_cast<std::size_t>(i)] =
          gap_row(data, setup, plan.family, plan.particle_seed, i);
    });
  }

  if (trace) {
    trace->member_index.clear();
    trace->member_index.reserve(plans.size());
    for (const auto& plan : plans) {
      trace->member_index.push_back(plan.member_index);
    }
    trace->gaps = rows;
  }
  return rows;
}

ValidationCertificate make_certificate(CertificateKind kind,
                                       const CertificateSetup& setup,
                                       double epsilon, double delta,
                                       std::int64_t n, std::uint64_t seed) {
  ValidationCertificate cert;
  cert.kind = kind;
  cert.epsilon = epsilon;
  cert.delta = delta;
  cert.draws = n;
  cert.particles = setup.particles;
  cert.seed = seed;
  cert.model_id = setup.model_id;
  return cert;
}

}  // namespace

DensityFamily draw_density(const InitialDensityLaw& law, Rng& rng) {
  if (const auto* fin = std::get_if<FiniteDensityLaw>(&law)) {
    validate_finite_law(*fin);
    return fin->members[static_cast<std::size_t>(
        pick_member(*fin, rng.next_open01()))];
  }
  const auto& par = std::get<ParametricDensityLaw>(law);
  if (!par.draw) {
    throw std::invalid_argument("density law: missing sampler");
  }
  return par.draw(rng);
}

std::int64_t n_chernoff(double epsilon, double delta) {
  validate_eps_delta(epsilon, delta, "n_chernoff");
  return ceil_count(std::log(2.0 / delta) / (2.0 * epsilon * epsilon));
}

std::int64_t n_worstcase(double epsilon, double delta) {
  validate_eps_delta(epsilon, delta, "n_worstcase");
  return ceil_count(std::log(1.0 / delta) / std::log(1.0 / (1.0 - epsilon)));
}

ValidationCertificate construct_prvc(const CertificateData& data,
                                     const CertificateSetup& setup,
                                     const InitialDensityLaw& law,
                                     const ToleranceSchedule& schedule,
                                     double epsilon, double delta,
                                     std::uint64_t seed,
                                     CertificateTrace* trace) {
  const std::int64_t n = n_chernoff(epsilon, delta);
  validate_setup(setup);
  validate_data(data, setup);
  if (schedule.gammas.size() != setup.t_grid.size()) {
    throw std::invalid_argument(
        "certificate: tolerance schedule length does not match the time grid");
  }
  for (double g : schedule.gammas) {
    if (!(g > 0.0)) {
      throw std::invalid_argument(
          "certificate: tolerances must be positive");
    }
  }

  const auto rows = compute_gaps(data, setup, law, n, seed, trace);
  ValidationCertificate cert =
      make_certificate(CertificateKind::kPrvc, setup, epsilon, delta, n, seed);
  const std::size_t tau = setup.t_grid.size();
  for (std::size_t k = 0; k < tau; ++k) {
    std::int64_t count = 0;
    for (const auto& row : rows) {
      if (row[k] <= schedule.gammas[k]) ++count;
    }
    cert.snapshots.push_back(
        {setup.t_grid[k],
         static_cast<double>(count) / static_cast<double>(n)});
  }
  return cert;
}

ValidationCertificate construct_pwvc(const CertificateData& data,
                                     const CertificateSetup& setup,
                                     const InitialDensityLaw& law,
                                     double epsilon, double delta,
                                     std::uint64_t seed,
                                     CertificateTrace* trace) {
  const std::int64_t n = n_worstcase(epsilon, delta);
  validate_setup(setup);
  validate_data(data, setup);

  const auto rows = compute_gaps(data, setup, law, n, seed, trace);
  ValidationCertificate cert =
      make_certificate(CertificateKind::kPwvc, setup, epsilon, delta, n, seed);
  const std::size_t tau = setup.t_grid.size();
  for (std::size_t k = 0; k < tau; ++k) {
    double worst = 0.0;
    for (const auto& row : rows) {
      worst = std::max(worst, row[k]);
    }
    cert.snapshots.push_back({setup.t_grid[k], worst});
  }
  return cert;
}

std::string certificate_to_json(const ValidationCertificate& cert) {
  nlohmann::json j;
  j["kind"] = cert.kind == CertificateKind::kPrvc ? "PRVC" : "PWVC";
  j["epsilon"] = cert.epsilon;
  j["delta"] = cert.delta;
  j["N"] = cert.draws;
  j["nu"] = cert.particles;
  j["seed"] = cert.seed;
  j["model_id"] = cert.model_id;
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : cert.snapshots) {
    snaps.push_back({{"t", s.t}, {"value", s.value}});
  }
  j["snapshots"] = std::move(snaps);
  return j.dump(2);
}

ValidationCertificate certificate_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    ValidationCertificate cert;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "PRVC") {
      cert.kind = CertificateKind::kPrvc;
    } else if (kind == "PWVC") {
      cert.kind = CertificateKind::kPwvc;
    } else {
      throw std::invalid_argument("certificate JSON: unknown kind " + kind);
    }
    cert.epsilon = j.at("epsilon").get<double>();
    cert.delta = j.at("delta").get<double>();
    cert.draws = j.at("N").get<std::int64_t>();
    cert.particles = j.at("nu").get<std::int64_t>();
    cert.seed = j.at("seed").get<std::uint64_t>();
    cert.model_id = j.at("model_id").get<std::string>();
    for (const auto& s : j.at("snapshots")) {
      CertificateSnapshot snap;
      snap.t = s.at("t").get<double>();
      snap.value = s.at("value").get<double>();
      if (cert.kind == CertificateKind::kPrvc &&
          !(snap.value >= 0.0 && snap.value <= 1.0)) {
        throw std::invalid_argument(
            "certificate JSON: probability outside [0, 1]");
      }
      if (!(snap.value >= 0.0)) {
        throw std::invalid_argument("certificate JSON: negative value");
      }
      cert.snapshots.push_back(snap);
    }
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate JSON: ") + e.what());
  }
}

std::string schedule_to_json(const ToleranceSchedule& schedule) {
  nlohmann::json j;
  j["gammas"] = schedule.gammas;
  return j.dump(2);
}

ToleranceSchedule schedule_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    ToleranceSchedule schedule;
    for (const auto& g : j.at("gammas")) {
      schedule.gammas.push_back(g.get<double>());
    }
    return schedule;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("tolerance JSON: ") + e.what());
  }
}

}  // namespace wassval
