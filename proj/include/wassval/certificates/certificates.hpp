#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "wassval/core/rng.hpp"
#include "wassval/densities/family.hpp"
#include "wassval/densities/sampling.hpp"
#include "wassval/dynamics/models.hpp"

namespace wassval {

// A random law over admissible initial densities: either a finite list with
// selection probabilities, or a parametric family realized by a seeded
// sampler that maps RNG draws to density descriptors.
struct FiniteDensityLaw {
  std::vector<DensityFamily> members;
  // Empty means uniform; otherwise one nonnegative weight per member,
  // summing to 1 within 1e-9. Selection is by inverse CDF on one uniform.
  std::vector<double> probabilities;
};

struct ParametricDensityLaw {
  std::function<DensityFamily(Rng&)> draw;
};

using InitialDensityLaw = std::variant<FiniteDensityLaw, ParametricDensityLaw>;

// One draw from the law. Finite laws consume exactly one uniform from the
// stream; parametric laws consume whatever their sampler takes.
DensityFamily draw_density(const InitialDensityLaw& law, Rng& rng);

// Per-snapshot tolerances, one per measurement instant, each > 0 (and +inf is
// a legal "never reject" proxy).
struct ToleranceSchedule {
  std::vector<double> gammas;
};

enum class CertificateKind { kPrvc, kPwvc };

struct CertificateSnapshot {
  double t = 0.0;
  // PRVC: empirical probability that the gap meets the tolerance, an exact
  // integer multiple of 1/N in [0,1]. PWVC: empirical worst-case gap, >= 0.
  double value = 0.0;
};

struct ValidationCertificate {
  CertificateKind kind = CertificateKind::kPrvc;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t draws = 0;      // N, the number of sampled initial densities
  std::int64_t particles = 0;  // nu, particles propagated per density
  std::uint64_t seed = 0;
  std::string model_id;
  std::vector<CertificateSnapshot> snapshots;
};

// Chernoff sample count ceil(log(2/delta) / (2 epsilon^2)): with N draws the
// empirical per-snapshot probability is within epsilon of the population one
// with confidence 1 - delta. Requires epsilon, delta in (0,1).
std::int64_t n_chernoff(double epsilon, double delta);

// Worst-case sample count ceil(log(1/delta) / log(1/(1-epsilon))): with N
// draws the empirical maximum exceeds the (1-epsilon)-quantile of the gap
// with confidence 1 - delta. Requires epsilon, delta in (0,1). Never larger
// than n_chernoff at the same (epsilon, delta).
std::int64_t n_worstcase(double epsilon, double delta);

// The measured side of the comparison: either fixed per-snapshot output-space
// ensembles shared by every density draw (experimental data), or a reference
// model that regenerates the data per draw from the same initial particles
// (synthetic ground truth, e.g. self-validation and truth-vs-surrogate
// studies).
struct FixedSnapshotData {
  std::vector<ParticleEnsemble> snapshots;
};

struct PairedTruthData {
  OdeModel truth;
};

using CertificateData = std::variant<FixedSnapshotData, PairedTruthData>;

struct CertificateSetup {
  OdeModel model;
  std::string model_id;
  std::vector<double> t_grid;      // strictly increasing, all > 0
  std::int64_t particles = 1000;   // nu
  SampleScheme scheme = SampleScheme::kHalton;
  double dt = 0.01;                // propagation step
  int threads = 1;                 // 0 = hardware threads
};

// Optional per-draw record of what the construction sampled, for reporting
// and plotting. member_index[i] is the finite-law member chosen by draw i
// (-1 for parametric laws); gaps[i][k] is that draw's output-space distance
// at snapshot k.
struct CertificateTrace {
  std::vector<int> member_index;
  std::vector<std::vector<double>> gaps;
};

// Probabilistic certificate: draws N = n_chernoff(epsilon, delta) initial
// densities from the law, propagates nu particles per draw, measures the
// per-snapshot output-space distance against the data, and reports the
// fraction of draws meeting each tolerance (gap <= gamma_k). Identical
// (seed, inputs) produce bitwise-identical certificates at any thread count.
// Propagation failure aborts with the density draw index and snapshot time.
ValidationCertificate construct_prvc(const CertificateData& data,
                                     const CertificateSetup& setup,
                                     const InitialDensityLaw& law,
                                     const ToleranceSchedule& schedule,
                                     double epsilon, double delta,
                                     std::uint64_t seed,
                                     CertificateTrace* trace = nullptr);

// Worst-case certificate: N = n_worstcase(epsilon, delta) draws, reporting
// the exact per-snapshot maximum distance over the sampled densities.
ValidationCertificate construct_pwvc(const CertificateData& data,
                                     const CertificateSetup& setup,
                                     const InitialDensityLaw& law,
                                     double epsilon, double delta,
                                     std::uint64_t seed,
                                     CertificateTrace* trace = nullptr);

// JSON forms: certificate objects serialize as {kind, epsilon, delta, N, nu,
// seed, model_id, snapshots: [{t, value}]}, tolerance schedules as
// {gammas: [...]}. Parsing validates shape and value ranges.
std::string certificate_to_json(const ValidationCertificate& cert);
ValidationCertificate certificate_from_json(const std::string& text);
std::string schedule_to_json(const ToleranceSchedule& schedule);
ToleranceSchedule schedule_from_json(const std::string& text);

}  // namespace wassval
