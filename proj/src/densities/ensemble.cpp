#include "wassval/densities/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "wassval/core/csv.hpp"
#include "wassval/core/log.hpp"

namespace wassval {

void normalize_weights(ParticleEnsemble& ensemble) {
  const auto n = ensemble.size();
  if (ensemble.dim <= 0) {
    throw std::invalid_argument("ensemble: dimension must be positive");
  }
  if (ensemble.coords.size() !=
      static_cast<std::size_t>(n) * static_cast<std::size_t>(ensemble.dim)) {
    throw std::invalid_argument("ensemble: coords/weights size mismatch");
  }
  if (n == 0) {
    throw std::invalid_argument("ensemble: empty");
  }
  double total = 0.0;
  for (double w : ensemble.weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("ensemble: weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("ensemble: total weight is zero");
  }
  if (std::abs(total - 1.0) > 1e-12) {
    log_debug("renormalizing ensemble weights, sum was " +
              std::to_string(total));
    for (double& w : ensemble.weights) w /= total;
  }
}

ParticleEnsemble ensemble_from_points(int dim, std::vector<double> coords) {
  ParticleEnsemble out;
  out.dim = dim;
  if (dim <= 0 || coords.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument("ensemble_from_points: bad coords length");
  }
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim);
  out.coords = std::move(coords);
  out.weights.assign(n, 1.0 / static_cast<double>(n));
  return out;
}

ParticleEnsemble read_ensemble_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  if (table.header.empty()) {
    throw std::runtime_error("ensemble csv: empty header in " + path);
  }
  const bool has_weights = table.header.front() == "w";
  const int dim = static_cast<int>(table.header.size()) - (has_weights ? 1 : 0);
  if (dim <= 0) {
    throw std::runtime_error("ensemble csv: no coordinate columns in " + path);
  }
  ParticleEnsemble out;
  out.dim = dim;
  out.coords.reserve(table.rows.size() * static_cast<std::size_t>(dim));
  out.weights.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::size_t col = 0;
    if (has_weights) {
      out.weights.push_back(row[col++]);
    } else {
      out.weights.push_back(1.0);
    }
    for (int k = 0; k < dim; ++k) {
      out.coords.push_back(row[col++]);
    }
  }
  normalize_weights(out);
  return out;
}

void write_ensemble_csv(const std::string& path,
                        const ParticleEnsemble& ensemble) {
  std::vector<std::string> header;
  header.push_back("w");
  for (int k = 1; k <= ensemble.dim; ++k) {
    header.push_back("x" + std::to_string(k));
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(ensemble.size()));
  for (std::int64_t i = 0; i < ensemble.size(); ++i) {
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(ensemble.dim) + 1);
    row.push_back(ensemble.weights[static_cast<std::size_t>(i)]);
    for (double c : ensemble.point(i)) row.push_back(c);
    rows.push_back(std::move(row));
  }
  csv::write_table(path, header, rows);
}

}  // namespace wassval
