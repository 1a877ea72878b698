#include "wassval/transport/network_simplex.hpp"

namespace wassval {

TransportResult solve_transport_matrix(std::span<const double> supply,
                                       std::span<const double> demand,
                                       std::span<const double> cost_row_major,
                                       const TransportOptions& opts) {
  const auto m = static_cast<std::int64_t>(supply.size());
  const auto n = static_cast<std::int64_t>(demand.size());
  if (static_cast<std::int64_t>(cost_row_major.size()) != m * n) {
    throw std::invalid_argument("solve_transport_matrix: cost size mismatch");
  }
  const double* c = cost_row_major.data();
  return solve_transport(
      supply, demand,
      [c, n](std::int64_t i, std::int64_t j) { return c[i * n + j]; }, opts);
}

}  // namespace wassval
