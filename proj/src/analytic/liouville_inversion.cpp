#include "wassval/analytic/liouville_inversion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace wassval {

namespace {

void require_interval(const Interval& iv, const char* what) {
  if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
    throw std::invalid_argument(std::string("prajna_check: ") + what +
                                " interval is empty or non-finite");
  }
}

}  // namespace

PrajnaResult prajna_check(Interval x0, Interval xt, Interval p, double time) {
  require_interval(x0, "initial-state");
  require_interval(xt, "final-state");
  require_interval(p, "parameter");
  if (!(p.lo > 0.0)) {
    throw std::invalid_argument(
        "prajna_check: parameter interval must lie in (0, inf)");
  }
  if (!(time >= 0.0) || !std::isfinite(time)) {
    throw std::invalid_argument("prajna_check: time must be finite and >= 0");
  }
  if (xt.lo < 0.0 && xt.hi > 0.0) {
    throw std::invalid_argument(
        "prajna_check: final-state interval must not straddle zero (the "
        "binding corner min |x_T| is no longer an endpoint there)");
  }
  const double min_abs_xt = xt.lo >= 0.0 ? xt.lo : -xt.hi;
  PrajnaResult out;
  out.witness = 2.0 * min_abs_xt * min_abs_xt * p.lo * time;
  out.verdict = out.witness >= 1.0 ? PrajnaVerdict::kInvalidated
                                   : PrajnaVerdict::kNotInvalidated;
  return out;
}

std::function<double(double, double)> cubic_density_transport(
    std::function<double(double, double)> xi_t, double time) {
  if (!xi_t) {
    throw std::invalid_argument(
        "cubic_density_transport: final density must be callable");
  }
  if (!(time >= 0.0) || !std::isfinite(time)) {
    throw std::invalid_argument(
        "cubic_density_transport: time must be finite and >= 0");
  }
  return [xi_t = std::move(xi_t), time](double x0, double p) {
    const double growth = 1.0 + 2.0 * x0 * x0 * p * time;
    const double scale = std::pow(growth, -1.5);
    return scale * xi_t(x0 / std::sqrt(growth), p);
  };
}

}  // namespace wassval
