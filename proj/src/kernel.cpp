#include "flocklab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flocklab {

KernelSpec KernelSpec::power_law(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("kernel: exponent must be finite and >= 0");
  KernelSpec k;
  k.kind_ = Kind::PowerLaw;
  k.delta_ = delta;
  return k;
}

KernelSpec KernelSpec::tabulated(std::vector<double> radii, std::vector<double> values) {
  if (radii.empty() || radii.size() != values.size())
    throw std::invalid_argument("kernel: table must be non-empty with matching sizes");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || !std::isfinite(values[i]))
      throw std::invalid_argument("kernel: non-finite table entry");
    if (radii[i] < 0.0) throw std::invalid_argument("kernel: negative radius");
    if (values[i] < 0.0) throw std::invalid_argument("kernel: negative value");
    if (i > 0 && radii[i] <= radii[i - 1])
      throw std::invalid_argument("kernel: radii must be strictly increasing");
    if (i > 0 && values[i] > values[i - 1])
      throw std::invalid_argument("kernel: values must be non-increasing");
  }
  KernelSpec k;
  k.kind_ = Kind::Tabulated;
  k.radii_ = std::move(radii);
  k.values_ = std::move(values);
  return k;
}

double KernelSpec::power_law_exponent() const {
  if (kind_ != Kind::PowerLaw)
    throw std::logic_error("kernel: not a power-law kernel");
  return delta_;
}

double KernelSpec::upper_bound() const {
  return kind_ == Kind::PowerLaw ? 1.0 : values_.front();
}

double KernelSpec::table_extent() const {
  if (kind_ != Kind::Tabulated)
    throw std::logic_error("kernel: not a tabulated kernel");
  return radii_.back();
}

double KernelSpec::operator()(double r) const {
  if (r < 0.0 || std::isnan(r)) throw std::domain_error("kernel: r must be >= 0");
  if (kind_ == Kind::PowerLaw) {
    if (delta_ == 0.0) return 1.0;
    if (delta_ == 1.0) return 1.0 / (1.0 + r * r);
    return std::pow(1.0 + r * r, -delta_);
  }
  if (r <= radii_.front()) return values_.front();
  if (r >= radii_.back()) return values_.back();
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  const std::size_t hi = static_cast<std::size_t>(it - radii_.begin());
  const std::size_t lo = hi - 1;
  const double t = (r - radii_[lo]) / (radii_[hi] - radii_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

}  // namespace flocklab
