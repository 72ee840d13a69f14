#pragma once

#include <vector>

namespace flocklab {

/// Communication rate between two agents as a function of their distance.
/// Either the bounded algebraic family (1 + r^2)^(-delta), delta >= 0, or a
/// non-increasing table of samples evaluated by linear interpolation
/// (constant before the first sample and after the last one).
class KernelSpec {
 public:
  static KernelSpec power_law(double delta);
  static KernelSpec tabulated(std::vector<double> radii, std::vector<double> values);

  bool is_power_law() const { return kind_ == Kind::PowerLaw; }
  double power_law_exponent() const;

  /// Value at r = 0; the kernel never exceeds it.
  double upper_bound() const;

  /// a(r). Throws std::domain_error for r < 0.
  double operator()(double r) const;

  /// Largest tabulated radius (tabulated kernels only).
  double table_extent() const;
  const std::vector<double>& sample_radii() const { return radii_; }
  const std::vector<double>& sample_values() const { return values_; }

 private:
  enum class Kind { PowerLaw, Tabulated };
  Kind kind_ = Kind::PowerLaw;
  double delta_ = 1.0;
  std::vector<double> radii_;
  std::vector<double> values_;
};

}  // namespace flocklab
