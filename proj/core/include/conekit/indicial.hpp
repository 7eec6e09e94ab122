#pragma once

// Exponent bookkeeping at a conic tip: admissible weight windows, indicial
// roots of the Laplacian and bilaplacian, asymptotic spaces, minimal-domain
// and interpolation criteria. Exact when the cross-section spectrum is.

#include <string>
#include <string_view>
#include <vector>

#include "conekit/exact.hpp"
#include "conekit/geometry.hpp"

namespace conekit::indicial {

struct GammaWindow {
  double lower = 0.0;  // open
  double upper = 0.0;  // open
  bool nonempty = false;
  bool contains(double gamma) const { return nonempty && gamma > lower && gamma < upper; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

enum class Operator { laplacian, bilaplacian };
std::string_view to_string(Operator op);

/// Roots are stored as exponents q of model solutions x^{+q}. Reports can
/// translate to the decay convention x^{-rho}, rho = -q.
enum class ExponentConvention { solution_power, decay_exponent };
std::string_view to_string(ExponentConvention convention);

struct IndicialRoot {
  exact::RealValue value;
  int mode = 0;                   // angular index of the boundary eigenvalue
  int boundary_multiplicity = 1;  // eigenvalue multiplicity on the circle
  int multiplicity = 1;           // within-mode root multiplicity
  int log_power_max = 0;
  Operator op = Operator::laplacian;

  double real() const { return value.to_double(); }
  exact::RealValue in_convention(ExponentConvention convention) const;
};

struct AsymptoticSpace {
  double gamma = 0.0;
  exact::Rational lo;  // closed
  exact::Rational hi;  // open
  std::vector<IndicialRoot> members;

  double lower() const { return exact::to_double(lo); }
  double upper() const { return exact::to_double(hi); }
  bool empty() const { return members.empty(); }
};

struct DomainCheck {
  bool holds = true;
  /// Elements of the probe set that hit a branch value, with the mode hit.
  struct Hit {
    exact::RealValue value;
    int mode = 0;
  };
  std::vector<Hit> offending;
};

GammaWindow ch_gamma_window(int n, double lambda_one);
GammaWindow laplacian_gamma_window(int n, double lambda_one);

std::vector<IndicialRoot> laplacian_indicial_roots(int n, const geometry::BoundarySpectrum& spectrum);
std::vector<IndicialRoot> bilaplacian_indicial_roots(int n, const geometry::BoundarySpectrum& spectrum);

/// Bilaplacian roots with real part in [(n-7)/2 - gamma, (n-3)/2 - gamma).
AsymptoticSpace asymptotic_space(int n, const geometry::BoundarySpectrum& spectrum, double gamma);

/// Holds iff {gamma+1, gamma+3} avoids {+-sqrt(((n-1)/2)^2 - lambda_j)}.
DomainCheck minimal_domain_check(int n, const geometry::BoundarySpectrum& spectrum, double gamma);
/// Holds iff (n-3)/2 - gamma avoids {(n-1)/2 +- sqrt(((n-1)/2)^2 - lambda_j)}.
DomainCheck laplacian_minimal_domain_check(int n, const geometry::BoundarySpectrum& spectrum,
                                           double gamma);

/// {(1-gamma)/2 +- sqrt(((n-1)/2)^2 - lambda_j)/2} intersected with (0, 1), sorted, unique.
std::vector<double> interpolation_exclusions(int n, const geometry::BoundarySpectrum& spectrum,
                                             double gamma);

struct IndicialReport {
  int n = 1;
  double gamma = 0.0;
  ExponentConvention convention = ExponentConvention::solution_power;
  GammaWindow ch_window;
  GammaWindow laplacian_window;
  AsymptoticSpace asymptotics;
  std::vector<IndicialRoot> laplacian_roots;
  std::vector<IndicialRoot> bilaplacian_roots;
  DomainCheck minimal_domain;
  DomainCheck laplacian_minimal_domain;
  std::vector<double> exclusions;
  bool exact = false;
};

IndicialReport indicial_report(int n, const geometry::BoundarySpectrum& spectrum, double gamma,
                               ExponentConvention convention = ExponentConvention::solution_power);

}  // namespace conekit::indicial
