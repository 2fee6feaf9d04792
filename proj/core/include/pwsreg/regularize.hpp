#pragma once

#include <string>
#include <vector>

#include "pwsreg/fields.hpp"

namespace pwsreg {

enum class TransitionFamily { hermite, bump };

/// Polynomial transition function φ on [−1, 1], extended by ±1 outside.
class TransitionFn {
 public:
  /// Coefficients in the power basis: φ(s) = Σ coeffs[i] sⁱ.
  TransitionFn(std::vector<double> coeffs, int smoothness_class, TransitionFamily family, double c = 0.0);

  [[nodiscard]] double phi(double s) const;    // polynomial, no capping
  [[nodiscard]] double dphi(double s) const;   // φ'
  [[nodiscard]] double operator()(double s) const {  // Φ with exact branches
    if (s >= 1.0) return 1.0;
    if (s <= -1.0) return -1.0;
    return phi(s);
  }
  /// i-th derivative of the polynomial at s.
  [[nodiscard]] double derivative(int i, double s) const;

  [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
  [[nodiscard]] int smoothness_class() const { return n_; }
  [[nodiscard]] bool verified_monotone() const { return monotone_; }
  [[nodiscard]] TransitionFamily family() const { return family_; }
  [[nodiscard]] double c() const { return c_; }
  /// "hermite:n" or "bump:n:c".
  [[nodiscard]] std::string label() const;

 private:
  std::vector<double> coeffs_;
  int n_;
  TransitionFamily family_;
  double c_;
  bool monotone_ = false;
};

TransitionFn hermite_transition(int n);
TransitionFn bump_transition(int n, double c);
/// Parses "hermite:n" or "bump:n:c".
TransitionFn parse_transition(const std::string& spec);

/// Exact ∫_{-1}^{1} φ(s) ds.
double phi_integral(const TransitionFn& phi);

/// Z_ε = ((1+Φ(h/ε))/2) X⁺ + ((1−Φ(h/ε))/2) X⁻.
class RegularizedField {
 public:
  RegularizedField(FilippovSystem base, TransitionFn phi, double eps);

  [[nodiscard]] Vec2 operator()(Point2 p) const;
  [[nodiscard]] const FilippovSystem& base() const { return base_; }
  [[nodiscard]] const TransitionFn& phi() const { return phi_; }
  [[nodiscard]] double eps() const { return eps_; }

 private:
  FilippovSystem base_;
  TransitionFn phi_;
  double eps_;
};

RegularizedField regularized_field(const FilippovSystem& Z, const TransitionFn& phi, double eps);

const char* to_string(TransitionFamily f);

}  // namespace pwsreg
