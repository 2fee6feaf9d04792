#include "pwsreg/regularize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "pwsreg/errors.hpp"

namespace pwsreg {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficients of (1 − s²)^m in the power basis.
std::vector<double> one_minus_s2_pow(int m) {
  std::vector<double> out(static_cast<std::size_t>(2 * m + 1), 0.0);
  for (int j = 0; j <= m; ++j) out[static_cast<std::size_t>(2 * j)] = (j % 2 == 0 ? 1.0 : -1.0) * binomial(m, j);
  return out;
}

bool check_monotone(const TransitionFn& f) {
  constexpr int kGrid = 1000;
  for (int i = 1; i <= kGrid; ++i) {
    const double s = -1.0 + 2.0 * i / (kGrid + 1);
    if (!(f.dphi(s) > 0.0)) return false;
  }
  return true;
}

}  // namespace

TransitionFn::TransitionFn(std::vector<double> coeffs, int smoothness_class, TransitionFamily family, double c)
    : coeffs_(std::move(coeffs)), n_(smoothness_class), family_(family), c_(c) {
  monotone_ = check_monotone(*this);
}

double TransitionFn::phi(double s) const {
  double r = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * s + *it;
  return r;
}

double TransitionFn::dphi(double s) const { return derivative(1, s); }

double TransitionFn::derivative(int i, double s) const {
  double r = 0.0;
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= i; --k) {
    double factor = 1.0;
    for (int j = 0; j < i; ++j) factor *= k - j;
    r = r * s + factor * coeffs_[static_cast<std::size_t>(k)];
  }
  return r;
}

std::string TransitionFn::label() const {
  std::string out = std::string(to_string(family_)) + ':' + std::to_string(n_);
  if (family_ == TransitionFamily::bump) {
    // Shortest text that reads back to the same c.
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, c_);
    out += ':' + std::string(buf, res.ptr);
  }
  return out;
}

TransitionFn hermite_transition(int n) {
  if (n < 1 || n > 8) throw PreconditionError("hermite transition order must be in [1, 8]");
  // φ' = C (1 − s²)^n, integrated termwise; C normalizes φ(1) = 1.
  std::vector<double> coeffs(static_cast<std::size_t>(2 * n + 2), 0.0);
  double total = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double a = (j % 2 == 0 ? 1.0 : -1.0) * binomial(n, j) / (2 * j + 1);
    coeffs[static_cast<std::size_t>(2 * j + 1)] = a;
    total += a;
  }
  for (double& a : coeffs) a /= total;
  TransitionFn f(std::move(coeffs), n, TransitionFamily::hermite);
  if (!f.verified_monotone()) throw PreconditionError("hermite transition failed monotonicity verification");
  return f;
}

TransitionFn bump_transition(int n, double c) {
  std::vector<double> coeffs = hermite_transition(n).coeffs();
  const std::vector<double> bump = one_minus_s2_pow(n + 1);
  coeffs.resize(std::max(coeffs.size(), bump.size()), 0.0);
  for (std::size_t i = 0; i < bump.size(); ++i) coeffs[i] += c * bump[i];
  TransitionFn f(std::move(coeffs), n, TransitionFamily::bump, c);
  if (!f.verified_monotone()) {
    std::ostringstream os;
    os << "bump transition (n=" << n << ", c=" << c << ") is not monotone on (-1, 1)";
    throw PreconditionError(os.str());
  }
  return f;
}

TransitionFn parse_transition(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  try {
    if (parts.size() == 2 && parts[0] == "hermite") return hermite_transition(std::stoi(parts[1]));
    if (parts.size() == 3 && parts[0] == "bump") return bump_transition(std::stoi(parts[1]), std::stod(parts[2]));
  } catch (const std::logic_error&) {
    // fall through to the format error below
  }
  throw PreconditionError("transition spec '" + spec + "' is not hermite:n or bump:n:c");
}

double phi_integral(const TransitionFn& phi) {
  double total = 0.0;
  const auto& c = phi.coeffs();
  for (std::size_t i = 0; i < c.size(); i += 2) total += 2.0 * c[i] / static_cast<double>(i + 1);
  return total;
}

RegularizedField::RegularizedField(FilippovSystem base, TransitionFn phi, double eps)
    : base_(std::move(base)), phi_(std::move(phi)), eps_(eps) {
  if (!(eps > 0.0)) throw PreconditionError("regularization parameter must be positive");
}

Vec2 RegularizedField::operator()(Point2 p) const {
  const double hv = base_.h()(p);
  if (hv >= eps_) return base_.xplus()(p);
  if (hv <= -eps_) return base_.xminus()(p);
  const double s = phi_(hv / eps_);
  const double wp = 0.5 * (1.0 + s);
  const double wm = 0.5 * (1.0 - s);
  const Vec2 a = base_.xplus()(p);
  const Vec2 b = base_.xminus()(p);
  return {wp * a.x + wm * b.x, wp * a.y + wm * b.y};
}

RegularizedField regularized_field(const FilippovSystem& Z, const TransitionFn& phi, double eps) {
  return {Z, phi, eps};
}

const char* to_string(TransitionFamily f) { return f == TransitionFamily::hermite ? "hermite" : "bump"; }

}  // namespace pwsreg
