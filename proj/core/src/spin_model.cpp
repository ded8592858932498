#include "spintrap/spin_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spintrap/error.hpp"

namespace spintrap {

namespace {

constexpr std::array<std::pair<int, int>, kNumLevels> kLevelOrder{{
    {0, -1}, {0, +1}, {0, 0}, {-1, -1}, {-1, +1}, {-1, 0}}};

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError(fmt::format("duration must be finite and >= 0 us, got {}", t));
  }
}

void check_step(double step) {
  if (!(step > 0.0) || step > 1e-2) {
    throw ParameterError(fmt::format("integration step must lie in (0, 1e-2] us, got {}", step));
  }
}

Vector6 check_populations(Vector6 p, double negative_limit) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = p[i];
    if (!std::isfinite(v) || v < -negative_limit || v > 1.0 + PopulationVector::kTolerance) {
      throw DomainError(fmt::format("population[{}] = {} outside [0, 1]", i, v));
    }
    if (v < 0.0) p[i] = 0.0;
  }
  if (std::abs(p.sum() - 1.0) > PopulationVector::kTolerance) {
    throw DomainError(fmt::format("populations sum to {}, expected 1", p.sum()));
  }
  return p;
}

// Blocks of exp(M t) where M = [[K, k_s I], [0, -k_s I]], K = -3 k_i (I - J/3).
// With Q = I - J/3 and J/3 the projector onto the uniform nuclear vector:
//   exp(K t) = J/3 + e^{-3 k_i t} Q
//   upper-right block = (1 - e^{-k_s t}) J/3 + k_s g(t) Q
// where g(t) = (e^{-k_s t} - e^{-3 k_i t}) / (3 k_i - k_s).
Matrix6 assemble_propagator(double t, const RateParams& rates, double g) {
  const Eigen::Matrix3d third = Eigen::Matrix3d::Constant(1.0 / 3.0);
  const Eigen::Matrix3d q = Eigen::Matrix3d::Identity() - third;
  const double decay_s = std::exp(-rates.k_s * t);
  const double decay_i = std::exp(-3.0 * rates.k_i * t);

  Matrix6 u = Matrix6::Zero();
  u.topLeftCorner<3, 3>() = third + decay_i * q;
  u.topRightCorner<3, 3>() = (1.0 - decay_s) * third + rates.k_s * g * q;
  u.bottomRightCorner<3, 3>() = decay_s * Eigen::Matrix3d::Identity();
  return u;
}

}  // namespace

SpinLevel::SpinLevel(int ms, int mi) : ms_(ms), mi_(mi) {
  if ((ms != 0 && ms != -1) || mi < -1 || mi > 1) {
    throw DomainError(fmt::format("invalid spin level (m_s={}, m_I={})", ms, mi));
  }
}

SpinLevel SpinLevel::from_index(std::size_t index) {
  if (index >= kNumLevels) {
    throw DomainError(fmt::format("level index {} out of range", index));
  }
  return {kLevelOrder[index].first, kLevelOrder[index].second};
}

std::size_t SpinLevel::index() const noexcept {
  // (0,-1) (0,+1) (0,0) then the same nuclear order in m_s = -1.
  const std::size_t nuclear = mi_ == -1 ? 0 : (mi_ == 1 ? 1 : 2);
  return (ms_ == 0 ? 0 : 3) + nuclear;
}

std::string SpinLevel::to_string() const { return fmt::format("({},{})", ms_, mi_); }

PopulationVector::PopulationVector(const Vector6& p) : p_(check_populations(p, kTolerance)) {}

PopulationVector::PopulationVector(std::initializer_list<double> p) : p_(Vector6::Zero()) {
  if (p.size() != kNumLevels) {
    throw DomainError(fmt::format("population vector needs {} entries, got {}", kNumLevels, p.size()));
  }
  Vector6 v;
  Eigen::Index i = 0;
  for (double x : p) v[i++] = x;
  p_ = check_populations(v, kTolerance);
}

PopulationVector PopulationVector::fully_mixed() {
  return PopulationVector(Vector6::Constant(1.0 / 6.0), Unchecked{});
}

PopulationVector PopulationVector::electron_polarized() {
  Vector6 v = Vector6::Zero();
  v.head<3>().setConstant(1.0 / 3.0);
  return PopulationVector(v, Unchecked{});
}

PopulationVector PopulationVector::from_propagated(const Vector6& p) {
  return PopulationVector(check_populations(p, kClampLimit), Unchecked{});
}

std::array<double, kNumLevels> PopulationVector::to_array() const {
  std::array<double, kNumLevels> out{};
  for (std::size_t i = 0; i < kNumLevels; ++i) out[i] = (*this)[i];
  return out;
}

PopulationVector PopulationVector::swapped(std::size_t a, std::size_t b, double fraction) const {
  if (a >= kNumLevels || b >= kNumLevels) {
    throw DomainError(fmt::format("swap indices ({}, {}) out of range", a, b));
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ParameterError(fmt::format("swap fidelity must lie in [0, 1], got {}", fraction));
  }
  Vector6 v = p_;
  const auto ia = static_cast<Eigen::Index>(a);
  const auto ib = static_cast<Eigen::Index>(b);
  if (fraction == 1.0) {
    std::swap(v[ia], v[ib]);
  } else {
    v[ia] = (1.0 - fraction) * p_[ia] + fraction * p_[ib];
    v[ib] = (1.0 - fraction) * p_[ib] + fraction * p_[ia];
  }
  return PopulationVector(v, Unchecked{});
}

RateParams RateParams::from_lifetimes(double inv_k_s_us, double inv_k_i_us) {
  if (!(inv_k_s_us > 0.0) || !std::isfinite(inv_k_s_us)) {
    throw ParameterError(fmt::format("1/k_s must be finite and > 0 us, got {}", inv_k_s_us));
  }
  if (!(inv_k_i_us > 0.0)) {
    throw ParameterError(fmt::format("1/k_i must be > 0 us, got {}", inv_k_i_us));
  }
  return {1.0 / inv_k_s_us, std::isinf(inv_k_i_us) ? 0.0 : 1.0 / inv_k_i_us};
}

void RateParams::validate() const {
  if (!std::isfinite(k_s) || !(k_s > 0.0)) {
    throw ParameterError(fmt::format("k_s must be finite and > 0 1/us, got {}", k_s));
  }
  if (!std::isfinite(k_i) || !(k_i >= 0.0)) {
    throw ParameterError(fmt::format("k_i must be finite and >= 0 1/us, got {}", k_i));
  }
}

Matrix6 rate_matrix(const RateParams& rates) {
  rates.validate();
  Matrix6 m = Matrix6::Zero();
  m.topLeftCorner<3, 3>() = rates.k_i * (Eigen::Matrix3d::Ones() - 3.0 * Eigen::Matrix3d::Identity());
  m.topRightCorner<3, 3>() = rates.k_s * Eigen::Matrix3d::Identity();
  m.bottomRightCorner<3, 3>() = -rates.k_s * Eigen::Matrix3d::Identity();
  return m;
}

Matrix6 propagator_closed_form(double t, const RateParams& rates) {
  rates.validate();
  check_time(t);
  const double gap = 3.0 * rates.k_i - rates.k_s;
  if (gap == 0.0) {
    throw DomainError("closed-form propagator is singular for k_s == 3 k_i");
  }
  // g(t) = e^{-k_s t} (1 - e^{-gap t}) / gap, written with expm1 to stay
  // accurate when gap t is small.
  const double g = -std::exp(-rates.k_s * t) * std::expm1(-gap * t) / gap;
  return assemble_propagator(t, rates, g);
}

Matrix6 propagator_numeric(double t, const RateParams& rates, double step) {
  check_step(step);
  check_time(t);
  const Matrix6 m = rate_matrix(rates);
  Matrix6 u = Matrix6::Identity();
  if (t == 0.0) return u;

  const auto n = static_cast<long>(std::ceil(t / step));
  const double h = t / static_cast<double>(n);
  // One RK4 step of a linear ODE is multiplication by this polynomial in h M.
  const Matrix6 hm = h * m;
  const Matrix6 hm2 = hm * hm;
  const Matrix6 hm3 = hm2 * hm;
  const Matrix6 hm4 = hm3 * hm;
  const Matrix6 stepper = Matrix6::Identity() + hm + hm2 / 2.0 + hm3 / 6.0 + hm4 / 24.0;
  for (long i = 0; i < n; ++i) u = stepper * u;
  return u;
}

Matrix6 propagator(double t, const RateParams& rates) {
  rates.validate();
  check_time(t);
  if (std::abs(3.0 * rates.k_i - rates.k_s) < kDegenerateRateGap) {
    return propagator_numeric(t, rates);
  }
  return propagator_closed_form(t, rates);
}

PopulationVector propagate(const PopulationVector& p, double t, const RateParams& rates) {
  if (t == 0.0) {
    rates.validate();
    return p;
  }
  return PopulationVector::from_propagated(propagator(t, rates) * p.values());
}

PopulationVector propagate_numeric(const PopulationVector& p, double t, const RateParams& rates,
                                   double step) {
  check_step(step);
  check_time(t);
  const Matrix6 m = rate_matrix(rates);
  if (t == 0.0) return p;

  const auto n = static_cast<long>(std::ceil(t / step));
  const double h = t / static_cast<double>(n);
  Vector6 y = p.values();
  for (long i = 0; i < n; ++i) {
    const Vector6 k1 = m * y;
    const Vector6 k2 = m * (y + 0.5 * h * k1);
    const Vector6 k3 = m * (y + 0.5 * h * k2);
    const Vector6 k4 = m * (y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return PopulationVector::from_propagated(y);
}

PopulationVector steady_state(const RateParams& rates) {
  rates.validate();
  if (rates.k_i == 0.0) {
    throw DomainError("steady state is not unique when k_i == 0");
  }
  return PopulationVector::electron_polarized();
}

Vector6 seg1_appendix_solution(double t, const RateParams& rates) {
  rates.validate();
  check_time(t);
  const double ks = rates.k_s;
  const double ki = rates.k_i;
  const double d = 3.0 * ki - ks;
  if (std::abs(d) <= kDegenerateRateGap) {
    throw DomainError("printed seg1 solution is singular for k_s ~ 3 k_i");
  }
  const double es = std::exp(-ks * t);
  const double ei = std::exp(-3.0 * ki * t);
  Vector6 p;
  p << 1.0 - ki * (es - ei) / d,
       1.0 - ((2.0 * ki - ks) * ei + ki * es) / d,
       1.0 - ((ki - ks) * es + (ks - ki) * ei) / d,
       0.0, 0.0, es;
  return p / 3.0;
}

Vector6 seg2_appendix_solution(double t, const RateParams& rates, double asymptote) {
  rates.validate();
  check_time(t);
  const double ks = rates.k_s;
  const double ki = rates.k_i;
  const double d = 3.0 * ki - ks;
  if (std::abs(d) <= kDegenerateRateGap) {
    throw DomainError("printed seg2 solution is singular for k_s ~ 3 k_i");
  }
  const double es = std::exp(-ks * t);
  const double ei = std::exp(-3.0 * ki * t);
  Vector6 p;
  p << asymptote + (ei * (0.26 * ks - 0.4 * ki) - 0.38 * ki * es) / d,
       asymptote - (es * (0.38 * ki - 0.05 * ks) - ei * (0.63 * ki - 0.29 * ks)) / d,
       asymptote + (ei * (1.03 * ki - 0.55 * ks) - es * (0.38 * ki - 0.33 * ks)) / d,
       0.0, 0.05 * es, 0.33 * es;
  return p;
}

}  // namespace spintrap
