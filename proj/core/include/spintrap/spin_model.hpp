#pragma once

// Six-level electron-nuclear spin register under optical pumping.
//
// Basis order (m_s, m_I):
//   0: (0,-1)  1: (0,+1)  2: (0,0)  3: (-1,-1)  4: (-1,+1)  5: (-1,0)
//
// Units: time in us, rates in 1/us.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>

#include <Eigen/Core>

namespace spintrap {

inline constexpr std::size_t kNumLevels = 6;

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// One basis state |m_s, m_I> of the working subspace (m_s = +1 excluded).
class SpinLevel {
 public:
  /// Throws DomainError for m_s outside {0,-1} or m_I outside {-1,0,+1}.
  SpinLevel(int ms, int mi);

  static SpinLevel from_index(std::size_t index);

  [[nodiscard]] int ms() const noexcept { return ms_; }
  [[nodiscard]] int mi() const noexcept { return mi_; }
  [[nodiscard]] std::size_t index() const noexcept;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const SpinLevel&, const SpinLevel&) = default;

 private:
  int ms_;
  int mi_;
};

/// Six nonnegative level populations summing to one.
class PopulationVector {
 public:
  static constexpr double kTolerance = 1e-9;
  /// Entries in [-kClampLimit, 0) are float dust and get clamped to 0.
  static constexpr double kClampLimit = 1e-12;

  /// Validates entries in [0,1] and unit sum, both within kTolerance.
  explicit PopulationVector(const Vector6& p);
  PopulationVector(std::initializer_list<double> p);

  /// Equal weight on all six levels.
  static PopulationVector fully_mixed();
  /// (1,1,1,0,0,0)/3: electron in m_s = 0, nuclear spin unpolarized.
  static PopulationVector electron_polarized();

  /// Like the constructor, but first clamps float-dust negatives to zero.
  static PopulationVector from_propagated(const Vector6& p);

  [[nodiscard]] double operator[](std::size_t i) const { return p_[static_cast<Eigen::Index>(i)]; }
  [[nodiscard]] double operator[](const SpinLevel& level) const { return (*this)[level.index()]; }
  [[nodiscard]] const Vector6& values() const noexcept { return p_; }
  [[nodiscard]] std::array<double, kNumLevels> to_array() const;

  /// Population moved between two levels with weight `fraction` (1 = exchange).
  [[nodiscard]] PopulationVector swapped(std::size_t a, std::size_t b, double fraction = 1.0) const;

  friend bool operator==(const PopulationVector& a, const PopulationVector& b) { return a.p_ == b.p_; }

 private:
  struct Unchecked {};
  PopulationVector(const Vector6& p, Unchecked) : p_(p) {}
  Vector6 p_;
};

/// Optical pumping rates: electron repolarization k_s, nuclear hop rate k_i.
struct RateParams {
  double k_s = 1.0 / 0.27;
  double k_i = 1.0 / 4.76;

  static RateParams from_lifetimes(double inv_k_s_us, double inv_k_i_us);
  /// Throws ParameterError unless k_s > 0 and k_i >= 0, both finite.
  void validate() const;
};

/// Rates at which the closed-form propagator is replaced by numeric integration.
inline constexpr double kDegenerateRateGap = 1e-6;
inline constexpr double kDefaultRk4Step = 1e-3;

/// Generator of the rate equations dP/dt = M P (column j -> row i flow).
Matrix6 rate_matrix(const RateParams& rates);

/// exp(M t). Uses the analytic eigenstructure unless |3 k_i - k_s| is below
/// kDegenerateRateGap, where it integrates the matrix ODE with RK4 instead.
Matrix6 propagator(double t, const RateParams& rates);

/// Closed-form exp(M t) without the degenerate fallback. Exposed for
/// cross-checks; callers should use propagator().
Matrix6 propagator_closed_form(double t, const RateParams& rates);

/// exp(M t) by fixed-step RK4 on the matrix ODE dU/dt = M U.
Matrix6 propagator_numeric(double t, const RateParams& rates, double step = kDefaultRk4Step);

PopulationVector propagate(const PopulationVector& p, double t, const RateParams& rates);

/// Fixed-step classic RK4 integration of dP/dt = M P. The step is shrunk so
/// that an integral number of steps covers [0, t].
PopulationVector propagate_numeric(const PopulationVector& p, double t, const RateParams& rates,
                                   double step = kDefaultRk4Step);

/// Normalized kernel of M. Requires k_i > 0 for uniqueness.
PopulationVector steady_state(const RateParams& rates);

// Printed closed-form solutions for the two laser segments. Evaluated verbatim
// (coefficients and component order as printed) for cross-validation only.

/// Seg1 printed solution. Components 0 and 1 appear transposed relative to
/// propagate((0,1,1,0,0,1)/3, t).
Vector6 seg1_appendix_solution(double t, const RateParams& rates);

inline constexpr double kSeg2PrintedAsymptote = 0.34;

/// Seg2 printed solution for the start (0.07,0,0.55,0,0.05,0.33). Component 1
/// does not satisfy its own initial condition. The printed asymptote is 0.34
/// per level; pass 1/3 to evaluate with the exact steady value.
Vector6 seg2_appendix_solution(double t, const RateParams& rates,
                               double asymptote = kSeg2PrintedAsymptote);

}  // namespace spintrap
