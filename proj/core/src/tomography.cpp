#include "spintrap/tomography.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "spintrap/error.hpp"

namespace spintrap {

namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void forward_dft(std::vector<std::complex<double>>& data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW failed to create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

struct LineSample {
  std::size_t bin;
  double offset;  // vertex position relative to bin, in bins
};

LineSample locate_line(const Spectrum& calibration, double f0) {
  const auto n = calibration.freq.size();
  const double df = calibration.bin_width();
  const double pos = (f0 - calibration.freq.front()) / df;
  if (!(pos >= 1.0) || !(pos <= static_cast<double>(n) - 2.0)) {
    throw DomainError(fmt::format("line at {} MHz falls off the spectrum grid", f0));
  }
  const auto k = static_cast<std::size_t>(std::lround(pos));
  const double ym = calibration.values[k - 1].real();
  const double y0 = calibration.values[k].real();
  const double yp = calibration.values[k + 1].real();
  const double curvature = ym - 2.0 * y0 + yp;
  double d = curvature != 0.0 ? 0.5 * (ym - yp) / curvature : 0.0;
  if (!(std::abs(d) <= 1.0)) d = 0.0;
  return {k, d};
}

double parabola_at(const Spectrum& s, const LineSample& line) {
  const double ym = s.values[line.bin - 1].real();
  const double y0 = s.values[line.bin].real();
  const double yp = s.values[line.bin + 1].real();
  const double d = line.offset;
  return y0 + 0.5 * d * (yp - ym) + 0.5 * d * d * (yp - 2.0 * y0 + ym);
}

}  // namespace

double SpectralAmplitudes::of(int mi) const {
  switch (mi) {
    case -1: return a_minus1;
    case 0: return a_zero;
    case 1: return a_plus1;
    default: break;
  }
  throw DomainError(fmt::format("nuclear projection {} not in {{-1, 0, +1}}", mi));
}

void FidParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError(fmt::format("fid.dt must be > 0 us, got {}", dt));
  if (!(t2star > 0.0)) throw ParameterError(fmt::format("fid.t2star must be > 0 us, got {}", t2star));
  if (n_samples < 256) throw ParameterError(fmt::format("fid.n_samples must be >= 256, got {}", n_samples));
  if (padded_size < n_samples) {
    throw ParameterError(fmt::format("fid.padded_size ({}) must be >= n_samples ({})", padded_size, n_samples));
  }
  if (!std::isfinite(detuning) || !std::isfinite(hyperfine_split)) {
    throw ParameterError("fid detuning and split must be finite");
  }
  const double nyquist = 1.0 / (2.0 * dt);
  if (!(std::abs(detuning) + std::abs(hyperfine_split) < nyquist)) {
    throw ParameterError(fmt::format("lines up to {} MHz exceed the Nyquist frequency {} MHz",
                                     std::abs(detuning) + std::abs(hyperfine_split), nyquist));
  }
  if (!(first_point_scale >= 0.0 && first_point_scale <= 1.0)) {
    throw ParameterError(fmt::format("fid.first_point_scale must lie in [0, 1], got {}", first_point_scale));
  }
}

SpectralAmplitudes amplitudes(const PopulationVector& p) {
  return {p[SpinLevel(0, -1)] - p[SpinLevel(-1, -1)], p[SpinLevel(0, 1)] - p[SpinLevel(-1, 1)],
          p[SpinLevel(0, 0)] - p[SpinLevel(-1, 0)]};
}

Fid synthesize_fid(const SpectralAmplitudes& amps, const FidParams& fp) {
  fp.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto n = static_cast<std::size_t>(fp.n_samples);
  Fid fid;
  fid.tau.resize(n);
  fid.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double tau = static_cast<double>(k) * fp.dt;
    std::complex<double> s{};
    for (int m : {-1, 0, 1}) {
      s += amps.of(m) * std::polar(1.0, two_pi * fp.line_frequency(m) * tau);
    }
    fid.tau[k] = tau;
    fid.samples[k] = s * std::exp(-tau / fp.t2star);
  }
  return fid;
}

Spectrum spectrum(const Fid& fid, const FidParams& fp) {
  fp.validate();
  const auto n = static_cast<std::size_t>(fp.padded_size);
  if (fid.samples.size() > n) {
    throw ParameterError(fmt::format("FID has {} samples, more than padded size {}", fid.samples.size(), n));
  }
  std::vector<std::complex<double>> data(n);
  std::copy(fid.samples.begin(), fid.samples.end(), data.begin());
  if (!data.empty()) data[0] *= fp.first_point_scale;
  forward_dft(data);

  Spectrum out;
  out.freq.resize(n);
  out.values.resize(n);
  const std::size_t shift = n / 2;
  const double df = 1.0 / (static_cast<double>(n) * fp.dt);
  for (std::size_t j = 0; j < n; ++j) {
    out.freq[j] = (static_cast<double>(j) - static_cast<double>(shift)) * df;
    out.values[j] = data[(j + n - shift) % n];
  }
  return out;
}

Spectrum calibration_spectrum(const FidParams& fp) {
  const SpectralAmplitudes uniform{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return spectrum(synthesize_fid(uniform, fp), fp);
}

SpectralAmplitudes extract_amplitudes(const Spectrum& spec, const FidParams& fp, const Spectrum& calibration) {
  fp.validate();
  if (calibration.empty()) throw DomainError("missing calibration spectrum");
  if (spec.empty()) throw DomainError("empty spectrum");
  if (calibration.values.size() != spec.values.size() || calibration.freq != spec.freq) {
    throw DomainError("calibration spectrum grid does not match the measured spectrum");
  }
  SpectralAmplitudes out;
  for (int m : {-1, 0, 1}) {
    const LineSample line = locate_line(calibration, fp.line_frequency(m));
    const double reference = parabola_at(calibration, line);
    if (!(reference > 0.0)) {
      throw DomainError(fmt::format("calibration has no positive line at {} MHz", fp.line_frequency(m)));
    }
    const double a = parabola_at(spec, line) / reference / 3.0;
    (m == -1 ? out.a_minus1 : m == 0 ? out.a_zero : out.a_plus1) = a;
  }
  return out;
}

}  // namespace spintrap
