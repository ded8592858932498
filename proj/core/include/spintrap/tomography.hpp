#pragma once

// Readout map from populations to ODMR line amplitudes, plus a synthetic
// Ramsey FID and its discrete Fourier spectrum for end-to-end recovery.

#include <complex>
#include <string>
#include <vector>

#include "spintrap/spin_model.hpp"

namespace spintrap {

/// Line amplitudes A_m = P|0,m> - P|-1,m>.
struct SpectralAmplitudes {
  double a_minus1 = 0.0;
  double a_plus1 = 0.0;
  double a_zero = 0.0;

  /// Amplitude of the line for nuclear projection m in {-1, 0, +1}.
  [[nodiscard]] double of(int mi) const;
};

/// Signal and transform settings. Line m sits at detuning + hyperfine_split * m.
struct FidParams {
  double detuning = 4.0;           // MHz
  double hyperfine_split = -2.16;  // MHz
  double t2star = 2.0;             // us
  double dt = 0.02;                // us
  int n_samples = 2048;
  int padded_size = 8192;
  /// Weight applied to the tau = 0 sample before the transform. 0.5 removes
  /// the constant baseline a sampled exponential otherwise leaves under
  /// every line.
  double first_point_scale = 0.5;

  void validate() const;
  [[nodiscard]] double line_frequency(int mi) const { return detuning + hyperfine_split * mi; }
};

struct Fid {
  std::vector<double> tau;  // us
  std::vector<std::complex<double>> samples;
};

/// Uniform frequency grid in ascending order (zero frequency at index N/2).
/// Forward transform without scaling: X_k = sum_n w_n x_n exp(-2 pi i f_k tau_n),
/// where w_0 = first_point_scale and w_n = 1 otherwise.
/// Parseval: sum_n |w_n x_n|^2 = mean_k |X_k|^2.
struct Spectrum {
  std::vector<double> freq;  // MHz
  std::vector<std::complex<double>> values;

  [[nodiscard]] bool empty() const noexcept { return values.empty(); }
  [[nodiscard]] double bin_width() const { return freq.size() > 1 ? freq[1] - freq[0] : 0.0; }
  static constexpr const char* kNormalization = "unnormalized forward DFT; sum|w x|^2 = mean|X|^2";
};

SpectralAmplitudes amplitudes(const PopulationVector& p);

/// s(tau_k) = sum_m a_m exp(2 pi i (detuning + split m) tau_k) exp(-tau_k / t2star).
Fid synthesize_fid(const SpectralAmplitudes& amps, const FidParams& fp);

/// Zero-padded discrete Fourier transform of the FID.
Spectrum spectrum(const Fid& fid, const FidParams& fp);

/// Spectrum of the equal-amplitude (1/3 each) reference state.
Spectrum calibration_spectrum(const FidParams& fp);

/// Recovers each line amplitude as (1/3) * peak(spec) / peak(calibration),
/// where peak() is the 3-point parabolic vertex of the absorption (real)
/// component around the line's nominal bin. The sign of the amplitude is
/// preserved. Throws DomainError if the calibration is missing or mismatched
/// and if a line falls off the grid.
SpectralAmplitudes extract_amplitudes(const Spectrum& spec, const FidParams& fp, const Spectrum& calibration);

}  // namespace spintrap
