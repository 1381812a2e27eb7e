#pragma once

#include <complex>
#include <span>
#include <vector>

#include "towermpc/tower.hpp"

namespace towermpc {

// ---- frequency responses -------------------------------------------------

struct FrequencyResponse {
  std::vector<double> omega;         // [rad/s], strictly increasing
  std::vector<double> magnitude;     // linear
  std::vector<double> magnitude_db;  // 20 log10
  std::vector<double> phase;         // [rad]
};

/// n log-spaced points on [lo, hi] (inclusive).
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// C (jωI − A)⁻¹ B for one frequency. Throws SingularityError for a pole on the axis.
std::complex<double> frequency_response(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                        const Eigen::RowVectorXd& C, double omega);

/// Displacement channel of the nominal tower.
FrequencyResponse bode_nominal(const TowerParams& p, std::span<const double> omega);

/// Amplitude channel of the demodulated tower at a fixed rotor speed: the Euclidean
/// norm of the q3 and q4 responses. Phase is that of q3.
FrequencyResponse bode_demod_amplitude(const TowerParams& p, double omega_r,
                                       std::span<const double> omega);

/// Indices of strict interior local maxima of a magnitude curve.
std::vector<std::size_t> local_maxima(std::span<const double> values);

struct SweepResult {
  std::vector<double> t;        // [s]
  std::vector<double> omega_r;  // excitation frequency [rad/s]
  std::vector<double> x;        // nominal displacement
  std::vector<double> a_y;      // demodulated amplitude
  std::vector<double> peak_t;   // per-cycle peaks of x
  std::vector<double> peak_x;
  std::vector<double> peak_a_y;  // a_y at the peak instants
  std::vector<double> peak_omega;
};

/// Drives the nominal tower with cos(∫ω dt), ω = rate·t, and the demodulated tower
/// scheduled on ω, both from rest, with RK4 at step ts.
SweepResult frequency_sweep(const TowerParams& p, double rate = 1e-3, double duration = 1200.0,
                            double ts = 0.01);

namespace reference {

FrequencyResponse bode_nominal(const TowerParams& p, std::span<const double> omega);
FrequencyResponse bode_demod_amplitude(const TowerParams& p, double omega_r,
                                       std::span<const double> omega);

}  // namespace reference

// ---- spectra ---------------------------------------------------------------

struct Spectrum {
  std::vector<double> freq;  // [Hz]
  std::vector<double> psd;   // one-sided density [unit²/Hz]
};

/// Welch estimate: Hann window, 50% overlap, mean removed per segment.
/// Throws ArgumentError when the signal is shorter than one segment.
Spectrum power_spectrum(std::span<const double> signal, double ts, std::size_t segment = 2048);

/// Maximum density within ±bins of the bin nearest to f0, in dB.
double spectrum_peak_db(const Spectrum& s, double f0, std::size_t bins = 2);

/// Every factor-th sample, starting at the first.
std::vector<double> decimate(std::span<const double> signal, std::size_t factor);

// ---- fatigue ---------------------------------------------------------------

struct Cycle {
  double range = 0.0;
  double mean = 0.0;
  double count = 1.0;  // 0.5 or 1
};

using CycleSet = std::vector<Cycle>;

/// Local extrema with plateaus collapsed; endpoints kept.
std::vector<double> turning_points(std::span<const double> signal);

/// Four-point rainflow count; the residue contributes half cycles.
CycleSet rainflow(std::span<const double> signal);

struct DelResult {
  double value = 0.0;
  double woehler_m = 4.0;
  double n_eq = 0.0;  // equivalent cycles (1 Hz)
};

/// (Σ nᵢ rᵢᵐ / N_eq)^(1/m) with N_eq = T · 1 Hz.
DelResult damage_equivalent_load(const CycleSet& cycles, double woehler_m, double duration);

// ---- metrics ---------------------------------------------------------------

/// Trapezoidal integral of a power series [W] sampled at ts, in kWh.
double energy_produced(std::span<const double> power, double ts);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;  // edges.size() − 1 bins; the last bin is closed
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t total() const;
  std::size_t bin_of(double v) const;  // bin index containing v; throws RangeError outside
};

Histogram histogram(std::span<const double> signal, std::span<const double> edges);
std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

/// Time with |signal − center| ≤ half_width.
double time_in_band(std::span<const double> signal, double center, double half_width, double ts);

/// Durations of complete traversals of [lo, hi], from the last exit through one edge
/// to the first arrival at the other.
std::vector<double> crossing_durations(std::span<const double> signal, double lo, double hi,
                                       double ts);

double rms(std::span<const double> v);

constexpr double rpm_to_rad(double rpm) { return rpm * 0.10471975511965977; }
constexpr double rad_to_rpm(double w) { return w / 0.10471975511965977; }

}  // namespace towermpc
