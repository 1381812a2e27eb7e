#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "towermpc/analysis.hpp"

namespace towermpc {

Spectrum power_spectrum(std::span<const double> signal, double ts, std::size_t segment) {
  if (!(ts > 0.0)) throw ArgumentError("sample time must be positive");
  if (segment < 2) throw ArgumentError("segment must hold at least two samples");
  if (signal.size() < segment) throw ArgumentError("signal shorter than one segment");

  const double fs = 1.0 / ts;
  std::vector<double> window(segment);
  for (std::size_t i = 0; i < segment; ++i)  // periodic Hann
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(segment));
  double wss = 0.0;
  for (double w : window) wss += w * w;

  const std::size_t step = segment / 2;
  const std::size_t nseg = (signal.size() - segment) / step + 1;
  const std::size_t nfreq = segment / 2 + 1;

  Spectrum out;
  out.freq.resize(nfreq);
  out.psd.assign(nfreq, 0.0);
  for (std::size_t k = 0; k < nfreq; ++k) out.freq[k] = fs * double(k) / double(segment);

  Eigen::FFT<double> fft;
  std::vector<double> buf(segment);
  std::vector<std::complex<double>> spec;
  for (std::size_t s = 0; s < nseg; ++s) {
    const auto seg = signal.subspan(s * step, segment);
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= double(segment);
    for (std::size_t i = 0; i < segment; ++i) buf[i] = (seg[i] - mean) * window[i];
    fft.fwd(spec, buf);
    for (std::size_t k = 0; k < nfreq; ++k) out.psd[k] += std::norm(spec[k]);
  }
  const double scale = 1.0 / (fs * wss * double(nseg));
  for (std::size_t k = 0; k < nfreq; ++k) {
    out.psd[k] *= scale;
    const bool edge = k == 0 || (segment % 2 == 0 && k == nfreq - 1);
    if (!edge) out.psd[k] *= 2.0;
  }
  return out;
}

double spectrum_peak_db(const Spectrum& s, double f0, std::size_t bins) {
  if (s.freq.size() < 2) throw ArgumentError("spectrum is empty");
  const double df = s.freq[1] - s.freq[0];
  const auto centre = static_cast<std::ptrdiff_t>(std::llround(f0 / df));
  const auto last = static_cast<std::ptrdiff_t>(s.freq.size()) - 1;
  const auto lo = std::clamp<std::ptrdiff_t>(centre - std::ptrdiff_t(bins), 0, last);
  const auto hi = std::clamp<std::ptrdiff_t>(centre + std::ptrdiff_t(bins), 0, last);
  double peak = 0.0;
  for (auto k = lo; k <= hi; ++k) peak = std::max(peak, s.psd[std::size_t(k)]);
  return 10.0 * std::log10(peak);
}

std::vector<double> decimate(std::span<const double> signal, std::size_t factor) {
  if (factor == 0) throw ArgumentError("decimation factor must be positive");
  std::vector<double> out;
  out.reserve(signal.size() / factor + 1);
  for (std::size_t i = 0; i < signal.size(); i += factor) out.push_back(signal[i]);
  return out;
}

}  // namespace towermpc
