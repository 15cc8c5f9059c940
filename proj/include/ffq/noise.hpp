#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ffq/constants.hpp"

namespace ffq {

// How the amplitude parameter of the 1/f process is interpreted. The band
// power is normalized so that:
//   rms          - RMS of the band-limited process equals alpha
//   psd_1hz      - one-sided PSD is alpha^2 / f over the band
//   peak         - worst-case peak (sum of component amplitudes) equals alpha
enum class AlphaSemantics { Rms, Psd1Hz, Peak };

inline AlphaSemantics alpha_semantics_from_string(const std::string& s) {
  if (s == "rms") return AlphaSemantics::Rms;
  if (s == "psd_1hz") return AlphaSemantics::Psd1Hz;
  if (s == "peak") return AlphaSemantics::Peak;
  throw std::invalid_argument("unknown alpha_semantics: " + s);
}

inline std::string to_string(AlphaSemantics s) {
  switch (s) {
    case AlphaSemantics::Rms: return "rms";
    case AlphaSemantics::Psd1Hz: return "psd_1hz";
    case AlphaSemantics::Peak: return "peak";
  }
  return "?";
}

struct NoiseSpec {
  double alpha = 0.0;        // V/m, see semantics
  double f_min_Hz = 50e3;
  double f_max_Hz = 22e9;
  int n_components = 1000;
  std::uint64_t seed = 0;
  AlphaSemantics semantics = AlphaSemantics::Rms;

  void validate() const {
    if (alpha < 0.0) throw std::invalid_argument("noise: alpha must be >= 0");
    if (!(0.0 < f_min_Hz && f_min_Hz < f_max_Hz))
      throw std::invalid_argument("noise: need 0 < f_min < f_max");
    if (n_components < 2) throw std::invalid_argument("noise: n_components must be >= 2");
  }
};

struct StreamId {
  int qubit = 0;
  int instance = 0;
};

struct NoiseTrace {
  double dt_s = 0.0;
  std::vector<double> samples;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based: the phase of component k depends only on
// (seed, qubit, instance, k), never on execution order.
inline double component_phase(std::uint64_t seed, const StreamId& id, int k) {
  std::uint64_t h = splitmix64(seed ^ 0x8AE3779B97F4A7C1ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(id.qubit)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(id.instance)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(k)));
  return constants::two_pi * static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

// One realization of the charge-noise process: a sum of n_components
// sinusoids at log-spaced frequencies with equal per-line variance, which
// gives S(f) proportional to 1/f across the band. Defined at arbitrary t, so
// the integrator grid never constrains the noise sampling.
class NoiseStream {
 public:
  NoiseStream() = default;

  NoiseStream(const NoiseSpec& spec, StreamId id) : spec_(spec) {
    spec.validate();
    const int n = spec.n_components;
    freq_.resize(n);
    phase_.resize(n);
    const double log_span = std::log(spec.f_max_Hz / spec.f_min_Hz);
    const double dlog = log_span / n;
    double amp = 0.0;
    switch (spec.semantics) {
      case AlphaSemantics::Rms: amp = spec.alpha * std::sqrt(2.0 / n); break;
      case AlphaSemantics::Psd1Hz: amp = spec.alpha * std::sqrt(2.0 * dlog); break;
      case AlphaSemantics::Peak: amp = spec.alpha / n; break;
    }
    amp_ = amp;
    for (int k = 0; k < n; ++k) {
      freq_[k] = spec.f_min_Hz * std::exp((k + 0.5) * dlog);
      phase_[k] = detail::component_phase(spec.seed, id, k);
    }
  }

  const NoiseSpec& spec() const { return spec_; }

  // Direct evaluation at one instant.
  double at(double t) const {
    if (amp_ == 0.0) return 0.0;
    double acc = 0.0;
    for (size_t k = 0; k < freq_.size(); ++k)
      acc += std::sin(constants::two_pi * freq_[k] * t + phase_[k]);
    return amp_ * acc;
  }

  // Values at t0 + j*dt for j in [0, n). Uses the exact three-term sinusoid
  // recurrence with periodic resync against direct evaluation, so long
  // uniform series cost O(n_components) per point without drift.
  std::vector<double> sample_series(double t0, double dt, int n) const {
    std::vector<double> out(static_cast<size_t>(n), 0.0);
    if (amp_ == 0.0 || n == 0) return out;
    const size_t m = freq_.size();
    std::vector<double> c2(m), u_prev(m), u_curr(m);
    constexpr int kResync = 8192;
    for (int base = 0; base < n; base += kResync) {
      const int chunk = std::min(kResync, n - base);
      const double tb = t0 + static_cast<double>(base) * dt;
      for (size_t k = 0; k < m; ++k) {
        const double w = constants::two_pi * freq_[k];
        c2[k] = 2.0 * std::cos(w * dt);
        u_prev[k] = std::sin(w * (tb - dt) + phase_[k]);
        u_curr[k] = std::sin(w * tb + phase_[k]);
      }
      for (int j = 0; j < chunk; ++j) {
        double acc = 0.0;
        for (size_t k = 0; k < m; ++k) {
          acc += u_curr[k];
          const double next = c2[k] * u_curr[k] - u_prev[k];
          u_prev[k] = u_curr[k];
          u_curr[k] = next;
        }
        out[static_cast<size_t>(base + j)] = amp_ * acc;
      }
    }
    return out;
  }

 private:
  NoiseSpec spec_{};
  std::vector<double> freq_;
  std::vector<double> phase_;
  double amp_ = 0.0;
};

inline NoiseTrace synthesize(const NoiseSpec& spec, double duration_s, double dt_s,
                             StreamId stream_id) {
  spec.validate();
  if (!(dt_s > 0.0) || dt_s > 1.0 / (2.0 * spec.f_max_Hz))
    throw std::invalid_argument("synthesize: dt violates dt <= 1/(2 f_max)");
  if (duration_s < dt_s) throw std::invalid_argument("synthesize: duration shorter than dt");
  NoiseStream stream(spec, stream_id);
  const int n = static_cast<int>(std::floor(duration_s / dt_s + 0.5)) + 1;
  NoiseTrace trace;
  trace.dt_s = dt_s;
  trace.samples = stream.sample_series(0.0, dt_s, std::max(n, 2));
  return trace;
}

struct Periodogram {
  std::vector<double> freq_Hz;
  std::vector<double> power;  // one-sided density, units^2 per Hz
  double df_Hz = 0.0;

  double total_power() const {
    double acc = 0.0;
    for (double p : power) acc += p;
    return acc * df_Hz;
  }
};

enum class PsdWindow { Rectangular, Hann };

// One-sided periodogram. The rectangular window keeps the discrete Parseval
// identity exact (integrated power == mean square of the samples); Hann is
// available where sidelobe leakage matters more than exact power bookkeeping.
inline Periodogram psd_estimate(const NoiseTrace& trace,
                                PsdWindow window = PsdWindow::Rectangular) {
  const size_t n = trace.samples.size();
  if (n < 16) throw std::invalid_argument("psd_estimate: trace too short (need >= 16 samples)");
  const double fs = 1.0 / trace.dt_s;
  std::vector<double> w(n, 1.0);
  if (window == PsdWindow::Hann)
    for (size_t i = 0; i < n; ++i)
      w[i] = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(i) /
                                  static_cast<double>(n));
  double wsum2 = 0.0;
  std::vector<std::complex<double>> in(n);
  for (size_t i = 0; i < n; ++i) {
    in[i] = trace.samples[i] * w[i];
    wsum2 += w[i] * w[i];
  }
  std::vector<std::complex<double>> out(n);
  Eigen::FFT<double> fft;
  fft.fwd(out, in);

  Periodogram pg;
  pg.df_Hz = fs / static_cast<double>(n);
  const size_t half = n / 2;
  pg.freq_Hz.resize(half + 1);
  pg.power.resize(half + 1);
  const double norm = 1.0 / (fs * wsum2);
  for (size_t j = 0; j <= half; ++j) {
    pg.freq_Hz[j] = static_cast<double>(j) * pg.df_Hz;
    double p = std::norm(out[j]) * norm;
    if (j != 0 && !(n % 2 == 0 && j == half)) p *= 2.0;  // fold negative freqs
    pg.power[j] = p;
  }
  return pg;
}

}  // namespace ffq
