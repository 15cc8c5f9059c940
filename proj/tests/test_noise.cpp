#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numeric>

#include "ffq/noise.hpp"

using namespace ffq;

namespace {

NoiseSpec default_spec(double alpha, std::uint64_t seed = 42) {
  NoiseSpec s;
  s.alpha = alpha;
  s.seed = seed;
  return s;
}

double rms(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / v.size());
}

// Independent slope oracle: log-binned least squares on averaged Hann
// periodograms of freshly synthesized traces.
double fitted_psd_slope(const NoiseSpec& spec, int n_traces, int n_samples, double dt,
                        double f_lo, double f_hi) {
  std::vector<double> psd;
  std::vector<double> freq;
  for (int k = 0; k < n_traces; ++k) {
    NoiseStream stream(spec, {0, k});
    NoiseTrace trace;
    trace.dt_s = dt;
    trace.samples = stream.sample_series(0.0, dt, n_samples);
    auto pg = psd_estimate(trace, PsdWindow::Hann);
    if (psd.empty()) {
      psd.assign(pg.power.size(), 0.0);
      freq = pg.freq_Hz;
    }
    for (size_t j = 0; j < pg.power.size(); ++j) psd[j] += pg.power[j] / n_traces;
  }
  // log-spaced bins, fit mean log power vs log f
  const int n_bins = 24;
  std::vector<double> xs, ys;
  for (int b = 0; b < n_bins; ++b) {
    const double fa = f_lo * std::pow(f_hi / f_lo, static_cast<double>(b) / n_bins);
    const double fb = f_lo * std::pow(f_hi / f_lo, static_cast<double>(b + 1) / n_bins);
    double acc = 0.0;
    int count = 0;
    for (size_t j = 1; j < freq.size(); ++j) {
      if (freq[j] >= fa && freq[j] < fb && psd[j] > 0.0) {
        acc += psd[j];
        ++count;
      }
    }
    if (count == 0) continue;
    xs.push_back(std::log(std::sqrt(fa * fb)));
    ys.push_back(std::log(acc / count));
  }
  REQUIRE(xs.size() >= 10);
  const double n = static_cast<double>(xs.size());
  const double sx = std::accumulate(xs.begin(), xs.end(), 0.0);
  const double sy = std::accumulate(ys.begin(), ys.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("zero amplitude gives an exactly zero trace") {
  auto trace = synthesize(default_spec(0.0), 1e-6, 20e-12, {0, 0});
  for (double s : trace.samples) CHECK(s == 0.0);
}

TEST_CASE("sample RMS converges to alpha") {
  NoiseSpec spec = default_spec(50.0);
  NoiseStream stream(spec, {1, 7});
  // long trace: RMS needs many periods of the slowest (50 kHz) component
  auto samples = stream.sample_series(0.0, 2e-9, 2'000'000);  // 4 ms
  CHECK(rms(samples) == Catch::Approx(50.0).epsilon(0.05));
}

TEST_CASE("synthesis validates its grid") {
  CHECK_THROWS_AS(synthesize(default_spec(1.0), 1e-6, 1e-10, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(synthesize(default_spec(1.0), 0.0, 20e-12, {0, 0}), std::invalid_argument);
  NoiseSpec bad = default_spec(1.0);
  bad.n_components = 1;
  CHECK_THROWS_AS(synthesize(bad, 1e-6, 20e-12, {0, 0}), std::invalid_argument);
}

TEST_CASE("determinism: same seed and stream id give bit-identical traces") {
  NoiseSpec spec = default_spec(30.0, 1234);
  auto a = synthesize(spec, 1e-7, 22e-12, {2, 5});
  auto b = synthesize(spec, 1e-7, 22e-12, {2, 5});
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k] == b.samples[k]);
}

TEST_CASE("scaling: doubling alpha doubles every sample") {
  auto a = synthesize(default_spec(25.0, 99), 1e-7, 22e-12, {1, 3});
  auto b = synthesize(default_spec(50.0, 99), 1e-7, 22e-12, {1, 3});
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t k = 0; k < a.samples.size(); ++k)
    CHECK(b.samples[k] == Catch::Approx(2.0 * a.samples[k]).margin(1e-12));
}

TEST_CASE("different stream ids decorrelate") {
  NoiseSpec spec = default_spec(10.0, 7);
  NoiseStream s1(spec, {0, 0});
  NoiseStream s2(spec, {1, 0});
  NoiseStream s3(spec, {0, 1});
  const int n = 1 << 16;
  auto a = s1.sample_series(0.0, 1e-10, n);
  auto b = s2.sample_series(0.0, 1e-10, n);
  auto c = s3.sample_series(0.0, 1e-10, n);
  auto xcorr = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (int k = 0; k < n; ++k) {
      uv += u[static_cast<size_t>(k)] * v[static_cast<size_t>(k)];
      uu += u[static_cast<size_t>(k)] * u[static_cast<size_t>(k)];
      vv += v[static_cast<size_t>(k)] * v[static_cast<size_t>(k)];
    }
    return uv / std::sqrt(uu * vv);
  };
  CHECK(std::abs(xcorr(a, b)) < 0.1);
  CHECK(std::abs(xcorr(a, c)) < 0.1);
  CHECK(std::abs(xcorr(b, c)) < 0.1);
}

TEST_CASE("recurrence series matches direct evaluation") {
  NoiseSpec spec = default_spec(20.0, 31);
  spec.n_components = 200;
  NoiseStream stream(spec, {3, 11});
  auto series = stream.sample_series(1e-9, 13e-12, 20000);
  for (int k : {0, 1, 777, 8191, 8192, 8193, 19999})
    CHECK(series[static_cast<size_t>(k)] ==
          Catch::Approx(stream.at(1e-9 + k * 13e-12)).margin(1e-8 * 20.0));
}

TEST_CASE("periodogram of a pure sinusoid concentrates its power") {
  const double fs = 1e9;
  const int n = 1 << 14;
  const double f0 = 256.0 * fs / n;  // bin-centred
  const double a = 3.0;
  NoiseTrace trace;
  trace.dt_s = 1.0 / fs;
  trace.samples.resize(n);
  for (int k = 0; k < n; ++k)
    trace.samples[static_cast<size_t>(k)] = a * std::sin(2.0 * M_PI * f0 * k / fs + 0.4);
  auto pg = psd_estimate(trace);
  CHECK(pg.total_power() == Catch::Approx(a * a / 2.0).epsilon(0.02));
  size_t peak = 0;
  for (size_t j = 1; j < pg.power.size(); ++j)
    if (pg.power[j] > pg.power[peak]) peak = j;
  CHECK(pg.freq_Hz[peak] == Catch::Approx(f0).margin(pg.df_Hz / 2));
  CHECK(pg.power[peak] * pg.df_Hz == Catch::Approx(a * a / 2.0).epsilon(0.02));
}

TEST_CASE("periodogram of the zero trace is zero") {
  NoiseTrace trace;
  trace.dt_s = 1e-9;
  trace.samples.assign(1024, 0.0);
  auto pg = psd_estimate(trace);
  for (double p : pg.power) CHECK(p == 0.0);
}

TEST_CASE("periodogram rejects short traces") {
  NoiseTrace trace;
  trace.dt_s = 1e-9;
  trace.samples.assign(8, 1.0);
  CHECK_THROWS_AS(psd_estimate(trace), std::invalid_argument);
}

TEST_CASE("Parseval: integrated power equals mean square") {
  NoiseSpec spec = default_spec(12.0, 5);
  spec.n_components = 300;
  NoiseStream stream(spec, {0, 0});
  NoiseTrace trace;
  trace.dt_s = 22e-12;
  trace.samples = stream.sample_series(0.0, trace.dt_s, 1 << 16);
  double ms = 0.0;
  for (double s : trace.samples) ms += s * s;
  ms /= static_cast<double>(trace.samples.size());
  auto pg = psd_estimate(trace);
  CHECK(pg.total_power() == Catch::Approx(ms).epsilon(0.01));
}

TEST_CASE("synthesized spectrum has 1/f slope") {
  NoiseSpec spec = default_spec(40.0, 2024);
  spec.n_components = 200;
  const double slope =
      fitted_psd_slope(spec, 24, 1 << 17, 22e-12, 2 * spec.f_min_Hz, spec.f_max_Hz / 2);
  CHECK(slope == Catch::Approx(-1.0).margin(0.1));
}

TEST_CASE("band limiting: negligible power outside the band") {
  NoiseSpec spec = default_spec(15.0, 77);
  spec.f_min_Hz = 1e6;
  spec.f_max_Hz = 1e9;
  spec.n_components = 300;
  NoiseStream stream(spec, {0, 0});
  NoiseTrace trace;
  trace.dt_s = 1.0 / 4e9;
  trace.samples = stream.sample_series(0.0, trace.dt_s, 1 << 18);
  auto pg = psd_estimate(trace, PsdWindow::Hann);
  double in_band = 0.0, out_band = 0.0;
  for (size_t j = 1; j < pg.freq_Hz.size(); ++j) {
    if (pg.freq_Hz[j] < spec.f_min_Hz || pg.freq_Hz[j] > spec.f_max_Hz)
      out_band += pg.power[j];
    else
      in_band += pg.power[j];
  }
  CHECK(out_band < 0.01 * (in_band + out_band));
}

TEST_CASE("alpha semantics knob") {
  NoiseSpec spec = default_spec(10.0, 3);
  spec.semantics = AlphaSemantics::Peak;
  NoiseStream stream(spec, {0, 0});
  auto samples = stream.sample_series(0.0, 1e-9, 200000);
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  CHECK(peak <= 10.0 + 1e-9);

  spec.semantics = AlphaSemantics::Psd1Hz;
  NoiseStream s2(spec, {0, 0});
  auto v = s2.sample_series(0.0, 2e-9, 1'000'000);
  const double expected_rms = 10.0 * std::sqrt(std::log(spec.f_max_Hz / spec.f_min_Hz));
  CHECK(rms(v) == Catch::Approx(expected_rms).epsilon(0.08));
}
