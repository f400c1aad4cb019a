#include "sojourn/field_sampler.hpp"

#include "sojourn/errors.hpp"
#include "sojourn/philox.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace sojourn {
namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

fftw_plan make_plan(int d, std::size_t m, std::vector<std::complex<double>>& buffer) {
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  std::lock_guard lock(fftw_planner_mutex());
  const int mi = static_cast<int>(m);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = d == 1 ? fftw_plan_dft_1d(mi, data, data, FFTW_FORWARD, flags)
                          : fftw_plan_dft_2d(mi, mi, data, data, FFTW_FORWARD, flags);
  if (plan == nullptr) throw Error("FFTW could not create a plan");
  return plan;
}

void destroy_plan(fftw_plan plan) {
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t torus_distance(std::size_t j, std::size_t m) { return std::min(j, m - j); }

std::size_t power(std::size_t base, int d) { return d == 1 ? base : base * base; }

}  // namespace

GridSpec GridSpec::make(int d, double T, double h, std::size_t max_points) {
  if (d != 1 && d != 2) throw DomainError("GridSpec: d must be 1 or 2");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("GridSpec: T must be > 0");
  if (!(h > 0.0) || h > T) throw DomainError("GridSpec: need 0 < h <= T");
  GridSpec g;
  g.d = d;
  g.T = T;
  g.h = h;
  const double n = std::round(T / h) + 1.0;
  if (n < 2.0) throw DomainError("GridSpec: fewer than 2 points per axis");
  if (std::pow(n, d) > static_cast<double>(max_points)) {
    throw DomainError("GridSpec: " + std::to_string(std::pow(n, d)) + " points exceed the cap of " +
                      std::to_string(max_points));
  }
  g.n = static_cast<std::size_t>(n);
  return g;
}

std::size_t GridSpec::total_points() const { return power(n, d); }

CirculantSpectrum circulant_spectrum(const CovarianceModel& model, const GridSpec& grid,
                                     double tol_psd) {
  model.validate();
  if (grid.d != model.d) throw GridMismatchError("circulant_spectrum: grid and model dimensions differ");
  constexpr int kMaxDoublings = 3;
  double worst = 0.0;
  for (int k = 0; k <= kMaxDoublings; ++k) {
    const std::size_t m = 2 * (grid.n - 1) << k;
    const std::size_t total = power(m, grid.d);
    if (total > kDefaultMaxGridPoints * 4) {
      throw DomainError("circulant_spectrum: embedding of " + std::to_string(total) + " points is too large");
    }
    std::vector<std::complex<double>> buffer(total);
    if (grid.d == 1) {
      for (std::size_t j = 0; j < m; ++j) {
        buffer[j] = rho_radial(model, grid.h * static_cast<double>(torus_distance(j, m)));
      }
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        const double a = grid.h * static_cast<double>(torus_distance(i, m));
        for (std::size_t j = 0; j < m; ++j) {
          const double b = grid.h * static_cast<double>(torus_distance(j, m));
          buffer[i * m + j] = rho_radial(model, std::hypot(a, b));
        }
      }
    }
    fftw_plan plan = make_plan(grid.d, m, buffer);
    fftw_execute(plan);
    destroy_plan(plan);

    CirculantSpectrum s;
    s.d = grid.d;
    s.m = m;
    s.padding_doublings = k;
    s.eigenvalues.resize(total);
    for (std::size_t j = 0; j < total; ++j) s.eigenvalues[j] = buffer[j].real();
    const auto [lo, hi] = std::minmax_element(s.eigenvalues.begin(), s.eigenvalues.end());
    s.min_eig = *lo;
    s.max_eig = *hi;
    worst = s.min_eig / s.max_eig;
    if (s.min_eig >= -tol_psd * s.max_eig) {
      for (double& v : s.eigenvalues) {
        if (v < 0.0) {
          v = 0.0;
          ++s.clamped_count;
        }
      }
      return s;
    }
  }
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.3g", worst);
  throw NotPsdError(std::string("circulant_spectrum: relative min eigenvalue ") + ratio +
                    " after " + std::to_string(kMaxDoublings) + " padding doublings for " +
                    model.describe());
}

FieldSampler::FieldSampler(const CovarianceModel& model, const GridSpec& grid, double tol_psd)
    : model_(model), grid_(grid), spectrum_(circulant_spectrum(model, grid, tol_psd)) {
  const double total = static_cast<double>(spectrum_.eigenvalues.size());
  amplitude_.resize(spectrum_.eigenvalues.size());
  for (std::size_t j = 0; j < amplitude_.size(); ++j) {
    amplitude_[j] = std::sqrt(spectrum_.eigenvalues[j] / total);
  }
  std::vector<std::complex<double>> scratch(amplitude_.size());
  plan_ = make_plan(grid_.d, spectrum_.m, scratch);
}

FieldSampler::~FieldSampler() {
  if (plan_ != nullptr) destroy_plan(static_cast<fftw_plan>(plan_));
}

void FieldSampler::transform(std::vector<std::complex<double>>& buffer) const {
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_), data, data);
}

void FieldSampler::sample_into(std::uint64_t master_seed, std::uint64_t replicate,
                               std::span<double> out) const {
  if (out.size() != grid_.total_points()) throw GridMismatchError("sample_into: output size mismatch");
  std::vector<std::complex<double>> buffer(amplitude_.size());
  for (std::size_t j = 0; j < buffer.size(); ++j) {
    const auto z = normal_pair(master_seed, replicate, j);
    buffer[j] = {amplitude_[j] * z[0], amplitude_[j] * z[1]};
  }
  transform(buffer);
  const std::size_t m = spectrum_.m;
  const std::size_t n = grid_.n;
  if (grid_.d == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = buffer[i].real();
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] = buffer[i * m + j].real();
    }
  }
}

FieldSample FieldSampler::sample(std::uint64_t master_seed, std::uint64_t replicate) const {
  FieldSample s;
  s.grid = grid_;
  s.seed = master_seed;
  s.replicate_index = replicate;
  s.values.resize(grid_.total_points());
  sample_into(master_seed, replicate, s.values);
  return s;
}

std::vector<double> FieldSampler::implied_covariance(std::size_t max_points) const {
  const std::size_t p = grid_.total_points();
  if (p > max_points) throw DomainError("implied_covariance: grid too large for a dense matrix");
  const std::size_t m = spectrum_.m;
  const std::size_t n = grid_.n;
  auto grid_index = [&](std::size_t q) { return grid_.d == 1 ? q : (q / n) * m + q % n; };
  std::vector<double> cov(p * p, 0.0);
  std::vector<std::complex<double>> buffer(amplitude_.size());
  std::vector<double> column(p);
  for (std::size_t k = 0; k < amplitude_.size(); ++k) {
    for (const std::complex<double> unit : {std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0)}) {
      std::fill(buffer.begin(), buffer.end(), std::complex<double>(0.0, 0.0));
      buffer[k] = amplitude_[k] * unit;
      transform(buffer);
      for (std::size_t q = 0; q < p; ++q) column[q] = buffer[grid_index(q)].real();
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) cov[a * p + b] += column[a] * column[b];
      }
    }
  }
  return cov;
}

std::shared_ptr<const FieldSampler> cached_sampler(const CovarianceModel& model, const GridSpec& grid) {
  using Key = std::tuple<int, double, double, double, int, int, double, double, std::size_t>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const FieldSampler>> cache;
  const Key key{static_cast<int>(model.kind), model.alpha, model.beta, model.scale, model.d,
                grid.d, grid.T, grid.h, grid.n};
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<const FieldSampler>(model, grid)).first;
  return it->second;
}

FieldSample sample_field(const CovarianceModel& model, const GridSpec& grid,
                         std::uint64_t master_seed, std::uint64_t replicate) {
  return cached_sampler(model, grid)->sample(master_seed, replicate);
}

CovarianceEstimate empirical_covariance(std::span<const FieldSample> samples,
                                        std::span<const int> lag) {
  if (samples.size() < 2) throw DomainError("empirical_covariance: need at least 2 samples");
  const GridSpec& grid = samples.front().grid;
  for (const auto& s : samples) {
    if (!(s.grid == grid)) throw GridMismatchError("empirical_covariance: samples are on different grids");
  }
  if (static_cast<int>(lag.size()) != grid.d) throw DomainError("empirical_covariance: lag dimension mismatch");
  std::array<long, 2> l{0, 0};
  for (int i = 0; i < grid.d; ++i) {
    l[static_cast<std::size_t>(i)] = lag[static_cast<std::size_t>(i)];
    if (static_cast<std::size_t>(std::labs(lag[static_cast<std::size_t>(i)])) >= grid.n) {
      throw DomainError("empirical_covariance: lag reaches beyond the grid");
    }
  }
  // (a, b) and (-a, -b) pair the same points; keep the first nonzero component positive.
  if (l[0] < 0 || (l[0] == 0 && l[1] < 0)) l = {-l[0], -l[1]};

  const long n = static_cast<long>(grid.n);
  std::vector<double> per_replicate;
  per_replicate.reserve(samples.size());
  for (const auto& s : samples) {
    double sum = 0.0;
    long count = 0;
    if (grid.d == 1) {
      for (long i = 0; i + l[0] < n; ++i) {
        sum += s.values[static_cast<std::size_t>(i)] * s.values[static_cast<std::size_t>(i + l[0])];
        ++count;
      }
    } else {
      for (long i = 0; i + l[0] < n; ++i) {
        for (long j = std::max(0L, -l[1]); j < n && j + l[1] < n; ++j) {
          sum += s.values[static_cast<std::size_t>(i * n + j)] *
                 s.values[static_cast<std::size_t>((i + l[0]) * n + j + l[1])];
          ++count;
        }
      }
    }
    per_replicate.push_back(sum / static_cast<double>(count));
  }
  const double r = static_cast<double>(per_replicate.size());
  double mean = 0.0;
  for (const double v : per_replicate) mean += v;
  mean /= r;
  double ss = 0.0;
  for (const double v : per_replicate) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (r - 1.0) / r)};
}

}  // namespace sojourn
