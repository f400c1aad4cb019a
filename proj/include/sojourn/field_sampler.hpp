#pragma once

#include "sojourn/covariance_models.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sojourn {

inline constexpr std::size_t kDefaultMaxGridPoints = std::size_t{1} << 26;

/// Regular grid on [0,T]^d with n = round(T/h) + 1 points per axis.
struct GridSpec {
  int d = 1;
  double T = 1.0;
  double h = 0.1;
  std::size_t n = 11;

  /// Throws DomainError on h > T, n < 2, or n^d above max_points.
  static GridSpec make(int d, double T, double h, std::size_t max_points = kDefaultMaxGridPoints);

  std::size_t total_points() const;
  /// Edge length actually covered, h·(n - 1).
  double T_grid() const { return h * static_cast<double>(n - 1); }

  bool operator==(const GridSpec&) const = default;
};

struct CirculantSpectrum {
  int d = 1;
  std::size_t m = 0;  // embedding size per axis
  std::vector<double> eigenvalues;  // row-major, m^d entries
  double min_eig = 0.0;
  double max_eig = 0.0;
  int padding_doublings = 0;
  std::size_t clamped_count = 0;  // round-off negatives set to zero
};

/// Eigenvalues of the (block-)circulant embedding on the torus of size
/// m = 2(n-1)·2^k per axis, k = 0..3 tried in turn. Negatives inside
/// [-tol_psd·max_eig, 0) are round-off and set to zero; anything below
/// survives all paddings only as a NotPsdError.
CirculantSpectrum circulant_spectrum(const CovarianceModel& model, const GridSpec& grid,
                                     double tol_psd = 1e-10);

struct FieldSample {
  GridSpec grid;
  std::vector<double> values;  // row-major, axis 0 slowest
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
};

/// Exact sampler for one (model, grid). Construction computes the spectrum and
/// an FFTW plan; sampling is const and safe to call from several threads.
class FieldSampler {
 public:
  FieldSampler(const CovarianceModel& model, const GridSpec& grid, double tol_psd = 1e-10);
  ~FieldSampler();
  FieldSampler(const FieldSampler&) = delete;
  FieldSampler& operator=(const FieldSampler&) = delete;

  const CovarianceModel& model() const { return model_; }
  const GridSpec& grid() const { return grid_; }
  const CirculantSpectrum& spectrum() const { return spectrum_; }

  /// out.size() must equal grid().total_points().
  void sample_into(std::uint64_t master_seed, std::uint64_t replicate, std::span<double> out) const;
  FieldSample sample(std::uint64_t master_seed, std::uint64_t replicate) const;

  /// The field is Re(F·√(λ/M)·(Z1 + iZ2)) for independent standard normal
  /// vectors Z1, Z2. Returns the dense covariance A Aᵀ + B Bᵀ of that linear
  /// map restricted to the grid; only for grids with at most max_points points.
  std::vector<double> implied_covariance(std::size_t max_points = 4096) const;

 private:
  void transform(std::vector<std::complex<double>>& buffer) const;

  CovarianceModel model_;
  GridSpec grid_;
  CirculantSpectrum spectrum_;
  std::vector<double> amplitude_;  // √(λ/M)
  void* plan_ = nullptr;
};

/// Uses a process-wide cache of samplers keyed by (model, grid).
FieldSample sample_field(const CovarianceModel& model, const GridSpec& grid,
                         std::uint64_t master_seed, std::uint64_t replicate);

std::shared_ptr<const FieldSampler> cached_sampler(const CovarianceModel& model, const GridSpec& grid);

struct CovarianceEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Cross-replicate mean of the spatial average of X(t)X(t+lag), lag in grid
/// steps (lag.size() == d). The lag is canonicalized so lag and -lag use the
/// same pairs in the same order.
CovarianceEstimate empirical_covariance(std::span<const FieldSample> samples,
                                        std::span<const int> lag);

}  // namespace sojourn
