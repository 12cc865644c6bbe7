#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace entrybar {

struct BisectionOptions {
  double x_tolerance = 1e-14;
  int max_iterations = 200;
};

/// Smallest x in [lo, hi] with f(x) >= target, for nondecreasing f.
///
/// Returns lo when f(lo) >= target and hi when f(hi) < target, so callers get
/// a clamped answer instead of an exception at the bracket ends. On plateaus
/// the leftmost crossing is returned.
double bisect_nondecreasing(const std::function<double(double)>& f,
                            double target, double lo, double hi,
                            const BisectionOptions& options = {});

struct QuadratureOptions {
  double abs_tolerance = 1e-8;
  std::size_t max_subdivisions = 10000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
};

/// Globally adaptive Simpson quadrature: repeatedly splits the panel with the
/// largest Richardson error estimate until the summed estimate drops below
/// abs_tolerance. Throws ConvergenceError when max_subdivisions is reached.
QuadratureResult integrate_adaptive_simpson(
    const std::function<double(double)>& f, double a, double b,
    const QuadratureOptions& options = {});

/// Convenience wrapper returning only the integral value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options = {});

/// SplitMix64 step; used to derive independent per-worker seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic uniform generator on [0, 1) (53-bit resolution).
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed);
  double next();
  std::uint64_t next_bits();

 private:
  std::uint64_t s_[4];
};

/// Worker cap used by the parallel helpers. 0 means hardware concurrency.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(i) for i in [0, count) across up to max_threads() workers.
/// Each index is executed exactly once; callers write results into
/// pre-sized, index-addressed storage so the outcome is independent of the
/// thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// count points evenly spaced on [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// count points log-spaced on [lo, hi], endpoints included.
std::vector<double> logspace(double lo, double hi, std::size_t count);

}  // namespace entrybar
