#include "entrybar/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <queue>
#include <string>
#include <thread>

#include "entrybar/error.hpp"

namespace entrybar {

double bisect_nondecreasing(const std::function<double(double)>& f,
                            double target, double lo, double hi,
                            const BisectionOptions& options) {
  if (!(lo <= hi)) {
    throw PreconditionError("bisection bracket is empty");
  }
  if (f(lo) >= target) return lo;
  if (f(hi) < target) return hi;
  // Invariant: f(lo) < target <= f(hi).
  for (int it = 0; it < options.max_iterations; ++it) {
    if (hi - lo <= options.x_tolerance) break;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

namespace {

struct Panel {
  double a, b;
  double fa, fm, fb;
  double whole;  // Simpson estimate on [a, b]
  double refined;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel make_panel(const std::function<double(double)>& f, double a, double b,
                 double fa, double fm, double fb) {
  Panel p{a, b, fa, fm, fb, 0.0, 0.0, 0.0};
  const double h = b - a;
  const double m = 0.5 * (a + b);
  p.whole = h / 6.0 * (fa + 4.0 * fm + fb);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  p.refined = left + right + (left + right - p.whole) / 15.0;
  p.error = std::abs(left + right - p.whole) / 15.0;
  return p;
}

}  // namespace

QuadratureResult integrate_adaptive_simpson(
    const std::function<double(double)>& f, double a, double b,
    const QuadratureOptions& options) {
  QuadratureResult result;
  if (a == b) return result;
  if (a > b) {
    auto r = integrate_adaptive_simpson(f, b, a, options);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<Panel> panels;
  double total_error = 0.0;
  double total_value = 0.0;
  // Seed with a handful of panels so that narrow features near the ends are
  // not hidden by a lucky coarse estimate.
  constexpr int kInitialPanels = 8;
  std::vector<double> xs(kInitialPanels + 1);
  std::vector<double> fx(kInitialPanels + 1);
  for (int i = 0; i <= kInitialPanels; ++i) {
    xs[i] = a + (b - a) * i / kInitialPanels;
    fx[i] = f(xs[i]);
  }
  for (int i = 0; i < kInitialPanels; ++i) {
    const double m = 0.5 * (xs[i] + xs[i + 1]);
    Panel p = make_panel(f, xs[i], xs[i + 1], fx[i], f(m), fx[i + 1]);
    total_error += p.error;
    total_value += p.refined;
    panels.push(p);
  }
  std::size_t subdivisions = kInitialPanels;
  while (total_error > options.abs_tolerance) {
    if (subdivisions >= options.max_subdivisions) {
      throw ConvergenceError("adaptive Simpson reached " +
                             std::to_string(options.max_subdivisions) +
                             " subdivisions with error estimate " +
                             std::to_string(total_error));
    }
    Panel worst = panels.top();
    panels.pop();
    total_error -= worst.error;
    total_value -= worst.refined;
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      // Panel width at machine resolution; keep its estimate.
      total_value += worst.refined;
      worst.error = 0.0;
      panels.push(worst);
      continue;
    }
    const double flm = f(0.5 * (worst.a + m));
    const double frm = f(0.5 * (m + worst.b));
    Panel left = make_panel(f, worst.a, m, worst.fa, flm, worst.fm);
    Panel right = make_panel(f, m, worst.b, worst.fm, frm, worst.fb);
    total_error += left.error + right.error;
    total_value += left.refined + right.refined;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }
  // Re-sum from scratch to shed the add/subtract drift of the running total.
  double value = 0.0;
  double error = 0.0;
  while (!panels.empty()) {
    value += panels.top().refined;
    error += panels.top().error;
    panels.pop();
  }
  (void)total_value;
  result.value = value;
  result.error_estimate = error;
  result.subdivisions = subdivisions;
  return result;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options) {
  return integrate_adaptive_simpson(f, a, b, options).value;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

UniformSource::UniformSource(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t UniformSource::next_bits() {
  // xoshiro256**
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double UniformSource::next() {
  return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned threads) { g_max_threads = threads; }

unsigned max_threads() {
  const unsigned cap = g_max_threads.load();
  if (cap != 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(max_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) /
                      static_cast<double>(count - 1);
  }
  if (count > 1) out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > 0.0)) {
    throw PreconditionError("logspace requires positive endpoints");
  }
  auto exps = linspace(std::log10(lo), std::log10(hi), count);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::pow(10.0, exps[i]);
  if (count > 0) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

}  // namespace entrybar
