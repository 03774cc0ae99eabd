#include "flock/meanfield.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "flock/assignment.hpp"
#include "flock/errors.hpp"

namespace flock {

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Inverse standard normal CDF: Acklam's rational approximation plus one
// Halley step through erfc, which lands within a few ulps.
double probit(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (std::abs(x) < 37.0) {
    double err = norm_cdf(x) - p;
    double step = err * std::sqrt(2.0 * std::numbers::pi) *
                  std::exp(0.5 * x * x);
    x -= step / (1.0 + 0.5 * x * step);
  }
  return x;
}

double truncation_mass(const Marginal& m) {
  return norm_cdf((m.hi - m.mean) / m.stddev) -
         norm_cdf((m.lo - m.mean) / m.stddev);
}

void validate_marginal(const Marginal& m) {
  if (!std::isfinite(m.lo) || !std::isfinite(m.hi) || m.lo >= m.hi)
    throw ValidationError("density marginal: need a finite interval lo < hi");
  if (m.kind == Marginal::Kind::gaussian) {
    if (!std::isfinite(m.mean) || !(m.stddev > 0.0))
      throw ValidationError("density marginal: gaussian needs stddev > 0");
    if (truncation_mass(m) < 1e-12)
      throw ValidationError(
          "density marginal: the window carries negligible gaussian mass");
  }
}

// splitmix64 finalizer, used to derive independent per-task streams
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b) {
  return mix64(seed ^ mix64(a ^ mix64(b)));
}

double next_u01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

double draw(const Marginal& m, std::mt19937_64& g) {
  double u = next_u01(g);
  if (m.kind == Marginal::Kind::uniform) return m.lo + u * (m.hi - m.lo);
  double pa = norm_cdf((m.lo - m.mean) / m.stddev);
  double pb = norm_cdf((m.hi - m.mean) / m.stddev);
  double x = m.mean + m.stddev * probit(pa + u * (pb - pa));
  return std::clamp(x, m.lo, m.hi);
}

EmpiricalMeasure bootstrap_to(const EmpiricalMeasure& mu, int m,
                              std::uint64_t seed) {
  std::mt19937_64 g(seed);
  int n = mu.size(), w = 2 * mu.dim;
  EmpiricalMeasure out;
  out.dim = mu.dim;
  out.points.reserve(static_cast<size_t>(m) * w);
  for (int i = 0; i < m; ++i) {
    int idx = static_cast<int>(next_u01(g) * n);
    auto first = mu.points.begin() + static_cast<long>(idx) * w;
    out.points.insert(out.points.end(), first, first + w);
  }
  return out;
}

}  // namespace

EmpiricalMeasure empirical(const Ensemble& e) {
  validate_ensemble(e);
  EmpiricalMeasure mu;
  mu.dim = e.dim;
  mu.points.reserve(2 * e.x.size());
  for (int i = 0; i < e.size(); ++i) {
    for (int k = 0; k < e.dim; ++k)
      mu.points.push_back(e.x[static_cast<size_t>(i) * e.dim + k]);
    for (int k = 0; k < e.dim; ++k)
      mu.points.push_back(e.v[static_cast<size_t>(i) * e.dim + k]);
  }
  return mu;
}

Marginal Marginal::uniform_on(double lo, double hi) {
  Marginal m;
  m.kind = Kind::uniform;
  m.lo = lo;
  m.hi = hi;
  validate_marginal(m);
  return m;
}

Marginal Marginal::gaussian_on(double lo, double hi, double mean,
                               double stddev) {
  Marginal m;
  m.kind = Kind::gaussian;
  m.lo = lo;
  m.hi = hi;
  m.mean = mean;
  m.stddev = stddev;
  validate_marginal(m);
  return m;
}

double Marginal::expected_value() const {
  validate_marginal(*this);
  if (kind == Kind::uniform) return 0.5 * (lo + hi);
  double alpha = (lo - mean) / stddev;
  double beta = (hi - mean) / stddev;
  double z = norm_cdf(beta) - norm_cdf(alpha);
  return mean + stddev * (norm_pdf(alpha) - norm_pdf(beta)) / z;
}

void validate_spec(const DensitySpec& spec) {
  if (spec.position.empty())
    throw ValidationError("density spec: need at least one dimension");
  if (spec.position.size() != spec.velocity.size())
    throw ValidationError(
        "density spec: position and velocity dimensions differ");
  for (const auto& m : spec.position) validate_marginal(m);
  for (const auto& m : spec.velocity) validate_marginal(m);
}

Ensemble sample(const DensitySpec& spec, int n, std::uint64_t seed) {
  validate_spec(spec);
  if (n < 1) throw ValidationError("sample: need at least one draw");
  int d = spec.dim();
  std::mt19937_64 g(seed);
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<double> v(static_cast<size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k)
      x[static_cast<size_t>(i) * d + k] = draw(spec.position[k], g);
    for (int k = 0; k < d; ++k)
      v[static_cast<size_t>(i) * d + k] = draw(spec.velocity[k], g);
  }
  return make_ensemble(d, x, v);
}

int SpatialGrid::cells() const {
  int total = 1;
  for (int b : bins) total *= b;
  return total;
}

Moments moments(const EmpiricalMeasure& mu, const SpatialGrid& grid) {
  int d = mu.dim;
  int n = mu.size();
  if (d < 1 || n < 1)
    throw ValidationError("moments: empty measure");
  if (static_cast<int>(grid.lo.size()) != d ||
      static_cast<int>(grid.hi.size()) != d ||
      static_cast<int>(grid.bins.size()) != d)
    throw ValidationError("moments: grid dimensions do not match the measure");
  for (int k = 0; k < d; ++k) {
    if (grid.bins[k] < 1)
      throw ValidationError("moments: need at least one bin per dimension");
    if (!std::isfinite(grid.lo[k]) || !std::isfinite(grid.hi[k]) ||
        grid.lo[k] >= grid.hi[k])
      throw ValidationError("moments: grid needs finite extents lo < hi");
  }

  int cells = grid.cells();
  Moments out;
  out.count.assign(static_cast<size_t>(cells), 0);
  out.rho.assign(static_cast<size_t>(cells), 0.0);
  out.rho_u.assign(static_cast<size_t>(cells) * d, 0.0);
  out.rho_E.assign(static_cast<size_t>(cells), 0.0);

  for (int i = 0; i < n; ++i) {
    const double* atom = mu.points.data() + static_cast<size_t>(i) * 2 * d;
    int cell = 0, stride = 1;
    for (int k = 0; k < d; ++k) {
      double c = atom[k];
      if (c < grid.lo[k] || c > grid.hi[k])
        throw ValidationError("moments: grid does not cover atom " +
                              std::to_string(i));
      double width = (grid.hi[k] - grid.lo[k]) / grid.bins[k];
      int idx = std::min(static_cast<int>((c - grid.lo[k]) / width),
                         grid.bins[k] - 1);
      cell += idx * stride;
      stride *= grid.bins[k];
    }
    out.count[static_cast<size_t>(cell)] += 1;
    double e2 = 0.0;
    for (int k = 0; k < d; ++k) {
      double xi = atom[d + k];
      out.rho_u[static_cast<size_t>(cell) * d + k] += xi / n;
      e2 += xi * xi;
    }
    out.rho_E[static_cast<size_t>(cell)] += 0.5 * e2 / n;
  }
  for (int c = 0; c < cells; ++c)
    out.rho[static_cast<size_t>(c)] =
        static_cast<double>(out.count[static_cast<size_t>(c)]) / n;
  return out;
}

double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.dim != b.dim || a.dim < 1)
    throw ValidationError("w1 distance: phase-space dimensions differ");
  int n = a.size();
  if (n != b.size() || n < 1)
    throw ValidationError(
        "w1 distance: need equally sized clouds; resample to a common size "
        "first");
  if (n > 512)
    throw ValidationError(
        "w1 distance: exact assignment supports at most 512 atoms");
  int w = 2 * a.dim;
  Matrix cost = Matrix::zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double* za = a.points.data() + static_cast<size_t>(i) * w;
    for (int j = 0; j < n; ++j) {
      const double* zb = b.points.data() + static_cast<size_t>(j) * w;
      double s = 0.0;
      for (int k = 0; k < w; ++k) {
        double dk = za[k] - zb[k];
        s += dk * dk;
      }
      cost.at(i, j) = std::sqrt(s);
    }
  }
  return assignment_cost(cost) / n;
}

std::vector<StudyRow> convergence_study(const DensitySpec& spec,
                                        const CtModel& model,
                                        const std::vector<int>& sizes,
                                        double T, double h, int trials,
                                        std::uint64_t seed, int threads) {
  validate_spec(spec);
  if (sizes.empty())
    throw ValidationError("study: need at least one cloud size");
  for (size_t s = 0; s < sizes.size(); ++s) {
    if (sizes[s] < 1)
      throw ValidationError("study: cloud sizes must be positive");
    if (s > 0 && sizes[s] <= sizes[s - 1])
      throw ValidationError("study: cloud sizes must increase");
  }
  int n_ref = sizes.back();
  if (n_ref > 512)
    throw ValidationError(
        "study: the reference size exceeds the exact-assignment cap of 512");
  if (trials < 1) throw ValidationError("study: need at least one trial");
  if (!(h > 0.0)) throw ValidationError("study: need step size h > 0");
  if (!(T >= 0.0)) throw ValidationError("study: need horizon T >= 0");
  if (threads < 1) throw ValidationError("study: need threads >= 1");

  long steps = std::lround(T / h);
  Ensemble ref_e = sample(spec, n_ref, derive_seed(seed, 0x5eedu, 0));
  if (steps > 0) integrate(model, ref_e, h, steps);
  const EmpiricalMeasure ref = empirical(ref_e);

  std::vector<StudyRow> rows(sizes.size() * static_cast<size_t>(trials));
  auto run_task = [&](size_t task) {
    int n = sizes[task / static_cast<size_t>(trials)];
    int trial = static_cast<int>(task % static_cast<size_t>(trials));
    auto t0 = std::chrono::steady_clock::now();
    Ensemble e = sample(spec, n,
                        derive_seed(seed, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(trial) + 1));
    if (steps > 0) integrate(model, e, h, steps);
    EmpiricalMeasure mu = empirical(e);
    if (n < n_ref)
      mu = bootstrap_to(mu, n_ref,
                        derive_seed(seed ^ 0xb005u,
                                    static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(trial) + 1));
    double dist = w1_distance(mu, ref);
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    rows[task] = {n, trial, dist, dt.count()};
  };

  if (threads == 1) {
    for (size_t task = 0; task < rows.size(); ++task) run_task(task);
    return rows;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_guard;
  auto worker = [&] {
    for (;;) {
      size_t task = next.fetch_add(1);
      if (task >= rows.size()) return;
      try {
        run_task(task);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_guard);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int width = std::min<int>(threads, static_cast<int>(rows.size()));
  pool.reserve(static_cast<size_t>(width));
  for (int w = 0; w < width; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
  std::string out = "N,trial,distance,runtime_s\n";
  char buf[64];
  for (const auto& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.trial);
    out += ',';
    auto [p1, ec1] = std::to_chars(buf, buf + sizeof buf, row.distance);
    out.append(buf, p1);
    out += ',';
    auto [p2, ec2] = std::to_chars(buf, buf + sizeof buf, row.runtime_s);
    out.append(buf, p2);
    out += '\n';
  }
  return out;
}

}  // namespace flock
