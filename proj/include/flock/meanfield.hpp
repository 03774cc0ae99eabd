#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flock/core.hpp"
#include "flock/models_ct.hpp"

namespace flock {

/// Uniformly weighted atom cloud in phase space R^{2d}: each atom stores
/// its position block then its velocity block.  Weights are 1/N by
/// construction and are not stored.
struct EmpiricalMeasure {
  int dim = 0;
  std::vector<double> points;  // atom-major, 2*dim doubles per atom
  int size() const {
    return dim > 0 ? static_cast<int>(points.size()) / (2 * dim) : 0;
  }
};

EmpiricalMeasure empirical(const Ensemble& e);

/// One-component law truncated to the compact interval [lo, hi]: either
/// uniform on it or a Gaussian restricted to it.  mean/stddev are the
/// parameters of the untruncated Gaussian.
struct Marginal {
  enum class Kind { uniform, gaussian };
  Kind kind = Kind::uniform;
  double lo = 0.0, hi = 1.0;
  double mean = 0.0, stddev = 1.0;

  static Marginal uniform_on(double lo, double hi);
  static Marginal gaussian_on(double lo, double hi, double mean,
                              double stddev);
  /// Mean of the truncated law.
  double expected_value() const;
};

/// Product initial law on compact boxes: one marginal per position
/// component and one per velocity component, equal counts.
struct DensitySpec {
  std::vector<Marginal> position;
  std::vector<Marginal> velocity;
  int dim() const { return static_cast<int>(position.size()); }
};

void validate_spec(const DensitySpec& spec);

/// Independent draws from the product law, deterministic in the seed.
Ensemble sample(const DensitySpec& spec, int n, std::uint64_t seed);

/// Uniform product grid over position space.
struct SpatialGrid {
  std::vector<double> lo, hi;
  std::vector<int> bins;
  int cells() const;
};

/// Binned velocity moments: mass, momentum, and energy density per cell.
/// count keeps the integer occupancy, so conservation checks stay exact.
struct Moments {
  std::vector<long> count;    // cells
  std::vector<double> rho;    // cells
  std::vector<double> rho_u;  // cells x dim
  std::vector<double> rho_E;  // cells
};

Moments moments(const EmpiricalMeasure& mu, const SpatialGrid& grid);

/// Exact order-1 transport distance between equal-size uniform clouds:
/// the minimum over pairings of the mean phase-space distance, solved by
/// exact assignment.  Supports at most 512 atoms per side.
double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

struct StudyRow {
  int n = 0;
  int trial = 0;
  double distance = 0.0;
  double runtime_s = 0.0;
};

/// Self-convergence study: every run is compared against a reference run
/// at the largest requested size after evolving both to time T.  Smaller
/// clouds are bootstrap-resampled up to the reference size before the
/// distance evaluation; runs at the reference size double as its noise
/// floor.  Per-(size, trial) random streams derive from the seed, so the
/// distances are reproducible for any thread count.
std::vector<StudyRow> convergence_study(const DensitySpec& spec,
                                        const CtModel& model,
                                        const std::vector<int>& sizes,
                                        double T, double h, int trials,
                                        std::uint64_t seed, int threads = 1);

/// CSV table of study rows, header N,trial,distance,runtime_s.
std::string study_csv(const std::vector<StudyRow>& rows);

}  // namespace flock
