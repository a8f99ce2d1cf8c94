#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flp/rng.hpp"
#include "flp/time_grid.hpp"
#include "flp/types.hpp"

namespace flp {

// Mark measure nu of a mean-zero, square-integrable pure-jump model.  Either
// a finite list of atoms, or a symmetric density given through its positive
// half x > 0 (nu(dx) = density_pos(|x|) dx on both sides, zero on
// |x| < support_min).  Symmetry keeps the mean-zero constraint exact after
// discretization by mirroring.
struct LevyModel {
  std::string name;

  // atomic route
  std::vector<std::pair<Scalar, Scalar>> atoms;  // (mark y != 0, weight w > 0)

  // symmetric-density route
  std::function<Scalar(Scalar)> density_pos;  // evaluated for x > 0
  Scalar support_min = 0.0;  // density treated as zero below this
  Scalar support_max = 0.0;  // and negligible above this
  bool finite_total_mass = true;

  // defaults used when sampling needs a discretization
  Scalar epsilon = 0.0;
  Index n_atoms_per_side = 0;

  bool is_atomic() const { return !atoms.empty(); }
};

// Finite atomic stand-in for nu used by sampling and by the chaos basis.
struct DiscretizedMeasure {
  std::vector<Scalar> marks;    // y_j != 0
  std::vector<Scalar> weights;  // w_j > 0
  Scalar m2_deficit = 0.0;      // relative second-moment loss vs. the model

  Index size() const { return static_cast<Index>(marks.size()); }
  Scalar total_mass() const;
  Scalar second_moment() const;
  Scalar first_moment() const;
};

// Per-cell compensated increments for n_paths independent paths.
struct IncrementSample {
  TimeGrid grid;
  Mat increments;  // n_paths x n_cells
  std::uint64_t seed = 0;
};

// One jump of one path, already binned to its grid cell.
struct Jump {
  Index cell;
  Scalar mark;
};

Scalar second_moment(const LevyModel& model);  // rel. accuracy 1e-8 or better

// Mass/centroid atoms per geometric cell on [max(eps, support_min),
// support_max], mirrored to the negative axis.  Atomic models pass through
// unchanged.  eps must be > 0 for density models.
DiscretizedMeasure discretize_measure(const LevyModel& model, Scalar eps,
                                      Index n_atoms_per_side);

// The measure sample_increments draws from: atoms as-is, or the model's
// default discretization.  Exposed so oracles can share it.
DiscretizedMeasure sampling_measure(const LevyModel& model);

// Compound-Poisson increments of the compensated two-sided process on the
// grid.  Path p uses SplitMix64::stream(seed, p); jumps are drawn as a total
// Poisson count over the window, uniform times, CDF-inverted marks, then
// binned, so the per-cell counts are exactly Poisson(w_j * h) and
// independent across cells.  Each cell is compensated by h * sum(w_j y_j).
IncrementSample sample_increments(const LevyModel& model, const TimeGrid& grid,
                                  std::uint64_t seed, Index n_paths);

// Same jump stream without materializing the increment matrix; visit(p, jumps)
// is called once per path.  sample_increments is a binning of this.
void for_each_path_jumps(
    const LevyModel& model, const TimeGrid& grid, std::uint64_t seed,
    Index n_paths,
    const std::function<void(Index, const std::vector<Jump>&)>& visit);

// Shipped models.
LevyModel two_point_model(Scalar intensity, Scalar jump_size);
LevyModel gauss_mark_model(Scalar intensity, Scalar mark_std, Scalar eps,
                           Index n_atoms_per_side);
// nu(dx) = c * exp(-decay*|x|)/|x| dx on |x| >= eps (infinite activity as
// eps -> 0; total mass finite only because of the truncation).
LevyModel tempered_stable_model(Scalar c, Scalar decay, Scalar eps,
                                Index n_atoms_per_side);

}  // namespace flp
