#pragma once

#include <cmath>
#include <stdexcept>

#include "flp/types.hpp"

namespace flp {

// Uniform time grid on [t_min, t_max] split into n_cells cells of width h.
// Grid functions are stored as cell averages; anything outside the grid is
// treated as zero, so t_min doubles as the finite stand-in for -infinity in
// the two-sided kernel computations.
class TimeGrid {
 public:
  TimeGrid(Scalar t_min, Scalar t_max, Index n_cells)
      : t_min_(t_min), t_max_(t_max), n_cells_(n_cells) {
    if (n_cells < 1) throw std::invalid_argument("grid needs n_cells >= 1");
    if (!(t_min < t_max)) throw std::invalid_argument("grid needs t_min < t_max");
    h_ = (t_max - t_min) / static_cast<Scalar>(n_cells);
  }

  Scalar t_min() const { return t_min_; }
  Scalar t_max() const { return t_max_; }
  Index n_cells() const { return n_cells_; }
  Scalar h() const { return h_; }

  Scalar edge(Index i) const { return t_min_ + h_ * static_cast<Scalar>(i); }
  Scalar center(Index i) const {
    return t_min_ + h_ * (static_cast<Scalar>(i) + 0.5);
  }

  // Cell index containing t, clamped to [0, n_cells-1]; t must lie inside.
  Index cell_of(Scalar t) const {
    if (t < t_min_ || t > t_max_)
      throw std::invalid_argument("time outside grid");
    auto i = static_cast<Index>(std::floor((t - t_min_) / h_));
    if (i < 0) i = 0;
    if (i >= n_cells_) i = n_cells_ - 1;
    return i;
  }

  bool contains(Scalar t) const { return t >= t_min_ && t <= t_max_; }

  // Index i such that edge(i) == 0, required by the two-sided kernels so that
  // the jump at time zero of (-s)_+^beta lands exactly on an edge.
  Index zero_edge_index() const {
    const Scalar raw = -t_min_ / h_;
    const Scalar rounded = std::round(raw);
    if (std::fabs(raw - rounded) > 1e-9 * std::max<Scalar>(1.0, raw) ||
        rounded < 0 || rounded > static_cast<Scalar>(n_cells_))
      throw std::invalid_argument("grid does not place 0 on a cell edge");
    return static_cast<Index>(rounded);
  }

  bool operator==(const TimeGrid& o) const {
    return t_min_ == o.t_min_ && t_max_ == o.t_max_ && n_cells_ == o.n_cells_;
  }

 private:
  Scalar t_min_, t_max_;
  Index n_cells_;
  Scalar h_;
};

struct GridFunction {
  TimeGrid grid;
  Arr values;  // one cell-average value per cell

  GridFunction(const TimeGrid& g, Arr v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_cells())
      throw std::invalid_argument("grid function size mismatch");
  }
  static GridFunction zero(const TimeGrid& g) {
    return GridFunction(g, Arr::Zero(g.n_cells()));
  }
};

}  // namespace flp
