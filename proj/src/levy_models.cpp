#include "flp/levy_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flp/quadrature.hpp"

namespace flp {

Scalar DiscretizedMeasure::total_mass() const {
  Scalar s = 0;
  for (Scalar w : weights) s += w;
  return s;
}

Scalar DiscretizedMeasure::second_moment() const {
  Scalar s = 0;
  for (Index j = 0; j < size(); ++j) s += weights[j] * marks[j] * marks[j];
  return s;
}

Scalar DiscretizedMeasure::first_moment() const {
  Scalar s = 0;
  for (Index j = 0; j < size(); ++j) s += weights[j] * marks[j];
  return s;
}

namespace {

void check_model(const LevyModel& model) {
  if (model.is_atomic()) {
    Scalar mean = 0, m2 = 0, scale = 0;
    for (auto& [y, w] : model.atoms) {
      if (!(w > 0)) throw std::invalid_argument("atom weight must be > 0");
      if (y == 0) throw std::invalid_argument("atom mark must be nonzero");
      mean += w * y;
      m2 += w * y * y;
      scale += w * std::fabs(y);
    }
    if (!(m2 > 0) || !std::isfinite(m2))
      throw std::invalid_argument("model second moment must be finite and positive");
    if (std::fabs(mean) > 1e-12 * scale)
      throw std::invalid_argument("model is not mean-zero");
    return;
  }
  if (!model.density_pos)
    throw std::invalid_argument("model has neither atoms nor a density");
  if (!(model.support_max > model.support_min) || !(model.support_min >= 0))
    throw std::invalid_argument("density support bounds are inconsistent");
}

}  // namespace

Scalar second_moment(const LevyModel& model) {
  check_model(model);
  if (model.is_atomic()) {
    Scalar m2 = 0;
    for (auto& [y, w] : model.atoms) m2 += w * y * y;
    return m2;
  }
  // Symmetric density: 2 * int_{lo}^{hi} x^2 dens(x) dx.  x^2*dens is
  // integrable down to 0 for every shipped density, so lo = support_min.
  const Scalar lo = model.support_min;
  const Scalar hi = model.support_max;
  const auto f = [&](Scalar x) { return x * x * model.density_pos(x); };
  const Scalar m2 = 2.0 * adaptive_simpson(f, std::max(lo, Scalar(0)), hi, 1e-10);
  if (!std::isfinite(m2) || !(m2 > 0))
    throw std::invalid_argument("model second moment must be finite and positive");
  return m2;
}

DiscretizedMeasure discretize_measure(const LevyModel& model, Scalar eps,
                                      Index n_atoms_per_side) {
  check_model(model);
  DiscretizedMeasure out;
  if (model.is_atomic()) {
    for (auto& [y, w] : model.atoms) {
      out.marks.push_back(y);
      out.weights.push_back(w);
    }
    out.m2_deficit = 0.0;
    return out;
  }
  if (!(eps > 0))
    throw std::invalid_argument("density discretization needs eps > 0");
  if (n_atoms_per_side < 1)
    throw std::invalid_argument("need n_atoms_per_side >= 1");

  const Scalar lo = std::max(eps, model.support_min);
  const Scalar hi = model.support_max;
  if (!(lo < hi))
    throw std::invalid_argument("eps at or beyond density support");

  // Geometric cells resolve the near-origin mass of 1/x-type densities.
  const Scalar ratio = std::pow(hi / lo, 1.0 / static_cast<Scalar>(n_atoms_per_side));
  std::vector<Scalar> pos_marks, pos_weights;
  Scalar edge = lo;
  for (Index j = 0; j < n_atoms_per_side; ++j) {
    const Scalar next = (j + 1 == n_atoms_per_side) ? hi : edge * ratio;
    const Scalar mass =
        adaptive_simpson([&](Scalar x) { return model.density_pos(x); }, edge,
                         next, 1e-10);
    if (mass > 0) {
      const Scalar centroid =
          adaptive_simpson([&](Scalar x) { return x * model.density_pos(x); },
                           edge, next, 1e-10) /
          mass;
      pos_marks.push_back(centroid);
      pos_weights.push_back(mass);
    }
    edge = next;
  }
  if (pos_marks.empty())
    throw std::invalid_argument("discretization produced no mass");

  // Mirror: mean-zero is then exact by construction.
  for (Index j = 0; j < static_cast<Index>(pos_marks.size()); ++j) {
    out.marks.push_back(pos_marks[j]);
    out.weights.push_back(pos_weights[j]);
    out.marks.push_back(-pos_marks[j]);
    out.weights.push_back(pos_weights[j]);
  }

  const Scalar m2_model = second_moment(model);
  out.m2_deficit = std::max(Scalar(0), 1.0 - out.second_moment() / m2_model);
  return out;
}

DiscretizedMeasure sampling_measure(const LevyModel& model) {
  if (model.is_atomic()) return discretize_measure(model, 0.0, 0);
  if (!(model.epsilon > 0) || model.n_atoms_per_side < 1)
    throw std::invalid_argument(
        "density model needs epsilon/n_atoms_per_side defaults to sample "
        "(exact jump-by-jump sampling is unavailable for infinite-mass nu)");
  return discretize_measure(model, model.epsilon, model.n_atoms_per_side);
}

void for_each_path_jumps(
    const LevyModel& model, const TimeGrid& grid, std::uint64_t seed,
    Index n_paths,
    const std::function<void(Index, const std::vector<Jump>&)>& visit) {
  const DiscretizedMeasure m = sampling_measure(model);
  const Scalar total = m.total_mass();
  const Scalar span = grid.t_max() - grid.t_min();

  std::vector<Scalar> cdf(m.weights.size());
  Scalar acc = 0;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    acc += m.weights[j];
    cdf[j] = acc;
  }

  std::vector<Jump> jumps;
  for (Index p = 0; p < n_paths; ++p) {
    SplitMix64 g = SplitMix64::stream(seed, static_cast<std::uint64_t>(p));
    const std::int64_t k = g.next_poisson(total * span);
    jumps.clear();
    jumps.reserve(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) {
      const Scalar u = grid.t_min() + span * g.next_uniform();
      const Scalar target = acc * g.next_uniform();
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
      const auto j = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cdf.begin(),
                                   static_cast<std::ptrdiff_t>(cdf.size()) - 1));
      Index cell = static_cast<Index>(std::floor((u - grid.t_min()) / grid.h()));
      if (cell >= grid.n_cells()) cell = grid.n_cells() - 1;
      jumps.push_back(Jump{cell, m.marks[j]});
    }
    visit(p, jumps);
  }
}

IncrementSample sample_increments(const LevyModel& model, const TimeGrid& grid,
                                  std::uint64_t seed, Index n_paths) {
  if (n_paths < 1) throw std::invalid_argument("need n_paths >= 1");
  const DiscretizedMeasure m = sampling_measure(model);
  const Scalar drift = m.first_moment() * grid.h();  // compensator per cell

  IncrementSample out{grid, Mat::Zero(n_paths, grid.n_cells()), seed};
  for_each_path_jumps(model, grid, seed, n_paths,
                      [&](Index p, const std::vector<Jump>& jumps) {
                        for (const Jump& j : jumps)
                          out.increments(p, j.cell) += j.mark;
                      });
  if (drift != 0.0) out.increments.array() -= drift;
  return out;
}

LevyModel two_point_model(Scalar intensity, Scalar jump_size) {
  if (!(intensity > 0) || !(jump_size > 0))
    throw std::invalid_argument("two_point model needs intensity, jump_size > 0");
  LevyModel m;
  m.name = "two_point";
  m.atoms = {{jump_size, 0.5 * intensity}, {-jump_size, 0.5 * intensity}};
  return m;
}

LevyModel gauss_mark_model(Scalar intensity, Scalar mark_std, Scalar eps,
                           Index n_atoms_per_side) {
  if (!(intensity > 0) || !(mark_std > 0))
    throw std::invalid_argument("gauss_mark model needs intensity, mark_std > 0");
  LevyModel m;
  m.name = "gauss_mark";
  const Scalar s = mark_std;
  m.density_pos = [intensity, s](Scalar x) {
    return intensity / (s * std::sqrt(2.0 * M_PI)) *
           std::exp(-0.5 * x * x / (s * s));
  };
  m.support_min = 0.0;
  m.support_max = 10.0 * s;
  m.finite_total_mass = true;
  m.epsilon = eps;
  m.n_atoms_per_side = n_atoms_per_side;
  return m;
}

LevyModel tempered_stable_model(Scalar c, Scalar decay, Scalar eps,
                                Index n_atoms_per_side) {
  if (!(c > 0) || !(decay > 0) || !(eps > 0))
    throw std::invalid_argument("tempered_stable model needs c, decay, eps > 0");
  LevyModel m;
  m.name = "tempered_stable";
  m.density_pos = [c, decay](Scalar x) { return c * std::exp(-decay * x) / x; };
  m.support_min = eps;
  m.support_max = eps + 50.0 / decay;
  m.finite_total_mass = true;  // thanks to the eps truncation
  m.epsilon = eps;
  m.n_atoms_per_side = n_atoms_per_side;
  return m;
}

}  // namespace flp
