#pragma once

// Phase-space discretization shared by every solver: a 1D spatial mesh, a 2D
// uniform velocity grid, the distribution f(x, v) stored cell by cell, and the
// moment / equilibrium / diagnostic maps between kinetic and fluid variables.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace kinuq {

inline constexpr double kDefaultTolNeg = 1e-8;
inline constexpr double kDefaultRhoFloor = 1e-12;
inline constexpr double kEntropyFloor = 1e-30;

/// Uniform tensor grid on [-l_max, l_max)^2. The right endpoint is excluded so
/// the grid is one period of the periodized velocity space used by the
/// spectral collision operator; quadrature is the rectangle rule.
class VelocityGrid {
 public:
  VelocityGrid(int n_per_dim, double l_max);

  int n() const noexcept { return n_; }
  double l_max() const noexcept { return l_max_; }
  double spacing() const noexcept { return h_; }
  double cell_weight() const noexcept { return h_ * h_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }

  double node(int i) const noexcept { return nodes_[static_cast<std::size_t>(i)]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  // Per flattened node k = i1 * n + i2.
  std::span<const double> v1() const noexcept { return v1_; }
  std::span<const double> v2() const noexcept { return v2_; }

  // Index of -v_i on the periodized grid (-l_max maps onto itself).
  int mirror_index(int i) const noexcept { return (n_ - i) % n_; }

  bool operator==(const VelocityGrid& o) const noexcept {
    return n_ == o.n_ && l_max_ == o.l_max_;
  }

 private:
  int n_;
  double l_max_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> v1_;
  std::vector<double> v2_;
};

enum class Boundary { Periodic, Specular };

class SpatialGrid {
 public:
  SpatialGrid(int n_cells, double x_min, double x_max, Boundary boundary);

  int n_cells() const noexcept { return n_cells_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  Boundary boundary() const noexcept { return boundary_; }
  double center(int i) const noexcept { return x_min_ + (i + 0.5) * dx_; }
  std::vector<double> centers() const;

  bool operator==(const SpatialGrid& o) const noexcept {
    return n_cells_ == o.n_cells_ && x_min_ == o.x_min_ && x_max_ == o.x_max_ &&
           boundary_ == o.boundary_;
  }

 private:
  int n_cells_;
  double x_min_;
  double x_max_;
  double dx_;
  Boundary boundary_;
};

struct CellMoments {
  double rho = 0.0;
  double ux = 0.0;
  double uy = 0.0;
  double temp = 0.0;

  // E = rho |u|^2 / 2 + rho T  (two velocity dimensions)
  double energy() const noexcept { return 0.5 * rho * (ux * ux + uy * uy) + rho * temp; }
};

/// Per-cell fluid variables (rho, u, T).
struct MacroState {
  std::vector<double> rho;
  std::vector<double> ux;
  std::vector<double> uy;
  std::vector<double> temp;

  MacroState() = default;
  explicit MacroState(std::size_t n_cells)
      : rho(n_cells, 0.0), ux(n_cells, 0.0), uy(n_cells, 0.0), temp(n_cells, 0.0) {}

  std::size_t size() const noexcept { return rho.size(); }
  CellMoments cell(std::size_t i) const noexcept { return {rho[i], ux[i], uy[i], temp[i]}; }
  void set(std::size_t i, const CellMoments& m) noexcept {
    rho[i] = m.rho;
    ux[i] = m.ux;
    uy[i] = m.uy;
    temp[i] = m.temp;
  }
  double energy(std::size_t i) const noexcept { return cell(i).energy(); }
  std::vector<double> energy() const;

  // Throws InvalidState unless rho > 0 and T > 0 (finite) on every cell.
  void validate() const;
};

/// f(x_i, v) for every spatial cell, stored as contiguous velocity slices.
class DistributionField {
 public:
  DistributionField(SpatialGrid spatial, VelocityGrid velocity);

  const SpatialGrid& spatial() const noexcept { return spatial_; }
  const VelocityGrid& velocity() const noexcept { return velocity_; }
  int n_cells() const noexcept { return spatial_.n_cells(); }
  std::size_t cell_size() const noexcept { return velocity_.size(); }

  std::span<double> cell(int i) noexcept {
    return {values_.data() + static_cast<std::size_t>(i) * cell_size(), cell_size()};
  }
  std::span<const double> cell(int i) const noexcept {
    return {values_.data() + static_cast<std::size_t>(i) * cell_size(), cell_size()};
  }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool same_grids(const DistributionField& o) const noexcept {
    return spatial_ == o.spatial_ && velocity_ == o.velocity_;
  }

  // Throws InvalidState on non-finite values. Values below -tol_neg * max|f|
  // are tolerated but logged; returns how many were found.
  std::size_t validate(double tol_neg = kDefaultTolNeg) const;

 private:
  SpatialGrid spatial_;
  VelocityGrid velocity_;
  std::vector<double> values_;
};

struct KnudsenField {
  std::vector<double> eps;

  KnudsenField() = default;
  KnudsenField(std::size_t n_cells, double value) : eps(n_cells, value) {}
  explicit KnudsenField(std::vector<double> values) : eps(std::move(values)) {}
  std::size_t size() const noexcept { return eps.size(); }
};

// rho / (2 pi T) exp(-|v - u|^2 / (2 T)) at every node.
void maxwellian_cell(const CellMoments& m, const VelocityGrid& vg, std::span<double> out);
DistributionField maxwellian(const MacroState& m, const SpatialGrid& sg, const VelocityGrid& vg);

/// Maxwellian whose discrete mass, momentum and energy on vg equal those of m
/// to round-off. Parameters are corrected by Newton iteration; if that fails
/// the plain Maxwellian is rescaled to the exact mass instead (and logged).
void discrete_maxwellian_cell(const CellMoments& m, const VelocityGrid& vg,
                              std::span<double> out);

CellMoments cell_moments(std::span<const double> f, const VelocityGrid& vg,
                         double rho_floor = kDefaultRhoFloor);
MacroState moments(const DistributionField& f, double rho_floor = kDefaultRhoFloor);

struct PressureTensor {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

struct AuxMoments {
  std::vector<PressureTensor> pressure;
  std::vector<std::array<double, 2>> heat_flux;
};

AuxMoments aux_moments(const DistributionField& f);

double l1_distance_cell(std::span<const double> f, std::span<const double> g,
                        const VelocityGrid& vg);
std::vector<double> l1_distance(const DistributionField& f, const DistributionField& g);

double entropy_cell(std::span<const double> f, const VelocityGrid& vg);
std::vector<double> entropy(const DistributionField& f);

/// Domain totals of mass, x/y momentum and energy (sum over cells of the
/// discrete velocity integrals times dx).
struct ConservedTotals {
  double mass = 0.0;
  double mom_x = 0.0;
  double mom_y = 0.0;
  double energy = 0.0;
};

ConservedTotals conserved_totals(const DistributionField& f);

}  // namespace kinuq
