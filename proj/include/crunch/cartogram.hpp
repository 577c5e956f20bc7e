#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "crunch/data.hpp"

namespace crunch {

struct GridSpec {
  Eigen::Index nx = 256;  // cell counts, powers of two, >= 64
  Eigen::Index ny = 256;
  Bounds bbox;            // bounds of the mapped data, in map units
  double pad_factor = 1.5;

  void validate() const;
  // bbox scaled by pad_factor about its center; the solver domain.
  Bounds padded() const;
  double cell_width() const { return padded().width() / static_cast<double>(nx); }
  double cell_height() const { return padded().height() / static_cast<double>(ny); }
};

struct DensityGrid {
  GridSpec spec;
  Eigen::ArrayXXd rho;  // nx x ny, sampled at cell centers
  double mean_rho = 0.0;

  static DensityGrid from_values(const GridSpec& spec, Eigen::ArrayXXd values);
  void validate() const;
};

// Accumulated displacement of cell-center tracers advected by the density
// flux. Sampling reflects across the domain walls with the normal component
// negated, so the sampled normal displacement at every wall is exactly zero.
struct DisplacementField {
  GridSpec spec;
  Eigen::ArrayXXd dx;  // nx x ny
  Eigen::ArrayXXd dy;

  void validate() const;
  Point sample(const Point& p) const;                // displacement at p
  Point apply(const Point& p) const { return p + sample(p); }
};

struct DiffusionStats {
  double residual = 0.0;  // max |rho_t - <rho>| / <rho> at the last checkpoint
  int checkpoints = 0;    // time-doubling intervals integrated
  long substeps = 0;      // total RK4 substeps
};

// Coverage-weighted rasterization: a cell covered by region r contributes
// statistic(r)/area(r) in proportion to the covered fraction; uncovered
// area gets the statistic-weighted mean land density.
DensityGrid rasterize_density(const RegionSet& regions, const GridSpec& spec);

// Tracer displacement under v = -grad(rho_t)/rho_t with the heat equation
// closing rho_t, integrated on the doubling schedule t_k = t_0 2^k until
// max |rho_t - <rho>| / <rho> < tolerance.
DisplacementField solve_displacement(const DensityGrid& grid, double tolerance,
                                     DiffusionStats* stats = nullptr);

// Maps every vertex through bilinear interpolation of the field; ids and
// statistics are preserved.
RegionSet transform_regions(const RegionSet& regions,
                            const DisplacementField& field);

struct AreaErrorReport {
  double max_err = 0.0;
  double mean_err = 0.0;
  // Regions with zero statistic have no target share and are omitted.
  std::map<std::string, double> per_region;
};

// Relative mismatch between each region's share of total area and its share
// of the total statistic.
AreaErrorReport area_error(const RegionSet& before, const RegionSet& after);

// Diagnostics over the (nx+1) x (ny+1) transformed cell-corner lattice.
void transformed_corners(const DisplacementField& field, Eigen::ArrayXXd& x,
                         Eigen::ArrayXXd& y);
double total_transformed_area(const DisplacementField& field);
long fold_over_count(const DisplacementField& field);

}  // namespace crunch
