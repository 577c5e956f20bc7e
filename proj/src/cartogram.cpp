#include "crunch/cartogram.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "crunch/error.hpp"
#include "crunch/parallel.hpp"

namespace crunch {
namespace {

constexpr double kCfl = 0.7;                // dt <= kCfl * min(h) / vmax
constexpr double kTimeFraction = 0.125;     // dt <= fraction of current time
constexpr long kMaxSubsteps = 512;          // per doubling interval
constexpr int kMaxCheckpoints = 64;         // time-doubling budget
constexpr double kRhoFloorFraction = 1e-4;  // velocity denominator floor
constexpr double kZeroStatFraction = 1e-4;  // density of zero-statistic land
constexpr Eigen::Index kSupersample = 8;    // coverage subsamples per axis

bool power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Bilinear interpolation on a cell-center grid with one layer of reflected
// ghost cells: the ghost mirrors the interior value across the wall, negated
// when the sampled component is normal to that wall. Grid coordinates are in
// cell units with gx = x/hx - 0.5, so queries clamped to the domain stay
// within the single ghost layer.
double sample_ghost(const Eigen::ArrayXXd& f, double gx, double gy, bool flip_x,
                    bool flip_y) {
  const Eigen::Index nx = f.rows();
  const Eigen::Index ny = f.cols();
  const double fx = std::floor(gx);
  const double fy = std::floor(gy);
  const Eigen::Index i0 = static_cast<Eigen::Index>(fx);
  const Eigen::Index j0 = static_cast<Eigen::Index>(fy);
  const double tx = gx - fx;
  const double ty = gy - fy;
  const auto fetch = [&](Eigen::Index i, Eigen::Index j) {
    double s = 1.0;
    if (i < 0) {
      i = -1 - i;
      if (flip_x) s = -s;
    } else if (i >= nx) {
      i = 2 * nx - 1 - i;
      if (flip_x) s = -s;
    }
    if (j < 0) {
      j = -1 - j;
      if (flip_y) s = -s;
    } else if (j >= ny) {
      j = 2 * ny - 1 - j;
      if (flip_y) s = -s;
    }
    return s * f(i, j);
  };
  return (1.0 - tx) * (1.0 - ty) * fetch(i0, j0) +
         tx * (1.0 - ty) * fetch(i0 + 1, j0) +
         (1.0 - tx) * ty * fetch(i0, j0 + 1) + tx * ty * fetch(i0 + 1, j0 + 1);
}

struct Snapshot {
  Eigen::ArrayXXd rho;
  Eigen::ArrayXXd vx;
  Eigen::ArrayXXd vy;
  // Scratch retained across calls so repeated snapshots never reallocate.
  Eigen::VectorXd ex, ey;
  Eigen::MatrixXd d, u, w, g;

  void swap(Snapshot& o) {
    rho.swap(o.rho);
    vx.swap(o.vx);
    vy.swap(o.vy);
  }
};

// Closed-form diffusion under zero-flux walls: the density is expanded in the
// cosine basis cos(k*pi*x/lx)*cos(l*pi*y/ly) once, and any later time is
// synthesized exactly by scaling coefficients with exp(-lambda_kl * t).
class SpectralDiffusion {
 public:
  explicit SpectralDiffusion(const DensityGrid& grid)
      : nx_(grid.spec.nx), ny_(grid.spec.ny) {
    const Bounds dom = grid.spec.padded();
    lx_ = dom.width();
    ly_ = dom.height();
    hx_ = grid.spec.cell_width();
    hy_ = grid.spec.cell_height();
    floor_ = kRhoFloorFraction * grid.mean_rho;

    const double pi = std::numbers::pi;
    basis_x_.resize(nx_, nx_);
    dbasis_x_.resize(nx_, nx_);
    lambda_x_.resize(nx_);
    for (Eigen::Index k = 0; k < nx_; ++k) {
      const double wave = static_cast<double>(k) * pi;
      lambda_x_(k) = (wave / lx_) * (wave / lx_);
      for (Eigen::Index i = 0; i < nx_; ++i) {
        const double arg = wave * (static_cast<double>(i) + 0.5) /
                           static_cast<double>(nx_);
        basis_x_(i, k) = std::cos(arg);
        dbasis_x_(i, k) = -(wave / lx_) * std::sin(arg);
      }
    }
    basis_y_.resize(ny_, ny_);
    dbasis_y_.resize(ny_, ny_);
    lambda_y_.resize(ny_);
    for (Eigen::Index l = 0; l < ny_; ++l) {
      const double wave = static_cast<double>(l) * pi;
      lambda_y_(l) = (wave / ly_) * (wave / ly_);
      for (Eigen::Index j = 0; j < ny_; ++j) {
        const double arg = wave * (static_cast<double>(j) + 0.5) /
                           static_cast<double>(ny_);
        basis_y_(j, l) = std::cos(arg);
        dbasis_y_(j, l) = -(wave / ly_) * std::sin(arg);
      }
    }
    basis_y_t_ = basis_y_.transpose();
    dbasis_y_t_ = dbasis_y_.transpose();

    // Forward DCT-II: coeff(k,l) = ax(k) ay(l) sum_ij rho(i,j) Bx(i,k) By(j,l).
    Eigen::VectorXd ax(nx_), ay(ny_);
    for (Eigen::Index k = 0; k < nx_; ++k)
      ax(k) = (k == 0 ? 1.0 : 2.0) / static_cast<double>(nx_);
    for (Eigen::Index l = 0; l < ny_; ++l)
      ay(l) = (l == 0 ? 1.0 : 2.0) / static_cast<double>(ny_);
    const Eigen::MatrixXd proj =
        basis_x_.transpose() * (grid.rho.matrix() * basis_y_);
    coeff_ = ax.asDiagonal() * proj * ay.asDiagonal();
  }

  // rho and v = -grad(rho)/max(rho, floor) at diffusion time t.
  void snapshot(double t, Snapshot& out) const {
    out.ex.resize(nx_);
    out.ey.resize(ny_);
    for (Eigen::Index k = 0; k < nx_; ++k)
      out.ex(k) = std::exp(-lambda_x_(k) * t);
    for (Eigen::Index l = 0; l < ny_; ++l)
      out.ey(l) = std::exp(-lambda_y_(l) * t);
    out.d = coeff_;
    out.d.array().colwise() *= out.ex.array();
    out.d.array().rowwise() *= out.ey.transpose().array();
    out.u.noalias() = out.d * basis_y_t_;
    out.rho.resize(nx_, ny_);
    out.vx.resize(nx_, ny_);
    out.vy.resize(nx_, ny_);
    out.rho.matrix().noalias() = basis_x_ * out.u;
    out.g.noalias() = dbasis_x_ * out.u;
    out.vx = -out.g.array() / out.rho.max(floor_);
    out.w.noalias() = out.d * dbasis_y_t_;
    out.g.noalias() = basis_x_ * out.w;
    out.vy = -out.g.array() / out.rho.max(floor_);
  }

  // Velocity at local coordinates (x, y) in [0, lx] x [0, ly]; queries are
  // clamped so intermediate integration stages cannot leave the ghost layer.
  Point velocity_at(const Snapshot& s, double x, double y) const {
    const double gx = std::clamp(x, 0.0, lx_) / hx_ - 0.5;
    const double gy = std::clamp(y, 0.0, ly_) / hy_ - 0.5;
    return {sample_ghost(s.vx, gx, gy, true, false),
            sample_ghost(s.vy, gx, gy, false, true)};
  }

  double lx() const { return lx_; }
  double ly() const { return ly_; }

 private:
  Eigen::Index nx_, ny_;
  double lx_ = 0.0, ly_ = 0.0, hx_ = 0.0, hy_ = 0.0, floor_ = 0.0;
  Eigen::MatrixXd basis_x_, basis_y_, basis_y_t_;
  Eigen::MatrixXd dbasis_x_, dbasis_y_, dbasis_y_t_;
  Eigen::VectorXd lambda_x_, lambda_y_;
  Eigen::MatrixXd coeff_;
};

double quad_signed_area(double x0, double y0, double x1, double y1, double x2,
                        double y2, double x3, double y3) {
  return 0.5 * ((x0 * y1 - x1 * y0) + (x1 * y2 - x2 * y1) +
                (x2 * y3 - x3 * y2) + (x3 * y0 - x0 * y3));
}

}  // namespace

void GridSpec::validate() const {
  require(power_of_two(nx) && nx >= 64, "nx must be a power of two >= 64");
  require(power_of_two(ny) && ny >= 64, "ny must be a power of two >= 64");
  require(std::isfinite(bbox.xmin) && std::isfinite(bbox.ymin) &&
              std::isfinite(bbox.xmax) && std::isfinite(bbox.ymax),
          "bbox must be finite");
  require(bbox.xmax > bbox.xmin && bbox.ymax > bbox.ymin,
          "bbox must be nondegenerate");
  require(std::isfinite(pad_factor) && pad_factor >= 1.0,
          "pad_factor must be >= 1");
}

Bounds GridSpec::padded() const {
  const double cx = 0.5 * (bbox.xmin + bbox.xmax);
  const double cy = 0.5 * (bbox.ymin + bbox.ymax);
  const double hw = 0.5 * bbox.width() * pad_factor;
  const double hh = 0.5 * bbox.height() * pad_factor;
  return {cx - hw, cy - hh, cx + hw, cy + hh};
}

DensityGrid DensityGrid::from_values(const GridSpec& spec,
                                     Eigen::ArrayXXd values) {
  DensityGrid grid;
  grid.spec = spec;
  grid.rho = std::move(values);
  grid.mean_rho = grid.rho.size() > 0 ? grid.rho.mean() : 0.0;
  grid.validate();
  return grid;
}

void DensityGrid::validate() const {
  spec.validate();
  require(rho.rows() == spec.nx && rho.cols() == spec.ny,
          "density grid dimensions must match the spec");
  require(rho.isFinite().all(), "density must be finite");
  require((rho >= 0.0).all(), "density must be nonnegative");
  require((rho > 0.0).any(), "density must be positive somewhere");
  require(std::isfinite(mean_rho) && mean_rho > 0.0,
          "mean density must be positive");
  require(std::abs(mean_rho - rho.mean()) <= 1e-12 * mean_rho,
          "mean_rho must equal the mean of rho");
}

void DisplacementField::validate() const {
  spec.validate();
  require(dx.rows() == spec.nx && dx.cols() == spec.ny &&
              dy.rows() == spec.nx && dy.cols() == spec.ny,
          "displacement field dimensions must match the spec");
  require(dx.isFinite().all() && dy.isFinite().all(),
          "displacement field must be finite");
}

Point DisplacementField::sample(const Point& p) const {
  const Bounds dom = spec.padded();
  require(dom.contains(p), "sample point lies outside the padded domain");
  const double gx = (p.x() - dom.xmin) / spec.cell_width() - 0.5;
  const double gy = (p.y() - dom.ymin) / spec.cell_height() - 0.5;
  return {sample_ghost(dx, gx, gy, true, false),
          sample_ghost(dy, gx, gy, false, true)};
}

DensityGrid rasterize_density(const RegionSet& regions, const GridSpec& spec) {
  regions.validate();
  spec.validate();
  const Bounds dom = spec.padded();
  const std::vector<Region>& rs = regions.regions;
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(rs.size());

  // Exact polygon areas fix each region's density; the raster only decides
  // how that density is distributed over cells.
  std::vector<double> density(rs.size(), 0.0);
  double stat_total = 0.0;
  double sea_num = 0.0;
  for (std::ptrdiff_t r = 0; r < nr; ++r) {
    for (const Ring& ring : rs[r].rings) {
      for (const Point& v : ring) {
        require(dom.contains(v),
                "region '" + rs[r].id + "' extends outside the padded bbox");
      }
    }
    if (rs[r].statistic > 0.0) {
      const double area = rs[r].area();
      require(area > 0.0, "region '" + rs[r].id +
                              "' has zero area but a positive statistic");
      density[r] = rs[r].statistic / area;
      stat_total += rs[r].statistic;
      sea_num += rs[r].statistic * density[r];
    }
  }
  const double sea = sea_num / stat_total;  // statistic-weighted land mean

  const Eigen::Index sup = kSupersample;
  const double hsx = spec.cell_width() / static_cast<double>(sup);
  const double hsy = spec.cell_height() / static_cast<double>(sup);
  const Eigen::Index snx = spec.nx * sup;
  const double wsub = 1.0 / static_cast<double>(sup * sup);

  Eigen::ArrayXXd posw = Eigen::ArrayXXd::Zero(spec.nx, spec.ny);
  Eigen::ArrayXXd zerow = Eigen::ArrayXXd::Zero(spec.nx, spec.ny);
  Eigen::ArrayXXd landw = Eigen::ArrayXXd::Zero(spec.nx, spec.ny);
  Eigen::ArrayXXd covered = Eigen::ArrayXXd::Zero(nr, spec.ny);
  std::vector<std::array<std::ptrdiff_t, 2>> clash(
      static_cast<std::size_t>(spec.ny), {-1, -1});

  // Even-odd scanline fill at subsample resolution, one cell row per task so
  // every thread owns whole columns of the accumulators.
  parallel_for(spec.ny, [&](std::ptrdiff_t j) {
    std::vector<std::ptrdiff_t> owner(static_cast<std::size_t>(snx));
    std::vector<double> xs;
    for (Eigen::Index jsub = 0; jsub < sup; ++jsub) {
      const double yc =
          dom.ymin +
          (static_cast<double>(j) * static_cast<double>(sup) +
           static_cast<double>(jsub) + 0.5) *
              hsy;
      std::fill(owner.begin(), owner.end(), std::ptrdiff_t{-1});
      for (std::ptrdiff_t r = 0; r < nr; ++r) {
        xs.clear();
        for (const Ring& ring : rs[r].rings) {
          for (std::size_t e = 0; e + 1 < ring.size(); ++e) {
            const Point& a = ring[e];
            const Point& b = ring[e + 1];
            if ((a.y() > yc) != (b.y() > yc)) {
              xs.push_back(a.x() +
                           (yc - a.y()) / (b.y() - a.y()) * (b.x() - a.x()));
            }
          }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t s = 0; s + 1 < xs.size(); s += 2) {
          // Subsample centers in the half-open span [xs[s], xs[s+1]).
          const double ga = (xs[s] - dom.xmin) / hsx - 0.5;
          const double gb = (xs[s + 1] - dom.xmin) / hsx - 0.5;
          std::ptrdiff_t ia = static_cast<std::ptrdiff_t>(std::ceil(ga));
          std::ptrdiff_t ib = static_cast<std::ptrdiff_t>(std::floor(gb));
          if (static_cast<double>(ib) == gb) --ib;
          ia = std::max<std::ptrdiff_t>(ia, 0);
          ib = std::min<std::ptrdiff_t>(ib, snx - 1);
          for (std::ptrdiff_t is = ia; is <= ib; ++is) {
            if (owner[static_cast<std::size_t>(is)] != -1) {
              if (clash[static_cast<std::size_t>(j)][0] == -1) {
                clash[static_cast<std::size_t>(j)] = {
                    owner[static_cast<std::size_t>(is)], r};
              }
              continue;
            }
            owner[static_cast<std::size_t>(is)] = r;
            const Eigen::Index cell = static_cast<Eigen::Index>(is) / sup;
            landw(cell, j) += wsub;
            if (rs[r].statistic > 0.0) {
              posw(cell, j) += density[r] * wsub;
            } else {
              zerow(cell, j) += wsub;
            }
            covered(r, j) += 1.0;
          }
        }
      }
    }
  });

  for (Eigen::Index j = 0; j < spec.ny; ++j) {
    const auto& c = clash[static_cast<std::size_t>(j)];
    if (c[0] != -1) {
      fail("regions '" + rs[static_cast<std::size_t>(c[0])].id + "' and '" +
           rs[static_cast<std::size_t>(c[1])].id + "' overlap");
    }
  }
  for (std::ptrdiff_t r = 0; r < nr; ++r) {
    if (rs[r].statistic > 0.0) {
      require(covered.row(r).sum() > 0.0,
              "region '" + rs[r].id + "' covers no grid cell");
    }
  }

  // Zero-statistic land is clamped to a small fraction of the mean density
  // (computed with that land still empty) rather than zero, so it compresses
  // without folding the map.
  const Eigen::ArrayXXd seaw = (1.0 - landw).max(0.0);
  const double provisional_mean = (posw + sea * seaw).mean();
  const double eps = kZeroStatFraction * provisional_mean;

  DensityGrid grid;
  grid.spec = spec;
  grid.rho = posw + eps * zerow + sea * seaw;
  grid.mean_rho = grid.rho.mean();
  grid.validate();
  return grid;
}

DisplacementField solve_displacement(const DensityGrid& grid, double tolerance,
                                     DiffusionStats* stats) {
  grid.validate();
  require(std::isfinite(tolerance) && tolerance > 0.0 && tolerance < 1.0,
          "tolerance must lie in (0, 1)");
  const GridSpec& spec = grid.spec;
  const Eigen::Index nx = spec.nx;
  const Eigen::Index ny = spec.ny;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(nx * ny);
  const double hx = spec.cell_width();
  const double hy = spec.cell_height();
  const double hmin = std::min(hx, hy);
  const double mean = grid.mean_rho;

  DisplacementField field;
  field.spec = spec;
  field.dx = Eigen::ArrayXXd::Zero(nx, ny);
  field.dy = Eigen::ArrayXXd::Zero(nx, ny);

  double residual = (grid.rho - mean).abs().maxCoeff() / mean;
  if (stats != nullptr) *stats = {residual, 0, 0};
  if (residual < tolerance) return field;

  const SpectralDiffusion diffusion(grid);
  const double lx = diffusion.lx();
  const double ly = diffusion.ly();

  // Cell-center tracers in local coordinates on [0, lx] x [0, ly]; the flat
  // index i + nx*j matches Eigen's column-major layout.
  Eigen::ArrayXd px0(n), py0(n), px(n), py(n), k1x(n), k1y(n);
  parallel_for(n, [&](std::ptrdiff_t idx) {
    const auto i = static_cast<double>(idx % nx);
    const auto j = static_cast<double>(idx / nx);
    px0(idx) = (i + 0.5) * hx;
    py0(idx) = (j + 0.5) * hy;
  });
  px = px0;
  py = py0;

  Snapshot cur, half, next;
  diffusion.snapshot(0.0, cur);

  const double t0 = hmin * hmin;
  double t_prev = 0.0;
  bool converged = false;
  int checkpoints = 0;
  long substeps = 0;
  for (int k = 0; k < kMaxCheckpoints && !converged; ++k) {
    const double t_end = t0 * std::ldexp(1.0, k);
    const double dt_floor = (t_end - t_prev) / static_cast<double>(kMaxSubsteps);
    double t = t_prev;
    while (t < t_end) {
      parallel_for(n, [&](std::ptrdiff_t idx) {
        const Point v = diffusion.velocity_at(cur, px(idx), py(idx));
        k1x(idx) = v.x();
        k1y(idx) = v.y();
      });
      const double vxmax = k1x.abs().maxCoeff();
      const double vymax = k1y.abs().maxCoeff();
      const double remaining = t_end - t;
      double dt = std::min(remaining, kTimeFraction * (t + t0));
      if (vxmax > 0.0) dt = std::min(dt, kCfl * hx / vxmax);
      if (vymax > 0.0) dt = std::min(dt, kCfl * hy / vymax);
      dt = std::max(dt, std::min(remaining, dt_floor));
      diffusion.snapshot(t + 0.5 * dt, half);
      diffusion.snapshot(t + dt, next);
      parallel_for(n, [&](std::ptrdiff_t idx) {
        const double x = px(idx);
        const double y = py(idx);
        const double v1x = k1x(idx);
        const double v1y = k1y(idx);
        const Point v2 =
            diffusion.velocity_at(half, x + 0.5 * dt * v1x, y + 0.5 * dt * v1y);
        const Point v3 = diffusion.velocity_at(half, x + 0.5 * dt * v2.x(),
                                               y + 0.5 * dt * v2.y());
        const Point v4 =
            diffusion.velocity_at(next, x + dt * v3.x(), y + dt * v3.y());
        px(idx) = std::clamp(
            x + dt / 6.0 * (v1x + 2.0 * v2.x() + 2.0 * v3.x() + v4.x()), 0.0,
            lx);
        py(idx) = std::clamp(
            y + dt / 6.0 * (v1y + 2.0 * v2.y() + 2.0 * v3.y() + v4.y()), 0.0,
            ly);
      });
      cur.swap(next);
      ++substeps;
      t = (dt >= remaining) ? t_end : t + dt;
    }
    residual = (cur.rho - mean).abs().maxCoeff() / mean;
    checkpoints = k + 1;
    t_prev = t_end;
    if (residual < tolerance) converged = true;
  }
  if (stats != nullptr) *stats = {residual, checkpoints, substeps};
  if (!converged) {
    std::ostringstream msg;
    msg << "diffusion did not reach tolerance " << tolerance << " within "
        << kMaxCheckpoints << " time doublings (achieved residual " << residual
        << ")";
    fail_convergence(msg.str());
  }

  const Eigen::ArrayXd flat_dx = px - px0;
  const Eigen::ArrayXd flat_dy = py - py0;
  field.dx = Eigen::Map<const Eigen::ArrayXXd>(flat_dx.data(), nx, ny);
  field.dy = Eigen::Map<const Eigen::ArrayXXd>(flat_dy.data(), nx, ny);
  return field;
}

RegionSet transform_regions(const RegionSet& regions,
                            const DisplacementField& field) {
  regions.validate();
  field.validate();
  const Bounds dom = field.spec.padded();
  RegionSet out = regions;
  for (Region& region : out.regions) {
    for (Ring& ring : region.rings) {
      for (Point& v : ring) {
        require(dom.contains(v), "vertex of region '" + region.id +
                                     "' lies outside the padded domain");
        v = field.apply(v);
      }
    }
  }
  return out;
}

AreaErrorReport area_error(const RegionSet& before, const RegionSet& after) {
  before.validate();
  after.validate();
  require(before.regions.size() == after.regions.size(),
          "region sets must contain the same ids");
  std::map<std::string, double> area_after;
  for (const Region& r : after.regions) area_after[r.id] = r.area();

  double stat_total = 0.0;
  double area_total = 0.0;
  for (const Region& r : before.regions) {
    require(area_after.count(r.id) == 1,
            "region '" + r.id + "' missing from the transformed set");
    stat_total += r.statistic;
    area_total += area_after[r.id];
  }
  require(area_total > 0.0, "transformed regions have zero total area");

  AreaErrorReport report;
  double sum = 0.0;
  for (const Region& r : before.regions) {
    if (r.statistic <= 0.0) continue;  // no target share to compare against
    const double share_stat = r.statistic / stat_total;
    const double share_area = area_after[r.id] / area_total;
    const double err = std::abs(share_area - share_stat) / share_stat;
    report.per_region[r.id] = err;
    report.max_err = std::max(report.max_err, err);
    sum += err;
  }
  report.mean_err = sum / static_cast<double>(report.per_region.size());
  return report;
}

void transformed_corners(const DisplacementField& field, Eigen::ArrayXXd& x,
                         Eigen::ArrayXXd& y) {
  field.validate();
  const GridSpec& spec = field.spec;
  const Bounds dom = spec.padded();
  const double hx = spec.cell_width();
  const double hy = spec.cell_height();
  x.resize(spec.nx + 1, spec.ny + 1);
  y.resize(spec.nx + 1, spec.ny + 1);
  parallel_for((spec.nx + 1) * (spec.ny + 1), [&](std::ptrdiff_t idx) {
    const Eigen::Index i = idx % (spec.nx + 1);
    const Eigen::Index j = idx / (spec.nx + 1);
    const Point corner(dom.xmin + static_cast<double>(i) * hx,
                       dom.ymin + static_cast<double>(j) * hy);
    const Point mapped = field.apply(corner);
    x(i, j) = mapped.x();
    y(i, j) = mapped.y();
  });
}

double total_transformed_area(const DisplacementField& field) {
  Eigen::ArrayXXd x, y;
  transformed_corners(field, x, y);
  double total = 0.0;
  for (Eigen::Index j = 0; j < field.spec.ny; ++j) {
    for (Eigen::Index i = 0; i < field.spec.nx; ++i) {
      total += quad_signed_area(x(i, j), y(i, j), x(i + 1, j), y(i + 1, j),
                                x(i + 1, j + 1), y(i + 1, j + 1), x(i, j + 1),
                                y(i, j + 1));
    }
  }
  return total;
}

long fold_over_count(const DisplacementField& field) {
  Eigen::ArrayXXd x, y;
  transformed_corners(field, x, y);
  long folds = 0;
  for (Eigen::Index j = 0; j < field.spec.ny; ++j) {
    for (Eigen::Index i = 0; i < field.spec.nx; ++i) {
      const double area =
          quad_signed_area(x(i, j), y(i, j), x(i + 1, j), y(i + 1, j),
                           x(i + 1, j + 1), y(i + 1, j + 1), x(i, j + 1),
                           y(i, j + 1));
      if (area < 0.0) ++folds;
    }
  }
  return folds;
}

}  // namespace crunch
