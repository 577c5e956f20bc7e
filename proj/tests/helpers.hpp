#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "crunch/data.hpp"
#include "crunch/geometry.hpp"

namespace crunch::testing {

// Axis-aligned square ring, counterclockwise, with each side split into
// `segments` pieces. Extra collinear vertices let a transformed ring follow
// the curved image of the square instead of cutting chords between corners.
inline Ring square_ring(double x0, double y0, double size, int segments = 1) {
  Ring ring;
  const double step = size / segments;
  for (int i = 0; i < segments; ++i)
    ring.push_back({x0 + step * i, y0});
  for (int i = 0; i < segments; ++i)
    ring.push_back({x0 + size, y0 + step * i});
  for (int i = 0; i < segments; ++i)
    ring.push_back({x0 + size - step * i, y0 + size});
  for (int i = 0; i < segments; ++i)
    ring.push_back({x0, y0 + size - step * i});
  ring.push_back({x0, y0});
  return ring;
}

inline Region square_region(const std::string& id, double statistic, double x0,
                            double y0, double size, int segments = 1) {
  Region region;
  region.id = id;
  region.statistic = statistic;
  region.rings.push_back(square_ring(x0, y0, size, segments));
  return region;
}

// The workhorse cartogram fixture: unit squares at x=0 and x=2 carrying
// statistics 1 and 3, so the equalized map must hold area shares 1/4 : 3/4.
inline RegionSet two_squares(int segments = 64) {
  RegionSet set;
  set.regions.push_back(square_region("west", 1.0, 0.0, 0.0, 1.0, segments));
  set.regions.push_back(square_region("east", 3.0, 2.0, 0.0, 1.0, segments));
  return set;
}

// Deterministic uniforms/normals/Pareto draws. The std distributions are not
// pinned across library versions, so tests roll their own from raw bits.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  }

  double normal() {  // Box-Muller, one value per call
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double pareto(double alpha, double xmin = 1.0) {  // inverse CDF
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return xmin * std::pow(u, -1.0 / alpha);
  }
};

// Self-removing scratch directory for pipeline/CLI tests.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      path_ = base / (tag + "-" + std::to_string(::getpid()) + "-" +
                      std::to_string(i));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace crunch::testing
