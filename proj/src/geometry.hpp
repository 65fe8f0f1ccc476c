#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"
#include "se_bound.hpp"

namespace eeopt {

struct MonteCarloConfig {
  long trials = 10000;
  int max_interferers = 1000;      // interfering cells kept per draw, nearest first
  double disk_radius_factor = 1.2; // generated-BS count = factor * max_interferers on
                                   // average; the surplus beyond the kept cells acts as
                                   // an outer boundary guard for UE placement
  uint64_t seed = 0;
  int ue_rejection_cap = 10000;    // placement draws per UE before the whole
                                   // geometry is thrown away and resampled
};

// Draws the network as seen by a typical UE at the origin: serving BS at the
// nearest-point distance, interfering BSs on the annulus beyond it, K UEs
// placed uniformly in each kept cell's service region by rejection against
// all sampled BSs. Cells come back sorted by BS distance from the origin.
GeometryRealization sample_typical_geometry(double lambda, int K,
                                            const MonteCarloConfig& cfg,
                                            Philox& stream);

// Buffer-reusing form of the same sampler for hot loops; one instance per
// worker, geometry overwritten in place.
class GeometrySampler {
 public:
  GeometrySampler(double lambda, int K, const MonteCarloConfig& cfg);
  void sample(Philox& stream, GeometryRealization& out);

 private:
  bool try_sample(Philox& stream, GeometryRealization& out);

  double lambda_;
  int k_;
  MonteCarloConfig cfg_;
  double h_;        // 1/sqrt(pi*lambda), the mean-cell-area length scale
  double ue_disk_;  // placement proposal radius, 3h

  // scratch reused across draws
  std::vector<double> r2_;
  std::vector<double> bx_, by_;
  std::vector<int> cnt_, slot_, cell_of_;
  std::vector<double> gx_, gy_;
  struct Neighbor {
    double d2;
    double x, y;
  };
  std::vector<Neighbor> near_;
  struct HalfPlane {
    double nx, ny, c;  // interior is nx*px + ny*py <= c, BS at the local origin
  };
  std::vector<HalfPlane> cell_planes_;
  std::vector<double> vx_, vy_, wx_, wy_;  // polygon clip buffers
};

}  // namespace eeopt
