#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace eeopt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

}  // namespace

GeometrySampler::GeometrySampler(double lambda, int K, const MonteCarloConfig& cfg)
    : lambda_(lambda), k_(K), cfg_(cfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("GeometrySampler: need lambda > 0");
  if (K < 1) throw std::invalid_argument("GeometrySampler: need K >= 1");
  if (cfg.max_interferers < 0)
    throw std::invalid_argument("GeometrySampler: need max_interferers >= 0");
  if (!(cfg.disk_radius_factor >= 1.0))
    throw std::invalid_argument("GeometrySampler: need disk_radius_factor >= 1");
  if (cfg.ue_rejection_cap < 1)
    throw std::invalid_argument("GeometrySampler: need ue_rejection_cap >= 1");
  h_ = 1.0 / std::sqrt(kPi * lambda);
  ue_disk_ = 3.0 * h_;
}

void GeometrySampler::sample(Philox& stream, GeometryRealization& out) {
  out.resamples = 0;
  while (!try_sample(stream, out)) ++out.resamples;
}

bool GeometrySampler::try_sample(Philox& stream, GeometryRealization& out) {
  // Serving distance: nearest point of the BS process to the origin.
  const double d0sq = -std::log(stream.uniform()) / (kPi * lambda_);
  const double d0 = std::sqrt(d0sq);
  out.serving_distance = d0;

  const int cap = cfg_.max_interferers;
  int n = 0;
  double r2max = d0sq;
  if (cap > 0) {
    // Annulus sized so the expected BS count is factor * cap; everything is
    // sampled, the nearest `cap` become statistics cells and the surplus
    // only blocks UE placement near the outer rim.
    r2max = d0sq + cfg_.disk_radius_factor * cap / (kPi * lambda_);
    std::poisson_distribution<int> pois(kPi * lambda_ * (r2max - d0sq));
    n = pois(stream);
  }

  r2_.resize(n);
  for (int i = 0; i < n; ++i) r2_[i] = d0sq + (r2max - d0sq) * stream.uniform32();
  std::sort(r2_.begin(), r2_.end());

  // BS index 0 is the serving BS, placed on the positive x axis; the draw is
  // rotation invariant around the typical UE.
  bx_.resize(n + 1);
  by_.resize(n + 1);
  bx_[0] = d0;
  by_[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::sqrt(r2_[i]);
    const double t = kTwoPi * stream.uniform32();
    bx_[i + 1] = r * std::cos(t);
    by_[i + 1] = r * std::sin(t);
  }

  const int kept = std::min(cap, n);
  out.cells.resize(kept);

  // Uniform hash grid over all BSs, pitched at twice the mean-cell length so
  // a gather touches ~7x7 grid cells.
  const double pitch = 2.0 * h_;
  const double ext = std::sqrt(r2max) + pitch;
  const int ng = static_cast<int>(2.0 * ext / pitch) + 2;
  const int ncell = ng * ng;
  cnt_.assign(ncell + 1, 0);
  cell_of_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const int cx = static_cast<int>((bx_[i] + ext) / pitch);
    const int cy = static_cast<int>((by_[i] + ext) / pitch);
    const int ci = cy * ng + cx;
    cell_of_[i] = ci;
    ++cnt_[ci + 1];
  }
  for (int c = 0; c < ncell; ++c) cnt_[c + 1] += cnt_[c];
  slot_ = cnt_;
  gx_.resize(n + 1);
  gy_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const int ci = cell_of_[i];
    gx_[slot_[ci]] = bx_[i];
    gy_[slot_[ci]] = by_[i];
    ++slot_[ci];
  }

  const double gather_r = 2.0 * ue_disk_;  // a blocker can only matter within
                                           // twice the proposal radius
  for (int j = 1; j <= kept; ++j) {
    const double xj = bx_[j], yj = by_[j];
    InterferingCell& cell = out.cells[j - 1];
    cell.bs_x = xj;
    cell.bs_y = yj;
    cell.ue.resize(k_);

    // All BSs near enough to ever reject a proposal for this cell, sorted by
    // distance to the cell's BS so proposal tests can stop early.
    near_.clear();
    int x0 = static_cast<int>((xj - gather_r + ext) / pitch);
    int x1 = static_cast<int>((xj + gather_r + ext) / pitch);
    int y0 = static_cast<int>((yj - gather_r + ext) / pitch);
    int y1 = static_cast<int>((yj + gather_r + ext) / pitch);
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, ng - 1);
    y1 = std::min(y1, ng - 1);
    const double gr2 = gather_r * gather_r;
    for (int cy = y0; cy <= y1; ++cy) {
      for (int cx = x0; cx <= x1; ++cx) {
        const int ci = cy * ng + cx;
        for (int s = cnt_[ci]; s < cnt_[ci + 1]; ++s) {
          const double dx = gx_[s] - xj;
          const double dy = gy_[s] - yj;
          const double d2 = dx * dx + dy * dy;
          // d2 == 0 is the cell's own BS; it can never reject its own proposal.
          if (d2 > 0.0 && d2 <= gr2) near_.push_back({d2, gx_[s], gy_[s]});
        }
      }
    }
    std::sort(near_.begin(), near_.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.d2 < b.d2; });

    // The acceptance region is the Voronoi cell clipped to the proposal disk.
    // Build it once per cell as a convex polygon: start from the bounding
    // square and cut with each neighbor's bisector half-plane (in BS-local
    // coordinates the interior is n.p <= |n|^2/2). Proposals are then drawn
    // from the polygon's covering disk, which accepts the exact same region
    // as the fixed-radius disk but wastes far fewer draws on small cells.
    const double disk2 = ue_disk_ * ue_disk_;
    cell_planes_.clear();
    vx_.clear();
    vy_.clear();
    vx_.insert(vx_.end(), {ue_disk_, -ue_disk_, -ue_disk_, ue_disk_});
    vy_.insert(vy_.end(), {ue_disk_, ue_disk_, -ue_disk_, -ue_disk_});
    double cover2 = 2.0 * disk2;  // max |vertex|^2, square corners to start
    for (const Neighbor& nb : near_) {
      // A bisector whose line stays outside the covering disk cannot cut,
      // and neighbors are sorted, so the rest cannot either.
      if (nb.d2 >= 4.0 * cover2) break;
      const double nx = nb.x - xj;
      const double ny = nb.y - yj;
      const double c = 0.5 * nb.d2;
      wx_.clear();
      wy_.clear();
      bool cut = false;
      const size_t nv = vx_.size();
      double ax = vx_[nv - 1], ay = vy_[nv - 1];
      double sa = nx * ax + ny * ay - c;
      for (size_t i = 0; i < nv; ++i) {
        const double bx = vx_[i], by = vy_[i];
        const double sb = nx * bx + ny * by - c;
        if (sa <= 0.0) {
          wx_.push_back(ax);
          wy_.push_back(ay);
          if (sb > 0.0) {
            const double t = sa / (sa - sb);
            wx_.push_back(ax + t * (bx - ax));
            wy_.push_back(ay + t * (by - ay));
            cut = true;
          }
        } else {
          cut = true;
          if (sb <= 0.0) {
            const double t = sa / (sa - sb);
            wx_.push_back(ax + t * (bx - ax));
            wy_.push_back(ay + t * (by - ay));
          }
        }
        ax = bx;
        ay = by;
        sa = sb;
      }
      if (!cut) continue;  // polygon already inside this half-plane: redundant
                           // now, and it stays redundant as the polygon shrinks
      vx_.swap(wx_);
      vy_.swap(wy_);
      cell_planes_.push_back({nx, ny, c});
      if (vx_.size() < 3) break;  // FP-degenerate sliver: stop trusting the
                                  // polygon and fall back below
      cover2 = 0.0;
      for (size_t i = 0; i < vx_.size(); ++i)
        cover2 = std::max(cover2, vx_[i] * vx_[i] + vy_[i] * vy_[i]);
    }
    if (vx_.size() < 3) {
      // Exact fallback: test every gathered bisector over the full disk.
      cell_planes_.clear();
      for (const Neighbor& nb : near_)
        cell_planes_.push_back({nb.x - xj, nb.y - yj, 0.5 * nb.d2});
      cover2 = disk2;
    }

    const double r2cap = std::min(cover2, disk2);
    const double side = std::sqrt(r2cap);
    for (int slot = 0; slot < k_; ++slot) {
      bool placed = false;
      double px = 0.0, py = 0.0, rad2 = 0.0;
      for (int attempt = 0; attempt < cfg_.ue_rejection_cap; ++attempt) {
        px = side * (2.0 * stream.uniform32() - 1.0);
        py = side * (2.0 * stream.uniform32() - 1.0);
        rad2 = px * px + py * py;
        if (rad2 >= r2cap) continue;
        bool inside = true;
        for (const HalfPlane& hp : cell_planes_) {
          if (hp.nx * px + hp.ny * py > hp.c) {
            inside = false;
            break;
          }
        }
        if (inside) {
          placed = true;
          break;
        }
      }
      if (!placed) return false;  // cell area too small for the proposal disk:
                                  // resample the whole geometry
      const double ux = xj + px;
      const double tx = ux - d0;
      const double uy = yj + py;
      cell.ue[slot].own_bs = std::sqrt(rad2);
      cell.ue[slot].typical_bs = std::sqrt(tx * tx + uy * uy);
    }
  }
  return true;
}

GeometryRealization sample_typical_geometry(double lambda, int K,
                                            const MonteCarloConfig& cfg,
                                            Philox& stream) {
  GeometrySampler sampler(lambda, K, cfg);
  GeometryRealization out;
  sampler.sample(stream, out);
  return out;
}

}  // namespace eeopt
