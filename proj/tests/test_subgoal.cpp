#include <doctest.h>

#include <cmath>
#include <random>

#include "pixelnav/subgoal.hpp"

using namespace pixelnav;

namespace {

const CameraModel kCam{100.0, 100.0, 160.0, 120.0, 0.5, 320, 240};

TraversabilityMask below_horizon_mask(const CameraModel& cam) {
  TraversabilityMask m(cam.width, cam.height);
  for (int v = static_cast<int>(cam.cy) + 1; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) m.set(u, v, true);
  }
  return m;
}

// Independent oracle for the straight-ahead case: walk the documented rule
// directly (sample ranges, project, segment, 2/3 point) without reusing the
// implementation.
PixelCoord straight_ray_oracle(const CameraModel& cam, const TraversabilityMask& m,
                               const RayTraceParams& p) {
  double near_v = -1.0, far_v = -1.0;
  for (double d = p.d_min; d <= p.d_max + 1e-9; d += p.d_step) {
    const double v = cam.cy + cam.fy * cam.h_cam / d;
    const int vi = static_cast<int>(std::floor(v + 0.5));
    const int ui = static_cast<int>(std::floor(cam.cx + 0.5));
    const bool ok = vi >= 0 && vi < cam.height && m.at(ui, vi);
    if (near_v < 0.0) {
      if (ok) near_v = far_v = v;
    } else {
      if (!ok) break;
      far_v = v;
    }
  }
  const double target = near_v + (2.0 / 3.0) * (far_v - near_v);
  return {static_cast<int>(std::floor(cam.cx + 0.5)), static_cast<int>(std::floor(target + 0.5))};
}

TraversabilityMask mirrored(const TraversabilityMask& m) {
  TraversabilityMask out(m.width(), m.height());
  for (int v = 0; v < m.height(); ++v) {
    for (int u = 0; u < m.width(); ++u) out.set(m.width() - 1 - u, v, m.at(u, v));
  }
  return out;
}

}  // namespace

TEST_CASE("straight-ahead ray on an open mask lands at 2/3 of the segment") {
  const TraversabilityMask m = below_horizon_mask(kCam);
  const SubgoalPixel sg = select_subgoal_pixel(m, kCam, 0.0);
  CHECK(sg.mode == SubgoalMode::kOnRay);
  CHECK(sg.p.u == 160.0);

  const PixelCoord expected = straight_ray_oracle(kCam, m, {});
  CHECK(sg.p.u == static_cast<double>(expected.u));
  CHECK(sg.p.v == static_cast<double>(expected.v));
  // Frozen from the oracle: near row 231.1 (d = 0.45), far row 122.5
  // (d = 20), 2/3 point rounds to 159.
  CHECK(sg.p.v == 159.0);
}

TEST_CASE("blocked center column falls back to the closest traversable pixel") {
  // Traversable only in columns 0..149, below the horizon.
  TraversabilityMask m(kCam.width, kCam.height);
  for (int v = 121; v < kCam.height; ++v) {
    for (int u = 0; u < 150; ++u) m.set(u, v, true);
  }
  const SubgoalPixel sg = select_subgoal_pixel(m, kCam, 0.0);
  CHECK(sg.mode == SubgoalMode::kFallbackClosest);
  CHECK(sg.p.u == 149.0);  // minimal column distance to the ray at u = 160
  CHECK(sg.p.v == 121.0);  // tie-break: lowest v
}

TEST_CASE("empty mask raises NoTraversableRegion") {
  CHECK_THROWS_AS(select_subgoal_pixel(TraversabilityMask(kCam.width, kCam.height), kCam, 0.0),
                  NoTraversableRegion);
}

TEST_CASE("mask/camera dimension mismatch is rejected") {
  CHECK_THROWS_AS(select_subgoal_pixel(TraversabilityMask(64, 48, true), kCam, 0.0),
                  std::invalid_argument);
}

TEST_CASE("segment ends before the first blocked ray sample") {
  // Rows 150..239 are open; rows 121..149 form a blocking band. The chosen
  // pixel must stay at or below the band's lower edge.
  TraversabilityMask m(kCam.width, kCam.height);
  for (int v = 150; v < kCam.height; ++v) {
    for (int u = 0; u < kCam.width; ++u) m.set(u, v, true);
  }
  const SubgoalPixel sg = select_subgoal_pixel(m, kCam, 0.0);
  CHECK(sg.mode == SubgoalMode::kOnRay);
  CHECK(sg.p.v >= 150.0);

  std::mt19937_64 rng(71);
  for (int iter = 0; iter < 20; ++iter) {
    const int band_top = 130 + static_cast<int>(rng() % 80);
    TraversabilityMask mask(kCam.width, kCam.height);
    for (int v = band_top; v < kCam.height; ++v) {
      for (int u = 0; u < kCam.width; ++u) mask.set(u, v, true);
    }
    const SubgoalPixel s = select_subgoal_pixel(mask, kCam, 0.0);
    CHECK(s.p.v >= static_cast<double>(band_top));
  }
}

TEST_CASE("returned pixel is always traversable") {
  std::mt19937_64 rng(101);
  std::bernoulli_distribution coin(0.35);
  std::uniform_real_distribution<double> ualpha(-kPi, kPi);
  for (int iter = 0; iter < 40; ++iter) {
    TraversabilityMask m(kCam.width, kCam.height);
    bool any = false;
    for (int v = 121; v < kCam.height; v += 1) {
      for (int u = 0; u < kCam.width; ++u) {
        const bool t = coin(rng);
        m.set(u, v, t);
        any |= t;
      }
    }
    if (!any) continue;
    const SubgoalPixel sg = select_subgoal_pixel(m, kCam, ualpha(rng));
    CHECK(m.at(static_cast<int>(sg.p.u), static_cast<int>(sg.p.v)));
  }
}

TEST_CASE("alpha = 0 on a laterally symmetric mask selects the center column") {
  std::mt19937_64 rng(55);
  for (int iter = 0; iter < 25; ++iter) {
    TraversabilityMask m = below_horizon_mask(kCam);
    // Random symmetric blobs, keeping a clear strip near the center columns.
    for (int b = 0; b < 6; ++b) {
      const int cu = 8 + static_cast<int>(rng() % 140);
      const int cv = 130 + static_cast<int>(rng() % 100);
      const int r = 2 + static_cast<int>(rng() % 10);
      if (cu + r >= 155) continue;
      for (int v = cv - r; v <= cv + r; ++v) {
        for (int u = cu - r; u <= cu + r; ++u) {
          if (m.in_bounds(u, v)) {
            m.set(u, v, false);
            m.set(m.width() - 1 - u, v, false);
          }
        }
      }
    }
    const SubgoalPixel sg = select_subgoal_pixel(m, kCam, 0.0);
    CHECK(std::abs(sg.p.u - kCam.cx) <= 1.0);
  }
}

TEST_CASE("mirroring the mask and negating alpha mirrors the pixel") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ualpha(-0.45, 0.45);
  for (int iter = 0; iter < 30; ++iter) {
    const double alpha = ualpha(rng);
    TraversabilityMask m = below_horizon_mask(kCam);
    std::bernoulli_distribution coin(0.2);
    for (int b = 0; b < 10; ++b) {
      const int cu = 10 + static_cast<int>(rng() % 300);
      const int cv = 125 + static_cast<int>(rng() % 105);
      const int r = 2 + static_cast<int>(rng() % 8);
      for (int v = cv - r; v <= cv + r; ++v) {
        for (int u = cu - r; u <= cu + r; ++u) {
          if (m.in_bounds(u, v)) m.set(u, v, false);
        }
      }
    }
    const SubgoalPixel a = select_subgoal_pixel(m, kCam, alpha);
    const SubgoalPixel b = select_subgoal_pixel(mirrored(m), kCam, -alpha);
    const double mirrored_u = (kCam.width - 1) - a.p.u;
    CHECK(std::abs(b.p.u - mirrored_u) <= 1.0 + 1e-9);
  }
}

TEST_CASE("oracle yaw is the wrapped heading difference") {
  TopoNode node;
  node.pose.phi = kPi / 4.0;
  CHECK(oracle_yaw({0, 0, 0}, node).alpha == doctest::Approx(kPi / 4.0));
  CHECK(oracle_yaw({0, 0, kPi / 4.0}, node).alpha == doctest::Approx(0.0));

  node.pose.phi = 3.0 * kPi / 4.0;
  const YawEstimate wrapped = oracle_yaw({0, 0, -3.0 * kPi / 4.0}, node);
  CHECK(wrapped.alpha == doctest::Approx(-kPi / 2.0));
  CHECK(wrapped.valid);
}

TEST_CASE("oracle yaw noise is seed-deterministic and wrapped") {
  TopoNode node;
  node.pose.phi = 0.1;
  std::mt19937_64 rng1(7), rng2(7);
  const YawEstimate a = oracle_yaw({0, 0, 0}, node, 0.5, rng1);
  const YawEstimate b = oracle_yaw({0, 0, 0}, node, 0.5, rng2);
  CHECK(a.alpha == b.alpha);
  CHECK(a.alpha > -kPi);
  CHECK(a.alpha <= kPi);
  // sigma = 0 draws nothing from the stream.
  std::mt19937_64 rng3(7);
  const YawEstimate c = oracle_yaw({0, 0, 0}, node, 0.0, rng3);
  CHECK(c.alpha == doctest::Approx(0.1));
  CHECK(rng3() == std::mt19937_64(7)());
}
