// traversability.hpp - binary traversability masks, contour extraction by
// border following, and the obstacle-point sampling that feeds the
// collision cost.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pixelnav/geometry.hpp"

namespace pixelnav {

/// Per-pixel binary traversability of one camera observation.
/// Row-major, true = traversable ground.
class TraversabilityMask {
 public:
  TraversabilityMask() = default;
  TraversabilityMask(int width, int height, bool fill = false)
      : width_(width), height_(height), bits_(static_cast<size_t>(width) * height, fill ? 1 : 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return bits_.empty(); }

  bool at(int u, int v) const { return bits_[static_cast<size_t>(v) * width_ + u] != 0; }
  void set(int u, int v, bool traversable) {
    bits_[static_cast<size_t>(v) * width_ + u] = traversable ? 1 : 0;
  }

  bool in_bounds(int u, int v) const { return u >= 0 && u < width_ && v >= 0 && v < height_; }

  /// Lookup for a real-valued pixel: rounds half-up to the integer grid;
  /// outside the image counts as non-traversable.
  bool at_pixel(const PixelPoint& p) const {
    const int u = round_half_up(p.u);
    const int v = round_half_up(p.v);
    return in_bounds(u, v) && at(u, v);
  }

  std::size_t count_traversable() const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  bool operator==(const TraversabilityMask& o) const {
    return width_ == o.width_ && height_ == o.height_ && bits_ == o.bits_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Integer pixel on a mask contour.
struct PixelCoord {
  int u = 0;
  int v = 0;
  bool operator==(const PixelCoord& o) const { return u == o.u && v == o.v; }
};

/// Closed chain of boundary pixels; consecutive entries are adjacent and the
/// chain implicitly closes back onto its first pixel.
using Contour = std::vector<PixelCoord>;

/// Extracts the borders of the traversable regions by raster-scan border
/// following (Suzuki-style, run with 4-connected foreground so that every
/// traversable pixel with a non-traversable 8-neighbour - or an image-border
/// contact - lands on some contour). Outer borders and hole borders are both
/// followed; each becomes one closed chain. Returns an empty list for an
/// all-non-traversable mask; an all-traversable mask yields a single chain
/// tracing the image border.
std::vector<Contour> extract_contours(const TraversabilityMask& mask);

/// Obstacle pixels sampled from mask contours, ready for backprojection.
struct ObstaclePointSet {
  std::vector<PixelPoint> points;
  std::size_t count() const { return points.size(); }
};

/// Uniform without-replacement sample of min(n_per_contour, eligible) pixels
/// per contour. A contour pixel is eligible when it backprojects (strictly
/// below the horizon margin) and does not lie on the image's bottom row or
/// side columns, which bound the field of view rather than obstacles.
/// Deterministic for a given rng_seed.
ObstaclePointSet sample_obstacle_points(const std::vector<Contour>& contours,
                                        const CameraModel& cam, int n_per_contour,
                                        std::uint64_t rng_seed);

/// Seam for plugging a learned segmentation model or the simulator oracle.
/// The observation is the viewpoint the current image was taken from; a real
/// estimator would carry the image itself behind this interface and apply
/// its binary segmentation threshold before returning.
class TraversabilityEstimator {
 public:
  virtual ~TraversabilityEstimator() = default;
  virtual TraversabilityMask estimate(const Pose2& observed_from) = 0;
};

// --- mask file format -------------------------------------------------
// Binary PGM (P5), 8-bit, 255 = traversable, 0 = non-traversable.

void save_mask_pgm(const TraversabilityMask& mask, const std::string& path);
TraversabilityMask load_mask_pgm(const std::string& path);

}  // namespace pixelnav
