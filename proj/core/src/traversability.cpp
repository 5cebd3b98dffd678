#include "pixelnav/traversability.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "pixelnav/rng.hpp"

namespace pixelnav {

std::size_t TraversabilityMask::count_traversable() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

// Border following works on a zero-framed int image; labels overwrite the
// initial 0/1 values as borders get traced. 4-connected foreground (so the
// background is 8-connected): traced chains step between 4-neighbours and
// cannot skip past pixels whose only background contact is diagonal.
struct BorderFollower {
  int w, h;                // padded dims
  std::vector<int> f;      // (h) x (w), row-major

  // Clockwise 4-neighbourhood in image coordinates (row down): E, S, W, N.
  static constexpr int kDi[4] = {0, 1, 0, -1};
  static constexpr int kDj[4] = {1, 0, -1, 0};

  int& at(int i, int j) { return f[static_cast<size_t>(i) * w + j]; }

  // Direction index of (i2,j2) relative to (i,j); the caller guarantees
  // 4-adjacency.
  static int dir_of(int i, int j, int i2, int j2) {
    for (int d = 0; d < 4; ++d) {
      if (i + kDi[d] == i2 && j + kDj[d] == j2) return d;
    }
    return -1;
  }

  // Step 3.1: first nonzero 4-neighbour of (i,j), searching clockwise
  // starting at direction d0 (inclusive). Returns direction or -1.
  int search_clockwise(int i, int j, int d0) {
    for (int k = 0; k < 4; ++k) {
      const int d = (d0 + k) & 3;
      if (at(i + kDi[d], j + kDj[d]) != 0) return d;
    }
    return -1;
  }

  // Step 3.3: first nonzero 4-neighbour of (i,j), searching counterclockwise
  // starting AFTER direction d_prev; may come back around to d_prev itself.
  // Sets east_zero when the east neighbour was examined and found zero.
  int search_counterclockwise(int i, int j, int d_prev, bool& east_zero) {
    east_zero = false;
    for (int k = 1; k <= 4; ++k) {
      const int d = (d_prev - k) & 3;
      if (at(i + kDi[d], j + kDj[d]) != 0) return d;
      if (d == 0) east_zero = true;  // east examined, zero
    }
    return -1;
  }

  Contour follow(int si, int sj, int from_dir, int nbd) {
    Contour contour;
    const int d1 = search_clockwise(si, sj, from_dir);
    if (d1 < 0) {
      // Isolated pixel.
      at(si, sj) = -nbd;
      contour.push_back({sj - 1, si - 1});
      return contour;
    }
    const int i1 = si + kDi[d1], j1 = sj + kDj[d1];

    int i2 = i1, j2 = j1;
    int i3 = si, j3 = sj;
    while (true) {
      bool east_zero = false;
      const int d4 = search_counterclockwise(i3, j3, dir_of(i3, j3, i2, j2), east_zero);
      const int i4 = i3 + kDi[d4], j4 = j3 + kDj[d4];

      if (east_zero) {
        at(i3, j3) = -nbd;
      } else if (at(i3, j3) == 1) {
        at(i3, j3) = nbd;
      }
      contour.push_back({j3 - 1, i3 - 1});

      if (i4 == si && j4 == sj && i3 == i1 && j3 == j1) break;
      i2 = i3;
      j2 = j3;
      i3 = i4;
      j3 = j4;
    }
    return contour;
  }
};

}  // namespace

std::vector<Contour> extract_contours(const TraversabilityMask& mask) {
  std::vector<Contour> contours;
  if (mask.empty()) return contours;

  BorderFollower bf;
  bf.w = mask.width() + 2;
  bf.h = mask.height() + 2;
  bf.f.assign(static_cast<size_t>(bf.w) * bf.h, 0);
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (mask.at(u, v)) bf.at(v + 1, u + 1) = 1;
    }
  }

  int nbd = 1;  // 1 is reserved for the frame
  for (int i = 1; i <= mask.height(); ++i) {
    for (int j = 1; j <= mask.width(); ++j) {
      const int fij = bf.at(i, j);
      if (fij == 1 && bf.at(i, j - 1) == 0) {
        // Outer border start; begin the search at the west neighbour.
        ++nbd;
        contours.push_back(bf.follow(i, j, 2, nbd));
      } else if (fij >= 1 && bf.at(i, j + 1) == 0) {
        // Hole border start; begin at the east neighbour.
        ++nbd;
        contours.push_back(bf.follow(i, j, 0, nbd));
      }
    }
  }
  return contours;
}

ObstaclePointSet sample_obstacle_points(const std::vector<Contour>& contours,
                                        const CameraModel& cam, int n_per_contour,
                                        std::uint64_t rng_seed) {
  if (n_per_contour < 1) throw std::invalid_argument("n_per_contour must be >= 1");

  ObstaclePointSet out;
  std::mt19937_64 rng(splitmix64(rng_seed));
  const double horizon = cam.cy + kHorizonMarginPx;

  for (const Contour& contour : contours) {
    // Distinct eligible pixels in first-occurrence order (chains may revisit
    // pixels on 1-px-wide spurs).
    std::vector<PixelCoord> eligible;
    std::unordered_set<std::int64_t> seen;
    for (const PixelCoord& p : contour) {
      if (p.v <= horizon) continue;                                  // not backprojectable
      if (p.v == cam.height - 1) continue;                           // bottom FOV border
      if (p.u == 0 || p.u == cam.width - 1) continue;                // side FOV borders
      const std::int64_t key = static_cast<std::int64_t>(p.v) * cam.width + p.u;
      if (seen.insert(key).second) eligible.push_back(p);
    }

    const std::size_t k = std::min<std::size_t>(n_per_contour, eligible.size());
    // Partial Fisher-Yates keeps the draw uniform without replacement.
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
      std::swap(eligible[i], eligible[pick(rng)]);
      out.points.push_back({static_cast<double>(eligible[i].u), static_cast<double>(eligible[i].v)});
    }
  }
  return out;
}

// --- PGM ---------------------------------------------------------------

void save_mask_pgm(const TraversabilityMask& mask, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  std::vector<unsigned char> row(mask.width());
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) row[u] = mask.at(u, v) ? 255 : 0;
    os.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

int next_pgm_token(std::istream& is) {
  // Skips whitespace and '#' comments, then parses one integer.
  while (true) {
    const int c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      break;
    }
  }
  int value = -1;
  is >> value;
  return value;
}

}  // namespace

TraversabilityMask load_mask_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw std::runtime_error("not a binary PGM (P5): " + path);
  const int w = next_pgm_token(is);
  const int h = next_pgm_token(is);
  const int maxval = next_pgm_token(is);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw std::runtime_error("malformed PGM header: " + path);
  }
  is.get();  // single whitespace after maxval
  TraversabilityMask mask(w, h);
  std::vector<unsigned char> row(w);
  for (int v = 0; v < h; ++v) {
    is.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!is) throw std::runtime_error("truncated PGM data: " + path);
    for (int u = 0; u < w; ++u) mask.set(u, v, row[u] > 127);
  }
  return mask;
}

}  // namespace pixelnav
