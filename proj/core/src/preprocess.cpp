#include "binpick/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "binpick/errors.hpp"

namespace binpick {

namespace {

// Reads the next PGM header token, skipping whitespace and # comments.
std::string next_pgm_token(std::istream& in) {
  std::string tok;
  for (;;) {
    const int c = in.peek();
    if (c == EOF) return tok;
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
      continue;
    }
    in >> tok;
    return tok;
  }
}

}  // namespace

DepthImage load_depth_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open `" + path.string() + "` for reading");

  const std::string magic = next_pgm_token(in);
  if (magic != "P2" && magic != "P5") throw ParseError("not a PGM (want P2 or P5)", 1);

  auto parse_int = [&](const char* what) {
    const std::string tok = next_pgm_token(in);
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("bad PGM ") + what + " `" + tok + "`", 1);
    }
  };

  const long width = parse_int("width");
  const long height = parse_int("height");
  const long maxval = parse_int("maxval");
  if (width <= 0 || height <= 0) throw ParseError("non-positive PGM dimensions", 1);
  if (maxval <= 0 || maxval > 65535) throw ParseError("PGM maxval out of range", 1);

  DepthImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  img.depths.resize(n);

  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string tok = next_pgm_token(in);
      if (tok.empty()) throw ParseError("PGM body ended early", 1);
      long v = 0;
      try {
        v = std::stol(tok);
      } catch (const std::exception&) {
        throw ParseError("bad PGM sample `" + tok + "`", 1);
      }
      img.depths[i] = static_cast<double>(v) / 1000.0;  // mm -> m
    }
  } else {
    in.get();  // single whitespace after maxval
    const bool two_byte = maxval > 255;
    std::vector<unsigned char> raw(n * (two_byte ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw ParseError("PGM body shorter than width*height", 1);
    for (std::size_t i = 0; i < n; ++i) {
      const long v = two_byte
                         ? (static_cast<long>(raw[2 * i]) << 8) | static_cast<long>(raw[2 * i + 1])
                         : static_cast<long>(raw[i]);
      img.depths[i] = static_cast<double>(v) / 1000.0;
    }
  }
  return img;
}

PointCloud depth_to_cloud(const DepthImage& img) {
  if (img.fx <= 0 || img.fy <= 0) throw Error("depth intrinsics fx, fy must be > 0");
  PointCloud cloud;
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const double z = img.at(u, v);
      if (z <= 0.0) continue;
      cloud.points.emplace_back((static_cast<double>(u) - img.cx) * z / img.fx,
                                (static_cast<double>(v) - img.cy) * z / img.fy, z);
    }
  }
  return cloud;
}

FilterResult passthrough_filter(const PointCloud& cloud, const Aabb& box) {
  if (!box.valid()) throw Error("passthrough box has min > max");
  FilterResult out;
  std::vector<int> keep;
  keep.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (box.contains(cloud.points[i])) keep.push_back(static_cast<int>(i));
  }
  out.cloud = cloud.select(keep);
  out.retained = std::move(keep);
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double leaf) {
  if (leaf <= 0.0) throw Error("voxel leaf must be > 0");
  if (cloud.empty()) return {};

  const Vec3 anchor = cloud.bounds().min;
  struct Cell {
    Vec3 sum = Vec3::Zero();
    int count = 0;
    std::map<int, int> label_votes;
  };
  using Key = std::tuple<long, long, long>;
  std::map<Key, Cell> grid;

  const bool labeled = cloud.has_labels();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 rel = (cloud.points[i] - anchor) / leaf;
    const Key key{static_cast<long>(std::floor(rel.x())),
                  static_cast<long>(std::floor(rel.y())),
                  static_cast<long>(std::floor(rel.z()))};
    Cell& cell = grid[key];
    cell.sum += cloud.points[i];
    cell.count += 1;
    if (labeled) cell.label_votes[cloud.labels[i]] += 1;
  }

  PointCloud out;
  out.points.reserve(grid.size());
  if (labeled) out.labels.reserve(grid.size());
  for (const auto& [key, cell] : grid) {
    out.points.push_back(cell.sum / static_cast<double>(cell.count));
    if (labeled) {
      int best_label = 0, best_votes = -1;
      for (const auto& [label, votes] : cell.label_votes) {
        if (votes > best_votes) {  // map order makes ties pick the smaller label
          best_label = label;
          best_votes = votes;
        }
      }
      out.labels.push_back(best_label);
    }
  }
  return out;
}

PlaneRemovalResult ransac_remove_plane(const PointCloud& cloud, double dist_thresh,
                                       int iterations, std::uint64_t seed) {
  if (cloud.size() < 3) throw InsufficientPointsError("plane fit needs >= 3 points");
  if (iterations < 1) throw Error("ransac iterations must be >= 1");
  if (dist_thresh <= 0.0) throw Error("ransac dist_thresh must be > 0");

  const auto& pts = cloud.points;
  const int n = static_cast<int>(pts.size());

  // Samples are drawn up front so consensus counting order cannot change
  // the outcome for a fixed seed.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<std::array<int, 3>> triples(static_cast<std::size_t>(iterations));
  for (auto& t : triples) {
    t[0] = pick(rng);
    do { t[1] = pick(rng); } while (t[1] == t[0]);
    do { t[2] = pick(rng); } while (t[2] == t[0] || t[2] == t[1]);
  }

  PlaneModel best;
  int best_count = -1;
  bool any_valid = false;
  for (const auto& t : triples) {
    const Vec3& a = pts[static_cast<std::size_t>(t[0])];
    const Vec3 u = pts[static_cast<std::size_t>(t[1])] - a;
    const Vec3 v = pts[static_cast<std::size_t>(t[2])] - a;
    Vec3 normal = u.cross(v);
    const double len = normal.norm();
    if (len <= 1e-12 * std::max(1.0, u.norm() * v.norm())) continue;  // collinear triple
    normal /= len;
    any_valid = true;
    const double d = -normal.dot(a);

    int count = 0;
    for (const Vec3& p : pts) {
      if (std::abs(normal.dot(p) + d) <= dist_thresh) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best.normal = normal;
      best.d = d;
    }
  }
  if (!any_valid) throw DegenerateInputError("all RANSAC samples collinear");

  // Canonical orientation: largest-magnitude normal component positive.
  int imax = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(best.normal[i]) > std::abs(best.normal[imax])) imax = i;
  }
  if (best.normal[imax] < 0.0) {
    best.normal = -best.normal;
    best.d = -best.d;
  }

  PlaneRemovalResult out;
  out.plane = best;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (best.distance(pts[static_cast<std::size_t>(i)]) <= dist_thresh) {
      out.removed.push_back(i);
    } else {
      keep.push_back(i);
    }
  }
  out.remaining = cloud.select(keep);
  out.retained = std::move(keep);
  return out;
}

}  // namespace binpick
