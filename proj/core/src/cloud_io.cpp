#include "binpick/cloud_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "binpick/errors.hpp"

namespace binpick {

namespace {

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

// Strips a trailing comment and surrounding whitespace.
std::string strip(const std::string& line) {
  std::string s = line;
  const auto hash = s.find('#');
  if (hash != std::string::npos) s.erase(hash);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

PointCloud load_xyz(std::istream& in) {
  PointCloud cloud;
  bool any_label = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip(line);
    if (body.empty()) continue;
    const auto toks = split_ws(body);
    if (toks.size() != 3 && toks.size() != 4)
      throw ParseError("expected `x y z [label]`, got " + std::to_string(toks.size()) +
                           " fields",
                       lineno);
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      if (!parse_double(toks[static_cast<std::size_t>(k)], p[k]))
        throw ParseError("bad number `" + toks[static_cast<std::size_t>(k)] + "`", lineno);
    }
    if (!p.allFinite()) throw ParseError("non-finite coordinate", lineno);
    int label = -1;
    if (toks.size() == 4) {
      double v = 0;
      if (!parse_double(toks[3], v) || v != std::floor(v))
        throw ParseError("bad label `" + toks[3] + "`", lineno);
      label = static_cast<int>(v);
      any_label = true;
    }
    cloud.points.push_back(p);
    cloud.labels.push_back(label);
  }
  if (!any_label) cloud.labels.clear();
  return cloud;
}

PointCloud load_ply(std::istream& in) {
  std::string line;
  int lineno = 0;

  auto next_header_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.rfind("comment", 0) == 0) continue;
      return line;
    }
    throw ParseError("unexpected end of header", lineno);
  };

  if (next_header_line() != "ply") throw ParseError("missing `ply` magic", lineno);
  if (next_header_line() != "format ascii 1.0")
    throw ParseError("only `format ascii 1.0` is supported", lineno);

  long vertex_count = -1;
  int x_col = -1, y_col = -1, z_col = -1;
  int n_vertex_props = 0;
  bool in_vertex_element = false;

  for (;;) {
    const std::string h = next_header_line();
    if (h == "end_header") break;
    const auto toks = split_ws(h);
    if (toks.empty()) continue;
    if (toks[0] == "element") {
      if (toks.size() != 3) throw ParseError("bad element line", lineno);
      if (toks[1] == "vertex") {
        double n = 0;
        if (!parse_double(toks[2], n) || n < 0 || n != std::floor(n))
          throw ParseError("bad vertex count `" + toks[2] + "`", lineno);
        vertex_count = static_cast<long>(n);
        in_vertex_element = true;
      } else {
        in_vertex_element = false;
      }
    } else if (toks[0] == "property" && in_vertex_element) {
      if (toks.size() != 3) throw ParseError("bad property line", lineno);
      if (toks[2] == "x") x_col = n_vertex_props;
      if (toks[2] == "y") y_col = n_vertex_props;
      if (toks[2] == "z") z_col = n_vertex_props;
      ++n_vertex_props;
    }
  }

  if (vertex_count < 0) throw ParseError("header missing `element vertex`", lineno);
  if (x_col < 0 || y_col < 0 || z_col < 0)
    throw ParseError("vertex element missing x/y/z properties", lineno);

  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(vertex_count));
  for (long i = 0; i < vertex_count; ++i) {
    if (!std::getline(in, line))
      throw ParseError("vertex count " + std::to_string(vertex_count) +
                           " exceeds body, got " + std::to_string(i) + " rows",
                       lineno);
    ++lineno;
    const auto toks = split_ws(strip(line));
    if (static_cast<int>(toks.size()) < n_vertex_props)
      throw ParseError("vertex row has " + std::to_string(toks.size()) + " of " +
                           std::to_string(n_vertex_props) + " properties",
                       lineno);
    Vec3 p;
    const int cols[3] = {x_col, y_col, z_col};
    for (int k = 0; k < 3; ++k) {
      if (!parse_double(toks[static_cast<std::size_t>(cols[k])], p[k]))
        throw ParseError("bad number `" + toks[static_cast<std::size_t>(cols[k])] + "`",
                         lineno);
    }
    if (!p.allFinite()) throw ParseError("non-finite coordinate", lineno);
    cloud.points.push_back(p);
  }
  return cloud;
}

void save_xyz(const PointCloud& cloud, std::ostream& out) {
  const bool with_labels = cloud.has_labels();
  char buf[128];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (with_labels) {
      std::snprintf(buf, sizeof buf, "%.9f %.9f %.9f %d\n", p.x(), p.y(), p.z(),
                    cloud.labels[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.9f %.9f %.9f\n", p.x(), p.y(), p.z());
    }
    out << buf;
  }
}

void save_ply(const PointCloud& cloud, std::ostream& out) {
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "end_header\n";
  char buf[128];
  for (const Vec3& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.9f %.9f %.9f\n", p.x(), p.y(), p.z());
    out << buf;
  }
}

}  // namespace

CloudFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".xyz" || ext == ".txt") return CloudFormat::Xyz;
  if (ext == ".ply") return CloudFormat::Ply;
  throw IoError("cannot infer cloud format from `" + path.string() + "`");
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open `" + path.string() + "` for reading");
  PointCloud cloud =
      format == CloudFormat::Xyz ? load_xyz(in) : load_ply(in);
  cloud.check_consistent();
  return cloud;
}

PointCloud load_cloud(const std::filesystem::path& path) {
  return load_cloud(path, format_from_path(path));
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                CloudFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open `" + path.string() + "` for writing");
  if (format == CloudFormat::Xyz) {
    save_xyz(cloud, out);
  } else {
    save_ply(cloud, out);
  }
  if (!out) throw IoError("write to `" + path.string() + "` failed");
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  save_cloud(cloud, path, format_from_path(path));
}

}  // namespace binpick
