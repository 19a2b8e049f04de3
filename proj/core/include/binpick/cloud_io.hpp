#pragma once

#include <filesystem>
#include <string>

#include "binpick/point_cloud.hpp"

namespace binpick {

enum class CloudFormat { Xyz, Ply };

/// Picks a format from the file extension (.xyz/.txt -> Xyz, .ply -> Ply).
/// Throws IoError for anything else.
CloudFormat format_from_path(const std::filesystem::path& path);

/// ASCII loaders. Both throw ParseError (with line number) on malformed
/// input and IoError if the file cannot be opened.
///
/// XYZ grammar: one `x y z [label]` per line, whitespace separated,
/// `#` starts a comment, blank lines ignored.
///
/// PLY subset: `format ascii 1.0`, a vertex element with float/double
/// x, y, z properties; other vertex properties are skipped on load.
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);
PointCloud load_cloud(const std::filesystem::path& path);  // by extension

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                CloudFormat format);
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace binpick
