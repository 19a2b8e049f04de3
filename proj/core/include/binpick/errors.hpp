#pragma once

#include <stdexcept>
#include <string>

namespace binpick {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInputError : Error {
  explicit EmptyInputError(const std::string& what = "empty input") : Error(what) {}
};

struct ParseError : Error {
  ParseError(const std::string& what, int line_number)
      : Error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
  int line;
};

struct InsufficientPointsError : Error {
  explicit InsufficientPointsError(const std::string& what = "not enough points") : Error(what) {}
};

struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& what = "degenerate input") : Error(what) {}
};

struct DegenerateGeometryError : Error {
  explicit DegenerateGeometryError(const std::string& what = "degenerate geometry") : Error(what) {}
};

struct EmptySceneError : Error {
  explicit EmptySceneError(const std::string& what = "no objects in scene") : Error(what) {}
};

struct PlacementFailureError : Error {
  explicit PlacementFailureError(const std::string& what = "could not place object") : Error(what) {}
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace binpick
