#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <vector>

#include "swflood/raster_io.hpp"

namespace swflood::dsm {

enum class FeatureKind { Point, Line, Polygon };

struct Vertex {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// A class-tagged 3D vector feature digitized from classified survey data.
/// Polygons store their ring closed (first vertex == last vertex).
struct ClassifiedFeature {
  int class_id = 0;
  FeatureKind kind = FeatureKind::Point;
  std::vector<Vertex> vertices;

  /// Throws Error if the vertex count or closure does not fit the kind.
  void validate() const;

  friend bool operator==(const ClassifiedFeature&, const ClassifiedFeature&) = default;
};

using ClassSelection = std::set<int>;

/// One raster cell touched by a feature, in raster order (row * ncols + col).
struct CellSample {
  std::size_t index = 0;
  double z = 0.0;
  friend bool operator==(const CellSample&, const CellSample&) = default;
};

/// Reads `class_id;KIND;x1 y1 z1,x2 y2 z2,...` records. Blank lines and `#` comments are skipped.
std::vector<ClassifiedFeature> parse_features(std::istream& in);
std::vector<ClassifiedFeature> parse_features_file(const std::filesystem::path& path);

/// One class id per line, `#` comments.
ClassSelection parse_class_selection(std::istream& in);
ClassSelection parse_class_selection_file(const std::filesystem::path& path);

std::vector<ClassifiedFeature> select_classes(const std::vector<ClassifiedFeature>& features,
                                              const ClassSelection& selection);

/// Lines whose endpoints are within `tolerance` of each other become polygons.
std::vector<ClassifiedFeature> close_lines(const std::vector<ClassifiedFeature>& features,
                                           double tolerance);

/// Cells covered by a feature on the template's grid, one entry per cell (highest z kept),
/// sorted by index. Lines use a 4-connected supercover traversal; polygon interiors are
/// filled with the even-odd rule at cell centers and take the maximum vertex elevation.
std::vector<CellSample> rasterize_feature(const ClassifiedFeature& feature, const RasterGrid& grid);

/// Counts feature cells skipped because the DTM held nodata there.
struct ExtrudeReport {
  std::size_t skipped_nodata = 0;
};

/// DSM(c) = max(DTM(c), feature z at c).
RasterGrid extrude(const RasterGrid& dtm, const std::vector<CellSample>& cells,
                   ExtrudeReport* report = nullptr);

struct BuildOptions {
  double close_tolerance = 0.1;
};

/// Full pipeline: select, close, rasterize, extrude.
RasterGrid build_dsm(const RasterGrid& dtm, const std::vector<ClassifiedFeature>& features,
                     const ClassSelection& selection, const BuildOptions& options = {},
                     ExtrudeReport* report = nullptr);

}  // namespace swflood::dsm
