#include "swflood/dsm_builder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <string>
#include <string_view>

#include "swflood/errors.hpp"

namespace swflood::dsm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

bool to_double(std::string_view token, double& v) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(v);
}

bool to_int(std::string_view token, int& v) {
  token = trim(token);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

// Strips a trailing comment and surrounding whitespace; empty result means "skip".
std::string_view content_of(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string_view view(line);
  if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
  return trim(view);
}

}  // namespace

void ClassifiedFeature::validate() const {
  for (const auto& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw Error("feature has a non-finite coordinate");
    }
  }
  switch (kind) {
    case FeatureKind::Point:
      if (vertices.size() != 1) throw Error("POINT needs exactly 1 vertex");
      break;
    case FeatureKind::Line:
      if (vertices.size() < 2) throw Error("LINE needs at least 2 vertices");
      break;
    case FeatureKind::Polygon:
      if (vertices.size() < 4) throw Error("POLYGON needs at least 3 corners plus the closing vertex");
      if (!(vertices.front() == vertices.back())) throw Error("POLYGON ring is not closed (first vertex != last)");
      break;
  }
}

std::vector<ClassifiedFeature> parse_features(std::istream& in) {
  std::vector<ClassifiedFeature> features;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = content_of(line);
    if (body.empty()) continue;

    const auto fields = split(body, ';');
    if (fields.size() != 3) throw ParseError("expected 'class_id;KIND;vertices'", line_no);

    ClassifiedFeature f;
    if (!to_int(fields[0], f.class_id)) throw ParseError("bad class id '" + std::string(trim(fields[0])) + "'", line_no);
    const auto kind = trim(fields[1]);
    if (iequals(kind, "POINT")) {
      f.kind = FeatureKind::Point;
    } else if (iequals(kind, "LINE")) {
      f.kind = FeatureKind::Line;
    } else if (iequals(kind, "POLYGON")) {
      f.kind = FeatureKind::Polygon;
    } else {
      throw ParseError("unknown feature kind '" + std::string(kind) + "'", line_no);
    }

    for (auto vtext : split(fields[2], ',')) {
      std::vector<std::string_view> coords;
      for (auto tok : split(trim(vtext), ' ')) {
        if (!trim(tok).empty()) coords.push_back(tok);
      }
      Vertex v;
      if (coords.size() != 3 || !to_double(coords[0], v.x) || !to_double(coords[1], v.y) ||
          !to_double(coords[2], v.z)) {
        throw ParseError("bad vertex '" + std::string(trim(vtext)) + "', expected 'x y z'", line_no);
      }
      f.vertices.push_back(v);
    }
    try {
      f.validate();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    features.push_back(std::move(f));
  }
  return features;
}

std::vector<ClassifiedFeature> parse_features_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open feature file '" + path.string() + "'");
  try {
    return parse_features(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

ClassSelection parse_class_selection(std::istream& in) {
  ClassSelection sel;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = content_of(line);
    if (body.empty()) continue;
    int id = 0;
    if (!to_int(body, id)) throw ParseError("bad class id '" + std::string(body) + "'", line_no);
    sel.insert(id);
  }
  return sel;
}

ClassSelection parse_class_selection_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open class selection '" + path.string() + "'");
  return parse_class_selection(in);
}

std::vector<ClassifiedFeature> select_classes(const std::vector<ClassifiedFeature>& features,
                                              const ClassSelection& selection) {
  std::vector<ClassifiedFeature> out;
  std::copy_if(features.begin(), features.end(), std::back_inserter(out),
               [&](const ClassifiedFeature& f) { return selection.contains(f.class_id); });
  return out;
}

std::vector<ClassifiedFeature> close_lines(const std::vector<ClassifiedFeature>& features, double tolerance) {
  std::vector<ClassifiedFeature> out = features;
  for (auto& f : out) {
    // A ring needs three distinct corners plus the closing vertex.
    if (f.kind != FeatureKind::Line || f.vertices.size() < 4) continue;
    const auto& a = f.vertices.front();
    const auto& b = f.vertices.back();
    if (std::hypot(b.x - a.x, b.y - a.y) <= tolerance) {
      f.vertices.back() = a;
      f.kind = FeatureKind::Polygon;
    }
  }
  return out;
}

namespace {

// Grid-space coordinates: x grows with columns, y grows northward from the lower-left corner.
struct GridPoint {
  double x;
  double y;
  double z;
};

class CellCollector {
 public:
  explicit CellCollector(const RasterGrid& grid) : grid_(grid) {}

  void add(long ix, long iy, double z) {
    if (ix < 0 || iy < 0 || ix >= static_cast<long>(grid_.ncols) || iy >= static_cast<long>(grid_.nrows)) return;
    const std::size_t row = grid_.nrows - 1 - static_cast<std::size_t>(iy);
    const std::size_t index = row * grid_.ncols + static_cast<std::size_t>(ix);
    auto [it, inserted] = cells_.try_emplace(index, z);
    if (!inserted) it->second = std::max(it->second, z);
  }

  std::vector<CellSample> take() const {
    std::vector<CellSample> out;
    out.reserve(cells_.size());
    for (const auto& [index, z] : cells_) out.push_back({index, z});
    return out;
  }

 private:
  const RasterGrid& grid_;
  std::map<std::size_t, double> cells_;
};

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Cell coordinate of v. A value exactly on a grid line goes to the side given by `side`
// (+1: the cell above the line, -1: the cell below it).
long cell_coord(double v, int side) {
  const double f = std::floor(v);
  if (v != f || side >= 0) return static_cast<long>(f);
  return static_cast<long>(f) - 1;
}

// 4-connected supercover of a directed segment. Points lying exactly on grid lines are
// attributed to the cell the segment is travelling into (start) or coming from (end);
// a segment lying along a grid line takes the cells on its left.
void rasterize_segment(const GridPoint& p0, const GridPoint& p1, CellCollector& out) {
  const double dx = p1.x - p0.x;
  const double dy = p1.y - p0.y;
  const double dz = p1.z - p0.z;
  // left normal (-dy, dx)
  const int left_x = sign(-dy);
  const int left_y = sign(dx);
  auto start_side = [](double d, int left) { return d != 0.0 ? sign(d) : left; };
  auto end_side = [](double d, int left) { return d != 0.0 ? -sign(d) : left; };

  long cx = cell_coord(p0.x, start_side(dx, left_x));
  long cy = cell_coord(p0.y, start_side(dy, left_y));
  const long ex = cell_coord(p1.x, end_side(dx, left_x));
  const long ey = cell_coord(p1.y, end_side(dy, left_y));

  auto z_at = [&](double t) { return p0.z + dz * t; };

  const long step_x = ex > cx ? 1 : -1;
  const long step_y = ey > cy ? 1 : -1;
  long remaining_x = std::labs(ex - cx);
  long remaining_y = std::labs(ey - cy);
  double t_enter = 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  auto crossing = [](long c, long step, double origin, double delta) {
    const double boundary = static_cast<double>(step > 0 ? c + 1 : c);
    return std::clamp((boundary - origin) / delta, 0.0, 1.0);
  };

  while (remaining_x > 0 || remaining_y > 0) {
    const double tx = remaining_x > 0 && dx != 0.0 ? crossing(cx, step_x, p0.x, dx) : kInf;
    const double ty = remaining_y > 0 && dy != 0.0 ? crossing(cy, step_y, p0.y, dy) : kInf;
    if (tx == kInf && ty == kInf) break;  // degenerate tie-breaking; nothing left to traverse
    if (tx < ty) {
      out.add(cx, cy, z_at(0.5 * (t_enter + tx)));
      cx += step_x;
      --remaining_x;
      t_enter = tx;
    } else if (ty < tx) {
      out.add(cx, cy, z_at(0.5 * (t_enter + ty)));
      cy += step_y;
      --remaining_y;
      t_enter = ty;
    } else {
      // Exact corner crossing: both side cells touch the segment.
      out.add(cx, cy, z_at(0.5 * (t_enter + tx)));
      out.add(cx + step_x, cy, z_at(tx));
      out.add(cx, cy + step_y, z_at(tx));
      cx += step_x;
      cy += step_y;
      --remaining_x;
      --remaining_y;
      t_enter = tx;
    }
  }
  out.add(cx, cy, z_at(0.5 * (t_enter + 1.0)));
}

std::vector<GridPoint> to_grid(const std::vector<Vertex>& vertices, const RasterGrid& grid) {
  std::vector<GridPoint> pts;
  pts.reserve(vertices.size());
  for (const auto& v : vertices) {
    pts.push_back({(v.x - grid.xll) / grid.cellsize, (v.y - grid.yll) / grid.cellsize, v.z});
  }
  return pts;
}

void fill_polygon_interior(const std::vector<GridPoint>& ring, double z, const RasterGrid& grid,
                           CellCollector& out) {
  double ymin = ring.front().y;
  double ymax = ring.front().y;
  for (const auto& p : ring) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const long row_lo = std::max(0L, static_cast<long>(std::floor(ymin)));
  const long row_hi = std::min(static_cast<long>(grid.nrows) - 1, static_cast<long>(std::floor(ymax)));
  std::vector<double> xs;
  for (long iy = row_lo; iy <= row_hi; ++iy) {
    const double yc = static_cast<double>(iy) + 0.5;
    xs.clear();
    for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
      const auto& a = ring[k];
      const auto& b = ring[k + 1];
      if ((a.y > yc) != (b.y > yc)) xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // cells whose center lies in [xs[k], xs[k+1])
      const long first = static_cast<long>(std::ceil(xs[k] - 0.5));
      const long last = static_cast<long>(std::ceil(xs[k + 1] - 0.5)) - 1;
      for (long ix = first; ix <= last; ++ix) out.add(ix, iy, z);
    }
  }
}

}  // namespace

std::vector<CellSample> rasterize_feature(const ClassifiedFeature& feature, const RasterGrid& grid) {
  CellCollector out(grid);
  auto pts = to_grid(feature.vertices, grid);
  switch (feature.kind) {
    case FeatureKind::Point:
      out.add(static_cast<long>(std::floor(pts[0].x)), static_cast<long>(std::floor(pts[0].y)), pts[0].z);
      break;
    case FeatureKind::Line:
      if (pts.size() == 1) {
        out.add(static_cast<long>(std::floor(pts[0].x)), static_cast<long>(std::floor(pts[0].y)), pts[0].z);
      }
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) rasterize_segment(pts[k], pts[k + 1], out);
      break;
    case FeatureKind::Polygon: {
      // Counter-clockwise orientation puts the interior on the left of every edge.
      double area2 = 0.0;
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) area2 += pts[k].x * pts[k + 1].y - pts[k + 1].x * pts[k].y;
      if (area2 < 0.0) std::reverse(pts.begin(), pts.end());
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) rasterize_segment(pts[k], pts[k + 1], out);
      double ztop = pts.front().z;
      for (const auto& p : pts) ztop = std::max(ztop, p.z);
      fill_polygon_interior(pts, ztop, grid, out);
      break;
    }
  }
  return out.take();
}

RasterGrid extrude(const RasterGrid& dtm, const std::vector<CellSample>& cells, ExtrudeReport* report) {
  RasterGrid dsm = dtm;
  std::size_t skipped = 0;
  for (const auto& c : cells) {
    if (c.index >= dsm.values.size()) throw Error("feature cell index outside the DTM");
    double& v = dsm.values[c.index];
    if (dtm.values[c.index] == dtm.nodata) {
      ++skipped;
      continue;
    }
    v = std::max(v, c.z);
  }
  if (report) report->skipped_nodata += skipped;
  return dsm;
}

RasterGrid build_dsm(const RasterGrid& dtm, const std::vector<ClassifiedFeature>& features,
                     const ClassSelection& selection, const BuildOptions& options, ExtrudeReport* report) {
  dtm.validate();
  if (selection.empty()) throw ConfigError("class selection is empty");
  const auto selected = close_lines(select_classes(features, selection), options.close_tolerance);
  std::vector<CellSample> cells;
  for (const auto& f : selected) {
    auto fc = rasterize_feature(f, dtm);
    cells.insert(cells.end(), fc.begin(), fc.end());
  }
  return extrude(dtm, cells, report);
}

}  // namespace swflood::dsm
