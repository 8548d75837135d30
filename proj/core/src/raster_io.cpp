#include "swflood/raster_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "swflood/errors.hpp"

namespace swflood {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_double(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

RasterGrid RasterGrid::filled(std::size_t ncols, std::size_t nrows, double xll, double yll,
                              double cellsize, double value, double nodata) {
  RasterGrid g;
  g.ncols = ncols;
  g.nrows = nrows;
  g.xll = xll;
  g.yll = yll;
  g.cellsize = cellsize;
  g.nodata = nodata;
  g.values.assign(ncols * nrows, value);
  return g;
}

void RasterGrid::validate() const {
  if (ncols < 1 || nrows < 1) throw DimensionError("raster must have at least one row and column");
  if (!(cellsize > 0.0) || !std::isfinite(cellsize)) throw Error("raster cellsize must be > 0");
  if (!std::isfinite(nodata)) throw Error("raster NODATA_value must be finite");
  if (values.size() != ncols * nrows) {
    throw DimensionError("raster holds " + std::to_string(values.size()) + " values, expected " +
                         std::to_string(ncols * nrows));
  }
  for (double v : values) {
    if (!std::isfinite(v) && v != nodata) throw Error("raster contains a non-finite value");
  }
}

bool RasterGrid::same_geometry(const RasterGrid& other) const {
  return ncols == other.ncols && nrows == other.nrows && xll == other.xll && yll == other.yll &&
         cellsize == other.cellsize;
}

RasterGrid read_ascii_grid(std::istream& in) {
  // Header keys in required order; the corner keys also accept the *center variants.
  static constexpr std::array<std::string_view, 6> kKeys = {
      "ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"};

  RasterGrid grid;
  std::array<double, 6> header{};
  bool x_center = false;
  bool y_center = false;
  std::string line;
  std::size_t line_no = 0;

  for (std::size_t k = 0; k < kKeys.size(); ++k) {
    if (!std::getline(in, line)) throw ParseError("missing header line '" + std::string(kKeys[k]) + "'", line_no + 1);
    ++line_no;
    strip_cr(line);
    auto tokens = split_ws(line);
    if (tokens.size() != 2) throw ParseError("malformed header line, expected '<key> <value>'", line_no);
    const std::string key = lower(tokens[0]);
    bool ok = key == kKeys[k];
    if (!ok && k == 2 && key == "xllcenter") ok = x_center = true;
    if (!ok && k == 3 && key == "yllcenter") ok = y_center = true;
    if (!ok) {
      throw ParseError("unexpected header key '" + std::string(tokens[0]) + "', expected '" +
                           std::string(kKeys[k]) + "'",
                       line_no);
    }
    if (!parse_double(tokens[1], header[k])) {
      throw ParseError("header value '" + std::string(tokens[1]) + "' is not a number", line_no);
    }
  }

  auto as_count = [&](double v, std::size_t line_of_key) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ParseError("dimension must be a positive integer", line_of_key);
    return static_cast<std::size_t>(v);
  };
  grid.ncols = as_count(header[0], 1);
  grid.nrows = as_count(header[1], 2);
  grid.cellsize = header[4];
  if (!(grid.cellsize > 0.0)) throw ParseError("cellsize must be > 0", 5);
  grid.xll = x_center ? header[2] - 0.5 * grid.cellsize : header[2];
  grid.yll = y_center ? header[3] - 0.5 * grid.cellsize : header[3];
  grid.nodata = header[5];

  const std::size_t expected = grid.ncols * grid.nrows;
  grid.values.reserve(expected);
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    for (auto token : split_ws(line)) {
      const std::size_t idx = grid.values.size();
      double v = 0.0;
      if (!parse_double(token, v) || (!std::isfinite(v) && v != grid.nodata)) {
        const std::size_t row = idx / grid.ncols;
        const std::size_t col = idx % grid.ncols;
        throw ParseError("non-numeric value '" + std::string(token) + "' at row " + std::to_string(row) +
                             ", column " + std::to_string(col),
                         line_no);
      }
      grid.values.push_back(v);
    }
  }
  if (grid.values.size() != expected) {
    throw DimensionError("raster declares " + std::to_string(grid.ncols) + "x" + std::to_string(grid.nrows) +
                         " = " + std::to_string(expected) + " values but contains " +
                         std::to_string(grid.values.size()));
  }
  return grid;
}

RasterGrid read_ascii_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open raster '" + path.string() + "'");
  try {
    return read_ascii_grid(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  } catch (const DimensionError& e) {
    throw DimensionError(path.string() + ": " + e.what());
  }
}

namespace {

void append_number(std::string& out, double v, int precision) {
  std::array<char, 64> buf{};
  auto res = precision > 0 ? std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, precision)
                           : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

}  // namespace

void write_ascii_grid(std::ostream& out, const RasterGrid& grid, int precision) {
  grid.validate();
  std::string text;
  text.reserve(grid.size() * static_cast<std::size_t>(precision + 2) + 128);
  text += "ncols " + std::to_string(grid.ncols) + "\n";
  text += "nrows " + std::to_string(grid.nrows) + "\n";
  text += "xllcorner ";
  append_number(text, grid.xll, 0);
  text += "\nyllcorner ";
  append_number(text, grid.yll, 0);
  text += "\ncellsize ";
  append_number(text, grid.cellsize, 0);
  text += "\nNODATA_value ";
  append_number(text, grid.nodata, 0);
  text += '\n';
  for (std::size_t r = 0; r < grid.nrows; ++r) {
    for (std::size_t c = 0; c < grid.ncols; ++c) {
      if (c > 0) text += ' ';
      const double v = grid.at(r, c);
      append_number(text, v, v == grid.nodata ? 0 : precision);
    }
    text += '\n';
  }
  out << text;
}

void write_ascii_grid_file(const std::filesystem::path& path, const RasterGrid& grid, int precision) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write raster '" + path.string() + "'");
  write_ascii_grid(out, grid, precision);
  if (!out) throw Error("I/O failure writing raster '" + path.string() + "'");
}

}  // namespace swflood
