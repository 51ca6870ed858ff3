#pragma once

// CSV and PGM (P2/P5) ingestion, CSV output.
//
// CSV layout: first line "rows,cols", then one line per row holding `cols`
// comma-separated decimals.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "filament/error.hpp"
#include "filament/grid.hpp"

namespace filament {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

inline std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw input_error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace detail

inline ImageGrid parse_csv_grid(std::istream& in, const std::string& source = "<stream>") {
  auto fail = [&](std::size_t line, std::size_t column, const std::string& what) -> parse_error {
    return parse_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
  };

  std::string line;
  std::size_t line_no = 0;
  // Skip leading blank lines; an all-blank file is empty.
  do {
    if (!std::getline(in, line)) throw parse_error(source + ": empty file");
    ++line_no;
  } while (detail::trim(line).empty());

  auto header = detail::split_commas(line);
  std::size_t rows = 0, cols = 0;
  if (header.size() != 2) throw fail(line_no, 1, "header must be \"rows,cols\"");
  if (!detail::parse_number(header[0], rows) || rows == 0) throw fail(line_no, 1, "invalid row count");
  if (!detail::parse_number(header[1], cols) || cols == 0) throw fail(line_no, 2, "invalid column count");

  std::vector<double> values(rows * cols);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (row == rows) throw fail(line_no, 1, "more than " + std::to_string(rows) + " data rows");
    auto fields = detail::split_commas(line);
    if (fields.size() != cols) {
      throw fail(line_no, 1,
                 "row " + std::to_string(row + 1) + " has " + std::to_string(fields.size()) + " values, expected " +
                     std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!detail::parse_number(fields[c], v) || !std::isfinite(v)) {
        throw fail(line_no, c + 1, "non-numeric value '" + std::string(fields[c]) + "'");
      }
      values[c * rows + row] = v;
    }
    ++row;
  }
  if (row != rows) {
    throw fail(line_no, 1, "found " + std::to_string(row) + " data rows, expected " + std::to_string(rows));
  }
  return ImageGrid(rows, cols, std::move(values));
}

inline ImageGrid load_csv_grid(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_csv_grid(in, path.string());
}

/// Writes the CSV layout with 17 significant digits, enough to round-trip doubles.
inline void write_csv_grid(std::ostream& out, const ImageGrid& grid) {
  auto old_precision = out.precision(17);
  out << grid.rows() << ',' << grid.cols() << '\n';
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (c) out << ',';
      out << grid(r, c);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

inline ImageGrid parse_pgm_grid(std::istream& in, const std::string& source = "<stream>") {
  auto fail = [&](const std::string& what) { return parse_error(source + ": " + what); };

  // Header tokens are whitespace separated; '#' starts a comment to end of line.
  auto next_token = [&]() -> std::string {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
      if (ch == '#') {
        while ((ch = in.get()) != EOF && ch != '\n') {
        }
        continue;
      }
      if (std::isspace(ch)) {
        if (!token.empty()) break;
        continue;
      }
      token.push_back(static_cast<char>(ch));
    }
    return token;
  };
  auto next_int = [&](const char* what) {
    std::uint64_t v = 0;
    auto token = next_token();
    if (token.empty()) throw fail(std::string("truncated header (missing ") + what + ")");
    if (!detail::parse_number(std::string_view(token), v)) throw fail(std::string("invalid ") + what + " '" + token + "'");
    return v;
  };

  auto magic = next_token();
  if (magic != "P2" && magic != "P5") throw fail("bad magic '" + magic + "', expected P2 or P5");
  auto width = next_int("width");
  auto height = next_int("height");
  auto maxval = next_int("maxval");
  if (width == 0 || height == 0) throw fail("image dimensions must be positive");
  if (maxval == 0 || maxval > 65535) throw fail("maxval must lie in [1, 65535]");

  std::vector<double> values(width * height);
  if (magic == "P2") {
    for (std::size_t k = 0; k < values.size(); ++k) {
      auto token = next_token();
      if (token.empty()) throw fail("truncated payload: " + std::to_string(k) + " of " + std::to_string(values.size()) + " pixels");
      std::uint64_t v = 0;
      if (!detail::parse_number(std::string_view(token), v) || v > maxval) throw fail("invalid pixel '" + token + "'");
      values[(k % width) * height + k / width] = static_cast<double>(v);
    }
  } else {
    // Exactly one whitespace byte separates maxval from the raster; next_token consumed it.
    const std::size_t bytes_per_pixel = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(values.size() * bytes_per_pixel);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw fail("truncated payload: " + std::to_string(in.gcount()) + " of " + std::to_string(raw.size()) + " bytes");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
      std::uint64_t v = bytes_per_pixel == 2 ? (std::uint64_t{raw[2 * k]} << 8) | raw[2 * k + 1] : raw[k];
      if (v > maxval) throw fail("pixel exceeds maxval");
      values[(k % width) * height + k / width] = static_cast<double>(v);
    }
  }
  return ImageGrid(height, width, std::move(values));
}

inline ImageGrid load_pgm_grid(const std::filesystem::path& path) {
  auto in = detail::open_input(path, std::ios::in | std::ios::binary);
  return parse_pgm_grid(in, path.string());
}

/// Dispatches on extension: ".pgm" is read as PGM, anything else as CSV.
inline ImageGrid load_grid(const std::filesystem::path& path) {
  return path.extension() == ".pgm" ? load_pgm_grid(path) : load_csv_grid(path);
}

}  // namespace filament
