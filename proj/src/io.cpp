#include "emkm/io.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace emkm {

namespace {

std::atomic<std::uint64_t> g_bytes_read{0};

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  const bool comma = line.find(',') != std::string_view::npos;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    if (comma) {
      std::size_t end = line.find(',', pos);
      if (end == std::string_view::npos) end = line.size();
      auto cell = line.substr(pos, end - pos);
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front())))
        cell.remove_prefix(1);
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back())))
        cell.remove_suffix(1);
      cells.push_back(cell);
      if (end == line.size()) break;
      pos = end + 1;
    } else {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
        ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])))
        ++end;
      cells.push_back(line.substr(pos, end - pos));
      pos = end;
    }
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t col) {
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw std::runtime_error("line " + std::to_string(line_no) + ", column " +
                             std::to_string(col + 1) + ": '" + std::string(cell) +
                             "' is not a finite number");
  return value;
}

}  // namespace

std::vector<std::size_t> parse_column_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    const std::size_t dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoul(item));
      } else {
        const std::size_t lo = std::stoul(item.substr(0, dash));
        const std::size_t hi = std::stoul(item.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument("descending range");
        for (std::size_t c = lo; c <= hi; ++c) out.push_back(c);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("bad column list item: '" + item + "'");
    }
    pos = end + 1;
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

  for (const auto f : spec.features)
    for (const auto d : spec.drop)
      if (f == d)
        throw std::invalid_argument("column " + std::to_string(f) +
                                    " is both a feature and dropped");

  std::vector<Vec> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<std::size_t> feature_cols;
  bool skipped_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    g_bytes_read += line.size() + 1;
    if (line.empty()) continue;
    if (spec.has_header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    const auto cells = split_cells(line);
    if (cells.empty()) continue;

    if (rows.empty()) {
      width = cells.size();
      if (spec.features.empty()) {
        for (std::size_t c = 0; c < width; ++c) {
          bool dropped = false;
          for (const auto d : spec.drop) dropped = dropped || d == c;
          if (!dropped) feature_cols.push_back(c);
        }
      } else {
        feature_cols = spec.features;
        for (const auto c : feature_cols)
          if (c >= width)
            throw std::runtime_error("feature column " + std::to_string(c) +
                                     " out of range: file has " + std::to_string(width) +
                                     " columns");
      }
      if (feature_cols.empty())
        throw std::invalid_argument("column spec selects no feature columns");
    } else if (cells.size() != width) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": has " +
                               std::to_string(cells.size()) + " columns, expected " +
                               std::to_string(width));
    }

    Vec row;
    row.reserve(feature_cols.size());
    for (const auto c : feature_cols) row.push_back(parse_cell(cells[c], line_no, c));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset file has no data rows");
  return Dataset::from_rows(rows);
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  char buf[32];
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), data(i, j));
      if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
      if (j) out << ',';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

void write_labels(const std::filesystem::path& path,
                  const std::vector<std::int32_t>& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const auto l : labels) out << l << '\n';
}

std::uint64_t storage_bytes_read() { return g_bytes_read.load(); }

}  // namespace emkm
