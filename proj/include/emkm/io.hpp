#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emkm/model.hpp"

namespace emkm {

// Which columns of a delimited text file are features. With an empty
// features list, every column not listed under drop is a feature.
struct ColumnSpec {
  std::vector<std::size_t> features;
  std::vector<std::size_t> drop;
  bool has_header = false;
};

// "1-16,20" -> {1,...,16,20}. Indices are zero-based.
std::vector<std::size_t> parse_column_list(const std::string& text);

// Loads a delimited text file (comma or whitespace separated, one sample per
// line). Label columns are dropped; row order is preserved. A non-numeric or
// non-finite feature cell and ragged rows raise std::runtime_error naming the
// offending line and column (1-based in the message).
Dataset load_dataset(const std::filesystem::path& path, const ColumnSpec& spec);

// Comma-separated dataset, full double round-trip precision.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

// Single-column label file (one integer per line).
void write_labels(const std::filesystem::path& path,
                  const std::vector<std::int32_t>& labels);

// Monotonic count of bytes pulled from storage by load_dataset. The
// experiment runner samples it around each timed window to assert that no
// file I/O happens while the clock is running.
std::uint64_t storage_bytes_read();

}  // namespace emkm
