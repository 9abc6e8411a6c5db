#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "oscal/matrix.hpp"

namespace oscal {

enum class ArrayFormat { Csv, Npy };

/// Loads a real matrix from CSV or NPY v1.0, sniffing the NPY magic bytes.
/// A 1-D array becomes an n-by-1 matrix. float32 values widen exactly to
/// float64. Throws DataError on malformed input, naming the line or byte
/// offset, and on any NaN/Inf entry.
Matrix load_array(const std::filesystem::path& path);

/// Writes a matrix so that load_array returns the exact same float64 values
/// (bit-identical for NPY; CSV carries 17 significant digits, which
/// round-trips every double). Rejects empty and non-finite matrices.
void save_array(const Matrix& m, const std::filesystem::path& path, ArrayFormat fmt);

/// 1-D integer labels from CSV (one integer per line) or NPY <i4/<i8.
std::vector<std::int64_t> load_label_values(const std::filesystem::path& path);

/// load_label_values plus range validation against num_known.
LabelVector load_labels(const std::filesystem::path& path, std::int64_t num_known,
                        bool allow_unknown);

void save_labels(std::span<const std::int64_t> labels,
                 const std::filesystem::path& path, ArrayFormat fmt);

// Format-specific entry points (used directly by tests).
Matrix load_csv(const std::filesystem::path& path);
void save_csv(const Matrix& m, const std::filesystem::path& path);
Matrix load_npy(const std::filesystem::path& path);
void save_npy(const Matrix& m, const std::filesystem::path& path);
std::vector<std::int64_t> load_csv_labels(const std::filesystem::path& path);
std::vector<std::int64_t> load_npy_labels(const std::filesystem::path& path);
void save_csv_labels(std::span<const std::int64_t> v, const std::filesystem::path& path);
void save_npy_labels(std::span<const std::int64_t> v, const std::filesystem::path& path);

}  // namespace oscal
