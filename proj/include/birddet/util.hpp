#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace birddet {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);

// Write to a sibling temp file, then rename into place. Parallel writers of
// the same target never expose a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t state = 14695981039346656037ull);

// Stable fingerprint of a file collection (names + contents, sorted by name).
std::string digest_files(std::vector<std::filesystem::path> files);

// UTC timestamp for provenance blocks. Honors SOURCE_DATE_EPOCH so reruns can
// be byte-identical.
std::string provenance_timestamp();

// Nearest-rank percentile: the value at rank ceil(pct/100 * n), 1-based, of
// the ascending-sorted sample. pct must be in (0, 100].
double nearest_rank_percentile(std::vector<double> values, double pct);

}  // namespace birddet
