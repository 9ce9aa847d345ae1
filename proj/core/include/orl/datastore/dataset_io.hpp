#pragma once

#include <filesystem>
#include <string>

#include "orl/datastore/dataset.hpp"

namespace orl {

inline constexpr const char* kDatasetExtension = ".orl.jsonl";
inline constexpr const char* kCompressedDatasetExtension = ".orl.jsonl.gz";

/// Line-delimited JSON: a header object on the first line, then one object per
/// transition. Paths ending in ".gz" are gzip compressed. Throws
/// ValidationError if the dataset violates its invariants, IoError on write
/// failure.
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

/// Reads and fully validates a dataset. Either the whole file loads or an
/// exception is thrown; parse errors name the offending line.
Dataset read_dataset(const std::filesystem::path& path);

/// The same encoding as a string, for hashing and in-memory round trips.
std::string encode_dataset(const Dataset& dataset);
Dataset decode_dataset(const std::string& text);

}  // namespace orl
