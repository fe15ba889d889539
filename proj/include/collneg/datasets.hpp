#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "collneg/measurement.hpp"
#include "collneg/samples.hpp"

namespace collneg {

// One sampled state: all ten probabilities in feature order
// (p11, p22, p33, p44, p13, p24, p14, p12, p23, p34) and its negativity.
struct DatasetRecord {
    std::array<double, kMaxConfigs> p{};
    double n_a = 0.0;
    std::uint64_t index = 0;

    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

inline constexpr std::uint32_t kDatasetVersion = 1;

struct DatasetHeader {
    std::uint32_t version = kDatasetVersion;
    std::uint64_t seed = 0;
    std::uint64_t count = 0;
    std::uint64_t digest = 0;  // identifies the sampling and measurement conventions
};

struct Dataset {
    DatasetHeader header;
    std::vector<DatasetRecord> records;
};

enum class DatasetFormat { Csv, Binary };

// Fingerprint of the generator conventions behind format version 1.
std::uint64_t generator_digest();

// Record i depends only on (seed, i).
DatasetRecord generate_record(std::uint64_t seed, std::uint64_t index);

// threads == 0 picks the hardware concurrency. Output is identical for any
// thread count.
Dataset generate_dataset(std::uint64_t n, std::uint64_t seed, unsigned threads = 1);

// CSV: a "# collneg dataset ..." comment line, the column header
// p11,p22,p33,p44,p13,p24,p14,p12,p23,p34,negativity and one row per
// record with 17 significant digits.
// Binary: "COLLNEGD", u32 version, u64 seed, u64 count, then 11 f64 per
// record, all little-endian.
void save_dataset(const Dataset& data, const std::filesystem::path& path, DatasetFormat format);

// Detects the format from the leading bytes. FormatError on version
// mismatch, truncation, malformed rows or out-of-range values.
Dataset load_dataset(const std::filesystem::path& path);

// Seeded permutation partition; the first round(fraction * n) permuted
// records form the training part. 0 < fraction < 1.
std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_dataset(
    std::span<const DatasetRecord> records, double fraction, std::uint64_t seed);

enum class Label { Negativity, NegativitySquared };

// First b probabilities of each record with the chosen label.
LabeledSet to_labeled(std::span<const DatasetRecord> records, int b, Label label);

// Counts of values in [lo, hi) split into equal bins; the top edge is
// folded into the last bin, values outside are dropped.
std::vector<std::size_t> histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

}  // namespace collneg
