#include "collneg/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <thread>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "binary_io.hpp"
#include "collneg/error.hpp"
#include "collneg/rng.hpp"
#include "collneg/states.hpp"

namespace collneg {

namespace {

constexpr char kDatasetMagic[8] = {'C', 'O', 'L', 'L', 'N', 'E', 'G', 'D'};
constexpr std::string_view kCsvColumns = "p11,p22,p33,p44,p13,p24,p14,p12,p23,p34,negativity";
constexpr std::string_view kCsvTag = "# collneg dataset";

// Tolerated rounding spill outside [0, 1] at generation time.
constexpr double kRangeSlack = 1e-12;

double clamp_unit(double v, const char* what, std::uint64_t index) {
    if (!std::isfinite(v) || v < -kRangeSlack || v > 1.0 + kRangeSlack) {
        throw InvalidStateError(fmt::format("record {}: {} = {} outside [0, 1]", index, what, v));
    }
    return std::clamp(v, 0.0, 1.0);
}

void validate_record(const DatasetRecord& rec, const std::string& where) {
    for (double v : rec.p) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw FormatError(fmt::format("{}: probability {} outside [0, 1]", where, v));
        }
    }
    if (!std::isfinite(rec.n_a) || rec.n_a < 0.0 || rec.n_a > 1.0) {
        throw FormatError(fmt::format("{}: negativity {} outside [0, 1]", where, rec.n_a));
    }
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

void write_csv(const Dataset& data, std::ostream& out) {
    fmt::print(out, "{} version={} seed={} count={} digest={:#018x}\n", kCsvTag, data.header.version,
               data.header.seed, data.header.count, data.header.digest);
    fmt::print(out, "{}\n", kCsvColumns);
    for (const auto& rec : data.records) {
        for (double v : rec.p) fmt::print(out, "{:.17g},", v);
        fmt::print(out, "{:.17g}\n", rec.n_a);
    }
}

void write_binary(const Dataset& data, std::ostream& out) {
    using detail::write_le;
    out.write(kDatasetMagic, sizeof kDatasetMagic);
    write_le<std::uint32_t>(out, data.header.version);
    write_le<std::uint64_t>(out, data.header.seed);
    write_le<std::uint64_t>(out, data.header.count);
    for (const auto& rec : data.records) {
        for (double v : rec.p) write_le<double>(out, v);
        write_le<double>(out, rec.n_a);
    }
}

Dataset read_binary(std::istream& in, const std::string& name) {
    using detail::read_le;
    char magic[sizeof kDatasetMagic] = {};
    in.read(magic, sizeof magic);
    Dataset data;
    data.header.version = read_le<std::uint32_t>(in, "dataset version");
    if (data.header.version != kDatasetVersion) {
        throw FormatError(fmt::format("{}: unsupported dataset version {}", name, data.header.version));
    }
    data.header.seed = read_le<std::uint64_t>(in, "dataset seed");
    data.header.count = read_le<std::uint64_t>(in, "record count");
    data.header.digest = generator_digest();
    // Guard the reservation against corrupt counts.
    data.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(data.header.count, 1u << 24)));
    for (std::uint64_t i = 0; i < data.header.count; ++i) {
        DatasetRecord rec;
        rec.index = i;
        for (double& v : rec.p) v = read_le<double>(in, "record");
        rec.n_a = read_le<double>(in, "record");
        validate_record(rec, fmt::format("{}: record {}", name, i));
        data.records.push_back(rec);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError(fmt::format("{}: trailing bytes after {} records", name, data.header.count));
    }
    return data;
}

template <typename T>
T parse_number(std::string_view text, const std::string& where) {
    T value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    int base = 10;
    if constexpr (std::is_integral_v<T>) {
        if (text.starts_with("0x")) {
            first += 2;
            base = 16;
        }
        const auto [ptr, ec] = std::from_chars(first, last, value, base);
        if (ec != std::errc{} || ptr != last) throw FormatError(fmt::format("{}: bad number '{}'", where, text));
    } else {
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) throw FormatError(fmt::format("{}: bad number '{}'", where, text));
    }
    return value;
}

void parse_csv_tag(std::string_view line, DatasetHeader& header, const std::string& name) {
    std::istringstream fields{std::string(line.substr(kCsvTag.size()))};
    std::string field;
    while (fields >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string_view value = std::string_view(field).substr(eq + 1);
        if (key == "version") header.version = parse_number<std::uint32_t>(value, name);
        else if (key == "seed") header.seed = parse_number<std::uint64_t>(value, name);
        else if (key == "count") header.count = parse_number<std::uint64_t>(value, name);
        else if (key == "digest") header.digest = parse_number<std::uint64_t>(value, name);
    }
}

Dataset read_csv(std::istream& in, const std::string& name) {
    Dataset data;
    std::string line;
    bool have_tag = false;
    if (!std::getline(in, line)) throw FormatError(fmt::format("{}: empty file", name));
    if (line.starts_with(kCsvTag)) {
        have_tag = true;
        parse_csv_tag(line, data.header, name);
        if (data.header.version != kDatasetVersion) {
            throw FormatError(fmt::format("{}: unsupported dataset version {}", name, data.header.version));
        }
        if (data.header.digest != generator_digest()) {
            throw FormatError(fmt::format("{}: generator digest {:#018x} does not match {:#018x}", name,
                                          data.header.digest, generator_digest()));
        }
        if (!std::getline(in, line)) throw FormatError(fmt::format("{}: missing column header", name));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvColumns) {
        throw FormatError(fmt::format("{}: unexpected column header '{}'", name, line));
    }

    std::size_t line_no = have_tag ? 2 : 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = fmt::format("{}:{}", name, line_no);
        DatasetRecord rec;
        rec.index = data.records.size();
        std::string_view rest = line;
        for (std::size_t k = 0; k <= kMaxConfigs; ++k) {
            const auto comma = rest.find(',');
            const bool last = k == kMaxConfigs;
            if (last != (comma == std::string_view::npos)) {
                throw FormatError(fmt::format("{}: expected 11 comma-separated values", where));
            }
            const double v = parse_number<double>(rest.substr(0, comma), where);
            if (last) rec.n_a = v;
            else rec.p[k] = v;
            rest = last ? std::string_view{} : rest.substr(comma + 1);
        }
        validate_record(rec, where);
        data.records.push_back(rec);
    }
    if (have_tag) {
        if (data.records.size() != data.header.count) {
            throw FormatError(fmt::format("{}: header announces {} records, found {}", name,
                                          data.header.count, data.records.size()));
        }
    } else {
        data.header.count = data.records.size();
        data.header.digest = generator_digest();
    }
    return data;
}

}  // namespace

std::uint64_t generator_digest() {
    static const std::uint64_t digest = fnv1a(
        "collneg generator v1;"
        "spectrum=r1,r2(1-d1),r3(1-d1-d2),closure;"
        "unitary=six-block offsets 2,1,0,2,1,2 draws xi,alpha,psi,chi;"
        "rho4=rho x SWAP rho SWAP, bell on middle pair;"
        "povm=tetrahedral (+++,+--,-+-,--+);"
        "configs=11,22,33,44,13,24,14,12,23,34;"
        "rng=mt19937_64 splitmix substreams");
    return digest;
}

DatasetRecord generate_record(std::uint64_t seed, std::uint64_t index) {
    static const CollectiveMeasurement measurement;
    Rng rng = Rng::substream(seed, index);
    const DensityMatrix rho = random_state(rng);
    DatasetRecord rec;
    rec.index = index;
    const auto probs = measurement.all_probabilities(rho);
    for (std::size_t k = 0; k < probs.size(); ++k) rec.p[k] = clamp_unit(probs[k], "probability", index);
    rec.n_a = clamp_unit(negativity(rho), "negativity", index);
    return rec;
}

Dataset generate_dataset(std::uint64_t n, std::uint64_t seed, unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    Dataset data;
    data.header = DatasetHeader{kDatasetVersion, seed, n, generator_digest()};
    data.records.resize(static_cast<std::size_t>(n));

    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) data.records[static_cast<std::size_t>(i)] = generate_record(seed, i);
    };
    const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(n, 1)));
    if (workers <= 1) {
        work(0, n);
        return data;
    }
    // Each worker owns a contiguous block; exceptions are rethrown in index order.
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (n + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t begin = std::min(n, w * chunk);
            const std::uint64_t end = std::min(n, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path, DatasetFormat format) {
    if (data.header.count != data.records.size()) {
        throw FormatError(fmt::format("save_dataset: header count {} != {} records", data.header.count,
                                      data.records.size()));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    if (format == DatasetFormat::Csv) write_csv(data, out);
    else write_binary(data, out);
    out.flush();
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    const std::string name = path.string();
    char magic[sizeof kDatasetMagic] = {};
    in.read(magic, sizeof magic);
    const bool binary = in.gcount() == sizeof magic && std::equal(magic, magic + sizeof magic, kDatasetMagic);
    in.clear();
    in.seekg(0);
    return binary ? read_binary(in, name) : read_csv(in, name);
}

std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_dataset(
    std::span<const DatasetRecord> records, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw DimensionError(fmt::format("split: fraction {} must lie strictly between 0 and 1", fraction));
    }
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(records.size()) + 0.5));
    std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> out;
    out.first.reserve(n_train);
    out.second.reserve(records.size() - n_train);
    for (std::size_t k = 0; k < order.size(); ++k) {
        (k < n_train ? out.first : out.second).push_back(records[order[k]]);
    }
    return out;
}

LabeledSet to_labeled(std::span<const DatasetRecord> records, int b, Label label) {
    require_config_count(b);
    LabeledSet set;
    set.b = b;
    set.features.reserve(records.size() * static_cast<std::size_t>(b));
    set.labels.reserve(records.size());
    for (const auto& rec : records) {
        set.features.insert(set.features.end(), rec.p.begin(), rec.p.begin() + b);
        set.labels.push_back(label == Label::Negativity ? rec.n_a : rec.n_a * rec.n_a);
    }
    return set;
}

std::vector<std::size_t> histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw DimensionError("histogram: need bins > 0 and hi > lo");
    std::vector<std::size_t> counts(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        if (!(v >= lo && v <= hi)) continue;
        auto k = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(k, bins - 1)] += 1;
    }
    return counts;
}

}  // namespace collneg
