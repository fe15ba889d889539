#include "collneg/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "collneg/datasets.hpp"
#include "collneg/error.hpp"
#include "collneg/mlp.hpp"
#include "collneg/quadratic.hpp"

namespace collneg::cli {

namespace {

constexpr std::size_t kSummaryBins = 20;
constexpr std::size_t kResidualBins = 50;
constexpr double kZeroNegativity = 1e-6;

struct PublishedRow {
    double ann_r2, ann_tau, reg_r2, reg_tau;
};

// Indexed by b - 5.
constexpr std::array<PublishedRow, 6> kPublished{{
    {0.832, 0.08, 0.809, 0.09},
    {0.957, 0.04, 0.926, 0.06},
    {0.973, 0.03, 0.939, 0.05},
    {0.986, 0.02, 0.947, 0.05},
    {0.992, 0.02, 0.959, 0.04},
    {0.996, 0.01, 0.966, 0.04},
}};

// A loaded predictor of either family.
class Predictor {
public:
    explicit Predictor(const std::filesystem::path& path) {
        if (is_mlp_file(path)) {
            mlp_.emplace_back(load_mlp(path));
            b_ = mlp_.front().input_dim();
        } else {
            quad_.emplace_back(load_quadratic(path));
            b_ = quad_.front().b();
        }
        require_config_count(b_);
    }

    int b() const noexcept { return b_; }
    std::string kind() const { return mlp_.empty() ? "reg" : "ann"; }

    // Values fed to the metrics: raw quadratic output, un-squared network output.
    std::vector<double> evaluate(const LabeledSet& set) const {
        std::vector<double> out(set.rows());
        if (!mlp_.empty()) {
            const Eigen::Map<const Eigen::MatrixXd> inputs(set.features.data(), set.b,
                                                           static_cast<Eigen::Index>(set.rows()));
            const Eigen::VectorXd raw = mlp_.front().forward_batch(inputs);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = negativity_from_output(raw(static_cast<Eigen::Index>(i)));
        } else {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = quad_.front().predict_raw(set.row(i));
        }
        return out;
    }

    double predict(std::span<const double> x) const {
        return mlp_.empty() ? quad_.front().predict(x) : predict_negativity(mlp_.front(), x);
    }

private:
    int b_ = 0;
    std::vector<MlpModel> mlp_;
    std::vector<QuadraticModel> quad_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& suffix) {
    return std::filesystem::path(path.string() + suffix);
}

std::vector<int> parse_hidden(const std::string& text) {
    std::vector<int> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size() || v < 1) {
            throw Error(fmt::format("--hidden: bad layer size '{}'", item));
        }
        sizes.push_back(v);
    }
    if (sizes.empty()) throw Error("--hidden: need at least one layer size");
    return sizes;
}

// Scatter points and a residual histogram, the data behind an
// actual-vs-predicted plot with its residual inset.
void write_plot_data(const std::filesystem::path& dir, const std::string& stem,
                     std::span<const double> actual, std::span<const double> predicted) {
    std::filesystem::create_directories(dir);
    std::ostringstream scatter;
    scatter << "n_a,n_p\n";
    std::vector<double> residuals(actual.size());
    double extent = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        fmt::print(scatter, "{:.17g},{:.17g}\n", actual[i], predicted[i]);
        residuals[i] = actual[i] - predicted[i];
        extent = std::max(extent, std::abs(residuals[i]));
    }
    write_text(dir / (stem + "_scatter.csv"), scatter.str());

    if (extent == 0.0) extent = 1.0;
    const auto counts = histogram(residuals, kResidualBins, -extent, extent);
    std::ostringstream hist;
    hist << "lo,hi,count\n";
    const double width = 2.0 * extent / static_cast<double>(kResidualBins);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        fmt::print(hist, "{:.17g},{:.17g},{}\n", -extent + width * static_cast<double>(k),
                   -extent + width * static_cast<double>(k + 1), counts[k]);
    }
    write_text(dir / (stem + "_residuals.csv"), hist.str());
}

struct Options {
    std::uint64_t n = 300000;
    std::uint64_t seed = 0;
    int b = 10;
    std::string train;
    std::string test;
    std::string out;
    std::string model;
    std::string format = "bin";
    std::string hidden = "256,128";
    int epochs = 100;
    int batch = 256;
    double lr = 1e-3;
    unsigned threads = 0;
    bool deterministic = false;
    std::vector<std::string> metrics_files;
};

int cmd_generate(const Options& opt, std::ostream& out, std::ostream& err) {
    const auto format = opt.format == "csv" ? DatasetFormat::Csv : DatasetFormat::Binary;
    const Dataset data = generate_dataset(opt.n, opt.seed, opt.threads);
    save_dataset(data, opt.out, format);

    std::vector<double> labels;
    labels.reserve(data.records.size());
    std::size_t zeros = 0;
    for (const auto& rec : data.records) {
        labels.push_back(rec.n_a);
        if (rec.n_a < kZeroNegativity) ++zeros;
    }
    const double zero_fraction =
        data.records.empty() ? 0.0 : static_cast<double>(zeros) / static_cast<double>(data.records.size());
    fmt::print(out, "generated path={} count={} seed={} format={} zero_fraction={:.6f}\n", opt.out,
               data.records.size(), opt.seed, opt.format, zero_fraction);
    const auto counts = histogram(labels, kSummaryBins, 0.0, 1.0);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        fmt::print(out, "histogram lo={:.2f} hi={:.2f} count={}\n", static_cast<double>(k) / kSummaryBins,
                   static_cast<double>(k + 1) / kSummaryBins, counts[k]);
    }
    fmt::print(err, "wrote {} records to {}\n", data.records.size(), opt.out);
    return 0;
}

int cmd_fit_reg(const Options& opt, std::ostream& out, std::ostream& err) {
    const auto train = load_dataset(opt.train);
    const auto test = load_dataset(opt.test);
    const auto train_set = to_labeled(train.records, opt.b, Label::Negativity);
    const auto test_set = to_labeled(test.records, opt.b, Label::Negativity);
    fmt::print(err, "fitting quadratic model: b={} train={} test={}\n", opt.b, train_set.rows(), test_set.rows());

    const QuadraticModel model = fit_quadratic(train_set);
    std::vector<double> predicted(test_set.rows());
    for (std::size_t i = 0; i < predicted.size(); ++i) predicted[i] = model.predict_raw(test_set.row(i));
    const auto line = format_metrics(compute_metrics(test_set.labels, predicted), "reg", opt.b);
    fmt::print(out, "{}\n", line);
    if (!opt.out.empty()) {
        save_quadratic(model, opt.out);
        write_text(with_suffix(opt.out, ".metrics"), line + "\n");
    }
    return 0;
}

int cmd_train_ann(const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.deterministic) Eigen::setNbThreads(1);
    const auto train = load_dataset(opt.train);
    const auto test = load_dataset(opt.test);
    const auto train_set = to_labeled(train.records, opt.b, Label::NegativitySquared);
    const auto test_set = to_labeled(test.records, opt.b, Label::Negativity);

    TrainConfig cfg;
    cfg.epochs = opt.epochs;
    cfg.batch_size = opt.batch;
    cfg.learning_rate = opt.lr;
    cfg.hidden = parse_hidden(opt.hidden);
    fmt::print(err, "training network: b={} hidden={} epochs={} batch={} lr={} train={} seed={}\n", opt.b,
               opt.hidden, cfg.epochs, cfg.batch_size, cfg.learning_rate, train_set.rows(), opt.seed);

    Rng rng(opt.seed);
    const TrainResult result = mlp_train(train_set, cfg, rng);

    const Eigen::Map<const Eigen::MatrixXd> inputs(test_set.features.data(), test_set.b,
                                                   static_cast<Eigen::Index>(test_set.rows()));
    const Eigen::VectorXd raw = result.model.forward_batch(inputs);
    std::vector<double> predicted(test_set.rows());
    for (std::size_t i = 0; i < predicted.size(); ++i) predicted[i] = negativity_from_output(raw(static_cast<Eigen::Index>(i)));
    const auto line = format_metrics(compute_metrics(test_set.labels, predicted), "ann", opt.b);
    fmt::print(out, "{}\n", line);

    if (!opt.out.empty()) {
        save_mlp(result.model, opt.out);
        write_text(with_suffix(opt.out, ".metrics"), line + "\n");
        std::ostringstream loss;
        loss << "epoch,loss\n";
        fmt::print(loss, "0,{:.17g}\n", result.initial_loss);
        for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
            fmt::print(loss, "{},{:.17g}\n", e + 1, result.loss_history[e]);
        }
        write_text(with_suffix(opt.out, ".loss.csv"), loss.str());
    }
    return 0;
}

int cmd_eval(const Options& opt, std::ostream& out, std::ostream&) {
    const Predictor predictor(opt.model);
    const auto test = load_dataset(opt.test);
    const auto set = to_labeled(test.records, predictor.b(), Label::Negativity);
    const auto predicted = predictor.evaluate(set);
    fmt::print(out, "{}\n", format_metrics(compute_metrics(set.labels, predicted), predictor.kind(), predictor.b()));
    if (!opt.out.empty()) {
        write_plot_data(opt.out, fmt::format("{}_b{}", predictor.kind(), predictor.b()), set.labels, predicted);
    }
    return 0;
}

int cmd_predict(const Options& opt, std::istream& in, std::ostream& out) {
    const Predictor predictor(opt.model);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream tokens(line);
        std::vector<double> x;
        std::string tok;
        while (tokens >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                throw FormatError(fmt::format("stdin:{}: bad number '{}'", line_no, tok));
            }
            x.push_back(v);
        }
        if (x.empty()) continue;
        if (x.size() != static_cast<std::size_t>(predictor.b())) {
            throw FormatError(fmt::format("stdin:{}: {} values, model expects {}", line_no, x.size(), predictor.b()));
        }
        fmt::print(out, "{:.17g}\n", predictor.predict(x));
    }
    return 0;
}

int cmd_report(const Options& opt, std::ostream& out) {
    std::vector<MetricsRecord> records;
    for (const auto& path : opt.metrics_files) records.push_back(read_metrics_file(path));
    out << format_report(std::move(records));
    return 0;
}

}  // namespace

std::uint64_t default_seed() {
    if (const char* env = std::getenv("COLLNEG_SEED"); env != nullptr && *env != '\0') {
        std::string_view text(env);
        int base = 10;
        if (text.starts_with("0x") || text.starts_with("0X")) {
            text.remove_prefix(2);
            base = 16;
        }
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw Error(fmt::format("COLLNEG_SEED: cannot parse '{}'", env));
        }
        return v;
    }
    return kDefaultSeed;
}

MetricsRecord parse_metrics_line(const std::string& line) {
    std::map<std::string, std::string> fields;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw FormatError(fmt::format("metrics: bad field '{}'", tok));
        fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const char* key) -> const std::string& {
        const auto it = fields.find(key);
        if (it == fields.end()) throw FormatError(fmt::format("metrics: missing '{}'", key));
        return it->second;
    };
    auto number = [&](const char* key) {
        const std::string& text = need(key);
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0') throw FormatError(fmt::format("metrics: bad {} '{}'", key, text));
        return v;
    };
    MetricsRecord rec;
    rec.kind = need("kind");
    rec.b = static_cast<int>(number("b"));
    rec.metrics.n = static_cast<std::size_t>(number("n"));
    rec.metrics.r2 = number("r2");
    rec.metrics.tau = number("tau");
    rec.metrics.mu = number("mu");
    rec.metrics.mse = number("mse");
    return rec;
}

MetricsRecord read_metrics_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.starts_with('#')) continue;
        try {
            return parse_metrics_line(line);
        } catch (const FormatError& e) {
            throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
        }
    }
    throw FormatError(fmt::format("{}: no metrics record", path.string()));
}

bool published_reference(const std::string& kind, int b, double& r2, double& tau) {
    if (b < kMinConfigs || b > kMaxConfigs) return false;
    const auto& row = kPublished[static_cast<std::size_t>(b - kMinConfigs)];
    if (kind == "ann") {
        r2 = row.ann_r2;
        tau = row.ann_tau;
        return true;
    }
    if (kind == "reg") {
        r2 = row.reg_r2;
        tau = row.reg_tau;
        return true;
    }
    return false;
}

std::string format_report(std::vector<MetricsRecord> records) {
    std::stable_sort(records.begin(), records.end(), [](const auto& l, const auto& r) {
        return l.b != r.b ? l.b < r.b : l.kind < r.kind;
    });
    std::ostringstream out;
    fmt::print(out, "{:>3} {:<6} {:>8} {:>8} {:>9} {:>10} {:>8} {:>8}\n", "B", "model", "R2", "tau", "mu",
               "MSE", "pub_R2", "pub_tau");
    for (const auto& rec : records) {
        double r2 = 0.0;
        double tau = 0.0;
        const bool known = published_reference(rec.kind, rec.b, r2, tau);
        fmt::print(out, "{:>3} {:<6} {:>8.4f} {:>8.4f} {:>9.5f} {:>10.3e} {:>8} {:>8}\n", rec.b, rec.kind,
                   rec.metrics.r2, rec.metrics.tau, rec.metrics.mu, rec.metrics.mse,
                   known ? fmt::format("{:.3f}", r2) : "-", known ? fmt::format("{:.2f}", tau) : "-");
    }
    return out.str();
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"collneg: entanglement negativity from two-copy collective measurements", "collneg"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed_default = kDefaultSeed;
    try {
        seed_default = default_seed();
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return 2;
    }
    opt.seed = seed_default;
    const std::string seed_help =
        fmt::format("RNG seed (default 0xC011EC7, overridden by COLLNEG_SEED; current {:#x})", seed_default);

    auto* generate = app.add_subcommand("generate", "Sample random states and write a dataset");
    generate->add_option("--n", opt.n, "Number of states")->capture_default_str();
    generate->add_option("--seed", opt.seed, seed_help);
    generate->add_option("--out", opt.out, "Output dataset path")->required();
    generate->add_option("--format", opt.format, "Output encoding")
        ->check(CLI::IsMember({"csv", "bin"}))
        ->capture_default_str();
    generate->add_option("--threads", opt.threads, "Worker threads (0 = all cores)")->capture_default_str();

    auto* fit_reg = app.add_subcommand("fit-reg", "Fit the quadratic regression model");
    auto* train_ann = app.add_subcommand("train-ann", "Train the multilayer perceptron");
    for (auto* sub : {fit_reg, train_ann}) {
        sub->add_option("--train", opt.train, "Training dataset")->required()->check(CLI::ExistingFile);
        sub->add_option("--test", opt.test, "Test dataset")->required()->check(CLI::ExistingFile);
        sub->add_option("--b", opt.b, "Number of measurement configurations")
            ->check(CLI::Range(kMinConfigs, kMaxConfigs))
            ->capture_default_str();
        sub->add_option("--out", opt.out, "Model output path (metrics go to <out>.metrics)");
    }
    train_ann->add_option("--epochs", opt.epochs, "Training epochs")->check(CLI::PositiveNumber)->capture_default_str();
    train_ann->add_option("--batch", opt.batch, "Minibatch size")->check(CLI::PositiveNumber)->capture_default_str();
    train_ann->add_option("--lr", opt.lr, "Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    train_ann->add_option("--hidden", opt.hidden, "Hidden layer sizes, comma separated")->capture_default_str();
    train_ann->add_option("--seed", opt.seed, seed_help);
    train_ann->add_flag("--deterministic", opt.deterministic, "Single-threaded, bit-reproducible training");

    auto* eval = app.add_subcommand("eval", "Evaluate a saved model on a dataset");
    eval->add_option("--model", opt.model, "Model file")->required()->check(CLI::ExistingFile);
    eval->add_option("--test", opt.test, "Dataset")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", opt.out, "Directory for scatter and residual-histogram CSVs");

    auto* predict = app.add_subcommand("predict", "Predict negativity for feature rows read from stdin");
    predict->add_option("--model", opt.model, "Model file")->required()->check(CLI::ExistingFile);

    auto* report = app.add_subcommand("report", "Tabulate metrics files by B");
    report->add_option("metrics", opt.metrics_files, "Metrics files")->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*generate) return cmd_generate(opt, out, err);
        if (*fit_reg) return cmd_fit_reg(opt, out, err);
        if (*train_ann) return cmd_train_ann(opt, out, err);
        if (*eval) return cmd_eval(opt, out, err);
        if (*predict) return cmd_predict(opt, in, out);
        if (*report) return cmd_report(opt, out);
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return 1;
    }
    return 1;
}

}  // namespace collneg::cli
