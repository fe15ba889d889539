#include "collneg/quadratic.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "collneg/error.hpp"
#include "collneg/measurement.hpp"

namespace collneg {

void expand_quadratic(std::span<const double> x, std::span<double> out) {
    const std::size_t n = x.size();
    if (out.size() != quadratic_term_count(static_cast<int>(n))) {
        throw DimensionError(
            fmt::format("expand_quadratic: output holds {} terms, need {}", out.size(),
                        quadratic_term_count(static_cast<int>(n))));
    }
    std::size_t k = 0;
    out[k++] = 1.0;
    for (std::size_t i = 0; i < n; ++i) out[k++] = x[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) out[k++] = x[i] * x[j];
}

std::vector<double> expand_quadratic(std::span<const double> x) {
    std::vector<double> out(quadratic_term_count(static_cast<int>(x.size())));
    expand_quadratic(x, out);
    return out;
}

QuadraticModel::QuadraticModel(int b, std::vector<double> theta) : b_(b), theta_(std::move(theta)) {
    if (b_ < 1) throw DimensionError(fmt::format("QuadraticModel: b = {} must be positive", b_));
    if (theta_.size() != quadratic_term_count(b_)) {
        throw DimensionError(fmt::format("QuadraticModel: {} coefficients for b = {} (expected {})",
                                         theta_.size(), b_, quadratic_term_count(b_)));
    }
}

double QuadraticModel::predict_raw(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(b_)) {
        throw DimensionError(
            fmt::format("QuadraticModel: input has {} features, model expects {}", x.size(), b_));
    }
    // Same term order as expand_quadratic, without the allocation.
    std::size_t k = 0;
    double acc = theta_[k++];
    for (std::size_t i = 0; i < x.size(); ++i) acc += theta_[k++] * x[i];
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i; j < x.size(); ++j) acc += theta_[k++] * x[i] * x[j];
    return acc;
}

double QuadraticModel::predict(std::span<const double> x) const {
    return std::clamp(predict_raw(x), 0.0, 1.0);
}

QuadraticModel fit_quadratic(const LabeledSet& train) {
    const auto terms = quadratic_term_count(train.b);
    const auto n = train.rows();
    if (train.features.size() != n * static_cast<std::size_t>(train.b)) {
        throw DimensionError("fit_quadratic: feature table does not match label count");
    }
    if (n < 2 * terms) {
        throw FitError(fmt::format("fit_quadratic: {} rows is fewer than twice the {} terms", n, terms));
    }

    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(terms));
    std::vector<double> buf(terms);
    for (std::size_t i = 0; i < n; ++i) {
        expand_quadratic(train.row(i), buf);
        for (std::size_t k = 0; k < terms; ++k) {
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = buf[k];
        }
    }
    const Eigen::Map<const Eigen::VectorXd> y(train.labels.data(), static_cast<Eigen::Index>(n));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(terms)) {
        throw FitError(fmt::format("fit_quadratic: design matrix rank {} < {} terms", qr.rank(), terms));
    }
    const Eigen::VectorXd theta = qr.solve(y);
    if (!theta.allFinite()) throw FitError("fit_quadratic: non-finite coefficients");
    return QuadraticModel(train.b, std::vector<double>(theta.data(), theta.data() + theta.size()));
}

void save_quadratic(const QuadraticModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    fmt::print(out, "# collneg quadratic model b={}\n", model.b());
    for (double t : model.theta()) fmt::print(out, "{:.17g}\n", t);
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

QuadraticModel parse_quadratic(const std::string& text) {
    std::vector<double> theta;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        line = line.substr(0, line.find('#'));
        std::replace_if(line.begin(), line.end(),
                        [](char c) { return c == ',' || c == '(' || c == ')'; }, ' ');
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0') {
                throw FormatError(fmt::format("quadratic model: bad number '{}'", token));
            }
            theta.push_back(v);
        }
    }
    for (int b = 1; b <= 64; ++b) {
        if (quadratic_term_count(b) == theta.size()) return QuadraticModel(b, std::move(theta));
        if (quadratic_term_count(b) > theta.size()) break;
    }
    throw FormatError(fmt::format("quadratic model: {} coefficients is not a full quadratic expansion",
                                  theta.size()));
}

QuadraticModel load_quadratic(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_quadratic(ss.str());
    } catch (const FormatError& e) {
        throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::filesystem::path reference_dir() {
    if (const char* env = std::getenv("COLLNEG_REFERENCE_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return COLLNEG_REFERENCE_DIR;
}

QuadraticModel reference_quadratic(int b) {
    require_config_count(b);
    auto model = load_quadratic(reference_dir() / fmt::format("theta_{}.txt", b));
    if (model.b() != b) {
        throw FormatError(fmt::format("reference theta for b = {} has {} features", b, model.b()));
    }
    return model;
}

}  // namespace collneg
