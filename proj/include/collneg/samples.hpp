#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace collneg {

// Row-major feature table with one label per row; the common input of the
// regression and network trainers.
struct LabeledSet {
    int b = 0;
    std::vector<double> features;  // rows() x b
    std::vector<double> labels;

    std::size_t rows() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(features).subspan(i * static_cast<std::size_t>(b),
                                                         static_cast<std::size_t>(b));
    }
};

}  // namespace collneg
