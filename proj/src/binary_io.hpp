#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <type_traits>

#include "collneg/error.hpp"

namespace collneg::detail {

template <typename T>
    requires std::is_arithmetic_v<T>
void write_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    out.write(bytes.data(), sizeof(T));
}

template <typename T>
    requires std::is_arithmetic_v<T>
T read_le(std::istream& in, const char* what) {
    std::array<char, sizeof(T)> bytes{};
    if (!in.read(bytes.data(), sizeof(T))) {
        throw FormatError(std::string("truncated input while reading ") + what);
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace collneg::detail
