#pragma once

#include "mtd/domain.hpp"
#include "mtd/environment.hpp"

#include <vector>

// Flat indices of the web configurations; language is the major factor.
namespace web {
inline constexpr mtd::Config C1{0};  // PHP|MySQL
inline constexpr mtd::Config C3{1};  // PHP|Postgres
inline constexpr mtd::Config C2{2};  // Python|MySQL
inline constexpr mtd::Config C4{3};  // Python|Postgres
inline constexpr std::size_t MH = 0, DH = 1, UNK = 2;

inline std::vector<double> only(std::size_t type) {
    std::vector<double> p(3, 0.0);
    p[type] = 1.0;
    return p;
}
}  // namespace web
