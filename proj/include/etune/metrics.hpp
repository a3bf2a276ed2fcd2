#pragma once

#include <vector>

namespace etune {

// Ranks with average-rank tie handling, 1-based.
std::vector<double> average_ranks(const std::vector<double>& values);

// Spearman rank correlation (ties averaged). Throws LengthMismatch /
// EmptyInput. Returns 0 when either input is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

} // namespace etune
