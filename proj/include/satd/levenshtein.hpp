#pragma once

#include <cstddef>
#include <string_view>

namespace satd {

// Unit-cost edit distance (insert/delete/substitute).
std::size_t levenshtein_distance(std::string_view a, std::string_view b);

// Metric-preserving normalization into [0,1]: 2d / (|a| + |b| + d).
// Two empty strings have distance 0.
double normalized_levenshtein(std::string_view a, std::string_view b);

} // namespace satd
