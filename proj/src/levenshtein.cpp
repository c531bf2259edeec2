#include "satd/levenshtein.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace satd {

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
    if (a.size() > b.size())
        std::swap(a, b);
    if (a.empty())
        return b.size();

    // Single-row DP over the shorter string.
    std::vector<std::size_t> row(a.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});

    for (std::size_t j = 1; j <= b.size(); ++j) {
        std::size_t prev_diag = row[0];
        row[0] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t cur = row[i];
            std::size_t subst = prev_diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[i] = std::min({row[i] + 1, row[i - 1] + 1, subst});
            prev_diag = cur;
        }
    }
    return row[a.size()];
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty())
        return 0.0;
    const double d = static_cast<double>(levenshtein_distance(a, b));
    return 2.0 * d / (static_cast<double>(a.size()) + static_cast<double>(b.size()) + d);
}

} // namespace satd
