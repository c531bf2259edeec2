#include "satd/diff.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace satd {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start + 1));
        start = nl + 1;
    }
    return lines;
}

namespace {

enum class Op : unsigned char { Keep, Del, Ins };

// Classic greedy O(ND) shortest-edit-script search with a saved trace
// for backtracking. Produces a minimal op sequence.
void myers_ops(const std::vector<std::string>& a, int a_lo, int a_hi,
               const std::vector<std::string>& b, int b_lo, int b_hi,
               std::vector<Op>& ops) {
    const int n = a_hi - a_lo;
    const int m = b_hi - b_lo;
    if (n == 0 || m == 0) {
        ops.insert(ops.end(), static_cast<std::size_t>(n), Op::Del);
        ops.insert(ops.end(), static_cast<std::size_t>(m), Op::Ins);
        return;
    }

    const int max_d = n + m;
    const int offset = max_d;
    std::vector<int> v(2 * max_d + 1, 0);
    std::vector<std::vector<int>> trace;

    int final_d = -1;
    for (int d = 0; d <= max_d && final_d < 0; ++d) {
        trace.push_back(v);
        for (int k = -d; k <= d; k += 2) {
            int x;
            if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1]))
                x = v[offset + k + 1];
            else
                x = v[offset + k - 1] + 1;
            int y = x - k;
            while (x < n && y < m && a[a_lo + x] == b[b_lo + y]) {
                ++x;
                ++y;
            }
            v[offset + k] = x;
            if (x >= n && y >= m) {
                final_d = d;
                break;
            }
        }
    }
    assert(final_d >= 0);

    // Backtrack from (n, m) through the saved rows.
    std::vector<Op> rev;
    int x = n, y = m;
    for (int d = final_d; d >= 0; --d) {
        if (d == 0) {
            while (x > 0) {
                rev.push_back(Op::Keep);
                --x;
                --y;
            }
            break;
        }
        const auto& pv = trace[static_cast<std::size_t>(d)];
        const int k = x - y;
        int prev_k;
        if (k == -d || (k != d && pv[offset + k - 1] < pv[offset + k + 1]))
            prev_k = k + 1;
        else
            prev_k = k - 1;
        const int prev_x = pv[offset + prev_k];
        const int prev_y = prev_x - prev_k;
        while (x > prev_x && y > prev_y) {
            rev.push_back(Op::Keep);
            --x;
            --y;
        }
        rev.push_back(prev_k == k + 1 ? Op::Ins : Op::Del);
        x = prev_x;
        y = prev_y;
    }
    ops.insert(ops.end(), rev.rbegin(), rev.rend());
}

// Histogram-style region splitting: anchor on the least-frequent line the
// two regions share, extend the match maximally, recurse on both sides.
// Regions without a usable anchor fall back to Myers.
constexpr int kHistogramMaxChain = 64;

void histogram_ops(const std::vector<std::string>& a, int a_lo, int a_hi,
                   const std::vector<std::string>& b, int b_lo, int b_hi,
                   std::vector<Op>& ops, int depth) {
    if (a_lo >= a_hi || b_lo >= b_hi || depth > 64) {
        myers_ops(a, a_lo, a_hi, b, b_lo, b_hi, ops);
        return;
    }

    std::map<std::string_view, int> a_counts;
    for (int i = a_lo; i < a_hi; ++i)
        ++a_counts[a[static_cast<std::size_t>(i)]];

    int best_count = kHistogramMaxChain + 1;
    int best_a = -1, best_b = -1;
    for (int j = b_lo; j < b_hi; ++j) {
        auto it = a_counts.find(b[static_cast<std::size_t>(j)]);
        if (it == a_counts.end() || it->second >= best_count)
            continue;
        for (int i = a_lo; i < a_hi; ++i) {
            if (a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)]) {
                best_count = it->second;
                best_a = i;
                best_b = j;
                break;
            }
        }
    }

    if (best_a < 0) {
        myers_ops(a, a_lo, a_hi, b, b_lo, b_hi, ops);
        return;
    }

    int s_a = best_a, s_b = best_b, e_a = best_a + 1, e_b = best_b + 1;
    while (s_a > a_lo && s_b > b_lo &&
           a[static_cast<std::size_t>(s_a - 1)] == b[static_cast<std::size_t>(s_b - 1)]) {
        --s_a;
        --s_b;
    }
    while (e_a < a_hi && e_b < b_hi &&
           a[static_cast<std::size_t>(e_a)] == b[static_cast<std::size_t>(e_b)]) {
        ++e_a;
        ++e_b;
    }

    histogram_ops(a, a_lo, s_a, b, b_lo, s_b, ops, depth + 1);
    ops.insert(ops.end(), static_cast<std::size_t>(e_a - s_a), Op::Keep);
    histogram_ops(a, e_a, a_hi, b, e_b, b_hi, ops, depth + 1);
}

EditScript ops_to_script(const std::vector<Op>& ops, const std::vector<std::string>& b,
                         DiffAlgorithm algorithm) {
    EditScript script;
    script.algorithm = algorithm;
    int old_line = 1;
    int new_line = 1;
    std::size_t i = 0;
    while (i < ops.size()) {
        if (ops[i] == Op::Keep) {
            ++old_line;
            ++new_line;
            ++i;
            continue;
        }
        Hunk h;
        h.old_start = old_line;
        h.new_start = new_line;
        while (i < ops.size() && ops[i] != Op::Keep) {
            if (ops[i] == Op::Del) {
                ++h.old_len;
                ++old_line;
            } else {
                h.new_lines.push_back(b[static_cast<std::size_t>(new_line - 1)]);
                ++h.new_len;
                ++new_line;
            }
            ++i;
        }
        script.hunks.push_back(std::move(h));
    }
    return script;
}

} // namespace

EditScript diff_lines(std::string_view old_text, std::string_view new_text,
                      DiffAlgorithm algorithm) {
    const auto a = split_lines(old_text);
    const auto b = split_lines(new_text);
    std::vector<Op> ops;
    if (algorithm == DiffAlgorithm::Myers)
        myers_ops(a, 0, static_cast<int>(a.size()), b, 0, static_cast<int>(b.size()), ops);
    else
        histogram_ops(a, 0, static_cast<int>(a.size()), b, 0, static_cast<int>(b.size()),
                      ops, 0);
    return ops_to_script(ops, b, algorithm);
}

std::string apply_script(const EditScript& script, std::string_view old_text) {
    const auto a = split_lines(old_text);
    std::string out;
    int next_old = 1; // next unconsumed old line
    for (const auto& h : script.hunks) {
        if (h.old_start < next_old)
            throw std::runtime_error("apply_script: overlapping or unsorted hunks");
        for (; next_old < h.old_start; ++next_old)
            out += a[static_cast<std::size_t>(next_old - 1)];
        next_old += h.old_len;
        for (const auto& line : h.new_lines)
            out += line;
    }
    for (; next_old <= static_cast<int>(a.size()); ++next_old)
        out += a[static_cast<std::size_t>(next_old - 1)];
    return out;
}

bool hunk_impacts(const Hunk& h, const std::optional<LineRange>& old_range,
                  const std::optional<LineRange>& new_range) {
    if (old_range && h.old_range().intersects(*old_range))
        return true;
    if (new_range && h.new_range().intersects(*new_range))
        return true;
    return false;
}

} // namespace satd
