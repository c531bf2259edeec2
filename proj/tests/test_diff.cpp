#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "satd/diff.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

using namespace satd;

namespace {

// Brute-force LCS over whole lines, independent of the diff code.
std::size_t lcs_len(const std::vector<std::string>& a, const std::vector<std::string>& b,
                    std::size_t i = 0, std::size_t j = 0) {
    if (i == a.size() || j == b.size())
        return 0;
    if (a[i] == b[j])
        return 1 + lcs_len(a, b, i + 1, j + 1);
    return std::max(lcs_len(a, b, i + 1, j), lcs_len(a, b, i, j + 1));
}

std::string random_text(std::mt19937& rng, int max_lines, int alphabet) {
    std::uniform_int_distribution<int> nlines(0, max_lines);
    std::uniform_int_distribution<int> pick(0, alphabet - 1);
    std::string text;
    int n = nlines(rng);
    for (int i = 0; i < n; ++i)
        text += "line-" + std::to_string(pick(rng)) + "\n";
    // occasionally drop the final newline
    if (!text.empty() && pick(rng) == 0)
        text.pop_back();
    return text;
}

int edited_lines(const EditScript& script) {
    int total = 0;
    for (const auto& h : script.hunks)
        total += h.old_len + h.new_len;
    return total;
}

} // namespace

TEST_CASE("split_lines keeps terminators and round-trips") {
    CHECK(split_lines("").empty());
    CHECK(split_lines("a\nb\n") == std::vector<std::string>{"a\n", "b\n"});
    CHECK(split_lines("a\nb") == std::vector<std::string>{"a\n", "b"});
    CHECK(split_lines("\n\n") == std::vector<std::string>{"\n", "\n"});

    std::mt19937 rng(1);
    for (int i = 0; i < 200; ++i) {
        std::string text = random_text(rng, 12, 4);
        std::string joined;
        for (const auto& l : split_lines(text))
            joined += l;
        REQUIRE(joined == text);
    }
}

TEST_CASE("simple diffs") {
    auto script = diff_lines("a\nb\nc\n", "a\nx\nc\n", DiffAlgorithm::Myers);
    REQUIRE(script.hunks.size() == 1);
    CHECK(script.hunks[0].old_start == 2);
    CHECK(script.hunks[0].old_len == 1);
    CHECK(script.hunks[0].new_start == 2);
    CHECK(script.hunks[0].new_len == 1);
    CHECK(script.hunks[0].new_lines == std::vector<std::string>{"x\n"});

    CHECK(diff_lines("a\n", "a\n", DiffAlgorithm::Myers).empty());
    CHECK(diff_lines("", "", DiffAlgorithm::Histogram).empty());

    auto ins = diff_lines("a\nc\n", "a\nb\nc\n", DiffAlgorithm::Myers);
    REQUIRE(ins.hunks.size() == 1);
    CHECK(ins.hunks[0].old_len == 0);
    CHECK(ins.hunks[0].new_range().intersects({2, 2}));
}

TEST_CASE("round-trip apply over random inputs, both algorithms") {
    std::mt19937 rng(42);
    for (auto algorithm : {DiffAlgorithm::Myers, DiffAlgorithm::Histogram}) {
        for (int i = 0; i < 500; ++i) {
            std::string a = random_text(rng, 30, 5);
            std::string b = random_text(rng, 30, 5);
            auto script = diff_lines(a, b, algorithm);
            CAPTURE(a);
            CAPTURE(b);
            REQUIRE(apply_script(script, a) == b);
            // hunks sorted and non-overlapping on both sides
            for (std::size_t h = 1; h < script.hunks.size(); ++h) {
                REQUIRE(script.hunks[h - 1].old_start + script.hunks[h - 1].old_len <=
                        script.hunks[h].old_start);
                REQUIRE(script.hunks[h - 1].new_start + script.hunks[h - 1].new_len <=
                        script.hunks[h].new_start);
            }
        }
    }
}

TEST_CASE("Myers scripts are length-minimal versus the LCS oracle") {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
        std::string a = random_text(rng, 10, 3);
        std::string b = random_text(rng, 10, 3);
        auto la = split_lines(a);
        auto lb = split_lines(b);
        int minimal = static_cast<int>(la.size() + lb.size() - 2 * lcs_len(la, lb));
        auto script = diff_lines(a, b, DiffAlgorithm::Myers);
        CAPTURE(a);
        CAPTURE(b);
        REQUIRE(edited_lines(script) == minimal);
    }
}

TEST_CASE("hunk_impacts agrees with a set-intersection oracle") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> small(0, 6);
    auto range_set = [](const LineRange& r) {
        std::set<int> s;
        for (int v = r.first; v <= r.last; ++v)
            s.insert(v);
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        Hunk h;
        h.old_start = 1 + small(rng);
        h.old_len = small(rng);
        h.new_start = 1 + small(rng);
        h.new_len = small(rng);
        LineRange oldr{1 + small(rng), small(rng)};
        oldr.last = oldr.first + small(rng) - 1;
        LineRange newr{1 + small(rng), 0};
        newr.last = newr.first + small(rng) - 1;

        auto overlap = [&](const std::set<int>& x, const std::set<int>& y) {
            for (int v : x)
                if (y.count(v))
                    return true;
            return false;
        };
        bool expected = overlap(range_set(h.old_range()), range_set(oldr)) ||
                        overlap(range_set(h.new_range()), range_set(newr));
        REQUIRE(hunk_impacts(h, oldr, newr) == expected);
        bool old_only = overlap(range_set(h.old_range()), range_set(oldr));
        REQUIRE(hunk_impacts(h, oldr, std::nullopt) == old_only);
    }
}

TEST_CASE("insertion hunks touch the insertion point context") {
    // inserting between lines 3 and 4 must impact a comment on lines 3-5
    auto script = diff_lines("a\nb\nc\nd\ne\n", "a\nb\nc\nX\nd\ne\n", DiffAlgorithm::Myers);
    REQUIRE(script.hunks.size() == 1);
    const Hunk& h = script.hunks[0];
    CHECK(h.old_len == 0);
    CHECK(hunk_impacts(h, std::nullopt, LineRange{4, 4}));
    CHECK_FALSE(hunk_impacts(h, std::nullopt, LineRange{1, 3}));
}
