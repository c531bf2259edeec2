#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "satd/levenshtein.hpp"

#include <random>
#include <string>

using satd::levenshtein_distance;
using satd::normalized_levenshtein;

namespace {

// Exhaustive three-way recursion, deliberately independent of the DP
// implementation under test.
std::size_t oracle(std::string_view a, std::string_view b) {
    if (a.empty())
        return b.size();
    if (b.empty())
        return a.size();
    std::size_t sub = oracle(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
    std::size_t del = oracle(a.substr(1), b) + 1;
    std::size_t ins = oracle(a, b.substr(1)) + 1;
    return std::min({sub, del, ins});
}

std::string random_string(std::mt19937& rng, int max_len, std::string_view alphabet) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i)
        s += alphabet[pick(rng)];
    return s;
}

} // namespace

TEST_CASE("known distances") {
    CHECK(levenshtein_distance("kitten", "sitting") == 3);
    CHECK(levenshtein_distance("flaw", "lawn") == 2);
    CHECK(levenshtein_distance("", "abc") == 3);
    CHECK(levenshtein_distance("abc", "") == 3);
    CHECK(levenshtein_distance("same", "same") == 0);
    CHECK(levenshtein_distance("TODO", "todo") == 4); // case-sensitive
}

TEST_CASE("normalization formula and bounds") {
    CHECK(normalized_levenshtein("", "") == 0.0);
    CHECK(normalized_levenshtein("abc", "abc") == 0.0);
    // 2d/(|a|+|b|+d) with d=3, |a|=6, |b|=7
    CHECK(normalized_levenshtein("kitten", "sitting") == doctest::Approx(6.0 / 16.0));
    // equal-length disjoint strings: d=3 gives 6/9
    CHECK(normalized_levenshtein("aaa", "bbb") == doctest::Approx(2.0 / 3.0));
    // the upper bound is reached only by pure insertion against ""
    CHECK(normalized_levenshtein("", "x") == doctest::Approx(1.0));
}

TEST_CASE("matches exhaustive oracle on short strings") {
    std::mt19937 rng(12345);
    for (int i = 0; i < 1000; ++i) {
        std::string a = random_string(rng, 8, "abcd");
        std::string b = random_string(rng, 8, "abcd");
        CAPTURE(a);
        CAPTURE(b);
        REQUIRE(levenshtein_distance(a, b) == oracle(a, b));
    }
}

TEST_CASE("metric axioms") {
    std::mt19937 rng(777);
    std::string prev = "seed";
    for (int i = 0; i < 2000; ++i) {
        std::string a = random_string(rng, 10, "abcxyz");
        std::string b = random_string(rng, 10, "abcxyz");
        double dab = normalized_levenshtein(a, b);
        double dba = normalized_levenshtein(b, a);
        REQUIRE(dab >= 0.0);
        REQUIRE(dab <= 1.0);
        REQUIRE(dab == dba);
        REQUIRE((dab == 0.0) == (a == b));
        // triangle inequality through a rolling third point
        double dap = normalized_levenshtein(a, prev);
        double dpb = normalized_levenshtein(prev, b);
        REQUIRE(dab <= dap + dpb + 1e-12);
        prev = b;
    }
}
