#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "satd/comment_scan.hpp"

#include <random>
#include <string>

using namespace satd;

TEST_CASE("line, block, and javadoc comments") {
    const std::string src = "int a; // trailing note\n"
                            "/* block\n * body\n */\n"
                            "/** doc text */\n"
                            "/**/\n";
    auto comments = scan_comments(src);
    REQUIRE(comments.size() == 4);

    CHECK(comments[0].kind == CommentKind::Line);
    CHECK(comments[0].text == "trailing note");
    CHECK(comments[0].start_line == 1);
    CHECK(comments[0].code_before);

    CHECK(comments[1].kind == CommentKind::Block);
    CHECK(comments[1].text == "block\nbody");
    CHECK(comments[1].start_line == 2);
    CHECK(comments[1].end_line == 4);
    CHECK_FALSE(comments[1].code_before);

    CHECK(comments[2].kind == CommentKind::JavaDoc);
    CHECK(comments[2].text == "doc text");

    // "/**/" is an empty block comment, not javadoc
    CHECK(comments[3].kind == CommentKind::Block);
    CHECK(comments[3].text.empty());
}

TEST_CASE("string and char literals shield comment markers") {
    const std::string src = "String s = \"// not a comment\";\n"
                            "char c = '/'; char d = '\\''; // real\n"
                            "String u = \"/* nope */\";\n";
    auto comments = scan_comments(src);
    REQUIRE(comments.size() == 1);
    CHECK(comments[0].text == "real");
    CHECK(comments[0].start_line == 2);
}

TEST_CASE("leading slash runs and decoration are stripped") {
    auto c1 = scan_comments("//// quad slash note\n");
    REQUIRE(c1.size() == 1);
    CHECK(c1[0].text == "quad slash note");

    auto c2 = scan_comments("/***\n *** starry\n ***/\n");
    REQUIRE(c2.size() == 1);
    CHECK(c2[0].text == "starry");
}

TEST_CASE("unterminated block comment runs to end of input") {
    auto comments = scan_comments("int a;\n/* open\nstill open");
    REQUIRE(comments.size() == 1);
    CHECK(comments[0].text == "open\nstill open");
    CHECK(comments[0].end_line == 3);
}

TEST_CASE("grouping merges only strictly consecutive own-line comments") {
    const std::string src = "// first\n"
                            "// second\n"
                            "\n"
                            "// after gap\n"
                            "int x; // with code\n"
                            "// next\n";
    auto grouped = group_adjacent(scan_comments(src));
    REQUIRE(grouped.size() == 4);
    CHECK(grouped[0].text == "first\nsecond");
    CHECK(grouped[0].start_line == 1);
    CHECK(grouped[0].end_line == 2);
    CHECK(grouped[1].text == "after gap");
    CHECK(grouped[2].text == "with code"); // code_before blocks grouping
    CHECK(grouped[3].text == "next");
}

TEST_CASE("grouping is idempotent") {
    const std::string src = "// a\n// b\n// c\nint x;\n// d\n";
    auto once = group_adjacent(scan_comments(src));
    auto twice = group_adjacent(once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(once[i].text == twice[i].text);
}

TEST_CASE("block comments never merge") {
    auto grouped = group_adjacent(scan_comments("/* a */\n/* b */\n// c\n// d\n"));
    REQUIRE(grouped.size() == 3);
    CHECK(grouped[0].text == "a");
    CHECK(grouped[1].text == "b");
    CHECK(grouped[2].text == "c\nd");
}

TEST_CASE("containing class and method attach to comments") {
    const std::string src =
        "package p;\n"
        "// header note\n"
        "public class Outer {\n"
        "    // field note\n"
        "    int f;\n"
        "    public void doWork(int n, String s) {\n"
        "        // body note\n"
        "        if (n > 0) {\n"
        "            // nested note\n"
        "        }\n"
        "    }\n"
        "    class Inner {\n"
        "        void innerRun() {\n"
        "            // inner note\n"
        "        }\n"
        "    }\n"
        "}\n";
    auto ctx = attach_context(src, group_adjacent(scan_comments(src)), "A.java");
    REQUIRE(ctx.size() == 5);

    CHECK_FALSE(ctx[0].containing_class.has_value()); // before the type
    CHECK_FALSE(ctx[0].containing_method.has_value());

    CHECK(ctx[1].containing_class == "Outer");
    CHECK_FALSE(ctx[1].containing_method.has_value());

    CHECK(ctx[2].containing_class == "Outer");
    CHECK(ctx[2].containing_method == "public void doWork(int n, String s)");

    CHECK(ctx[3].containing_class == "Outer"); // control block is no method
    CHECK(ctx[3].containing_method == "public void doWork(int n, String s)");

    CHECK(ctx[4].containing_class == "Inner");
    CHECK(ctx[4].containing_method == "void innerRun()");
}

TEST_CASE("control keywords and initializers are not methods") {
    const std::string src =
        "class C {\n"
        "    int[] data = new int[] {1, 2};\n"
        "    void real() {\n"
        "        while (true) {\n"
        "            // looped\n"
        "        }\n"
        "    }\n"
        "}\n";
    auto ctx = attach_context(src, scan_comments(src), "C.java");
    REQUIRE(ctx.size() == 1);
    CHECK(ctx[0].containing_class == "C");
    CHECK(ctx[0].containing_method == "void real()");
}

TEST_CASE("annotations are stripped from signatures") {
    const std::string src =
        "class C {\n"
        "    @Override\n"
        "    @SuppressWarnings(\"all\")\n"
        "    public String name() {\n"
        "        // tagged\n"
        "        return null;\n"
        "    }\n"
        "}\n";
    auto ctx = attach_context(src, scan_comments(src), "C.java");
    REQUIRE(ctx.size() == 1);
    CHECK(ctx[0].containing_method == "public String name()");
}

TEST_CASE("scanner is total on arbitrary bytes") {
    std::mt19937 rng(4242);
    std::uniform_int_distribution<int> len(0, 300);
    const std::string alphabet = "ab{}()/*\"'\\\n; =->@c/*";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 300; ++i) {
        std::string src;
        int n = len(rng);
        for (int j = 0; j < n; ++j)
            src += alphabet[pick(rng)];
        auto comments = group_adjacent(scan_comments(src));
        auto ctx = attach_context(src, comments, "F.java"); // must not throw
        CHECK(ctx.size() == comments.size());
        for (const auto& c : comments) {
            CHECK(c.start_line >= 1);
            CHECK(c.end_line >= c.start_line);
        }
    }
}
