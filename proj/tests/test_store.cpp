#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "satd/store.hpp"

#include "helpers.hpp"

#include <vector>

using namespace satd;
using testutil::fresh_temp_dir;
using testutil::read_text_file;

namespace {

std::vector<std::string> csv_rows(const std::string& text) {
    std::vector<std::string> rows;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '"')
            in_quotes = !in_quotes;
        if (!in_quotes && c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            rows.push_back(cur);
            cur.clear();
            ++i;
            continue;
        }
        cur += c;
    }
    if (!cur.empty())
        rows.push_back(cur);
    return rows;
}

std::vector<std::string> csv_fields(const std::string& row) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < row.size(); ++i) {
        char c = row[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < row.size() && row[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

testutil::ScriptRun mined_sample() {
    return testutil::run_script(testutil::load_corpus("sample_data"), "store-sample");
}

} // namespace

TEST_CASE("csv escaping") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("has space") == "\"has space\"");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    CHECK(csv_escape("") == "");
}

TEST_CASE("schema creation is idempotent") {
    std::string db = fresh_temp_dir("schema") + "/s.sqlite";
    {
        Store store = Store::open(db);
        CHECK(store.count_rows("SATD") == 0);
    }
    Store reopened = Store::open(db); // must not fail on existing tables
    CHECK(reopened.count_rows("Projects") == 0);
}

TEST_CASE("ensure_project is keyed by url") {
    Store store = Store::open(fresh_temp_dir("proj") + "/s.sqlite");
    long a = store.ensure_project("owner/repo", "https://example.com/owner/repo");
    long b = store.ensure_project("owner/repo", "https://example.com/owner/repo");
    long c = store.ensure_project("owner/repo", "https://example.com/other/repo");
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("write_operations persists one run transactionally") {
    auto run = mined_sample();
    Store store = Store::open(fresh_temp_dir("write") + "/s.sqlite");
    long project = store.ensure_project("sample", run.repo.dir);
    RowCounts counts = store.write_operations(project, run.mined.commits,
                                              run.mined.operations);
    CHECK(counts.satd == 3);
    CHECK(counts.commits == 4); // pseudo root + three real commits
    // ADDED has one snapshot; rename has two; FILE_REMOVED has one
    CHECK(counts.files == 4);
    CHECK(store.count_rows("SATD") == 3);

    // replaying the same run collides on (p_id, satd_id)
    CHECK_THROWS(store.write_operations(project, run.mined.commits, run.mined.operations));
    // and the failed transaction leaves no partial rows behind
    CHECK(store.count_rows("SATD") == 3);
    CHECK(store.count_rows("SATDInFile") == 4);
}

TEST_CASE("csv export joins all tables and renders None for absent sides") {
    auto run = mined_sample();
    std::string dir = fresh_temp_dir("csv");
    Store store = Store::open(dir + "/s.sqlite");
    long project = store.ensure_project("sample", run.repo.dir);
    store.write_operations(project, run.mined.commits, run.mined.operations);
    store.export_csv(dir + "/out.csv");

    std::string text = read_text_file(dir + "/out.csv");
    CHECK(text.find("\r\n") != std::string::npos);
    auto rows = csv_rows(text);
    REQUIRE(rows.size() == 4); // header + three operations

    auto header = csv_fields(rows[0]);
    REQUIRE(header.size() == 24);
    CHECK(header[0] == "project");
    CHECK(header[3] == "resolution");
    CHECK(header[10] == "old_comment");
    CHECK(header[17] == "new_comment");

    auto added = csv_fields(rows[1]);
    REQUIRE(added.size() == 24);
    CHECK(added[3] == "SATD_ADDED");
    CHECK(added[10] == "None"); // no old side on an addition
    CHECK(added[17] == "TODO: 404");
    CHECK(added[4] == std::string(40, '0')); // root pseudo parent

    auto renamed = csv_fields(rows[2]);
    CHECK(renamed[3] == "FILE_PATH_CHANGED");
    CHECK(renamed[12] == "src/share/org/apache/tomcat/Response.java");
    CHECK(renamed[19] == "modules/tomcat/src/Response.java");

    auto removed = csv_fields(rows[3]);
    CHECK(removed[3] == "FILE_REMOVED");
    CHECK(removed[10] == "TODO: 404");
    CHECK(removed[17] == "None");

    // one shared instance across the lifespan
    CHECK(added[2] == renamed[2]);
    CHECK(renamed[2] == removed[2]);
}

TEST_CASE("csv export is deterministic") {
    auto run = mined_sample();
    std::string dir = fresh_temp_dir("det");
    for (int i = 0; i < 2; ++i) {
        Store store = Store::open(dir + "/s" + std::to_string(i) + ".sqlite");
        long project = store.ensure_project("sample", "url");
        store.write_operations(project, run.mined.commits, run.mined.operations);
        store.export_csv(dir + "/out" + std::to_string(i) + ".csv");
    }
    CHECK(read_text_file(dir + "/out0.csv") == read_text_file(dir + "/out1.csv"));
}

TEST_CASE("html export lists every operation row") {
    auto run = mined_sample();
    std::string dir = fresh_temp_dir("html");
    Store store = Store::open(dir + "/s.sqlite");
    long project = store.ensure_project("sample", run.repo.dir);
    store.write_operations(project, run.mined.commits, run.mined.operations);
    store.export_html(dir + "/out.html");

    std::string html = read_text_file(dir + "/out.html");
    CHECK(html.find("<table") != std::string::npos);
    CHECK(html.find("sortTable") != std::string::npos);
    CHECK(html.find("SATD_ADDED") != std::string::npos);
    CHECK(html.find("FILE_PATH_CHANGED") != std::string::npos);
    CHECK(html.find("FILE_REMOVED") != std::string::npos);
    CHECK(html.find("TODO: 404") != std::string::npos);
}

TEST_CASE("same satd ids under different projects do not collide") {
    auto run = mined_sample();
    Store store = Store::open(fresh_temp_dir("twoproj") + "/s.sqlite");
    long a = store.ensure_project("a", "url-a");
    long b = store.ensure_project("b", "url-b");
    store.write_operations(a, run.mined.commits, run.mined.operations);
    store.write_operations(b, run.mined.commits, run.mined.operations);
    CHECK(store.count_rows("SATD") == 6);
}
