#include "satd/store.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <sqlite3.h>

namespace satd {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS Projects (
    p_id   INTEGER PRIMARY KEY,
    p_name TEXT NOT NULL,
    p_url  TEXT NOT NULL UNIQUE
);
CREATE TABLE IF NOT EXISTS Commits (
    c_sha          TEXT NOT NULL,
    p_id           INTEGER NOT NULL REFERENCES Projects(p_id),
    author_name    TEXT NOT NULL,
    author_time    INTEGER NOT NULL,
    committer_name TEXT NOT NULL,
    committer_time INTEGER NOT NULL,
    PRIMARY KEY (c_sha, p_id)
);
CREATE TABLE IF NOT EXISTS SATDInFile (
    f_id              INTEGER PRIMARY KEY,
    f_comment         TEXT NOT NULL,
    f_comment_type    TEXT NOT NULL,
    f_path            TEXT NOT NULL,
    start_line        INTEGER NOT NULL,
    end_line          INTEGER NOT NULL,
    containing_class  TEXT,
    containing_method TEXT
);
CREATE TABLE IF NOT EXISTS SATD (
    satd_id          INTEGER NOT NULL,
    satd_instance_id INTEGER NOT NULL,
    p_id             INTEGER NOT NULL REFERENCES Projects(p_id),
    resolution       TEXT NOT NULL CHECK (resolution IN (
        'SATD_ADDED','SATD_REMOVED','SATD_CHANGED','FILE_REMOVED',
        'FILE_PATH_CHANGED','CLASS_OR_METHOD_CHANGED','SATD_MOVED_FILE')),
    parent_sha       TEXT NOT NULL,
    child_sha        TEXT NOT NULL,
    old_file_id      INTEGER REFERENCES SATDInFile(f_id),
    new_file_id      INTEGER REFERENCES SATDInFile(f_id),
    PRIMARY KEY (p_id, satd_id),
    FOREIGN KEY (parent_sha, p_id) REFERENCES Commits(c_sha, p_id),
    FOREIGN KEY (child_sha, p_id) REFERENCES Commits(c_sha, p_id)
);
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
    throw std::runtime_error(what + ": " + (db ? sqlite3_errmsg(db) : "no handle"));
}

void exec(sqlite3* db, const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown sqlite error";
        sqlite3_free(err);
        throw std::runtime_error(msg);
    }
}

class Stmt {
public:
    Stmt(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
            fail(db, "prepare failed");
    }
    ~Stmt() { sqlite3_finalize(stmt_); }
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int idx, const std::string& v) {
        sqlite3_bind_text(stmt_, idx, v.c_str(), -1, SQLITE_TRANSIENT);
        return *this;
    }
    Stmt& bind(int idx, long long v) {
        sqlite3_bind_int64(stmt_, idx, v);
        return *this;
    }
    Stmt& bind_null(int idx) {
        sqlite3_bind_null(stmt_, idx);
        return *this;
    }
    bool step() {
        int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW)
            return true;
        if (rc == SQLITE_DONE)
            return false;
        fail(db_, "step failed");
    }
    void exec_done() {
        if (step())
            fail(db_, "unexpected row");
    }
    void reset() {
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }
    std::string column_text(int idx) const {
        const unsigned char* t = sqlite3_column_text(stmt_, idx);
        return t ? reinterpret_cast<const char*>(t) : "";
    }
    bool column_null(int idx) const {
        return sqlite3_column_type(stmt_, idx) == SQLITE_NULL;
    }
    long long column_i64(int idx) const { return sqlite3_column_int64(stmt_, idx); }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

const char* kExportColumns[] = {
    "project",       "satd_id",      "satd_instance_id", "resolution",
    "parent_sha",    "child_sha",    "author_name",      "author_time",
    "committer_name", "committer_time",
    "old_comment",   "old_comment_type", "old_path", "old_start_line", "old_end_line",
    "old_containing_class", "old_containing_method",
    "new_comment",   "new_comment_type", "new_path", "new_start_line", "new_end_line",
    "new_containing_class", "new_containing_method",
};

constexpr const char* kExportQuery = R"sql(
SELECT p.p_name, s.satd_id, s.satd_instance_id, s.resolution,
       s.parent_sha, s.child_sha,
       c.author_name, c.author_time, c.committer_name, c.committer_time,
       o.f_comment, o.f_comment_type, o.f_path, o.start_line, o.end_line,
       o.containing_class, o.containing_method,
       n.f_comment, n.f_comment_type, n.f_path, n.start_line, n.end_line,
       n.containing_class, n.containing_method
FROM SATD s
JOIN Projects p ON p.p_id = s.p_id
JOIN Commits c ON c.c_sha = s.child_sha AND c.p_id = s.p_id
LEFT JOIN SATDInFile o ON o.f_id = s.old_file_id
LEFT JOIN SATDInFile n ON n.f_id = s.new_file_id
ORDER BY s.p_id, s.satd_id
)sql";

constexpr int kExportColumnCount = 24;

} // namespace

std::string csv_escape(const std::string& field) {
    const bool needs_quote = field.find_first_of(",\"\n\r") != std::string::npos ||
                             field.find(' ') != std::string::npos;
    if (!needs_quote)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

Store Store::open(const std::string& path) {
    sqlite3* db = nullptr;
    if (sqlite3_open(path.c_str(), &db) != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "cannot open";
        sqlite3_close(db);
        throw std::runtime_error("cannot open store at " + path + ": " + msg);
    }
    try {
        exec(db, "PRAGMA foreign_keys = ON;");
        exec(db, kSchema);
    } catch (const std::exception& e) {
        sqlite3_close(db);
        throw std::runtime_error("cannot initialize store at " + path + ": " + e.what());
    }
    return Store(db);
}

Store::Store(Store&& other) noexcept : db_(other.db_) { other.db_ = nullptr; }

Store& Store::operator=(Store&& other) noexcept {
    if (this != &other) {
        if (db_)
            sqlite3_close(db_);
        db_ = other.db_;
        other.db_ = nullptr;
    }
    return *this;
}

Store::~Store() {
    if (db_)
        sqlite3_close(db_);
}

long Store::ensure_project(const std::string& name, const std::string& url) {
    {
        Stmt ins(db_, "INSERT OR IGNORE INTO Projects (p_name, p_url) VALUES (?, ?)");
        ins.bind(1, name).bind(2, url);
        ins.exec_done();
    }
    Stmt sel(db_, "SELECT p_id FROM Projects WHERE p_url = ?");
    sel.bind(1, url);
    if (!sel.step())
        throw std::runtime_error("project lookup failed: " + url);
    return static_cast<long>(sel.column_i64(0));
}

RowCounts Store::write_operations(long project_id, const std::vector<CommitMeta>& commits,
                                  const std::vector<SatdOperation>& operations) {
    RowCounts counts;
    exec(db_, "BEGIN");
    try {
        Stmt commit_ins(db_,
                        "INSERT OR IGNORE INTO Commits (c_sha, p_id, author_name, "
                        "author_time, committer_name, committer_time) "
                        "VALUES (?, ?, ?, ?, ?, ?)");
        for (const auto& c : commits) {
            commit_ins.bind(1, c.sha)
                .bind(2, static_cast<long long>(project_id))
                .bind(3, c.author_name)
                .bind(4, static_cast<long long>(c.author_time))
                .bind(5, c.committer_name)
                .bind(6, static_cast<long long>(c.committer_time));
            commit_ins.exec_done();
            counts.commits += sqlite3_changes(db_);
            commit_ins.reset();
        }

        Stmt file_ins(db_,
                      "INSERT INTO SATDInFile (f_comment, f_comment_type, f_path, "
                      "start_line, end_line, containing_class, containing_method) "
                      "VALUES (?, ?, ?, ?, ?, ?, ?)");
        auto insert_file = [&](const SatdOccurrence& occ) {
            file_ins.bind(1, occ.text())
                .bind(2, std::string(to_string(occ.comment.comment.kind)))
                .bind(3, occ.comment.file_path)
                .bind(4, static_cast<long long>(occ.comment.comment.start_line))
                .bind(5, static_cast<long long>(occ.comment.comment.end_line));
            if (occ.comment.containing_class)
                file_ins.bind(6, *occ.comment.containing_class);
            else
                file_ins.bind_null(6);
            if (occ.comment.containing_method)
                file_ins.bind(7, *occ.comment.containing_method);
            else
                file_ins.bind_null(7);
            file_ins.exec_done();
            file_ins.reset();
            counts.files += 1;
            return sqlite3_last_insert_rowid(db_);
        };

        Stmt satd_ins(db_,
                      "INSERT INTO SATD (satd_id, satd_instance_id, p_id, resolution, "
                      "parent_sha, child_sha, old_file_id, new_file_id) "
                      "VALUES (?, ?, ?, ?, ?, ?, ?, ?)");
        for (const auto& op : operations) {
            std::optional<long long> old_fid, new_fid;
            if (op.old_occurrence)
                old_fid = insert_file(*op.old_occurrence);
            if (op.new_occurrence)
                new_fid = insert_file(*op.new_occurrence);
            satd_ins.bind(1, static_cast<long long>(op.satd_id))
                .bind(2, static_cast<long long>(op.instance_id))
                .bind(3, static_cast<long long>(project_id))
                .bind(4, std::string(to_string(op.resolution)))
                .bind(5, op.parent_commit.sha)
                .bind(6, op.child_commit.sha);
            if (old_fid)
                satd_ins.bind(7, *old_fid);
            else
                satd_ins.bind_null(7);
            if (new_fid)
                satd_ins.bind(8, *new_fid);
            else
                satd_ins.bind_null(8);
            satd_ins.exec_done();
            satd_ins.reset();
            counts.satd += 1;
        }
        exec(db_, "COMMIT");
    } catch (...) {
        exec(db_, "ROLLBACK");
        throw;
    }
    return counts;
}

namespace {

struct ExportRow {
    std::string project;
    std::vector<std::string> fields; // already stringified, "None" for absent comments
};

std::vector<ExportRow> collect_rows(sqlite3* db) {
    std::vector<ExportRow> rows;
    Stmt sel(db, kExportQuery);
    while (sel.step()) {
        ExportRow row;
        row.project = sel.column_text(0);
        for (int i = 0; i < kExportColumnCount; ++i) {
            if (sel.column_null(i)) {
                // absent comment snapshots render as "None", like the
                // resolution tables shown to users
                const bool comment_col = i == 10 || i == 17;
                row.fields.push_back(comment_col ? "None" : "");
            } else {
                row.fields.push_back(sel.column_text(i));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

void Store::export_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write CSV to " + path);
    for (std::size_t i = 0; i < std::size(kExportColumns); ++i) {
        if (i)
            out << ',';
        out << kExportColumns[i];
    }
    out << "\r\n";
    for (const auto& row : collect_rows(db_)) {
        for (std::size_t i = 0; i < row.fields.size(); ++i) {
            if (i)
                out << ',';
            out << csv_escape(row.fields[i]);
        }
        out << "\r\n";
    }
}

void Store::export_html(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write HTML to " + path);

    auto rows = collect_rows(db_);

    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
           "<title>SATD operations</title>\n"
           "<style>table{border-collapse:collapse}td,th{border:1px solid #999;"
           "padding:2px 6px;font:13px monospace}th{cursor:pointer;background:#eee}"
           "</style>\n"
           "<script>\nfunction sortTable(table, col) {\n"
           "  var rows = Array.from(table.tBodies[0].rows);\n"
           "  var asc = table.dataset.sortCol == col ? table.dataset.sortAsc != '1' : true;\n"
           "  table.dataset.sortCol = col; table.dataset.sortAsc = asc ? '1' : '0';\n"
           "  rows.sort(function(a, b) {\n"
           "    var x = a.cells[col].textContent, y = b.cells[col].textContent;\n"
           "    var nx = parseFloat(x), ny = parseFloat(y);\n"
           "    var c = (!isNaN(nx) && !isNaN(ny)) ? nx - ny : x.localeCompare(y);\n"
           "    return asc ? c : -c;\n"
           "  });\n"
           "  rows.forEach(function(r) { table.tBodies[0].appendChild(r); });\n"
           "}\n</script>\n</head>\n<body>\n";

    std::string current_project;
    bool table_open = false;
    int table_idx = 0;
    for (const auto& row : rows) {
        if (row.project != current_project) {
            if (table_open)
                out << "</tbody>\n</table>\n";
            current_project = row.project;
            out << "<h2>" << html_escape(current_project) << "</h2>\n"
                << "<table id=\"t" << table_idx++ << "\">\n<thead>\n<tr>";
            for (std::size_t i = 0; i < std::size(kExportColumns); ++i)
                out << "<th onclick=\"sortTable(this.closest('table')," << i << ")\">"
                    << kExportColumns[i] << "</th>";
            out << "</tr>\n</thead>\n<tbody>\n";
            table_open = true;
        }
        out << "<tr>";
        for (const auto& f : row.fields)
            out << "<td>" << html_escape(f) << "</td>";
        out << "</tr>\n";
    }
    if (table_open)
        out << "</tbody>\n</table>\n";
    out << "</body>\n</html>\n";
}

long Store::count_rows(const std::string& table) const {
    Stmt sel(db_, ("SELECT COUNT(*) FROM " + table).c_str());
    if (!sel.step())
        return 0;
    return static_cast<long>(sel.column_i64(0));
}

} // namespace satd
