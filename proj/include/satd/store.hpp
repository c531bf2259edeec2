#pragma once

#include "satd/tracker.hpp"

#include <string>
#include <vector>

struct sqlite3;

namespace satd {

struct RowCounts {
    int commits = 0;
    int satd = 0;
    int files = 0;
};

// Embedded relational store holding the mined dataset.
//
// Tables: Projects(p_id, p_name, p_url), Commits(c_sha, p_id, author_name,
// author_time, committer_name, committer_time), SATD(satd_id,
// satd_instance_id, p_id, resolution, parent_sha, child_sha, old_file_id,
// new_file_id) and SATDInFile(f_id, f_comment, f_comment_type, f_path,
// start_line, end_line, containing_class, containing_method).
class Store {
public:
    // Opens or creates the database file; schema creation is idempotent.
    static Store open(const std::string& path);

    Store(Store&& other) noexcept;
    Store& operator=(Store&& other) noexcept;
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;
    ~Store();

    long ensure_project(const std::string& name, const std::string& url);

    // Transactional insert of one mining run.
    RowCounts write_operations(long project_id, const std::vector<CommitMeta>& commits,
                               const std::vector<SatdOperation>& operations);

    // One CSV row per operation, all four tables joined; absent comments
    // render as "None".
    void export_csv(const std::string& path) const;

    // Same rows as one sortable table per project.
    void export_html(const std::string& path) const;

    long count_rows(const std::string& table) const;

private:
    explicit Store(sqlite3* db) : db_(db) {}

    sqlite3* db_ = nullptr;
};

std::string csv_escape(const std::string& field);

} // namespace satd
