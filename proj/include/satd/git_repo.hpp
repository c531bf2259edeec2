#pragma once

#include "satd/diff.hpp"
#include "satd/process.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace satd {

inline constexpr char kEmptyTreeParentSha[] =
    "0000000000000000000000000000000000000000";

struct Credentials {
    std::string username;
    std::string secret;
};

struct RepoSource {
    std::string url_or_path;
    std::optional<Credentials> credentials;
    std::optional<std::string> terminal_sha;
};

bool is_full_sha(std::string_view s);

struct CommitMeta {
    std::string sha;
    std::string author_name;
    std::int64_t author_time = 0; // UTC seconds
    std::string committer_name;
    std::int64_t committer_time = 0;

    // The synthesized parent of the root commit.
    bool is_pseudo() const { return sha == kEmptyTreeParentSha; }
    static CommitMeta empty_tree_parent() { return {kEmptyTreeParentSha, "", 0, "", 0}; }
};

struct CommitPair {
    CommitMeta parent;
    CommitMeta child;

    bool is_root_pair() const { return parent.is_pseudo(); }
};

// A local clone accessed through the git command line tool.
class GitRepository {
public:
    // Opens an existing repository or clones a remote one under workdir.
    // Cloning is idempotent: an existing clone with a matching origin is
    // reused. Throws std::runtime_error on unreachable/corrupt repos.
    static GitRepository open(const RepoSource& source, const std::string& workdir);

    const std::string& dir() const { return dir_; }

    // Named commit, or the head of the default branch when absent.
    CommitMeta resolve_terminal(const std::optional<std::string>& terminal_sha) const;

    // Oldest-first (parent, child) pairs along the first-parent chain.
    // Children with two or more parents are skipped; the root commit is
    // paired against the empty-tree pseudo-parent.
    std::vector<CommitPair> commit_pairs(const CommitMeta& terminal) const;

    // Java files differing between the pair's trees, rename detection at
    // the given similarity percentage. Binary files are skipped with a
    // warning; non-UTF8 text is decoded lossily with a warning.
    std::vector<FileChange> changed_files(const CommitPair& pair, int rename_threshold,
                                          std::vector<std::string>* warnings = nullptr) const;

    // Blob content at sha:path, or nullopt when missing or binary.
    std::optional<std::string> read_file(const std::string& sha, const std::string& path,
                                         std::vector<std::string>* warnings = nullptr) const;

    ProcessResult git(std::vector<std::string> args,
                      const std::optional<std::string>& stdin_data = std::nullopt) const;

private:
    explicit GitRepository(std::string dir) : dir_(std::move(dir)) {}

    CommitMeta commit_meta(const std::string& sha) const;

    std::string dir_;
};

} // namespace satd
