#include "satd/git_repo.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace satd {

namespace {

constexpr char kFieldSep = '\x1f';

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            return parts;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::int64_t parse_i64(std::string_view s) {
    std::int64_t v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

bool ends_with_java(std::string_view path) { return path.ends_with(".java"); }

// Name a clone directory after the final URL path component.
std::string clone_dir_name(std::string_view url) {
    std::string u(url);
    while (!u.empty() && (u.back() == '/' || u.back() == '\\'))
        u.pop_back();
    if (u.ends_with(".git"))
        u.resize(u.size() - 4);
    auto slash = u.find_last_of("/:");
    std::string name = slash == std::string::npos ? u : u.substr(slash + 1);
    for (char& c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.')
            c = '_';
    return name.empty() ? "repo" : name;
}

std::string with_credentials(const std::string& url, const std::optional<Credentials>& creds) {
    if (!creds)
        return url;
    const std::string scheme_sep = "://";
    auto pos = url.find(scheme_sep);
    if (pos == std::string::npos)
        return url;
    return url.substr(0, pos + scheme_sep.size()) + creds->username + ":" + creds->secret +
           "@" + url.substr(pos + scheme_sep.size());
}

// Replaces invalid UTF-8 byte sequences with '?'. Returns true if anything
// had to be replaced.
bool sanitize_utf8(std::string& text) {
    bool replaced = false;
    for (std::size_t i = 0; i < text.size();) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c >> 5) == 0x6) len = 2;
        else if ((c >> 4) == 0xe) len = 3;
        else if ((c >> 3) == 0x1e) len = 4;
        else len = 0;
        bool ok = len > 0 && i + len <= text.size();
        for (std::size_t j = 1; ok && j < len; ++j)
            ok = (static_cast<unsigned char>(text[i + j]) >> 6) == 0x2;
        if (ok) {
            i += len;
        } else {
            text[i] = '?';
            replaced = true;
            ++i;
        }
    }
    return replaced;
}

} // namespace

bool is_full_sha(std::string_view s) {
    return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

ProcessResult GitRepository::git(std::vector<std::string> args,
                                 const std::optional<std::string>& stdin_data) const {
    std::vector<std::string> argv = {"git", "-C", dir_};
    argv.insert(argv.end(), std::make_move_iterator(args.begin()),
                std::make_move_iterator(args.end()));
    ProcessOptions opts;
    opts.stdin_data = stdin_data;
    return run_process(argv, opts);
}

GitRepository GitRepository::open(const RepoSource& source, const std::string& workdir) {
    const std::string& target = source.url_or_path;

    std::error_code ec;
    if (fs::exists(target, ec)) {
        GitRepository repo(target);
        ProcessResult check = repo.git({"rev-parse", "--git-dir"});
        if (!check.ok())
            throw std::runtime_error("corrupt repository: " + target + ": " + check.err);
        return repo;
    }
    if (target.find("://") == std::string::npos && !target.starts_with("git@"))
        throw std::runtime_error("unreachable repository: " + target);

    fs::create_directories(workdir);
    const std::string clone_path = (fs::path(workdir) / clone_dir_name(target)).string();

    if (fs::exists(clone_path)) {
        GitRepository repo(clone_path);
        ProcessResult origin = repo.git({"remote", "get-url", "origin"});
        std::string url = origin.out;
        while (!url.empty() && (url.back() == '\n' || url.back() == '\r'))
            url.pop_back();
        if (origin.ok() && (url == target || url == with_credentials(target, source.credentials)))
            return repo;
        throw std::runtime_error("clone path occupied by a different repository: " + clone_path);
    }

    ProcessResult res = run_process({"git", "clone", "--quiet",
                                     with_credentials(target, source.credentials), clone_path});
    if (!res.ok()) {
        const bool auth = res.err.find("Authentication") != std::string::npos ||
                          res.err.find("authentication") != std::string::npos;
        throw std::runtime_error(std::string(auth ? "authentication failure: "
                                                  : "unreachable repository: ") +
                                 target + ": " + res.err);
    }
    return GitRepository(clone_path);
}

CommitMeta GitRepository::commit_meta(const std::string& sha) const {
    ProcessResult res =
        git({"show", "-s", "--format=%H%x1f%an%x1f%at%x1f%cn%x1f%ct", sha});
    if (!res.ok())
        throw std::runtime_error("commit not found: " + sha);
    std::string line = res.out;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
        line.pop_back();
    auto fields = split(line, kFieldSep);
    if (fields.size() != 5)
        throw std::runtime_error("unexpected git show output for " + sha);
    return {fields[0], fields[1], parse_i64(fields[2]), fields[3], parse_i64(fields[4])};
}

CommitMeta GitRepository::resolve_terminal(const std::optional<std::string>& terminal_sha) const {
    if (!terminal_sha) {
        ProcessResult res = git({"rev-parse", "HEAD"});
        if (!res.ok())
            throw std::runtime_error("repository has no commits: " + dir_);
        std::string sha = res.out;
        while (!sha.empty() && std::isspace(static_cast<unsigned char>(sha.back())))
            sha.pop_back();
        return commit_meta(sha);
    }
    if (!is_full_sha(*terminal_sha))
        throw std::runtime_error("terminal commit is not a 40-hex sha: " + *terminal_sha);
    ProcessResult res = git({"rev-parse", "--verify", "--quiet", *terminal_sha + "^{commit}"});
    if (!res.ok())
        throw std::runtime_error("commit not found: " + *terminal_sha);
    return commit_meta(*terminal_sha);
}

std::vector<CommitPair> GitRepository::commit_pairs(const CommitMeta& terminal) const {
    ProcessResult res = git({"rev-list", "--first-parent", "--parents",
                             "--format=%an%x1f%at%x1f%cn%x1f%ct", terminal.sha});
    if (!res.ok())
        throw std::runtime_error("rev-list failed: " + res.err);

    struct Entry {
        CommitMeta meta;
        std::size_t parent_count = 0;
    };
    std::vector<Entry> chain; // newest first

    std::istringstream lines(res.out);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.starts_with("commit "))
            continue;
        auto shas = split(line.substr(7), ' ');
        std::string meta_line;
        if (!std::getline(lines, meta_line))
            break;
        auto fields = split(meta_line, kFieldSep);
        if (fields.size() != 4)
            continue;
        Entry e;
        e.meta = {shas[0], fields[0], parse_i64(fields[1]), fields[2], parse_i64(fields[3])};
        e.parent_count = shas.size() - 1;
        chain.push_back(std::move(e));
    }
    std::reverse(chain.begin(), chain.end()); // oldest first

    std::vector<CommitPair> pairs;
    pairs.reserve(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (i == 0) {
            if (chain[0].parent_count == 0)
                pairs.push_back({CommitMeta::empty_tree_parent(), chain[0].meta});
            // A truncated chain (shallow clone) has no root pair.
            continue;
        }
        if (chain[i].parent_count == 1)
            pairs.push_back({chain[i - 1].meta, chain[i].meta});
        // merge commits produce no pair; the chain stays connected through
        // their first parent
    }
    return pairs;
}

std::optional<std::string> GitRepository::read_file(const std::string& sha,
                                                    const std::string& path,
                                                    std::vector<std::string>* warnings) const {
    ProcessResult res = git({"show", sha + ":" + path});
    if (!res.ok())
        return std::nullopt;
    if (res.out.find('\0') != std::string::npos) {
        if (warnings)
            warnings->push_back("skipping binary file " + path + " at " + sha);
        return std::nullopt;
    }
    std::string text = std::move(res.out);
    if (sanitize_utf8(text) && warnings)
        warnings->push_back("non-UTF8 content in " + path + " at " + sha +
                            "; decoded with replacement");
    return text;
}

std::vector<FileChange> GitRepository::changed_files(const CommitPair& pair,
                                                     int rename_threshold,
                                                     std::vector<std::string>* warnings) const {
    rename_threshold = std::clamp(rename_threshold, 1, 100);
    std::vector<std::string> args = {"diff-tree", "-r", "--no-commit-id", "--name-status", "-z",
                                     "--find-renames=" + std::to_string(rename_threshold) + "%"};
    if (pair.is_root_pair()) {
        args.push_back("--root");
        args.push_back(pair.child.sha);
    } else {
        args.push_back(pair.parent.sha);
        args.push_back(pair.child.sha);
    }
    ProcessResult res = git(std::move(args));
    if (!res.ok())
        throw std::runtime_error("diff-tree failed: " + res.err);

    std::vector<FileChange> changes;
    auto fields = split(res.out, '\0');
    std::size_t i = 0;
    while (i < fields.size()) {
        const std::string& status = fields[i];
        if (status.empty()) {
            ++i;
            continue;
        }
        FileChange fc;
        const char kind = status[0];
        if (kind == 'R' || kind == 'C') {
            if (i + 2 >= fields.size())
                break;
            fc.kind = ChangeKind::Renamed;
            fc.old_path = fields[i + 1];
            fc.new_path = fields[i + 2];
            i += 3;
        } else {
            if (i + 1 >= fields.size())
                break;
            if (kind == 'A')
                fc.kind = ChangeKind::Added, fc.new_path = fields[i + 1];
            else if (kind == 'D')
                fc.kind = ChangeKind::Removed, fc.old_path = fields[i + 1];
            else
                fc.kind = ChangeKind::Modified, fc.old_path = fc.new_path = fields[i + 1];
            i += 2;
        }

        const std::string& probe = fc.new_path ? *fc.new_path : *fc.old_path;
        if (!ends_with_java(probe) && !(fc.old_path && ends_with_java(*fc.old_path)))
            continue;

        bool skip = false;
        if (fc.old_path) {
            fc.old_text = read_file(pair.parent.sha, *fc.old_path, warnings);
            if (!fc.old_text)
                skip = true;
        }
        if (fc.new_path) {
            fc.new_text = read_file(pair.child.sha, *fc.new_path, warnings);
            if (!fc.new_text)
                skip = true;
        }
        if (!skip)
            changes.push_back(std::move(fc));
    }
    return changes;
}

} // namespace satd
