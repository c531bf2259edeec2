#include "satd/harness.hpp"

#include "satd/process.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace satd {
namespace {

std::string unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            char c = s[++i];
            if (c == 'n')
                out += '\n';
            else if (c == 't')
                out += '\t';
            else
                out += c; // covers \" and \\ literally
        } else {
            out += s[i];
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t)
        toks.push_back(t);
    return toks;
}

} // namespace

HistoryScript parse_script(std::string_view text) {
    HistoryScript script;
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty())
            lines.push_back(cur);
    }

    std::string* payload_target = nullptr;
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
            trimmed.pop_back();
        if (trimmed.empty() || trimmed[0] == '#')
            continue;

        if (trimmed == "<<<") {
            if (!payload_target)
                throw std::runtime_error("script: heredoc without a directive");
            std::string body;
            bool closed = false;
            for (++i; i < lines.size(); ++i) {
                std::string raw = lines[i];
                if (!raw.empty() && raw.back() == '\r')
                    raw.pop_back();
                if (raw == ">>>") {
                    closed = true;
                    break;
                }
                body += raw;
                body += '\n';
            }
            if (!closed)
                throw std::runtime_error("script: unterminated heredoc");
            *payload_target = body;
            payload_target = nullptr;
            continue;
        }

        auto toks = tokenize(trimmed);
        if (toks[0] == "pattern") {
            auto pos = trimmed.find_first_not_of(" \t", 7);
            if (pos == std::string::npos)
                throw std::runtime_error("script: pattern without text");
            script.extra_patterns.push_back(trimmed.substr(pos));
        } else if (toks[0] == "step") {
            if (toks.size() < 3)
                throw std::runtime_error("script: malformed step line: " + trimmed);
            HistoryStep step;
            if (toks[1] == "write") {
                step.action = HistoryStep::Action::WriteFile;
                step.path = toks[2];
                script.steps.push_back(step);
                payload_target = &script.steps.back().payload;
            } else if (toks[1] == "edit") {
                if (toks.size() < 5)
                    throw std::runtime_error("script: edit needs <path> <start> <count>");
                step.action = HistoryStep::Action::EditLines;
                step.path = toks[2];
                step.start = std::stoi(toks[3]);
                step.count = std::stoi(toks[4]);
                script.steps.push_back(step);
                payload_target = &script.steps.back().payload;
            } else if (toks[1] == "rename") {
                if (toks.size() < 4)
                    throw std::runtime_error("script: rename needs <old> <new>");
                step.action = HistoryStep::Action::RenameFile;
                step.path = toks[2];
                step.path2 = toks[3];
                script.steps.push_back(step);
                payload_target = nullptr;
            } else if (toks[1] == "delete") {
                step.action = HistoryStep::Action::DeleteFile;
                step.path = toks[2];
                script.steps.push_back(step);
                payload_target = nullptr;
            } else if (toks[1] == "merge") {
                step.action = HistoryStep::Action::Merge;
                step.path = toks[2];
                script.steps.push_back(step);
                payload_target = &script.steps.back().payload;
            } else {
                throw std::runtime_error("script: unknown step action: " + toks[1]);
            }
        } else if (toks[0] == "also") {
            if (toks.size() < 2 || script.steps.empty())
                throw std::runtime_error("script: stray 'also' line");
            HistoryStep& step = script.steps.back();
            if (step.action != HistoryStep::Action::WriteFile &&
                step.action != HistoryStep::Action::Merge)
                throw std::runtime_error("script: 'also' only follows write/merge");
            step.path2 = toks[1];
            payload_target = &step.payload2;
        } else if (toks[0] == "expect") {
            if (script.steps.empty())
                throw std::runtime_error("script: expect before any step");
            auto first_q = trimmed.find('"');
            auto last_q = trimmed.rfind('"');
            if (first_q == std::string::npos || last_q <= first_q)
                throw std::runtime_error("script: expect needs a quoted text: " + trimmed);
            std::string res_name = trimmed.substr(7, first_q - 7);
            while (!res_name.empty() && res_name.back() == ' ')
                res_name.pop_back();
            auto res = resolution_from_string(res_name);
            if (!res)
                throw std::runtime_error("script: unknown resolution: " + res_name);
            std::string quoted = trimmed.substr(first_q + 1, last_q - first_q - 1);
            script.steps.back().expected_ops.emplace_back(*res, unescape(quoted));
        } else {
            throw std::runtime_error("script: unrecognized line: " + trimmed);
        }
    }
    return script;
}

PatternSet script_patterns(const HistoryScript& script) {
    PatternSet set = load_patterns(std::nullopt);
    for (const auto& p : script.extra_patterns) {
        std::string lowered = p;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        set.patterns.push_back(lowered);
    }
    return set;
}

namespace {

void git_or_throw(const std::string& dir, std::vector<std::string> args,
                  const ProcessOptions& opts = {}) {
    std::vector<std::string> argv{"git", "-C", dir};
    argv.insert(argv.end(), args.begin(), args.end());
    auto res = run_process(argv, opts);
    if (!res.ok())
        throw std::runtime_error("harness git failure: " + args[0] + ": " + res.err);
}

std::string git_capture(const std::string& dir, std::vector<std::string> args) {
    std::vector<std::string> argv{"git", "-C", dir};
    argv.insert(argv.end(), args.begin(), args.end());
    auto res = run_process(argv);
    if (!res.ok())
        throw std::runtime_error("harness git failure: " + args[0] + ": " + res.err);
    std::string out = res.out;
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r'))
        out.pop_back();
    return out;
}

void write_file(const std::string& dir, const std::string& rel, const std::string& content) {
    fs::path full = fs::path(dir) / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out)
        throw std::runtime_error("harness: cannot write " + full.string());
    out << content;
}

std::string read_work_file(const std::string& dir, const std::string& rel) {
    std::ifstream in(fs::path(dir) / rel, std::ios::binary);
    if (!in)
        throw std::runtime_error("harness: cannot read " + rel);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ProcessOptions dated_env(int step_index) {
    // Fixed base keeps built histories byte-stable across runs.
    long long epoch = 1577836800LL + 60LL * step_index; // 2020-01-01 + 1min/step
    std::string stamp = std::to_string(epoch) + " +0000";
    ProcessOptions opts;
    opts.env = {{"GIT_AUTHOR_DATE", stamp}, {"GIT_COMMITTER_DATE", stamp}};
    return opts;
}

} // namespace

BuiltRepo build_repo(const HistoryScript& script, const std::string& dir) {
    if (script.steps.empty())
        throw std::runtime_error("harness: empty history");

    fs::create_directories(dir);
    git_or_throw(dir, {"init", "-q"});
    git_or_throw(dir, {"config", "user.name", "Harness"});
    git_or_throw(dir, {"config", "user.email", "harness@localhost"});
    const std::string branch = git_capture(dir, {"symbolic-ref", "--short", "HEAD"});

    BuiltRepo built;
    built.dir = dir;

    for (size_t i = 0; i < script.steps.size(); ++i) {
        const HistoryStep& step = script.steps[i];
        ProcessOptions env = dated_env(static_cast<int>(i));
        std::string message = "step " + std::to_string(i + 1);

        switch (step.action) {
        case HistoryStep::Action::WriteFile:
            write_file(dir, step.path, step.payload);
            if (!step.path2.empty())
                write_file(dir, step.path2, step.payload2);
            git_or_throw(dir, {"add", "-A"});
            git_or_throw(dir, {"commit", "-q", "-m", message}, env);
            break;
        case HistoryStep::Action::EditLines: {
            std::string content = read_work_file(dir, step.path);
            auto lines = split_lines(content);
            int start = step.start;
            if (start < 1 || start > static_cast<int>(lines.size()) + 1 ||
                step.count < 0 || start - 1 + step.count > static_cast<int>(lines.size()))
                throw std::runtime_error("harness: edit range out of bounds in " + step.path);
            auto repl = split_lines(step.payload);
            lines.erase(lines.begin() + (start - 1), lines.begin() + (start - 1 + step.count));
            lines.insert(lines.begin() + (start - 1), repl.begin(), repl.end());
            std::string rebuilt;
            for (const auto& l : lines)
                rebuilt += l;
            write_file(dir, step.path, rebuilt);
            git_or_throw(dir, {"add", "-A"});
            git_or_throw(dir, {"commit", "-q", "-m", message}, env);
            break;
        }
        case HistoryStep::Action::RenameFile: {
            fs::create_directories((fs::path(dir) / step.path2).parent_path());
            git_or_throw(dir, {"mv", step.path, step.path2});
            git_or_throw(dir, {"commit", "-q", "-m", message}, env);
            break;
        }
        case HistoryStep::Action::DeleteFile:
            git_or_throw(dir, {"rm", "-q", step.path});
            git_or_throw(dir, {"commit", "-q", "-m", message}, env);
            break;
        case HistoryStep::Action::Merge: {
            if (i == 0)
                throw std::runtime_error("harness: merge cannot be the first step");
            std::string base = git_capture(dir, {"rev-parse", "HEAD"});
            std::string side_branch = "side" + std::to_string(i);
            git_or_throw(dir, {"checkout", "-q", "-b", side_branch});
            write_file(dir, side_branch + ".txt", "side change " + std::to_string(i) + "\n");
            git_or_throw(dir, {"add", "-A"});
            git_or_throw(dir, {"commit", "-q", "-m", message + " (side)"}, env);
            std::string side_sha = git_capture(dir, {"rev-parse", "HEAD"});
            git_or_throw(dir, {"checkout", "-q", branch});
            write_file(dir, step.path, step.payload);
            if (!step.path2.empty())
                write_file(dir, step.path2, step.payload2);
            git_or_throw(dir, {"add", "-A"});
            std::string tree = git_capture(dir, {"write-tree"});
            std::vector<std::string> argv{"git",  "-C",   dir,  "commit-tree", tree,
                                          "-p",   base,   "-p", side_sha,      "-m",
                                          message};
            auto res = run_process(argv, env);
            if (!res.ok())
                throw std::runtime_error("harness git failure: commit-tree: " + res.err);
            std::string merge_sha = res.out;
            while (!merge_sha.empty() && merge_sha.back() == '\n')
                merge_sha.pop_back();
            git_or_throw(dir, {"update-ref", "refs/heads/" + branch, merge_sha});
            git_or_throw(dir, {"reset", "-q", "--hard", merge_sha});
            break;
        }
        }

        std::string sha = git_capture(dir, {"rev-parse", "HEAD"});
        built.step_shas.push_back(sha);
        for (const auto& [res, text] : step.expected_ops)
            built.truth.push_back({res, text, sha});
    }
    return built;
}

ScoreReport score(const std::vector<SatdOperation>& mined,
                  const std::vector<GroundTruthOp>& truth) {
    using Key = std::tuple<Resolution, std::string, std::string>;
    auto mined_key = [](const SatdOperation& op) -> Key {
        const std::string& text =
            op.new_occurrence ? op.new_occurrence->text() : op.old_occurrence->text();
        return {op.resolution, op.child_commit.sha, text};
    };

    std::map<Key, int> remaining;
    for (const auto& t : truth)
        ++remaining[{t.resolution, t.commit_sha, t.text}];

    ScoreReport report;
    for (const auto& t : truth) {
        ++report.per_resolution[t.resolution].truth;
        ++report.overall.truth;
    }
    for (const auto& op : mined) {
        ++report.per_resolution[op.resolution].mined;
        ++report.overall.mined;
        Key key = mined_key(op);
        auto it = remaining.find(key);
        if (it != remaining.end() && it->second > 0) {
            --it->second;
            ++report.per_resolution[op.resolution].matched;
            ++report.overall.matched;
        } else {
            report.mismatches.push_back("unexpected " + std::string(to_string(op.resolution)) +
                                        " at " + op.child_commit.sha.substr(0, 8) + ": \"" +
                                        std::get<2>(key) + "\"");
        }
    }
    for (const auto& [key, count] : remaining) {
        for (int i = 0; i < count; ++i)
            report.mismatches.push_back("missing " +
                                        std::string(to_string(std::get<0>(key))) + " at " +
                                        std::get<1>(key).substr(0, 8) + ": \"" +
                                        std::get<2>(key) + "\"");
    }
    return report;
}

namespace {

struct FileModel {
    std::string path;
    std::string class_name;
    std::vector<std::string> comments;
};

std::string render_file(const FileModel& f) {
    std::string s = "public class " + f.class_name + " {\n    void run() {\n";
    s += "        int x = 0;\n";
    for (const auto& c : f.comments) {
        s += "        // " + c + "\n";
        s += "        x += 1;\n";
    }
    s += "    }\n}\n";
    return s;
}

} // namespace

HistoryScript random_script(std::mt19937& rng, int max_steps) {
    HistoryScript script;
    std::vector<FileModel> files;
    int next_file = 0;
    int next_comment = 0;
    int next_rename = 0;

    auto fresh_text = [&] { return "TODO task " + std::to_string(next_comment++); };
    auto fresh_file = [&] {
        int n = next_file++;
        return FileModel{"src/File" + std::to_string(n) + ".java", "File" + std::to_string(n), {}};
    };
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };

    auto emit_write = [&](const FileModel& f,
                          std::vector<std::pair<Resolution, std::string>> expected,
                          const FileModel* second = nullptr) {
        HistoryStep step;
        step.action = HistoryStep::Action::WriteFile;
        step.path = f.path;
        step.payload = render_file(f);
        if (second) {
            step.path2 = second->path;
            step.payload2 = render_file(*second);
        }
        step.expected_ops = std::move(expected);
        script.steps.push_back(std::move(step));
    };

    // Seed history with one file so every later action has material.
    {
        FileModel f = fresh_file();
        int n = 1 + pick(3);
        std::vector<std::pair<Resolution, std::string>> expected;
        for (int i = 0; i < n; ++i) {
            f.comments.push_back(fresh_text());
            expected.emplace_back(Resolution::SatdAdded, f.comments.back());
        }
        emit_write(f, std::move(expected));
        files.push_back(std::move(f));
    }

    int steps = 2 + pick(std::max(1, max_steps - 1));
    for (int s = 1; s < steps; ++s) {
        std::vector<int> with_comments;
        for (size_t i = 0; i < files.size(); ++i)
            if (!files[i].comments.empty())
                with_comments.push_back(static_cast<int>(i));

        int action = pick(7);
        if (files.empty())
            action = 0; // everything was deleted; start over
        else if (with_comments.empty() && action != 0 && action != 1)
            action = pick(2); // only additions remain possible

        switch (action) {
        case 0: { // new file with comments
            FileModel f = fresh_file();
            int n = 1 + pick(2);
            std::vector<std::pair<Resolution, std::string>> expected;
            for (int i = 0; i < n; ++i) {
                f.comments.push_back(fresh_text());
                expected.emplace_back(Resolution::SatdAdded, f.comments.back());
            }
            emit_write(f, std::move(expected));
            files.push_back(std::move(f));
            break;
        }
        case 1: { // add one comment to an existing file
            FileModel& f = files[pick(static_cast<int>(files.size()))];
            f.comments.push_back(fresh_text());
            emit_write(f, {{Resolution::SatdAdded, f.comments.back()}});
            break;
        }
        case 2: { // reword one comment
            FileModel& f = files[with_comments[pick(static_cast<int>(with_comments.size()))]];
            int slot = pick(static_cast<int>(f.comments.size()));
            f.comments[slot] = fresh_text() + " reworded";
            emit_write(f, {{Resolution::SatdChanged, f.comments[slot]}});
            break;
        }
        case 3: { // drop one comment
            FileModel& f = files[with_comments[pick(static_cast<int>(with_comments.size()))]];
            int slot = pick(static_cast<int>(f.comments.size()));
            std::string old = f.comments[slot];
            f.comments.erase(f.comments.begin() + slot);
            emit_write(f, {{Resolution::SatdRemoved, old}});
            break;
        }
        case 4: { // rename a file
            FileModel& f = files[with_comments[pick(static_cast<int>(with_comments.size()))]];
            HistoryStep step;
            step.action = HistoryStep::Action::RenameFile;
            step.path = f.path;
            step.path2 = "src/Moved" + std::to_string(next_rename++) + ".java";
            for (const auto& c : f.comments)
                step.expected_ops.emplace_back(Resolution::FilePathChanged, c);
            f.path = step.path2;
            script.steps.push_back(std::move(step));
            break;
        }
        case 5: { // delete a file
            int idx = with_comments[pick(static_cast<int>(with_comments.size()))];
            HistoryStep step;
            step.action = HistoryStep::Action::DeleteFile;
            step.path = files[idx].path;
            for (const auto& c : files[idx].comments)
                step.expected_ops.emplace_back(Resolution::FileRemoved, c);
            script.steps.push_back(std::move(step));
            files.erase(files.begin() + idx);
            break;
        }
        case 6: { // move one comment between files in a single commit
            if (files.size() < 2) {
                FileModel f = fresh_file();
                f.comments.push_back(fresh_text());
                emit_write(f, {{Resolution::SatdAdded, f.comments.back()}});
                files.push_back(std::move(f));
                break;
            }
            int src = with_comments[pick(static_cast<int>(with_comments.size()))];
            int dst = pick(static_cast<int>(files.size()));
            while (dst == src)
                dst = pick(static_cast<int>(files.size()));
            int slot = pick(static_cast<int>(files[src].comments.size()));
            std::string text = files[src].comments[slot];
            files[src].comments.erase(files[src].comments.begin() + slot);
            files[dst].comments.push_back(text);
            emit_write(files[src], {{Resolution::SatdMovedFile, text}}, &files[dst]);
            break;
        }
        }
    }
    return script;
}

} // namespace satd
