#include "satd/classify.hpp"
#include "satd/git_repo.hpp"
#include "satd/store.hpp"
#include "satd/tracker.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace satd;

namespace {

struct RunConfig {
    std::string repos_csv;
    std::string store_config = "satd.sqlite";
    DiffAlgorithm algorithm = DiffAlgorithm::Myers;
    double threshold = 0.5;
    bool show_errors = false;
    std::optional<std::string> patterns_file;
    std::optional<std::string> classifier_cmd;
    std::string workdir = "mined-repos";
    int rename_threshold = 50;
    int parallel = 1;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// A java-style properties file names the database path; a bare path is
// used directly.
std::string resolve_db_path(const std::string& store_config) {
    if (store_config.size() > 11 &&
        store_config.rfind(".properties") == store_config.size() - 11) {
        std::ifstream in(store_config);
        if (!in)
            throw std::runtime_error("cannot read db configuration: " + store_config);
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#')
                continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            std::string key = trim(line.substr(0, eq));
            if (key == "database" || key == "db" || key == "path")
                return trim(line.substr(eq + 1));
        }
        throw std::runtime_error("db configuration missing 'database' entry: " + store_config);
    }
    return store_config;
}

std::string repo_display_name(const std::string& url) {
    std::string s = url;
    while (!s.empty() && s.back() == '/')
        s.pop_back();
    if (s.size() > 4 && s.rfind(".git") == s.size() - 4)
        s.resize(s.size() - 4);
    auto last = s.find_last_of("/:");
    if (last == std::string::npos)
        return s;
    auto prev = s.find_last_of("/:", last - 1);
    if (prev == std::string::npos)
        return s.substr(last + 1);
    return s.substr(prev + 1);
}

struct RepoLine {
    RepoSource source;
    std::string error; // non-empty when the line was rejected
};

std::vector<RepoLine> read_repos_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read repository list: " + path);
    std::vector<RepoLine> repos;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        RepoLine entry;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            entry.source.url_or_path = trim(line);
        } else {
            entry.source.url_or_path = trim(line.substr(0, comma));
            std::string sha = trim(line.substr(comma + 1));
            if (!sha.empty()) {
                if (!is_full_sha(sha)) {
                    entry.error = "invalid terminal sha '" + sha + "'";
                } else {
                    entry.source.terminal_sha = sha;
                }
            }
        }
        repos.push_back(std::move(entry));
    }
    if (repos.empty())
        throw std::runtime_error("repository list is empty: " + path);
    return repos;
}

std::mutex out_mutex;

void status_line(const std::string& line) {
    std::lock_guard<std::mutex> lock(out_mutex);
    std::cerr << line << "\n";
}

struct RepoOutcome {
    bool ok = false;
    std::string completion; // printed on stdout at the end of the repo
};

RepoOutcome mine_one(const RunConfig& cfg, const RepoSource& source, Store& store,
                     std::mutex& store_mutex) {
    const std::string name = repo_display_name(source.url_or_path);
    RepoOutcome outcome;
    try {
        GitRepository repo = GitRepository::open(source, cfg.workdir);

        auto classifier = cfg.classifier_cmd
                              ? std::unique_ptr<Classifier>(
                                    std::make_unique<ExternalClassifier>(*cfg.classifier_cmd))
                              : make_default_classifier(cfg.patterns_file);

        MineConfig mine_cfg;
        mine_cfg.algorithm = cfg.algorithm;
        mine_cfg.levenshtein_threshold = cfg.threshold;
        mine_cfg.rename_threshold = cfg.rename_threshold;
        mine_cfg.classifier = classifier.get();
        int last_decile = -1;
        mine_cfg.progress = [&](int done, int total) {
            if (total == 0)
                return;
            int decile = done * 10 / total;
            if (decile != last_decile) {
                last_decile = decile;
                char buf[160];
                std::snprintf(buf, sizeof(buf), "Mining SATD (%.1f%%) - %s",
                              100.0 * done / total, name.c_str());
                status_line(buf);
            }
        };

        auto started = std::chrono::steady_clock::now();
        MineResult result = mine_repository(repo, source, mine_cfg);
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();

        {
            std::lock_guard<std::mutex> lock(store_mutex);
            long project = store.ensure_project(name, source.url_or_path);
            store.write_operations(project, result.commits, result.operations);
        }

        if (cfg.show_errors) {
            for (const auto& err : result.errors)
                status_line("ERROR [" + std::string(to_string(err.kind)) + "] " + err.commit +
                            ": " + err.detail);
        }

        double per_diff = result.diff_count > 0
                              ? static_cast<double>(elapsed) / result.diff_count
                              : 0.0;
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "Completed analyzing %d diffs in %lldms (%.2fms/diff, %zu errors) - %s",
                      result.diff_count, static_cast<long long>(elapsed), per_diff,
                      result.errors.size(), name.c_str());
        outcome.ok = true;
        outcome.completion = buf;
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.completion = "Failed mining " + name + ": " + e.what();
    }
    return outcome;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Mine the lifespan of self-admitted technical debt comments "
                 "from Java git repositories"};

    std::string diff_name = "myers";
    std::string patterns;
    std::string classifier_cmd;
    app.add_option("-r,--repos", cfg.repos_csv, "CSV of repositories: url[,terminal_sha]")
        ->required();
    app.add_option("-d,--db", cfg.store_config,
                   "Database path or a .properties file naming one");
    app.add_option("--diff-algorithm", diff_name, "myers or histogram")
        ->check(CLI::IsMember({"myers", "histogram"}));
    app.add_option("--threshold", cfg.threshold,
                   "Normalized Levenshtein threshold for comment pairing");
    app.add_flag("--show-errors", cfg.show_errors, "Print each mining error in full");
    app.add_option("--patterns", patterns, "Pattern file for the built-in classifier");
    app.add_option("--classifier-cmd", classifier_cmd,
                   "External classifier command (line protocol)");
    app.add_option("--workdir", cfg.workdir, "Directory for cloned repositories");
    app.add_option("--rename-threshold", cfg.rename_threshold,
                   "Rename detection similarity percentage")
        ->check(CLI::Range(1, 100));
    app.add_option("--parallel", cfg.parallel, "Repositories mined concurrently")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (cfg.threshold < 0.0 || cfg.threshold > 1.0) {
        std::cerr << "threshold must be in [0,1]\n";
        return 2;
    }
    cfg.algorithm = diff_name == "histogram" ? DiffAlgorithm::Histogram : DiffAlgorithm::Myers;
    if (!patterns.empty())
        cfg.patterns_file = patterns;
    if (!classifier_cmd.empty())
        cfg.classifier_cmd = classifier_cmd;

    try {
        std::vector<RepoLine> repos = read_repos_csv(cfg.repos_csv);

        std::string db_path = resolve_db_path(cfg.store_config);
        Store store = Store::open(db_path);
        std::mutex store_mutex;

        std::vector<RepoOutcome> outcomes(repos.size());
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i = next.fetch_add(1); i < repos.size(); i = next.fetch_add(1)) {
                if (!repos[i].error.empty()) {
                    outcomes[i] = {false, "Rejected repository line: " + repos[i].error};
                    continue;
                }
                outcomes[i] = mine_one(cfg, repos[i].source, store, store_mutex);
            }
        };
        int threads = std::min<int>(cfg.parallel, static_cast<int>(repos.size()));
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t)
                pool.emplace_back(worker);
            for (auto& t : pool)
                t.join();
        }

        bool all_ok = true;
        for (const auto& outcome : outcomes) {
            std::cout << outcome.completion << "\n";
            all_ok = all_ok && outcome.ok;
        }

        fs::path base(db_path);
        store.export_csv((base.parent_path() / base.stem()).string() + ".csv");
        store.export_html((base.parent_path() / base.stem()).string() + ".html");
        return all_ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
}
