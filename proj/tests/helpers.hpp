#pragma once

#include "satd/harness.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

namespace testutil {

inline std::string fresh_temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("satd-tests-" + std::to_string(::getpid())) /
               (tag + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline satd::HistoryScript load_corpus(const std::string& name) {
    return satd::parse_script(read_text_file(std::string(CORPUS_DIR) + "/" + name + ".history"));
}

// Builds the script in a fresh directory and mines it with the built-in
// classifier extended by the script's scenario patterns.
struct ScriptRun {
    satd::BuiltRepo repo;
    satd::MineResult mined;
};

inline ScriptRun run_script(const satd::HistoryScript& script, const std::string& tag,
                            satd::DiffAlgorithm algorithm = satd::DiffAlgorithm::Myers) {
    ScriptRun run;
    run.repo = satd::build_repo(script, fresh_temp_dir(tag));
    satd::PatternClassifier classifier(satd::script_patterns(script));
    satd::GitRepository repo =
        satd::GitRepository::open({run.repo.dir, std::nullopt, std::nullopt}, run.repo.dir);
    satd::MineConfig cfg;
    cfg.algorithm = algorithm;
    cfg.classifier = &classifier;
    run.mined = satd::mine_repository(repo, {run.repo.dir, std::nullopt, std::nullopt}, cfg);
    return run;
}

} // namespace testutil
