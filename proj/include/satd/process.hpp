#pragma once

#include <optional>
#include <string>
#include <vector>

namespace satd {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;

    bool ok() const { return exit_code == 0; }
};

struct ProcessOptions {
    std::optional<std::string> cwd;
    std::optional<std::string> stdin_data;
    std::vector<std::pair<std::string, std::string>> env; // appended to inherited env
};

// Runs argv[0] with the given arguments and captures both output streams.
// Throws std::runtime_error if the process cannot be spawned at all.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const ProcessOptions& opts = {});

// Convenience wrapper running a command line through /bin/sh -c.
ProcessResult run_shell(const std::string& command, const ProcessOptions& opts = {});

} // namespace satd
