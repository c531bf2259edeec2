#pragma once

#include "satd/tracker.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace satd {

// Declarative git-history builder used to produce repositories with known
// ground truth.
//
// Script format (line oriented):
//   pattern <text>              extra classifier pattern for this scenario
//   step write <path>           commit writing (or overwriting) one file
//   step edit <path> <start> <count>
//                               commit replacing <count> lines at <start>
//   step rename <old> <new>     commit moving a file
//   step delete <path>          commit removing a file
//   step merge <path>           two-parent commit introducing <path> content
//   also <path>                 second file written within the same commit
//   <<<  ... >>>                heredoc payload for the preceding directive
//   expect <RESOLUTION> "text"  operation attributed to the current step
//                               ("\n" escapes allowed in the text)
struct HistoryStep {
    enum class Action { WriteFile, EditLines, RenameFile, DeleteFile, Merge };

    Action action = Action::WriteFile;
    std::string path;
    std::string path2;   // rename target / secondary write path
    int start = 0;       // EditLines only
    int count = 0;
    std::string payload;
    std::string payload2; // secondary write content
    std::vector<std::pair<Resolution, std::string>> expected_ops;
};

struct HistoryScript {
    std::vector<HistoryStep> steps;
    std::vector<std::string> extra_patterns;
};

HistoryScript parse_script(std::string_view text);

struct GroundTruthOp {
    Resolution resolution;
    std::string text;       // comment text at the time of the operation
    std::string commit_sha; // child commit
};

struct BuiltRepo {
    std::string dir;
    std::vector<std::string> step_shas; // one commit per step
    std::vector<GroundTruthOp> truth;
};

// Materializes the script as a real git repository with strictly
// increasing committer timestamps. Throws on empty scripts.
BuiltRepo build_repo(const HistoryScript& script, const std::string& dir);

// Built-in pattern set extended with the script's scenario patterns.
PatternSet script_patterns(const HistoryScript& script);

struct ScoreReport {
    struct Tally {
        int truth = 0;
        int mined = 0;
        int matched = 0;
        double precision() const { return mined == 0 ? 1.0 : double(matched) / mined; }
        double recall() const { return truth == 0 ? 1.0 : double(matched) / truth; }
    };
    std::map<Resolution, Tally> per_resolution;
    Tally overall;
    std::vector<std::string> mismatches;

    bool perfect() const { return overall.matched == overall.mined &&
                                  overall.matched == overall.truth; }
};

// Matches mined operations against ground truth on
// (resolution, child commit, comment text).
ScoreReport score(const std::vector<SatdOperation>& mined,
                  const std::vector<GroundTruthOp>& truth);

// Randomized mixed-operation script for property testing. Generated
// histories avoid the known ambiguous constructions (duplicate texts,
// several co-located edits) so their ground truth is exact.
HistoryScript random_script(std::mt19937& rng, int max_steps = 12);

} // namespace satd
