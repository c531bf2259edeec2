#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satd {

enum class DiffAlgorithm { Myers, Histogram };

// Closed 1-based line interval. empty() intervals intersect nothing.
struct LineRange {
    int first = 1;
    int last = 0;

    bool empty() const { return last < first; }
    bool intersects(const LineRange& o) const {
        return !empty() && !o.empty() && first <= o.last && o.first <= last;
    }
};

// One contiguous replace/insert/delete region. For a pure insertion
// old_len is 0 and old_start names the old line the insertion precedes.
struct Hunk {
    int old_start = 1;
    int old_len = 0;
    int new_start = 1;
    int new_len = 0;
    std::vector<std::string> new_lines; // replacement content, terminators included

    LineRange old_range() const { return {old_start, old_start + old_len - 1}; }
    LineRange new_range() const { return {new_start, new_start + new_len - 1}; }
};

struct EditScript {
    std::vector<Hunk> hunks;
    DiffAlgorithm algorithm = DiffAlgorithm::Myers;

    bool empty() const { return hunks.empty(); }
};

// Splits text into lines, each keeping its trailing '\n' (the final line
// may lack one). Concatenating the result reproduces the input.
std::vector<std::string> split_lines(std::string_view text);

EditScript diff_lines(std::string_view old_text, std::string_view new_text,
                      DiffAlgorithm algorithm);

// Replays a script against the old text it was computed from.
std::string apply_script(const EditScript& script, std::string_view old_text);

// True iff the hunk touches either given side.
bool hunk_impacts(const Hunk& h, const std::optional<LineRange>& old_range,
                  const std::optional<LineRange>& new_range);

enum class ChangeKind { Added, Removed, Modified, Renamed };

struct FileChange {
    ChangeKind kind = ChangeKind::Modified;
    std::optional<std::string> old_path;
    std::optional<std::string> new_path;
    std::optional<std::string> old_text;
    std::optional<std::string> new_text;
};

} // namespace satd
