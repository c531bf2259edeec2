#pragma once

#include "satd/classify.hpp"
#include "satd/comment_scan.hpp"
#include "satd/diff.hpp"
#include "satd/git_repo.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace satd {

enum class Resolution {
    SatdAdded,
    SatdRemoved,
    SatdChanged,
    FileRemoved,
    FilePathChanged,
    ClassOrMethodChanged,
    SatdMovedFile,
};

std::string_view to_string(Resolution r);
std::optional<Resolution> resolution_from_string(std::string_view s);

struct SatdOccurrence {
    CommentInstance comment;
    int occurrence_index = 0; // among identical keys, document order
    bool is_satd = true;

    const std::string& text() const { return comment.comment.text; }
    LineRange lines() const {
        return {comment.comment.start_line, comment.comment.end_line};
    }
    bool same_key(const SatdOccurrence& o) const;     // path excluded
    bool same_context(const SatdOccurrence& o) const; // class + method
};

enum class MiningErrorKind { OrphanOperation, ClassifierFailure, DecodeWarning };

std::string_view to_string(MiningErrorKind k);

struct MiningError {
    MiningErrorKind kind;
    std::string detail;
    std::string commit;
};

struct SatdOperation {
    long satd_id = 0;     // unique per operation within one run
    long instance_id = 0; // shared across one instance's lifespan
    Resolution resolution = Resolution::SatdAdded;
    CommitMeta parent_commit;
    CommitMeta child_commit;
    std::optional<SatdOccurrence> old_occurrence;
    std::optional<SatdOccurrence> new_occurrence;
};

// An operation before ids are assigned.
struct PendingOp {
    Resolution resolution;
    std::optional<SatdOccurrence> old_occurrence;
    std::optional<SatdOccurrence> new_occurrence;
};

struct InstanceLedger {
    // (file_path, class?, method?, text, occurrence_index) -> instance id
    using Key = std::tuple<std::string, std::string, std::string, std::string, int>;

    static Key key_of(const SatdOccurrence& occ);

    std::map<Key, long> live;
    long next_instance_id = 1;

    std::optional<long> find(const SatdOccurrence& occ) const;
    long add(const SatdOccurrence& occ);
    void erase(const SatdOccurrence& occ);
    void move(const SatdOccurrence& from, const SatdOccurrence& to, long id);
};

// Scan + group + context + classification for one file version. All
// comments are returned with their SATD verdict; callers that only want
// SATD occurrences filter on is_satd.
std::vector<SatdOccurrence> snapshot_comments(const std::string& file_path,
                                              std::string_view text, Classifier& classifier);

// SATD-positive occurrences only.
std::vector<SatdOccurrence> snapshot(const std::string& file_path, std::string_view text,
                                     Classifier& classifier);

struct MapResult {
    std::vector<std::pair<SatdOccurrence, SatdOccurrence>> matched;
    std::vector<SatdOccurrence> unmapped_old;
    std::vector<SatdOccurrence> unmapped_new;
};

// Pairs occurrences with equal (class?, method?, text, occurrence_index);
// file path is ignored so renamed files can map.
MapResult map_instances(const std::vector<SatdOccurrence>& old_occs,
                        const std::vector<SatdOccurrence>& new_occs);

struct ResolveResult {
    std::vector<PendingOp> ops;
    std::vector<SatdOccurrence> unresolved_old;
    std::vector<SatdOccurrence> unresolved_new;
};

// Resolves unmapped occurrences of one file to lifecycle operations.
// unmapped_new may include non-SATD comments: they serve as change targets
// for the reclassification rule and never produce additions themselves.
ResolveResult resolve_pair(const std::vector<SatdOccurrence>& unmapped_old,
                           const std::vector<SatdOccurrence>& unmapped_new,
                           const EditScript& script, double threshold);

// Merges same-pair cross-file removal/addition twins into SATD_MOVED_FILE
// operations, in place.
void resolve_cross_file_moves(std::vector<PendingOp>& pending);

struct MineConfig {
    DiffAlgorithm algorithm = DiffAlgorithm::Myers;
    double levenshtein_threshold = 0.5;
    int rename_threshold = 50;
    Classifier* classifier = nullptr; // required
    std::function<void(int done, int total)> progress;
};

struct MineResult {
    std::vector<SatdOperation> operations;
    std::vector<MiningError> errors;
    std::vector<CommitMeta> commits; // walked chain, oldest first, pseudo included
    int diff_count = 0;
};

MineResult mine_repository(GitRepository& repo, const RepoSource& source,
                           const MineConfig& config);

} // namespace satd
