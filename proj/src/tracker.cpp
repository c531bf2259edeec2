#include "satd/tracker.hpp"

#include "satd/levenshtein.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace satd {

std::string_view to_string(Resolution r) {
    switch (r) {
    case Resolution::SatdAdded: return "SATD_ADDED";
    case Resolution::SatdRemoved: return "SATD_REMOVED";
    case Resolution::SatdChanged: return "SATD_CHANGED";
    case Resolution::FileRemoved: return "FILE_REMOVED";
    case Resolution::FilePathChanged: return "FILE_PATH_CHANGED";
    case Resolution::ClassOrMethodChanged: return "CLASS_OR_METHOD_CHANGED";
    case Resolution::SatdMovedFile: return "SATD_MOVED_FILE";
    }
    return "SATD_ADDED";
}

std::optional<Resolution> resolution_from_string(std::string_view s) {
    if (s == "SATD_ADDED") return Resolution::SatdAdded;
    if (s == "SATD_REMOVED") return Resolution::SatdRemoved;
    if (s == "SATD_CHANGED") return Resolution::SatdChanged;
    if (s == "FILE_REMOVED") return Resolution::FileRemoved;
    if (s == "FILE_PATH_CHANGED") return Resolution::FilePathChanged;
    if (s == "CLASS_OR_METHOD_CHANGED") return Resolution::ClassOrMethodChanged;
    if (s == "SATD_MOVED_FILE") return Resolution::SatdMovedFile;
    return std::nullopt;
}

std::string_view to_string(MiningErrorKind k) {
    switch (k) {
    case MiningErrorKind::OrphanOperation: return "OrphanOperation";
    case MiningErrorKind::ClassifierFailure: return "ClassifierFailure";
    case MiningErrorKind::DecodeWarning: return "DecodeWarning";
    }
    return "OrphanOperation";
}

bool SatdOccurrence::same_context(const SatdOccurrence& o) const {
    return comment.containing_class == o.comment.containing_class &&
           comment.containing_method == o.comment.containing_method;
}

bool SatdOccurrence::same_key(const SatdOccurrence& o) const {
    return same_context(o) && text() == o.text() && occurrence_index == o.occurrence_index;
}

namespace {

std::string encode_opt(const std::optional<std::string>& v) {
    return v ? "1" + *v : "0";
}

} // namespace

InstanceLedger::Key InstanceLedger::key_of(const SatdOccurrence& occ) {
    return {occ.comment.file_path, encode_opt(occ.comment.containing_class),
            encode_opt(occ.comment.containing_method), occ.text(), occ.occurrence_index};
}

std::optional<long> InstanceLedger::find(const SatdOccurrence& occ) const {
    auto it = live.find(key_of(occ));
    if (it == live.end())
        return std::nullopt;
    return it->second;
}

long InstanceLedger::add(const SatdOccurrence& occ) {
    long id = next_instance_id++;
    live[key_of(occ)] = id;
    return id;
}

void InstanceLedger::erase(const SatdOccurrence& occ) { live.erase(key_of(occ)); }

void InstanceLedger::move(const SatdOccurrence& from, const SatdOccurrence& to, long id) {
    live.erase(key_of(from));
    live[key_of(to)] = id;
}

std::vector<SatdOccurrence> snapshot_comments(const std::string& file_path,
                                              std::string_view text, Classifier& classifier) {
    auto raw = group_adjacent(scan_comments(text));
    auto instances = attach_context(text, raw, file_path);

    std::vector<std::string> texts;
    texts.reserve(instances.size());
    for (const auto& inst : instances)
        texts.push_back(inst.comment.text);
    const std::vector<bool> verdicts =
        texts.empty() ? std::vector<bool>{} : classifier.classify(texts);

    std::map<std::tuple<std::string, std::string, std::string>, int> counters;
    std::vector<SatdOccurrence> out;
    out.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        SatdOccurrence occ;
        occ.comment = std::move(instances[i]);
        occ.is_satd = verdicts[i];
        auto key = std::make_tuple(encode_opt(occ.comment.containing_class),
                                   encode_opt(occ.comment.containing_method), occ.text());
        occ.occurrence_index = counters[key]++;
        out.push_back(std::move(occ));
    }
    return out;
}

std::vector<SatdOccurrence> snapshot(const std::string& file_path, std::string_view text,
                                     Classifier& classifier) {
    auto all = snapshot_comments(file_path, text, classifier);
    std::erase_if(all, [](const SatdOccurrence& o) { return !o.is_satd; });
    return all;
}

MapResult map_instances(const std::vector<SatdOccurrence>& old_occs,
                        const std::vector<SatdOccurrence>& new_occs) {
    MapResult result;
    std::vector<bool> new_used(new_occs.size(), false);
    for (const auto& o : old_occs) {
        bool matched = false;
        for (std::size_t j = 0; j < new_occs.size(); ++j) {
            if (!new_used[j] && o.same_key(new_occs[j])) {
                new_used[j] = true;
                result.matched.emplace_back(o, new_occs[j]);
                matched = true;
                break;
            }
        }
        if (!matched)
            result.unmapped_old.push_back(o);
    }
    for (std::size_t j = 0; j < new_occs.size(); ++j)
        if (!new_used[j])
            result.unmapped_new.push_back(new_occs[j]);
    return result;
}

ResolveResult resolve_pair(const std::vector<SatdOccurrence>& unmapped_old,
                           const std::vector<SatdOccurrence>& unmapped_new,
                           const EditScript& script, double threshold) {
    ResolveResult result;

    auto impacted_old = [&](const SatdOccurrence& o) {
        return std::any_of(script.hunks.begin(), script.hunks.end(),
                           [&](const Hunk& h) { return hunk_impacts(h, o.lines(), {}); });
    };
    auto impacted_new = [&](const SatdOccurrence& n) {
        return std::any_of(script.hunks.begin(), script.hunks.end(),
                           [&](const Hunk& h) { return hunk_impacts(h, {}, n.lines()); });
    };
    // For tying an old comment to a new one, a one-sided hunk still has a
    // position on its empty side: a deletion sits just before new line
    // new_start, an insertion just before old line old_start. Without this
    // a partial deletion of a grouped comment (its last line survives and
    // matches) would never pair with the surviving text.
    auto shares_hunk = [&](const SatdOccurrence& o, const SatdOccurrence& n) {
        return std::any_of(script.hunks.begin(), script.hunks.end(), [&](const Hunk& h) {
            LineRange ho = h.old_len ? h.old_range() : LineRange{h.old_start, h.old_start};
            LineRange hn = h.new_len ? h.new_range() : LineRange{h.new_start, h.new_start};
            return ho.intersects(o.lines()) && hn.intersects(n.lines());
        });
    };

    // Change candidates. A hunk touching both sides ties the texts together
    // directly; otherwise a sub-threshold distance between two impacted
    // comments is accepted as the same evolving instance.
    struct Candidate {
        bool shared;
        double dist;
        std::size_t oi, ni;
    };
    std::vector<Candidate> candidates;
    for (std::size_t oi = 0; oi < unmapped_old.size(); ++oi) {
        const auto& o = unmapped_old[oi];
        for (std::size_t ni = 0; ni < unmapped_new.size(); ++ni) {
            const auto& n = unmapped_new[ni];
            if (o.text() == n.text())
                continue; // same text, different scope: handled below
            const bool shared = shares_hunk(o, n);
            const double dist = normalized_levenshtein(o.text(), n.text());
            if (shared || (dist < threshold && impacted_old(o) && impacted_new(n)))
                candidates.push_back({shared, dist, oi, ni});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         if (a.shared != b.shared)
                             return a.shared;
                         return a.dist < b.dist;
                     });

    std::vector<bool> old_used(unmapped_old.size(), false);
    std::vector<bool> new_used(unmapped_new.size(), false);
    for (const auto& c : candidates) {
        if (old_used[c.oi] || new_used[c.ni])
            continue;
        old_used[c.oi] = true;
        new_used[c.ni] = true;
        const auto& o = unmapped_old[c.oi];
        const auto& n = unmapped_new[c.ni];
        if (n.is_satd)
            result.ops.push_back({Resolution::SatdChanged, o, n});
        else // updated text no longer classifies as SATD
            result.ops.push_back({Resolution::SatdRemoved, o, std::nullopt});
    }

    // Same text under a renamed class or method signature.
    for (std::size_t oi = 0; oi < unmapped_old.size(); ++oi) {
        if (old_used[oi])
            continue;
        const auto& o = unmapped_old[oi];
        for (std::size_t ni = 0; ni < unmapped_new.size(); ++ni) {
            if (new_used[ni])
                continue;
            const auto& n = unmapped_new[ni];
            if (n.is_satd && o.text() == n.text() && !o.same_context(n)) {
                old_used[oi] = true;
                new_used[ni] = true;
                result.ops.push_back({Resolution::ClassOrMethodChanged, o, n});
                break;
            }
        }
    }

    for (std::size_t ni = 0; ni < unmapped_new.size(); ++ni) {
        if (new_used[ni] || !unmapped_new[ni].is_satd)
            continue;
        if (impacted_new(unmapped_new[ni]))
            result.ops.push_back({Resolution::SatdAdded, std::nullopt, unmapped_new[ni]});
        else
            result.unresolved_new.push_back(unmapped_new[ni]);
    }
    for (std::size_t oi = 0; oi < unmapped_old.size(); ++oi) {
        if (old_used[oi])
            continue;
        if (impacted_old(unmapped_old[oi]))
            result.ops.push_back({Resolution::SatdRemoved, unmapped_old[oi], std::nullopt});
        else
            result.unresolved_old.push_back(unmapped_old[oi]);
    }
    return result;
}

void resolve_cross_file_moves(std::vector<PendingOp>& pending) {
    std::vector<std::size_t> removals, additions;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (pending[i].resolution == Resolution::SatdRemoved && pending[i].old_occurrence)
            removals.push_back(i);
        else if (pending[i].resolution == Resolution::SatdAdded && pending[i].new_occurrence)
            additions.push_back(i);
    }

    std::vector<std::size_t> to_drop;
    for (std::size_t ri : removals) {
        const auto& removed = *pending[ri].old_occurrence;
        for (std::size_t& ai : additions) {
            if (ai == static_cast<std::size_t>(-1))
                continue;
            const auto& added = *pending[ai].new_occurrence;
            if (added.text() == removed.text() &&
                added.comment.file_path != removed.comment.file_path) {
                pending[ri].resolution = Resolution::SatdMovedFile;
                pending[ri].new_occurrence = added;
                to_drop.push_back(ai);
                ai = static_cast<std::size_t>(-1);
                break;
            }
        }
    }
    std::sort(to_drop.begin(), to_drop.end(), std::greater<>());
    for (std::size_t i : to_drop)
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
}

namespace {

// Merges SATD-unmapped and non-SATD occurrences back into document order.
std::vector<SatdOccurrence> merge_new_side(std::vector<SatdOccurrence> unmapped_satd,
                                           const std::vector<SatdOccurrence>& all_new) {
    for (const auto& n : all_new)
        if (!n.is_satd)
            unmapped_satd.push_back(n);
    std::stable_sort(unmapped_satd.begin(), unmapped_satd.end(),
                     [](const SatdOccurrence& a, const SatdOccurrence& b) {
                         return a.comment.comment.start_line < b.comment.comment.start_line;
                     });
    return unmapped_satd;
}

std::vector<SatdOccurrence> satd_only(const std::vector<SatdOccurrence>& all) {
    std::vector<SatdOccurrence> out;
    for (const auto& o : all)
        if (o.is_satd)
            out.push_back(o);
    return out;
}

} // namespace

MineResult mine_repository(GitRepository& repo, const RepoSource& source,
                           const MineConfig& config) {
    if (!config.classifier)
        throw std::runtime_error("mine_repository: no classifier configured");
    Classifier& classifier = *config.classifier;

    MineResult result;
    const CommitMeta terminal = repo.resolve_terminal(source.terminal_sha);
    const std::vector<CommitPair> pairs = repo.commit_pairs(terminal);

    // Pair parents can include commits that are never a pair child (the
    // pseudo root and skipped merges), and those still anchor operations.
    std::set<std::string> seen;
    for (const auto& pr : pairs) {
        if (seen.insert(pr.parent.sha).second)
            result.commits.push_back(pr.parent);
        if (seen.insert(pr.child.sha).second)
            result.commits.push_back(pr.child);
    }

    InstanceLedger ledger;
    long satd_counter = 1;

    for (std::size_t pair_idx = 0; pair_idx < pairs.size(); ++pair_idx) {
        const CommitPair& pair = pairs[pair_idx];
        if (config.progress)
            config.progress(static_cast<int>(pair_idx), static_cast<int>(pairs.size()));

        std::vector<std::string> warnings;
        std::vector<FileChange> changes;
        try {
            changes = repo.changed_files(pair, config.rename_threshold, &warnings);
        } catch (const std::exception& e) {
            result.errors.push_back(
                {MiningErrorKind::DecodeWarning, e.what(), pair.child.sha});
            continue;
        }
        for (auto& w : warnings)
            result.errors.push_back({MiningErrorKind::DecodeWarning, std::move(w),
                                     pair.child.sha});

        std::vector<PendingOp> pending;
        std::vector<SatdOccurrence> unresolved;
        std::vector<std::string> removed_paths;

        for (const FileChange& change : changes) {
            try {
                switch (change.kind) {
                case ChangeKind::Added: {
                    auto news = snapshot_comments(*change.new_path, *change.new_text,
                                                  classifier);
                    auto script = diff_lines("", *change.new_text, config.algorithm);
                    auto rr = resolve_pair({}, news, script, config.levenshtein_threshold);
                    for (auto& op : rr.ops)
                        pending.push_back(std::move(op));
                    break;
                }
                case ChangeKind::Removed: {
                    auto olds = snapshot(*change.old_path, *change.old_text, classifier);
                    for (auto& o : olds)
                        pending.push_back({Resolution::FileRemoved, std::move(o),
                                           std::nullopt});
                    removed_paths.push_back(*change.old_path);
                    break;
                }
                case ChangeKind::Modified:
                case ChangeKind::Renamed: {
                    auto olds_all = snapshot_comments(*change.old_path, *change.old_text,
                                                      classifier);
                    auto news_all = snapshot_comments(*change.new_path, *change.new_text,
                                                      classifier);
                    auto mapped = map_instances(satd_only(olds_all), satd_only(news_all));
                    if (change.kind == ChangeKind::Renamed) {
                        for (auto& [o, n] : mapped.matched)
                            pending.push_back({Resolution::FilePathChanged, o, n});
                    }
                    auto script = diff_lines(*change.old_text, *change.new_text,
                                             config.algorithm);
                    auto rr = resolve_pair(mapped.unmapped_old,
                                           merge_new_side(mapped.unmapped_new, news_all),
                                           script, config.levenshtein_threshold);
                    for (auto& op : rr.ops)
                        pending.push_back(std::move(op));
                    for (auto& u : rr.unresolved_old)
                        unresolved.push_back(std::move(u));
                    for (auto& u : rr.unresolved_new)
                        unresolved.push_back(std::move(u));
                    break;
                }
                }
            } catch (const std::exception& e) {
                const std::string path = change.new_path ? *change.new_path
                                                         : change.old_path.value_or("?");
                result.errors.push_back({MiningErrorKind::ClassifierFailure,
                                         "classification failed for " + path + ": " +
                                             e.what(),
                                         pair.child.sha});
            }
        }

        resolve_cross_file_moves(pending);

        for (const auto& occ : unresolved)
            result.errors.push_back(
                {MiningErrorKind::OrphanOperation,
                 "no resolution rule for \"" + occ.text() + "\" in " +
                     occ.comment.file_path,
                 pair.child.sha});

        for (PendingOp& op : pending) {
            SatdOperation out;
            out.resolution = op.resolution;
            out.parent_commit = pair.parent;
            out.child_commit = pair.child;
            out.old_occurrence = std::move(op.old_occurrence);
            out.new_occurrence = std::move(op.new_occurrence);

            auto orphan = [&](const SatdOccurrence& occ) {
                result.errors.push_back(
                    {MiningErrorKind::OrphanOperation,
                     std::string(to_string(out.resolution)) +
                         " for instance never seen added: \"" + occ.text() + "\" in " +
                         occ.comment.file_path,
                     pair.child.sha});
                return ledger.next_instance_id++;
            };

            switch (out.resolution) {
            case Resolution::SatdAdded:
                out.instance_id = ledger.add(*out.new_occurrence);
                break;
            case Resolution::SatdRemoved:
            case Resolution::FileRemoved: {
                const auto& occ = *out.old_occurrence;
                if (auto id = ledger.find(occ)) {
                    out.instance_id = *id;
                    ledger.erase(occ);
                } else {
                    out.instance_id = orphan(occ);
                }
                break;
            }
            case Resolution::SatdChanged:
            case Resolution::ClassOrMethodChanged:
            case Resolution::FilePathChanged:
            case Resolution::SatdMovedFile: {
                const auto& occ = *out.old_occurrence;
                if (auto id = ledger.find(occ)) {
                    out.instance_id = *id;
                } else {
                    out.instance_id = orphan(occ);
                }
                ledger.move(occ, *out.new_occurrence, out.instance_id);
                break;
            }
            }
            out.satd_id = satd_counter++;
            result.operations.push_back(std::move(out));
        }

        // drop any stale tracking state under fully removed files
        for (const auto& path : removed_paths)
            std::erase_if(ledger.live, [&](const auto& entry) {
                return std::get<0>(entry.first) == path;
            });

        result.diff_count += 1;
    }
    if (config.progress)
        config.progress(static_cast<int>(pairs.size()), static_cast<int>(pairs.size()));
    return result;
}

} // namespace satd
