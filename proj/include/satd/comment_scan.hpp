#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satd {

enum class CommentKind { Line, Block, JavaDoc };

std::string_view to_string(CommentKind kind);
std::optional<CommentKind> comment_kind_from_string(std::string_view s);

struct RawComment {
    CommentKind kind = CommentKind::Line;
    int start_line = 1; // 1-based, inclusive
    int end_line = 1;
    std::string text;        // delimiters stripped, lines joined by '\n'
    bool code_before = false; // non-whitespace code precedes the comment on its first line
};

struct CommentInstance {
    RawComment comment;
    std::string file_path;
    std::optional<std::string> containing_class;
    std::optional<std::string> containing_method; // signature text, normalized whitespace
};

// Tolerant scanner: returns every comment outside string/char literals in
// document order. Never fails; an unterminated block comment runs to EOF.
std::vector<RawComment> scan_comments(std::string_view source);

// Merges maximal runs of own-line Line comments on strictly consecutive
// lines into one comment. Block and JavaDoc comments never merge.
std::vector<RawComment> group_adjacent(std::vector<RawComment> comments);

// Annotates each comment with the innermost enclosing type name and method
// signature found by a brace-depth declaration scan of the same source.
std::vector<CommentInstance> attach_context(std::string_view source,
                                            const std::vector<RawComment>& comments,
                                            const std::string& file_path);

} // namespace satd
