#include "satd/comment_scan.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace satd {

std::string_view to_string(CommentKind kind) {
    switch (kind) {
    case CommentKind::Line: return "Line";
    case CommentKind::Block: return "Block";
    case CommentKind::JavaDoc: return "JavaDoc";
    }
    return "Line";
}

std::optional<CommentKind> comment_kind_from_string(std::string_view s) {
    if (s == "Line") return CommentKind::Line;
    if (s == "Block") return CommentKind::Block;
    if (s == "JavaDoc") return CommentKind::JavaDoc;
    return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize_line_text(std::string_view raw) {
    // raw is the content after "//": strip any further leading slashes.
    std::size_t b = 0;
    while (b < raw.size() && raw[b] == '/') ++b;
    return trim(raw.substr(b));
}

std::string normalize_block_text(std::string_view raw) {
    // raw is the content between the open and close delimiters.
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t nl = raw.find('\n', start);
        std::string_view line =
            nl == std::string_view::npos ? raw.substr(start) : raw.substr(start, nl - start);
        std::string t = trim(line);
        std::size_t stars = 0;
        while (stars < t.size() && t[stars] == '*') ++stars;
        lines.push_back(trim(std::string_view(t).substr(stars)));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

// Walks Java-ish source, shielding string and char literals, and reports
// comments and code characters to the callbacks. Total on any input.
void scan_source(std::string_view src,
                 const std::function<void(const RawComment&)>& on_comment,
                 const std::function<void(char, int)>& on_code) {
    int line = 1;
    bool code_on_line = false;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto count_lines = [&](std::string_view chunk) {
        return static_cast<int>(std::count(chunk.begin(), chunk.end(), '\n'));
    };

    while (i < n) {
        char c = src[i];
        if (c == '\n') {
            line += 1;
            code_on_line = false;
            if (on_code) on_code('\n', line);
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            std::size_t end = src.find('\n', i);
            if (end == std::string_view::npos) end = n;
            RawComment rc;
            rc.kind = CommentKind::Line;
            rc.start_line = rc.end_line = line;
            rc.text = normalize_line_text(src.substr(i + 2, end - i - 2));
            rc.code_before = code_on_line;
            if (on_comment) on_comment(rc);
            i = end;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            const bool javadoc = i + 2 < n && src[i + 2] == '*' &&
                                 !(i + 3 < n && src[i + 3] == '/');
            const std::size_t body_start = i + (javadoc ? 3 : 2);
            std::size_t close = src.find("*/", body_start);
            std::size_t body_end = close == std::string_view::npos ? n : close;
            RawComment rc;
            rc.kind = javadoc ? CommentKind::JavaDoc : CommentKind::Block;
            rc.start_line = line;
            std::string_view body = src.substr(body_start, body_end - body_start);
            rc.end_line = line + count_lines(src.substr(i, (close == std::string_view::npos
                                                                ? n
                                                                : close + 2) - i));
            rc.text = normalize_block_text(body);
            rc.code_before = code_on_line;
            if (on_comment) on_comment(rc);
            line = rc.end_line;
            i = close == std::string_view::npos ? n : close + 2;
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            ++i;
            while (i < n) {
                if (src[i] == '\\' && i + 1 < n) {
                    i += 2;
                    continue;
                }
                if (src[i] == '\n') {
                    // unterminated literal; stay tolerant
                    break;
                }
                if (src[i] == quote) {
                    ++i;
                    break;
                }
                ++i;
            }
            code_on_line = true;
            if (on_code) on_code(quote, line);
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(c)))
            code_on_line = true;
        if (on_code) on_code(c, line);
        ++i;
    }
}

} // namespace

std::vector<RawComment> scan_comments(std::string_view source) {
    std::vector<RawComment> out;
    scan_source(source, [&](const RawComment& rc) { out.push_back(rc); }, nullptr);
    return out;
}

std::vector<RawComment> group_adjacent(std::vector<RawComment> comments) {
    std::vector<RawComment> out;
    for (auto& c : comments) {
        if (!out.empty()) {
            RawComment& prev = out.back();
            if (prev.kind == CommentKind::Line && c.kind == CommentKind::Line &&
                !prev.code_before && !c.code_before &&
                c.start_line == prev.end_line + 1) {
                prev.text += '\n';
                prev.text += c.text;
                prev.end_line = c.end_line;
                continue;
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

const char* kControlKeywords[] = {"if",  "for",    "while",        "switch", "catch",
                                  "do",  "try",    "synchronized", "return", "new",
                                  "else", "finally", "throw"};

bool is_control_keyword(const std::string& tok) {
    return std::find(std::begin(kControlKeywords), std::end(kControlKeywords), tok) !=
           std::end(kControlKeywords);
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (is_ident_char(c)) {
            std::size_t j = i;
            while (j < s.size() && is_ident_char(s[j])) ++j;
            toks.push_back(s.substr(i, j - i));
            i = j;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            toks.push_back(std::string(1, c));
            ++i;
        } else {
            ++i;
        }
    }
    return toks;
}

std::string collapse_ws(const std::string& s) {
    std::string out;
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out += ' ';
        in_ws = false;
        out += c;
    }
    return out;
}

// Drops "@Name" and "@Name(...)" annotation prefixes from a declaration.
std::string strip_annotations(const std::string& s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '@') {
            ++i;
            while (i < s.size() && (is_ident_char(s[i]) || s[i] == '.')) ++i;
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            if (i < s.size() && s[i] == '(') {
                int depth = 0;
                while (i < s.size()) {
                    if (s[i] == '(') ++depth;
                    if (s[i] == ')' && --depth == 0) {
                        ++i;
                        break;
                    }
                    ++i;
                }
            }
            continue;
        }
        out += s[i++];
    }
    return out;
}

struct Scope {
    enum Kind { Type, Method, Block } kind = Block;
    std::string name; // type name or method signature
};

// Classifies the declaration text preceding an opening brace.
Scope classify_decl(const std::string& raw_decl, bool inside_type, bool inside_method) {
    const std::string decl = strip_annotations(raw_decl);
    const auto toks = tokenize(decl);

    for (std::size_t i = 0; i < toks.size(); ++i) {
        const std::string& t = toks[i];
        if ((t == "class" || t == "interface" || t == "enum" || t == "record") &&
            (i == 0 || toks[i - 1] != ".")) {
            for (std::size_t j = i + 1; j < toks.size(); ++j) {
                if (is_ident_char(toks[j][0]))
                    return {Scope::Type, toks[j]};
                break;
            }
            return {Scope::Type, ""};
        }
    }

    if (!inside_type || inside_method)
        return {Scope::Block, ""};
    if (decl.find('=') != std::string::npos || decl.find("->") != std::string::npos)
        return {Scope::Block, ""};

    const std::size_t paren = decl.find('(');
    if (paren == std::string::npos)
        return {Scope::Block, ""};

    // identifier directly before the parenthesis, skipping whitespace
    std::size_t e = paren;
    while (e > 0 && std::isspace(static_cast<unsigned char>(decl[e - 1]))) --e;
    std::size_t b = e;
    while (b > 0 && is_ident_char(decl[b - 1])) --b;
    if (b == e)
        return {Scope::Block, ""};
    const std::string name = decl.substr(b, e - b);
    if (is_control_keyword(name))
        return {Scope::Block, ""};

    // signature runs to the matching close paren
    int depth = 0;
    std::size_t end = paren;
    for (std::size_t i = paren; i < decl.size(); ++i) {
        if (decl[i] == '(') ++depth;
        if (decl[i] == ')' && --depth == 0) {
            end = i + 1;
            break;
        }
    }
    return {Scope::Method, collapse_ws(decl.substr(0, end))};
}

} // namespace

std::vector<CommentInstance> attach_context(std::string_view source,
                                            const std::vector<RawComment>& comments,
                                            const std::string& file_path) {
    struct Context {
        std::optional<std::string> cls;
        std::optional<std::string> method;
    };
    std::map<int, Context> by_line;

    std::vector<Scope> stack;
    std::string decl;

    auto current_context = [&]() {
        Context ctx;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            if (it->kind == Scope::Method && !ctx.method)
                ctx.method = it->name;
            if (it->kind == Scope::Type && !ctx.cls) {
                ctx.cls = it->name;
                break; // innermost type wins; outer scopes are irrelevant
            }
        }
        if (!ctx.cls)
            ctx.method.reset();
        return ctx;
    };

    scan_source(
        source,
        [&](const RawComment& rc) {
            if (!by_line.count(rc.start_line))
                by_line[rc.start_line] = current_context();
        },
        [&](char c, int) {
            switch (c) {
            case '{': {
                bool inside_type = std::any_of(stack.begin(), stack.end(), [](const Scope& s) {
                    return s.kind == Scope::Type;
                });
                bool inside_method = !stack.empty() && stack.back().kind == Scope::Method;
                stack.push_back(classify_decl(decl, inside_type, inside_method));
                decl.clear();
                break;
            }
            case '}':
                if (!stack.empty()) stack.pop_back();
                decl.clear();
                break;
            case ';':
                decl.clear();
                break;
            default:
                decl += c;
            }
        });

    std::vector<CommentInstance> out;
    out.reserve(comments.size());
    for (const auto& c : comments) {
        CommentInstance inst;
        inst.comment = c;
        inst.file_path = file_path;
        auto it = by_line.find(c.start_line);
        if (it != by_line.end()) {
            inst.containing_class = it->second.cls;
            inst.containing_method = it->second.method;
        }
        out.push_back(std::move(inst));
    }
    return out;
}

} // namespace satd
