#include "satd/classify.hpp"

#include "satd/process.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace satd {

namespace {

const char* kBuiltinPatterns[] = {
    "todo",      "fixme",    "xxx",     "hack",
    "workaround", "temporary solution", "not implemented", "kludge",
    "ugly",      "stupid",   "broken",  "bug",
};

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

PatternSet load_patterns(const std::optional<std::string>& path) {
    PatternSet set;
    if (!path) {
        for (const char* p : kBuiltinPatterns)
            set.patterns.emplace_back(p);
        set.source = "builtin";
        return set;
    }
    std::ifstream in(*path);
    if (!in)
        throw std::runtime_error("cannot read pattern file: " + *path);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        auto e = line.find_last_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        set.patterns.push_back(to_lower(line.substr(b, e - b + 1)));
    }
    if (set.patterns.empty())
        throw std::runtime_error("empty pattern set: " + *path);
    set.source = *path;
    return set;
}

bool Classifier::is_satd(const std::string& text) {
    return classify({text}).front();
}

PatternClassifier::PatternClassifier(PatternSet patterns) : patterns_(std::move(patterns)) {
    if (patterns_.patterns.empty())
        throw std::runtime_error("empty pattern set");
}

bool PatternClassifier::matches(std::string_view text) const {
    if (text.empty())
        return false;
    const std::string lower = to_lower(text);
    for (const auto& pat : patterns_.patterns) {
        std::size_t pos = 0;
        while ((pos = lower.find(pat, pos)) != std::string::npos) {
            const bool left_ok = pos == 0 || !word_char(lower[pos - 1]);
            const std::size_t end = pos + pat.size();
            const bool right_ok = end == lower.size() || !word_char(lower[end]);
            if (left_ok && right_ok)
                return true;
            ++pos;
        }
    }
    return false;
}

std::vector<bool> PatternClassifier::classify(const std::vector<std::string>& texts) {
    std::vector<bool> out;
    out.reserve(texts.size());
    for (const auto& t : texts)
        out.push_back(matches(t));
    return out;
}

ExternalClassifier::ExternalClassifier(std::string command) : command_(std::move(command)) {
    if (command_.empty())
        throw std::runtime_error("empty classifier command");
}

std::vector<bool> ExternalClassifier::classify(const std::vector<std::string>& texts) {
    if (texts.empty())
        return {};
    std::string input;
    for (const auto& t : texts) {
        std::string flat = t;
        std::replace(flat.begin(), flat.end(), '\n', ' ');
        input += flat;
        input += '\n';
    }
    ProcessOptions opts;
    opts.stdin_data = input;
    ProcessResult res = run_shell(command_, opts);
    if (res.exit_code != 0)
        throw std::runtime_error("classifier command failed (exit " +
                                 std::to_string(res.exit_code) + "): " + command_);
    std::vector<bool> out;
    std::istringstream lines(res.out);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        out.push_back(line[0] == '1');
    }
    if (out.size() != texts.size())
        throw std::runtime_error("classifier protocol violation: sent " +
                                 std::to_string(texts.size()) + " comments, got " +
                                 std::to_string(out.size()) + " verdicts");
    return out;
}

std::unique_ptr<Classifier> make_default_classifier(
    const std::optional<std::string>& patterns_file) {
    return std::make_unique<PatternClassifier>(load_patterns(patterns_file));
}

} // namespace satd
