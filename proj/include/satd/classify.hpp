#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satd {

struct PatternSet {
    std::vector<std::string> patterns; // lowercase, non-empty
    std::string source;                // "builtin" or the file path
};

// Built-in defaults when no file is given. A file is one pattern per line,
// '#' starts a comment line. Throws std::runtime_error on unreadable files
// or an empty resulting set.
PatternSet load_patterns(const std::optional<std::string>& path);

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::string_view name() const = 0;

    // Classifies one batch of comment texts; result[i] answers texts[i].
    // Throws on classifier failure (spawn error, protocol violation).
    virtual std::vector<bool> classify(const std::vector<std::string>& texts) = 0;

    bool is_satd(const std::string& text);
};

// Case-insensitive word-boundary match against a pattern set.
class PatternClassifier final : public Classifier {
public:
    explicit PatternClassifier(PatternSet patterns);
    std::string_view name() const override { return "patterns"; }
    std::vector<bool> classify(const std::vector<std::string>& texts) override;

    bool matches(std::string_view text) const;

private:
    PatternSet patterns_;
};

// Wraps a child process speaking the line protocol: N comment lines in,
// N lines of "0"/"1" out. Newlines inside a comment are sent as spaces.
class ExternalClassifier final : public Classifier {
public:
    explicit ExternalClassifier(std::string command);
    std::string_view name() const override { return "external"; }
    std::vector<bool> classify(const std::vector<std::string>& texts) override;

private:
    std::string command_;
};

std::unique_ptr<Classifier> make_default_classifier(
    const std::optional<std::string>& patterns_file = std::nullopt);

} // namespace satd
