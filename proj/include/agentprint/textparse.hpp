#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace agentprint {

/// Number of Unicode scalar values in a UTF-8 string. Invalid bytes count
/// as one scalar each.
std::size_t utf8_length(std::string_view text);

struct CommitMessageShape {
    std::string first_line;
    std::size_t nonblank_line_count = 0;
    std::size_t total_length = 0;
    bool is_multiline = false;
    bool is_conventional = false;
    bool first_char_capitalized = false;

    bool operator==(const CommitMessageShape&) const = default;
};

struct BodyStructure {
    std::size_t length_chars = 0;
    std::size_t word_count = 0;
    std::size_t checklist_items = 0;
    std::size_t fenced_code_blocks = 0;
    std::size_t links = 0;
    std::size_t bullet_lines = 0;

    bool operator==(const BodyStructure&) const = default;
};

struct PatchShape {
    std::vector<std::string> added_lines;
    std::vector<std::string> removed_lines;
    std::size_t context_line_count = 0;
    std::size_t ignored_line_count = 0;

    bool operator==(const PatchShape&) const = default;
};

/// Conventional Commits header check over the closed type set
/// {feat, fix, docs, style, refactor, perf, test, build, ci, chore, revert}.
bool is_conventional_header(std::string_view line);

CommitMessageShape parse_commit_message(std::string_view message);
BodyStructure parse_body(std::string_view body);
PatchShape parse_patch(std::string_view patch);

// Code-line tags. A line carries a set of them; Blank never co-occurs with
// another tag.
enum class CodeTag : std::uint8_t {
    Comment,
    Import,
    FunctionDecl,
    TypeDecl,
    Conditional,
    Loop,
    Blank,
    Other,
};

class CodeTags {
public:
    constexpr CodeTags() = default;

    constexpr void set(CodeTag t) { m_bits |= bit(t); }
    constexpr bool has(CodeTag t) const { return (m_bits & bit(t)) != 0; }
    constexpr bool empty() const { return m_bits == 0; }
    constexpr std::uint8_t bits() const { return m_bits; }
    std::size_t size() const;

    constexpr bool operator==(const CodeTags&) const = default;

    static constexpr CodeTags of(std::initializer_list<CodeTag> tags)
    {
        CodeTags out;
        for (CodeTag t : tags)
            out.set(t);
        return out;
    }

private:
    static constexpr std::uint8_t bit(CodeTag t) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t)); }
    std::uint8_t m_bits = 0;
};

std::string_view code_tag_name(CodeTag t);

// Lexical syntax profile for one language family. Matching rules:
//  * prefixes (comment, import) match the line after leading whitespace;
//  * keywords (function, type, conditional, loop) match the first
//    identifier-delimited token, after stripping leading modifier keywords
//    (function/type) or leading '}' characters (conditional/loop);
//  * function_patterns are ECMAScript regexes searched against the
//    whitespace-trimmed line.
struct SyntaxProfile {
    std::string name;
    std::vector<std::string> extensions;
    std::vector<std::string> comment_prefixes;
    std::vector<std::string> import_prefixes;
    std::vector<std::string> modifier_keywords;
    std::vector<std::string> function_keywords;
    std::vector<std::string> function_patterns;
    std::vector<std::string> type_keywords;
    std::vector<std::string> conditional_keywords;
    std::vector<std::string> loop_keywords;
};

const std::vector<SyntaxProfile>& syntax_profiles();
const SyntaxProfile& generic_profile();

/// Profile for an extension given with or without the leading dot,
/// case-insensitive. Unknown extensions get the generic profile.
const SyntaxProfile& profile_for_extension(std::string_view extension);

CodeTags classify_code_line(std::string_view line, std::string_view extension);
CodeTags classify_code_line(std::string_view line, const SyntaxProfile& profile);

nlohmann::json profiles_to_json();

} // namespace agentprint
