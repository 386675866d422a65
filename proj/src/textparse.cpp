#include <agentprint/textparse.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cwctype>
#include <locale>
#include <memory>
#include <mutex>
#include <regex>

namespace agentprint {

namespace {

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_ident(char c)
{
    unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '$';
}

std::string_view trim_left(std::string_view s)
{
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i]))
        ++i;
    return s.substr(i);
}

std::string_view trim(std::string_view s)
{
    s = trim_left(s);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

std::string_view strip_cr(std::string_view s)
{
    if (!s.empty() && s.back() == '\r')
        s.remove_suffix(1);
    return s;
}

// getline semantics: "a\nb\n" is two lines, "" is none.
std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

bool is_blank(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), is_space);
}

// Decodes the scalar at the start of `s`; returns bytes consumed (>= 1).
std::size_t decode_utf8(std::string_view s, char32_t& cp)
{
    unsigned char b0 = static_cast<unsigned char>(s[0]);
    std::size_t len = 1;
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    if ((b0 & 0xE0) == 0xC0) {
        cp = b0 & 0x1F;
        len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
        cp = b0 & 0x0F;
        len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
        cp = b0 & 0x07;
        len = 4;
    } else {
        cp = 0xFFFD;
        return 1;
    }
    if (s.size() < len) {
        cp = 0xFFFD;
        return 1;
    }
    for (std::size_t i = 1; i < len; ++i) {
        unsigned char b = static_cast<unsigned char>(s[i]);
        if ((b & 0xC0) != 0x80) {
            cp = 0xFFFD;
            return 1;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    return len;
}

const std::locale& unicode_locale()
{
    static const std::locale loc = [] {
        try {
            return std::locale("C.UTF-8");
        } catch (const std::runtime_error&) {
            return std::locale::classic();
        }
    }();
    return loc;
}

bool starts_uppercase_letter(std::string_view line)
{
    line = trim_left(line);
    if (line.empty())
        return false;
    char32_t cp = 0;
    decode_utf8(line, cp);
    if (cp < 0x80)
        return std::isupper(static_cast<unsigned char>(cp)) != 0;
    const auto& loc = unicode_locale();
    auto wc = static_cast<wchar_t>(cp);
    return std::isalpha(wc, loc) && std::isupper(wc, loc);
}

constexpr std::array<std::string_view, 11> kConventionalTypes = {
    "feat", "fix", "docs", "style", "refactor", "perf", "test", "build", "ci", "chore", "revert",
};

} // namespace

std::size_t utf8_length(std::string_view text)
{
    std::size_t count = 0;
    while (!text.empty()) {
        char32_t cp;
        text.remove_prefix(decode_utf8(text, cp));
        ++count;
    }
    return count;
}

bool is_conventional_header(std::string_view line)
{
    std::size_t i = 0;
    while (i < line.size() && std::isalpha(static_cast<unsigned char>(line[i])))
        ++i;
    if (i == 0)
        return false;
    std::string type;
    for (char c : line.substr(0, i))
        type += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (std::find(kConventionalTypes.begin(), kConventionalTypes.end(), type) == kConventionalTypes.end())
        return false;

    if (i < line.size() && line[i] == '(') {
        std::size_t close = line.find(')', i + 1);
        if (close == std::string_view::npos || close == i + 1)
            return false;
        std::string_view scope = line.substr(i + 1, close - i - 1);
        if (scope.find('(') != std::string_view::npos)
            return false;
        i = close + 1;
    }
    if (i < line.size() && line[i] == '!')
        ++i;
    if (i + 1 >= line.size() || line[i] != ':' || line[i + 1] != ' ')
        return false;
    return !is_blank(line.substr(i + 2));
}

CommitMessageShape parse_commit_message(std::string_view message)
{
    CommitMessageShape shape;
    auto lines = split_lines(message);
    if (!lines.empty())
        shape.first_line = std::string(strip_cr(lines.front()));
    for (auto line : lines) {
        if (!is_blank(line))
            ++shape.nonblank_line_count;
    }
    shape.total_length = utf8_length(message);
    shape.is_multiline = shape.nonblank_line_count > 1;
    shape.is_conventional = is_conventional_header(shape.first_line);
    shape.first_char_capitalized = starts_uppercase_letter(shape.first_line);
    return shape;
}

namespace {

bool is_checklist_item(std::string_view trimmed)
{
    if (trimmed.size() < 5 || trimmed[0] != '-' || trimmed[1] != ' ' || trimmed[2] != '[' || trimmed[4] != ']')
        return false;
    char mark = trimmed[3];
    if (mark != ' ' && mark != 'x' && mark != 'X')
        return false;
    return trimmed.size() == 5 || is_space(trimmed[5]);
}

bool is_bullet(std::string_view trimmed)
{
    return trimmed.size() >= 2 && (trimmed[0] == '-' || trimmed[0] == '*' || trimmed[0] == '+') && trimmed[1] == ' ';
}

std::size_t count_links(std::string_view line)
{
    std::string masked(line);
    std::size_t links = 0;

    // Inline links [text](target); the span is blanked so its URL is not
    // counted a second time as a bare URL.
    std::size_t pos = 0;
    while ((pos = masked.find('[', pos)) != std::string::npos) {
        std::size_t close = masked.find(']', pos + 1);
        if (close == std::string::npos)
            break;
        if (close + 1 < masked.size() && masked[close + 1] == '(') {
            std::size_t paren = masked.find(')', close + 2);
            if (paren != std::string::npos) {
                ++links;
                std::fill(masked.begin() + static_cast<std::ptrdiff_t>(pos),
                    masked.begin() + static_cast<std::ptrdiff_t>(paren + 1), ' ');
                pos = paren + 1;
                continue;
            }
        }
        pos = pos + 1;
    }

    for (std::string_view scheme : {std::string_view("http://"), std::string_view("https://")}) {
        pos = 0;
        while ((pos = masked.find(scheme, pos)) != std::string::npos) {
            bool boundary = pos == 0 || !std::isalnum(static_cast<unsigned char>(masked[pos - 1]));
            if (boundary)
                ++links;
            pos += scheme.size();
        }
    }
    return links;
}

} // namespace

BodyStructure parse_body(std::string_view body)
{
    BodyStructure out;

    std::string_view content = body;
    while (!content.empty() && (content.back() == '\n' || content.back() == '\r'))
        content.remove_suffix(1);
    out.length_chars = utf8_length(content);

    bool in_word = false;
    for (char c : body) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++out.word_count;
        }
    }

    std::size_t fences = 0;
    bool in_fence = false;
    for (auto raw : split_lines(body)) {
        std::string_view trimmed = trim_left(strip_cr(raw));
        if (trimmed.starts_with("```")) {
            ++fences;
            in_fence = !in_fence;
            continue;
        }
        if (in_fence)
            continue;
        if (is_checklist_item(trimmed))
            ++out.checklist_items;
        else if (is_bullet(trimmed))
            ++out.bullet_lines;
        out.links += count_links(trimmed);
    }
    out.fenced_code_blocks = fences / 2;
    return out;
}

namespace {

bool parse_range(std::string_view& s, char sign, long& count)
{
    if (s.empty() || s.front() != sign)
        return false;
    s.remove_prefix(1);
    std::size_t digits = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits])))
        ++digits;
    if (digits == 0)
        return false;
    s.remove_prefix(digits);
    count = 1;
    if (!s.empty() && s.front() == ',') {
        s.remove_prefix(1);
        std::size_t n = 0;
        long value = 0;
        while (n < s.size() && std::isdigit(static_cast<unsigned char>(s[n]))) {
            value = value * 10 + (s[n] - '0');
            ++n;
        }
        if (n == 0)
            return false;
        count = value;
        s.remove_prefix(n);
    }
    return true;
}

// "@@ -a[,b] +c[,d] @@ ..." -> (b, d)
bool parse_hunk_header(std::string_view line, long& old_count, long& new_count)
{
    if (!line.starts_with("@@ "))
        return false;
    std::string_view s = line.substr(3);
    if (!parse_range(s, '-', old_count))
        return false;
    if (s.empty() || s.front() != ' ')
        return false;
    s.remove_prefix(1);
    if (!parse_range(s, '+', new_count))
        return false;
    return s.starts_with(" @@");
}

} // namespace

PatchShape parse_patch(std::string_view patch)
{
    PatchShape shape;

    // Inside a hunk with known line counts every line is content, so a
    // removed "-- x" line is not mistaken for a "---" file header.
    bool in_hunk = false;
    bool counts_known = false;
    long old_left = 0;
    long new_left = 0;

    auto add = [&](std::string_view line) { shape.added_lines.emplace_back(line.substr(1)); };
    auto remove = [&](std::string_view line) { shape.removed_lines.emplace_back(line.substr(1)); };

    for (auto line : split_lines(patch)) {
        if (line.starts_with("@@")) {
            ++shape.ignored_line_count;
            in_hunk = true;
            counts_known = parse_hunk_header(line, old_left, new_left);
            if (counts_known && old_left <= 0 && new_left <= 0)
                in_hunk = false;
            continue;
        }

        if (in_hunk && counts_known) {
            char c = line.empty() ? ' ' : line.front();
            if (c == '+') {
                add(line);
                --new_left;
            } else if (c == '-') {
                remove(line);
                --old_left;
            } else if (c == ' ') {
                ++shape.context_line_count;
                --old_left;
                --new_left;
            } else {
                ++shape.ignored_line_count;
            }
            if (old_left <= 0 && new_left <= 0)
                in_hunk = false;
            continue;
        }

        if (line.starts_with("+++") || line.starts_with("---")) {
            ++shape.ignored_line_count;
        } else if (!line.empty() && line.front() == '+') {
            add(line);
        } else if (!line.empty() && line.front() == '-') {
            remove(line);
        } else if (!line.empty() && line.front() == ' ') {
            ++shape.context_line_count;
        } else if (line.empty() && in_hunk) {
            ++shape.context_line_count;
        } else {
            ++shape.ignored_line_count;
        }
    }
    return shape;
}

// ---------------------------------------------------------------------------
// Code-line classification

std::size_t CodeTags::size() const
{
    return static_cast<std::size_t>(std::popcount(m_bits));
}

std::string_view code_tag_name(CodeTag t)
{
    switch (t) {
    case CodeTag::Comment:
        return "comment";
    case CodeTag::Import:
        return "import";
    case CodeTag::FunctionDecl:
        return "function_decl";
    case CodeTag::TypeDecl:
        return "type_decl";
    case CodeTag::Conditional:
        return "conditional";
    case CodeTag::Loop:
        return "loop";
    case CodeTag::Blank:
        return "blank";
    case CodeTag::Other:
        return "other";
    }
    return "other";
}

namespace {

const std::vector<std::string> kCLikeComments = {"//", "/*", "*/", "* "};
const std::string kNotDecl = R"(^(?!(?:return|else|throw|new|delete|case|goto|if|for|while|switch|do|catch|sizeof|typeof|await|yield)\b))";

std::vector<SyntaxProfile> build_profiles()
{
    std::vector<SyntaxProfile> p;

    p.push_back({
        .name = "python",
        .extensions = {"py"},
        .comment_prefixes = {"#", "\"\"\"", "'''"},
        .import_prefixes = {"import", "from"},
        .modifier_keywords = {"async"},
        .function_keywords = {"def"},
        .function_patterns = {},
        .type_keywords = {"class"},
        .conditional_keywords = {"if", "elif", "else", "match", "case"},
        .loop_keywords = {"for", "while"},
    });
    p.push_back({
        .name = "javascript",
        .extensions = {"js", "ts", "tsx", "jsx"},
        .comment_prefixes = kCLikeComments,
        .import_prefixes = {"import"},
        .modifier_keywords = {"export", "default", "declare", "abstract", "async", "public", "private", "protected", "static", "readonly"},
        .function_keywords = {"function"},
        .function_patterns = {
            R"(^(?:export\s+)?(?:const|let|var)\s+[\w$]+\s*(?::[^=]+)?=\s*(?:async\s+)?(?:\([^)]*\)|[\w$]+)\s*(?::\s*[^=]+)?=>)",
            kNotDecl + R"((?:(?:public|private|protected|static|async|readonly|get|set)\s+)*[\w$]+\s*\([^)]*\)\s*(?::\s*[\w<>\[\]|,. ]+)?\s*\{\s*$)",
        },
        .type_keywords = {"class", "interface", "enum", "type"},
        .conditional_keywords = {"if", "else", "switch", "case"},
        .loop_keywords = {"for", "while", "do"},
    });
    p.push_back({
        .name = "go",
        .extensions = {"go"},
        .comment_prefixes = kCLikeComments,
        .import_prefixes = {"import"},
        .modifier_keywords = {},
        .function_keywords = {"func"},
        .function_patterns = {},
        .type_keywords = {"type"},
        .conditional_keywords = {"if", "else", "switch", "case", "select"},
        .loop_keywords = {"for"},
    });
    p.push_back({
        .name = "rust",
        .extensions = {"rs"},
        .comment_prefixes = kCLikeComments,
        .import_prefixes = {"use", "extern crate"},
        .modifier_keywords = {"pub(crate)", "pub(super)", "pub", "async", "unsafe", "const", "extern"},
        .function_keywords = {"fn"},
        .function_patterns = {},
        .type_keywords = {"struct", "enum", "trait", "type", "union"},
        .conditional_keywords = {"if", "else", "match"},
        .loop_keywords = {"for", "while", "loop"},
    });
    p.push_back({
        .name = "java",
        .extensions = {"java"},
        .comment_prefixes = kCLikeComments,
        .import_prefixes = {"import"},
        .modifier_keywords = {"public", "private", "protected", "static", "final", "abstract", "sealed"},
        .function_keywords = {},
        .function_patterns = {
            kNotDecl + R"((?:(?:public|private|protected|static|final|abstract|synchronized|native|default)\s+)*[\w<>\[\],.?]+(?:\s+[\w<>\[\],.?]+)*\s+\w+\s*\([^;]*\)\s*(?:throws\s+[\w.,\s]+)?\{?\s*$)",
        },
        .type_keywords = {"class", "interface", "enum", "record"},
        .conditional_keywords = {"if", "else", "switch", "case"},
        .loop_keywords = {"for", "while", "do"},
    });
    p.push_back({
        .name = "c",
        .extensions = {"c", "h", "cpp", "hpp"},
        .comment_prefixes = kCLikeComments,
        .import_prefixes = {"#include"},
        .modifier_keywords = {"static", "inline", "virtual", "extern", "constexpr", "export"},
        .function_keywords = {},
        .function_patterns = {
            kNotDecl + R"([A-Za-z_][\w:<>,*&\s]*[\s*&]+[~A-Za-z_][\w:]*\s*\([^;]*\)\s*(?:const)?\s*(?:noexcept)?\s*(?:override)?\s*\{?\s*$)",
        },
        .type_keywords = {"class", "struct", "enum", "union", "typedef"},
        .conditional_keywords = {"if", "else", "switch", "case"},
        .loop_keywords = {"for", "while", "do"},
    });
    p.push_back({
        .name = "ruby",
        .extensions = {"rb"},
        .comment_prefixes = {"#", "=begin", "=end"},
        .import_prefixes = {"require", "require_relative"},
        .modifier_keywords = {},
        .function_keywords = {"def"},
        .function_patterns = {},
        .type_keywords = {"class", "module"},
        .conditional_keywords = {"if", "elsif", "else", "unless", "case", "when"},
        .loop_keywords = {"for", "while", "until", "loop"},
    });
    p.push_back({
        .name = "shell",
        .extensions = {"sh"},
        .comment_prefixes = {"#"},
        .import_prefixes = {"source", ". "},
        .modifier_keywords = {},
        .function_keywords = {"function"},
        .function_patterns = {R"(^[\w-]+\s*\(\)\s*\{?\s*$)"},
        .type_keywords = {},
        .conditional_keywords = {"if", "elif", "else", "case"},
        .loop_keywords = {"for", "while", "until", "select"},
    });
    p.push_back({
        .name = "yaml",
        .extensions = {"yaml", "yml"},
        .comment_prefixes = {"#"},
        .import_prefixes = {},
        .modifier_keywords = {},
        .function_keywords = {},
        .function_patterns = {},
        .type_keywords = {},
        .conditional_keywords = {},
        .loop_keywords = {},
    });
    p.push_back({
        .name = "markdown",
        .extensions = {"md"},
        .comment_prefixes = {"<!--"},
        .import_prefixes = {},
        .modifier_keywords = {},
        .function_keywords = {},
        .function_patterns = {},
        .type_keywords = {},
        .conditional_keywords = {},
        .loop_keywords = {},
    });
    return p;
}

SyntaxProfile build_generic()
{
    return {
        .name = "generic",
        .extensions = {},
        .comment_prefixes = {"//", "#", "/*", "*", "--"},
        .import_prefixes = {"import", "#include", "using", "require", "use", "from"},
        .modifier_keywords = {"export", "public", "private", "protected", "static", "async", "pub"},
        .function_keywords = {"def", "function", "func", "fn"},
        .function_patterns = {},
        .type_keywords = {"class", "struct", "interface", "enum", "trait"},
        .conditional_keywords = {"if", "elif", "elsif", "else", "switch", "case", "match", "unless", "when"},
        .loop_keywords = {"for", "foreach", "while", "do", "loop", "until"},
    };
}

struct CompiledPatterns {
    std::vector<std::vector<std::regex>> per_profile;
    std::vector<std::regex> generic;
};

std::vector<std::regex> compile(const SyntaxProfile& profile)
{
    std::vector<std::regex> out;
    for (const auto& p : profile.function_patterns)
        out.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
    return out;
}

const CompiledPatterns& compiled_patterns()
{
    static const CompiledPatterns compiled = [] {
        CompiledPatterns c;
        for (const auto& p : syntax_profiles())
            c.per_profile.push_back(compile(p));
        c.generic = compile(generic_profile());
        return c;
    }();
    return compiled;
}

const std::vector<std::regex>& patterns_for(const SyntaxProfile& profile)
{
    const auto& all = syntax_profiles();
    const auto& compiled = compiled_patterns();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (&all[i] == &profile)
            return compiled.per_profile[i];
    }
    if (&profile == &generic_profile())
        return compiled.generic;
    // Caller-built profile: compile on the fly.
    thread_local std::vector<std::regex> scratch;
    scratch = compile(profile);
    return scratch;
}

bool starts_with_token(std::string_view s, std::string_view prefix)
{
    if (!s.starts_with(prefix))
        return false;
    if (s.size() == prefix.size())
        return true;
    return !is_ident(prefix.back()) || !is_ident(s[prefix.size()]);
}

bool matches_comment(std::string_view s, std::string_view prefix)
{
    if (s.starts_with(prefix))
        return true;
    // "* " also matches a bare "*" line.
    return prefix.size() > 1 && prefix.back() == ' ' && s == prefix.substr(0, prefix.size() - 1);
}

std::string_view first_token(std::string_view s)
{
    std::size_t n = 0;
    while (n < s.size() && is_ident(s[n]))
        ++n;
    return s.substr(0, n);
}

bool contains(const std::vector<std::string>& list, std::string_view value)
{
    return !value.empty() && std::find(list.begin(), list.end(), value) != list.end();
}

} // namespace

const std::vector<SyntaxProfile>& syntax_profiles()
{
    static const std::vector<SyntaxProfile> profiles = build_profiles();
    return profiles;
}

const SyntaxProfile& generic_profile()
{
    static const SyntaxProfile generic = build_generic();
    return generic;
}

const SyntaxProfile& profile_for_extension(std::string_view extension)
{
    if (extension.starts_with('.'))
        extension.remove_prefix(1);
    std::string lowered;
    for (char c : extension)
        lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const auto& p : syntax_profiles()) {
        if (std::find(p.extensions.begin(), p.extensions.end(), lowered) != p.extensions.end())
            return p;
    }
    return generic_profile();
}

CodeTags classify_code_line(std::string_view line, std::string_view extension)
{
    return classify_code_line(line, profile_for_extension(extension));
}

CodeTags classify_code_line(std::string_view line, const SyntaxProfile& profile)
{
    std::string_view s = trim(line);
    if (s.empty())
        return CodeTags::of({CodeTag::Blank});

    for (const auto& prefix : profile.import_prefixes) {
        if (starts_with_token(s, prefix))
            return CodeTags::of({CodeTag::Import});
    }
    for (const auto& prefix : profile.comment_prefixes) {
        if (matches_comment(s, prefix))
            return CodeTags::of({CodeTag::Comment});
    }

    CodeTags tags;

    std::string_view decl = s;
    for (bool stripped = true; stripped;) {
        stripped = false;
        for (const auto& m : profile.modifier_keywords) {
            if (starts_with_token(decl, m)) {
                decl = trim_left(decl.substr(m.size()));
                stripped = true;
                break;
            }
        }
    }
    std::string_view decl_token = first_token(decl);
    if (contains(profile.function_keywords, decl_token))
        tags.set(CodeTag::FunctionDecl);
    if (contains(profile.type_keywords, decl_token))
        tags.set(CodeTag::TypeDecl);

    std::string_view flow = s;
    while (!flow.empty() && (flow.front() == '}' || is_space(flow.front())))
        flow.remove_prefix(1);
    std::string_view flow_token = first_token(flow);
    if (contains(profile.conditional_keywords, flow_token))
        tags.set(CodeTag::Conditional);
    if (contains(profile.loop_keywords, flow_token))
        tags.set(CodeTag::Loop);

    if (!tags.has(CodeTag::FunctionDecl) && !tags.has(CodeTag::Conditional) && !tags.has(CodeTag::Loop)
        && s.find('(') != std::string_view::npos) {
        std::string owned(s);
        for (const auto& re : patterns_for(profile)) {
            if (std::regex_search(owned, re)) {
                tags.set(CodeTag::FunctionDecl);
                break;
            }
        }
    }

    if (tags.empty())
        tags.set(CodeTag::Other);
    return tags;
}

nlohmann::json profiles_to_json()
{
    auto encode = [](const SyntaxProfile& p) {
        return nlohmann::json{
            {"name", p.name},
            {"extensions", p.extensions},
            {"comment_prefixes", p.comment_prefixes},
            {"import_prefixes", p.import_prefixes},
            {"modifier_keywords", p.modifier_keywords},
            {"function_keywords", p.function_keywords},
            {"function_patterns", p.function_patterns},
            {"type_keywords", p.type_keywords},
            {"conditional_keywords", p.conditional_keywords},
            {"loop_keywords", p.loop_keywords},
        };
    };
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& p : syntax_profiles())
        profiles.push_back(encode(p));
    return {
        {"format_version", 1},
        {"profiles", profiles},
        {"generic", encode(generic_profile())},
        {"rules", {
            {"blank", "line is empty after trimming whitespace; tagged blank only"},
            {"import", "trimmed line starts with an import prefix at a token boundary; tagged import only"},
            {"comment", "trimmed line starts with a comment prefix (a prefix ending in a space also matches the bare prefix); tagged comment only"},
            {"declaration", "after stripping modifier keywords, the first identifier token is a function or type keyword"},
            {"flow", "after stripping leading '}' and whitespace, the first identifier token is a conditional or loop keyword"},
            {"function_patterns", "ECMAScript regex search on the trimmed line, tried only when the line contains '(' and is not already a function, conditional or loop"},
            {"other", "assigned when no other tag applies"},
        }},
    };
}

} // namespace agentprint
