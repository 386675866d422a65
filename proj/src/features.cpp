#include <agentprint/features.hpp>

#include <agentprint/textparse.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace agentprint {

namespace {

using C = FeatureCategory;

// clang-format off
constexpr std::array<FeatureInfo, kFeatureCount> kRegistry = {{
    // Commit patterns
    {"commit_count", C::Commit, "Number of commits in the PR", "count", false},
    {"commit_conventional_ratio", C::Commit, "Fraction of commit messages whose first line is a Conventional Commits header (closed type set)", "ratio", true},
    {"commit_msg_len_avg", C::Commit, "Mean commit message length", "chars", false},
    {"commit_msg_len_min", C::Commit, "Shortest commit message length", "chars", false},
    {"commit_msg_len_max", C::Commit, "Longest commit message length", "chars", false},
    {"commit_msg_len_std", C::Commit, "Population standard deviation of commit message length", "chars", false},
    {"commit_multiline_ratio", C::Commit, "Fraction of commit messages with more than one non-blank line", "ratio", true},
    {"commit_capitalized_ratio", C::Commit, "Fraction of commit messages whose first character is an uppercase letter", "ratio", true},
    {"commit_msg_word_count_avg", C::Commit, "Mean whitespace-delimited word count of commit messages", "words", false},
    // PR structure
    {"title_length", C::PRStructure, "PR title length", "chars", false},
    {"title_word_count", C::PRStructure, "PR title word count", "words", false},
    {"body_length", C::PRStructure, "PR body length, trailing newlines excluded", "chars", false},
    {"body_word_count", C::PRStructure, "PR body word count", "words", false},
    {"body_checklist_count", C::PRStructure, "Markdown checklist items '- [ ]' / '- [x]' outside code fences", "count", false},
    {"body_code_block_count", C::PRStructure, "Fenced code blocks (pairs of ``` lines)", "count", false},
    {"body_link_count", C::PRStructure, "Inline markdown links plus bare http(s) URLs outside code fences", "count", false},
    {"body_bullet_count", C::PRStructure, "Non-checklist lines starting with '-', '*' or '+' and a space, outside code fences", "count", false},
    {"title_is_conventional", C::PRStructure, "1 when the title is a Conventional Commits header", "flag", true},
    // Code changes
    {"files_changed", C::CodeChanges, "Number of changed files", "count", false},
    {"distinct_extension_count", C::CodeChanges, "Number of distinct file extensions (no extension counts as one)", "count", false},
    {"extension_entropy", C::CodeChanges, "Shannon entropy of the extension distribution", "nats", false},
    {"test_file_ratio", C::CodeChanges, "Fraction of files classified as tests", "ratio", true},
    {"config_file_ratio", C::CodeChanges, "Fraction of files classified as configuration", "ratio", true},
    {"doc_file_ratio", C::CodeChanges, "Fraction of files classified as documentation", "ratio", true},
    {"avg_dir_depth", C::CodeChanges, "Mean number of directory components per path", "depth", false},
    {"max_dir_depth", C::CodeChanges, "Largest number of directory components", "depth", false},
    {"op_added_ratio", C::CodeChanges, "Fraction of files added", "ratio", true},
    {"op_modified_ratio", C::CodeChanges, "Fraction of files modified", "ratio", true},
    {"op_removed_ratio", C::CodeChanges, "Fraction of files removed", "ratio", true},
    {"op_renamed_ratio", C::CodeChanges, "Fraction of files renamed", "ratio", true},
    {"total_additions", C::CodeChanges, "Sum of per-file added line counts", "lines", false},
    {"total_deletions", C::CodeChanges, "Sum of per-file deleted line counts", "lines", false},
    {"addition_deletion_ratio", C::CodeChanges, "additions / (additions + deletions)", "ratio", true},
    {"change_gini", C::CodeChanges, "Gini coefficient of per-file changed lines (change concentration)", "ratio", true},
    // Patch-level code
    {"added_line_count", C::PatchLevel, "Added lines across all patches", "lines", false},
    {"removed_line_count", C::PatchLevel, "Removed lines across all patches", "lines", false},
    {"added_line_len_avg", C::PatchLevel, "Mean added-line length", "chars", false},
    {"added_line_len_max", C::PatchLevel, "Longest added line", "chars", false},
    {"added_line_len_std", C::PatchLevel, "Population standard deviation of added-line length", "chars", false},
    {"trailing_whitespace_ratio", C::PatchLevel, "Fraction of added lines ending in a space or tab", "ratio", true},
    {"tab_indent_ratio", C::PatchLevel, "Tab-indented lines among indented non-blank added lines", "ratio", true},
    {"avg_indent_width", C::PatchLevel, "Mean leading-space count among space-indented non-blank added lines", "chars", false},
    {"comment_density", C::PatchLevel, "Comment lines per added line", "ratio", true},
    {"import_density", C::PatchLevel, "Import lines per added line", "ratio", true},
    {"function_decl_count", C::PatchLevel, "Added lines declaring a function", "count", false},
    {"type_decl_count", C::PatchLevel, "Added lines declaring a class or type", "count", false},
    {"conditional_count", C::PatchLevel, "Added lines opening a conditional", "count", false},
    {"loop_count", C::PatchLevel, "Added lines opening a loop", "count", false},
    {"blank_line_ratio", C::PatchLevel, "Blank lines per added line", "ratio", true},
    // Temporal (UTC)
    {"hour_of_day", C::Temporal, "Submission hour, UTC", "hour", false},
    {"is_weekend", C::Temporal, "1 on Saturday or Sunday, UTC", "flag", true},
    {"is_business_hours", C::Temporal, "1 on weekdays between 09:00 and 16:59 UTC", "flag", true},
    {"day_of_week", C::Temporal, "Day of week, Monday = 0, UTC", "day", false},
}};
// clang-format on

double safe_div(double num, double den)
{
    return den == 0.0 ? 0.0 : num / den;
}

struct Moments {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;
};

Moments moments(std::span<const double> xs)
{
    Moments m;
    if (xs.empty())
        return m;
    m.min = *std::min_element(xs.begin(), xs.end());
    m.max = *std::max_element(xs.begin(), xs.end());
    double sum = std::accumulate(xs.begin(), xs.end(), 0.0);
    m.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
    return m;
}

std::size_t word_count(std::string_view text)
{
    std::size_t words = 0;
    bool in_word = false;
    for (char c : text) {
        bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (space) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++words;
        }
    }
    return words;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> path_components(std::string_view path)
{
    while (path.starts_with("./"))
        path.remove_prefix(2);
    while (path.starts_with('/'))
        path.remove_prefix(1);
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        std::size_t end = path.find('/', start);
        if (end == std::string_view::npos)
            end = path.size();
        if (end > start)
            parts.push_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

bool ends_with_line_whitespace(std::string_view s)
{
    return !s.empty() && (s.back() == ' ' || s.back() == '\t');
}

} // namespace

std::string_view category_name(FeatureCategory c)
{
    switch (c) {
    case FeatureCategory::Commit:
        return "commit";
    case FeatureCategory::PRStructure:
        return "pr_structure";
    case FeatureCategory::CodeChanges:
        return "code_changes";
    case FeatureCategory::PatchLevel:
        return "patch_level";
    case FeatureCategory::Temporal:
        return "temporal";
    }
    return "commit";
}

std::span<const FeatureInfo> feature_registry()
{
    return kRegistry;
}

int registry_index(std::string_view name)
{
    for (std::size_t i = 0; i < kRegistry.size(); ++i) {
        if (kRegistry[i].name == name)
            return static_cast<int>(i);
    }
    return -1;
}

std::vector<std::string> registry_names()
{
    std::vector<std::string> names;
    names.reserve(kRegistry.size());
    for (const auto& f : kRegistry)
        names.emplace_back(f.name);
    return names;
}

nlohmann::json registry_to_json()
{
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t i = 0; i < kRegistry.size(); ++i) {
        const auto& f = kRegistry[i];
        features.push_back({
            {"index", i},
            {"name", f.name},
            {"category", category_name(f.category)},
            {"description", f.description},
            {"unit", f.unit},
            {"ratio", f.is_ratio},
        });
    }
    return {
        {"format_version", 1},
        {"feature_count", kRegistry.size()},
        {"features", features},
        {"notes", {
            "commit_msg_word_count_avg is our choice for the ninth commit feature",
            "test := path component test/tests/spec or file name prefix test_, stem suffix _test, or containing .spec.; doc := extension md/rst/txt/adoc or path component docs; config := extension json/yaml/yml/toml/ini/cfg/conf or dotfile; precedence test > doc > config",
            "all statistics are population moments; zero denominators yield 0",
            "temporal features use UTC; business hours are 09:00-16:59 on weekdays",
        }},
    };
}

CommitFeatures extract_commit_features(const std::vector<CommitRecord>& commits)
{
    CommitFeatures out{};
    if (commits.empty())
        return out;
    std::vector<double> lengths;
    double conventional = 0, multiline = 0, capitalized = 0, words = 0;
    for (const auto& c : commits) {
        auto shape = parse_commit_message(c.message);
        lengths.push_back(static_cast<double>(shape.total_length));
        conventional += shape.is_conventional;
        multiline += shape.is_multiline;
        capitalized += shape.first_char_capitalized;
        words += static_cast<double>(word_count(c.message));
    }
    double n = static_cast<double>(commits.size());
    Moments m = moments(lengths);
    out[0] = n;
    out[1] = conventional / n;
    out[2] = m.mean;
    out[3] = m.min;
    out[4] = m.max;
    out[5] = m.stddev;
    out[6] = multiline / n;
    out[7] = capitalized / n;
    out[8] = words / n;
    return out;
}

StructureFeatures extract_structure_features(std::string_view title, std::string_view body)
{
    StructureFeatures out{};
    BodyStructure b = parse_body(body);
    out[0] = static_cast<double>(utf8_length(title));
    out[1] = static_cast<double>(word_count(title));
    out[2] = static_cast<double>(b.length_chars);
    out[3] = static_cast<double>(b.word_count);
    out[4] = static_cast<double>(b.checklist_items);
    out[5] = static_cast<double>(b.fenced_code_blocks);
    out[6] = static_cast<double>(b.links);
    out[7] = static_cast<double>(b.bullet_lines);
    out[8] = is_conventional_header(title) ? 1.0 : 0.0;
    return out;
}

std::string file_extension(std::string_view path)
{
    auto parts = path_components(path);
    if (parts.empty())
        return {};
    std::string_view name = parts.back();
    std::size_t dot = name.rfind('.');
    if (dot == std::string_view::npos || dot == 0)
        return {};
    return lower(name.substr(dot + 1));
}

std::size_t directory_depth(std::string_view path)
{
    auto parts = path_components(path);
    return parts.empty() ? 0 : parts.size() - 1;
}

FileKind classify_file(std::string_view path)
{
    auto parts = path_components(path);
    if (parts.empty())
        return FileKind::Source;
    std::string name = lower(parts.back());
    std::string ext = file_extension(path);
    std::string stem = name;
    if (!ext.empty())
        stem = name.substr(0, name.size() - ext.size() - 1);

    bool test = name.starts_with("test_") || stem.ends_with("_test") || name.find(".spec.") != std::string::npos;
    bool doc_dir = false;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        std::string dir = lower(parts[i]);
        if (dir == "test" || dir == "tests" || dir == "spec")
            test = true;
        if (dir == "docs")
            doc_dir = true;
    }
    if (test)
        return FileKind::Test;
    if (doc_dir || ext == "md" || ext == "rst" || ext == "txt" || ext == "adoc")
        return FileKind::Doc;
    static constexpr std::array<std::string_view, 7> kConfigExt = {"json", "yaml", "yml", "toml", "ini", "cfg", "conf"};
    if (name.starts_with('.') || std::find(kConfigExt.begin(), kConfigExt.end(), ext) != kConfigExt.end())
        return FileKind::Config;
    return FileKind::Source;
}

double gini(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n == 0)
        return 0.0;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    if (total <= 0.0)
        return 0.0;
    // Sorted-order identity: sum_i sum_j |x_i - x_j| = 2 sum_i (2i - n + 1) x_(i), i 0-based.
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        weighted += (2.0 * static_cast<double>(i) - static_cast<double>(n) + 1.0) * sorted[i];
    double g = weighted / (static_cast<double>(n) * total);
    return std::clamp(g, 0.0, 1.0);
}

ChangeFeatures extract_change_features(const std::vector<FileChangeRecord>& files)
{
    ChangeFeatures out{};
    if (files.empty())
        return out;
    const double n = static_cast<double>(files.size());

    std::map<std::string, std::size_t> extensions;
    double tests = 0, configs = 0, docs = 0;
    double depth_sum = 0, depth_max = 0;
    std::array<double, 4> ops{};
    double additions = 0, deletions = 0;
    std::vector<double> changed;
    changed.reserve(files.size());

    for (const auto& f : files) {
        ++extensions[file_extension(f.path)];
        switch (classify_file(f.path)) {
        case FileKind::Test:
            ++tests;
            break;
        case FileKind::Doc:
            ++docs;
            break;
        case FileKind::Config:
            ++configs;
            break;
        case FileKind::Source:
            break;
        }
        double depth = static_cast<double>(directory_depth(f.path));
        depth_sum += depth;
        depth_max = std::max(depth_max, depth);
        ++ops[static_cast<std::size_t>(f.operation)];
        additions += static_cast<double>(f.additions);
        deletions += static_cast<double>(f.deletions);
        changed.push_back(static_cast<double>(f.additions + f.deletions));
    }

    double entropy = 0.0;
    for (const auto& [ext, count] : extensions) {
        double p = static_cast<double>(count) / n;
        entropy -= p * std::log(p);
    }

    out[0] = n;
    out[1] = static_cast<double>(extensions.size());
    out[2] = std::max(entropy, 0.0);
    out[3] = tests / n;
    out[4] = configs / n;
    out[5] = docs / n;
    out[6] = depth_sum / n;
    out[7] = depth_max;
    out[8] = ops[0] / n;
    out[9] = ops[1] / n;
    out[10] = ops[2] / n;
    out[11] = ops[3] / n;
    out[12] = additions;
    out[13] = deletions;
    out[14] = safe_div(additions, additions + deletions);
    out[15] = gini(changed);
    return out;
}

PatchFeatures extract_patch_features(const std::vector<FileChangeRecord>& files)
{
    PatchFeatures out{};
    std::vector<double> lengths;
    double removed = 0;
    double trailing = 0, indented = 0, tab_indented = 0, space_indented = 0, space_width = 0;
    double comments = 0, imports = 0, functions = 0, types = 0, conditionals = 0, loops = 0, blanks = 0;

    for (const auto& f : files) {
        if (!f.patch)
            continue;
        PatchShape shape = parse_patch(*f.patch);
        removed += static_cast<double>(shape.removed_lines.size());
        const SyntaxProfile& profile = profile_for_extension(file_extension(f.path));
        for (const auto& line : shape.added_lines) {
            lengths.push_back(static_cast<double>(utf8_length(line)));
            if (ends_with_line_whitespace(line))
                ++trailing;

            std::size_t lead = line.find_first_not_of(" \t");
            bool nonblank = lead != std::string::npos;
            if (nonblank && lead > 0) {
                ++indented;
                if (line.front() == '\t') {
                    ++tab_indented;
                } else {
                    ++space_indented;
                    space_width += static_cast<double>(line.find_first_not_of(' '));
                }
            }

            CodeTags tags = classify_code_line(line, profile);
            comments += tags.has(CodeTag::Comment);
            imports += tags.has(CodeTag::Import);
            functions += tags.has(CodeTag::FunctionDecl);
            types += tags.has(CodeTag::TypeDecl);
            conditionals += tags.has(CodeTag::Conditional);
            loops += tags.has(CodeTag::Loop);
            blanks += tags.has(CodeTag::Blank);
        }
    }

    const double added = static_cast<double>(lengths.size());
    Moments m = moments(lengths);
    out[0] = added;
    out[1] = removed;
    out[2] = m.mean;
    out[3] = m.max;
    out[4] = m.stddev;
    out[5] = safe_div(trailing, added);
    out[6] = safe_div(tab_indented, indented);
    out[7] = safe_div(space_width, space_indented);
    out[8] = safe_div(comments, added);
    out[9] = safe_div(imports, added);
    out[10] = functions;
    out[11] = types;
    out[12] = conditionals;
    out[13] = loops;
    out[14] = safe_div(blanks, added);
    return out;
}

TemporalFeatures extract_temporal_features(Timestamp created_at)
{
    using namespace std::chrono;
    sys_days day_point = floor<days>(created_at);
    auto hour = duration_cast<hours>(created_at - day_point).count();
    unsigned monday_based = (weekday{day_point}.c_encoding() + 6) % 7;
    bool weekend = monday_based >= 5;
    bool business = !weekend && hour >= 9 && hour < 17;
    return {
        static_cast<double>(hour),
        weekend ? 1.0 : 0.0,
        business ? 1.0 : 0.0,
        static_cast<double>(monday_based),
    };
}

std::vector<double> extract_features(const PullRequestRecord& record)
{
    std::vector<double> values;
    values.reserve(kFeatureCount);
    auto append = [&](const auto& block) { values.insert(values.end(), block.begin(), block.end()); };
    append(extract_commit_features(record.commits));
    append(extract_structure_features(record.title, record.body));
    append(extract_change_features(record.file_changes));
    append(extract_patch_features(record.file_changes));
    append(extract_temporal_features(record.created_at));
    return values;
}

// ---------------------------------------------------------------------------

FeatureMatrix::FeatureMatrix(std::vector<std::string> feature_names)
    : m_names(std::move(feature_names))
{
}

void FeatureMatrix::add_row(std::span<const double> values, Agent label, std::string pr_id)
{
    if (values.size() != m_names.size())
        throw std::invalid_argument("row width " + std::to_string(values.size()) + " does not match "
            + std::to_string(m_names.size()) + " features");
    m_values.insert(m_values.end(), values.begin(), values.end());
    m_labels.push_back(label);
    m_ids.push_back(std::move(pr_id));
}

std::vector<double> FeatureMatrix::column(std::size_t c) const
{
    std::vector<double> out(n_rows());
    for (std::size_t r = 0; r < n_rows(); ++r)
        out[r] = at(r, c);
    return out;
}

int FeatureMatrix::feature_index(std::string_view name) const
{
    for (std::size_t i = 0; i < m_names.size(); ++i) {
        if (m_names[i] == name)
            return static_cast<int>(i);
    }
    return -1;
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& names) const
{
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        int idx = feature_index(name);
        if (idx < 0)
            throw std::invalid_argument("unknown feature '" + name + "'");
        cols.push_back(static_cast<std::size_t>(idx));
    }
    FeatureMatrix out(names);
    out.m_values.reserve(n_rows() * cols.size());
    for (std::size_t r = 0; r < n_rows(); ++r) {
        for (std::size_t c : cols)
            out.m_values.push_back(at(r, c));
    }
    out.m_labels = m_labels;
    out.m_ids = m_ids;
    return out;
}

FeatureMatrix FeatureMatrix::rows_subset(std::span<const std::size_t> rows) const
{
    FeatureMatrix out(m_names);
    out.m_values.reserve(rows.size() * n_features());
    for (std::size_t r : rows) {
        auto values = row(r);
        out.m_values.insert(out.m_values.end(), values.begin(), values.end());
        out.m_labels.push_back(m_labels[r]);
        out.m_ids.push_back(m_ids[r]);
    }
    return out;
}

FeatureMatrix build_matrix(const std::vector<PullRequestRecord>& corpus)
{
    FeatureMatrix matrix(registry_names());
    for (const auto& record : corpus) {
        if (!record.agent)
            throw std::invalid_argument("record '" + record.id + "' has no agent label");
        matrix.add_row(extract_features(record), *record.agent, record.id);
    }
    return matrix;
}

std::string format_number(double value)
{
    if (value == 0.0)
        return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

namespace {

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// RFC 4180 record reader. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields)
{
    fields.clear();
    int ch = in.get();
    if (ch == EOF)
        return false;
    std::string field;
    bool quoted = false;
    while (true) {
        if (quoted) {
            if (ch == EOF)
                throw SchemaError("unterminated quoted CSV field");
            if (ch == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += static_cast<char>(ch);
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n' || ch == EOF) {
            fields.push_back(std::move(field));
            return true;
        } else if (ch == '\r') {
            if (in.peek() == '\n')
                in.get();
            fields.push_back(std::move(field));
            return true;
        } else {
            field += static_cast<char>(ch);
        }
        ch = in.get();
    }
}

} // namespace

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix)
{
    for (const auto& name : matrix.feature_names())
        out << csv_escape(name) << ',';
    out << "label,pr_id\n";
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        for (double v : matrix.row(r))
            out << format_number(v) << ',';
        out << agent_name(matrix.labels()[r]) << ',' << csv_escape(matrix.pr_ids()[r]) << '\n';
    }
}

FeatureMatrix read_matrix_csv(std::istream& in)
{
    std::vector<std::string> header;
    if (!read_csv_record(in, header))
        throw SchemaError("empty feature matrix file");
    if (header.size() < 2 || header[header.size() - 2] != "label" || header.back() != "pr_id")
        throw SchemaError("feature matrix header must end with 'label,pr_id'");
    std::vector<std::string> names(header.begin(), header.end() - 2);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty())
            throw SchemaError("empty feature name in header column " + std::to_string(i + 1));
        if (std::find(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(i), names[i]) != names.begin() + static_cast<std::ptrdiff_t>(i))
            throw SchemaError("duplicate feature name '" + names[i] + "'");
    }

    FeatureMatrix matrix(names);
    std::vector<std::string> fields;
    std::vector<double> values(names.size());
    std::size_t line = 1;
    while (read_csv_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty())
            continue;
        if (fields.size() != header.size())
            throw SchemaError("row " + std::to_string(line) + " has " + std::to_string(fields.size())
                + " fields, expected " + std::to_string(header.size()));
        for (std::size_t c = 0; c < names.size(); ++c) {
            const std::string& f = fields[c];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
                throw SchemaError("row " + std::to_string(line) + ": invalid number '" + f + "' for " + names[c]);
            values[c] = v;
        }
        auto label = parse_agent(fields[names.size()]);
        if (!label)
            throw SchemaError("row " + std::to_string(line) + ": unknown label '" + fields[names.size()] + "'");
        matrix.add_row(values, *label, fields.back());
    }
    return matrix;
}

} // namespace agentprint
