#include <agentprint/corpus.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace agentprint {

namespace {

constexpr std::array<std::string_view, kAgentCount> kAgentNames = {
    "OpenAICodex", "Copilot", "Devin", "Cursor", "ClaudeCode",
};

std::string fold_name(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == ' ' || c == '_' || c == '-')
            continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out)
{
    if (pos + count > text.size())
        return false;
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        char c = text[i];
        if (c < '0' || c > '9')
            return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

} // namespace

std::string_view agent_name(Agent a)
{
    return kAgentNames[agent_index(a)];
}

std::optional<Agent> parse_agent(std::string_view text)
{
    std::string folded = fold_name(text);
    for (Agent a : kAllAgents) {
        if (folded == fold_name(agent_name(a)))
            return a;
    }
    return std::nullopt;
}

std::optional<Timestamp> parse_rfc3339(std::string_view text)
{
    using namespace std::chrono;

    // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
    int y, mo, d, h, mi, s;
    if (!read_digits(text, 0, 4, y) || text.size() < 20 || text[4] != '-'
        || !read_digits(text, 5, 2, mo) || text[7] != '-' || !read_digits(text, 8, 2, d))
        return std::nullopt;
    char sep = text[10];
    if (sep != 'T' && sep != 't' && sep != ' ')
        return std::nullopt;
    if (!read_digits(text, 11, 2, h) || text[13] != ':' || !read_digits(text, 14, 2, mi)
        || text[16] != ':' || !read_digits(text, 17, 2, s))
        return std::nullopt;

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9')
            ++pos;
        if (pos == start)
            return std::nullopt;
    }
    if (pos >= text.size())
        return std::nullopt;

    int offset_minutes = 0;
    char zone = text[pos];
    if (zone == 'Z' || zone == 'z') {
        ++pos;
    } else if (zone == '+' || zone == '-') {
        int oh, om;
        if (!read_digits(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':'
            || !read_digits(text, pos + 4, 2, om))
            return std::nullopt;
        if (oh > 23 || om > 59)
            return std::nullopt;
        offset_minutes = (oh * 60 + om) * (zone == '+' ? 1 : -1);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != text.size())
        return std::nullopt;

    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60)
        return std::nullopt;

    sys_seconds t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
    return t - minutes{offset_minutes};
}

std::string format_rfc3339(Timestamp t)
{
    using namespace std::chrono;
    sys_days day_point = floor<days>(t);
    year_month_day ymd{day_point};
    hh_mm_ss<seconds> tod{t - day_point};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
        static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
        static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
        static_cast<long>(tod.minutes().count()), static_cast<long>(tod.seconds().count()));
    return buf;
}

std::string_view operation_name(FileOperation op)
{
    switch (op) {
    case FileOperation::Added:
        return "added";
    case FileOperation::Modified:
        return "modified";
    case FileOperation::Removed:
        return "removed";
    case FileOperation::Renamed:
        return "renamed";
    }
    return "modified";
}

std::optional<FileOperation> parse_operation(std::string_view text)
{
    std::string folded = fold_name(text);
    if (folded == "added")
        return FileOperation::Added;
    if (folded == "modified")
        return FileOperation::Modified;
    if (folded == "removed")
        return FileOperation::Removed;
    if (folded == "renamed")
        return FileOperation::Renamed;
    return std::nullopt;
}

bool patch_lines_valid(std::string_view patch)
{
    std::size_t start = 0;
    while (start < patch.size()) {
        std::size_t end = patch.find('\n', start);
        if (end == std::string_view::npos)
            end = patch.size();
        std::string_view line = patch.substr(start, end - start);
        if (!line.empty() && line != "\r") {
            char c = line.front();
            if (c != ' ' && c != '+' && c != '-' && c != '\\' && c != '@')
                return false;
        }
        start = end + 1;
    }
    return true;
}

namespace {

using nlohmann::json;

const json* member(const json& object, const char* key)
{
    auto it = object.find(key);
    if (it == object.end())
        return nullptr;
    return &*it;
}

bool get_string(const json& object, const char* key, std::string& out, std::string& error, bool nullable)
{
    const json* value = member(object, key);
    if (value == nullptr || value->is_null()) {
        if (nullable) {
            out.clear();
            return true;
        }
        error = std::string("missing field '") + key + "'";
        return false;
    }
    if (!value->is_string()) {
        error = std::string("field '") + key + "' is not a string";
        return false;
    }
    out = value->get<std::string>();
    return true;
}

bool get_count(const json& object, const char* key, std::int64_t& out, std::string& error)
{
    const json* value = member(object, key);
    if (value == nullptr || !value->is_number_integer()) {
        error = std::string("field '") + key + "' must be an integer";
        return false;
    }
    out = value->get<std::int64_t>();
    if (out < 0) {
        error = std::string("field '") + key + "' is negative";
        return false;
    }
    return true;
}

} // namespace

DecodeResult decode_record(const json& object, LabelPolicy labels)
{
    DecodeResult result;
    PullRequestRecord& rec = result.record;
    std::string& err = result.error;

    auto malformed = [&](std::string message) {
        result.status = RecordStatus::Malformed;
        result.error = std::move(message);
        return result;
    };

    if (!object.is_object())
        return malformed("record is not a JSON object");

    if (!get_string(object, "id", rec.id, err, false))
        return malformed(err);
    if (rec.id.empty())
        return malformed("empty 'id'");

    const json* agent = member(object, "agent");
    if (agent == nullptr || agent->is_null()) {
        if (labels == LabelPolicy::Required)
            return malformed("missing field 'agent'");
    } else {
        if (!agent->is_string())
            return malformed("field 'agent' is not a string");
        rec.agent = parse_agent(agent->get<std::string>());
        if (!rec.agent)
            return malformed("unknown agent label '" + agent->get<std::string>() + "'");
    }

    if (!get_string(object, "title", rec.title, err, false))
        return malformed(err);
    if (!get_string(object, "body", rec.body, err, true))
        return malformed(err);

    std::string created;
    if (!get_string(object, "created_at", created, err, false))
        return malformed(err);
    auto ts = parse_rfc3339(created);
    if (!ts)
        return malformed("'created_at' is not RFC 3339: " + created);
    rec.created_at = *ts;

    const json* files = member(object, "files");
    if (files != nullptr && !files->is_null()) {
        if (!files->is_array())
            return malformed("'files' is not an array");
        for (const json& f : *files) {
            if (!f.is_object())
                return malformed("file entry is not an object");
            FileChangeRecord fc;
            if (!get_string(f, "path", fc.path, err, false))
                return malformed(err);
            if (fc.path.empty())
                return malformed("empty file path");
            std::string op;
            if (!get_string(f, "op", op, err, false))
                return malformed(err);
            auto parsed_op = parse_operation(op);
            if (!parsed_op)
                return malformed("unknown file operation '" + op + "'");
            fc.operation = *parsed_op;
            if (!get_count(f, "additions", fc.additions, err) || !get_count(f, "deletions", fc.deletions, err))
                return malformed(err);
            const json* patch = member(f, "patch");
            if (patch != nullptr && !patch->is_null()) {
                if (!patch->is_string())
                    return malformed("'patch' is not a string");
                fc.patch = patch->get<std::string>();
                if (!patch_lines_valid(*fc.patch))
                    return malformed("patch for '" + fc.path + "' contains non-hunk lines");
            }
            rec.file_changes.push_back(std::move(fc));
        }
    }

    // Commits last: a structurally broken record is malformed even when it
    // is also incomplete.
    const json* commits = member(object, "commits");
    bool incomplete = false;
    if (commits == nullptr || commits->is_null()) {
        incomplete = true;
    } else {
        if (!commits->is_array())
            return malformed("'commits' is not an array");
        if (commits->empty())
            incomplete = true;
        for (const json& c : *commits) {
            if (!c.is_object())
                return malformed("commit entry is not an object");
            const json* message = member(c, "message");
            if (message == nullptr || message->is_null()) {
                incomplete = true;
                continue;
            }
            if (!message->is_string())
                return malformed("commit 'message' is not a string");
            CommitRecord cr;
            cr.message = message->get<std::string>();
            if (!get_string(c, "author", cr.author_name, err, true))
                return malformed(err);
            rec.commits.push_back(std::move(cr));
        }
    }

    result.status = incomplete ? RecordStatus::Incomplete : RecordStatus::Ok;
    return result;
}

json encode_record(const PullRequestRecord& record)
{
    json out = json::object();
    out["id"] = record.id;
    out["agent"] = record.agent ? json(std::string(agent_name(*record.agent))) : json(nullptr);
    out["title"] = record.title;
    out["body"] = record.body;
    out["created_at"] = format_rfc3339(record.created_at);
    json commits = json::array();
    for (const auto& c : record.commits)
        commits.push_back({{"message", c.message}, {"author", c.author_name}});
    out["commits"] = std::move(commits);
    json files = json::array();
    for (const auto& f : record.file_changes) {
        files.push_back({
            {"path", f.path},
            {"op", std::string(operation_name(f.operation))},
            {"additions", f.additions},
            {"deletions", f.deletions},
            {"patch", f.patch ? json(*f.patch) : json(nullptr)},
        });
    }
    out["files"] = std::move(files);
    return out;
}

LoadedCorpus load_corpus(std::istream& in, const LoadOptions& options)
{
    LoadedCorpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
            continue;

        DecodeResult decoded;
        json object = json::parse(line, nullptr, false);
        if (object.is_discarded()) {
            decoded.status = RecordStatus::Malformed;
            decoded.error = "invalid JSON";
        } else {
            decoded = decode_record(object, options.labels);
        }

        switch (decoded.status) {
        case RecordStatus::Ok:
            corpus.records.push_back(std::move(decoded.record));
            ++corpus.stats.loaded;
            break;
        case RecordStatus::Incomplete:
            ++corpus.stats.skipped_incomplete;
            break;
        case RecordStatus::Malformed:
            if (options.strict)
                throw IngestError("line " + std::to_string(line_no) + ": " + decoded.error, line_no);
            ++corpus.stats.skipped_malformed;
            break;
        }
    }
    if (in.bad())
        throw IngestError("read error after line " + std::to_string(line_no), 0);
    return corpus;
}

LoadedCorpus load_corpus(const std::filesystem::path& path, const LoadOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IngestError("cannot open corpus file: " + path.string(), 0);
    return load_corpus(in, options);
}

LoadedCorpus load_corpus(const std::filesystem::path& path, bool strict)
{
    return load_corpus(path, LoadOptions{strict, LabelPolicy::Required});
}

ClassCounts class_counts(const std::vector<PullRequestRecord>& corpus)
{
    ClassCounts counts{};
    for (const auto& r : corpus) {
        if (r.agent)
            ++counts[agent_index(*r.agent)];
    }
    return counts;
}

} // namespace agentprint
