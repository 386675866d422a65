#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace agentprint {

// Closed set of agents. Enumerator order is the registry order used for
// class indices everywhere (softmax slots, confusion matrices, reports).
enum class Agent : std::uint8_t {
    OpenAICodex,
    Copilot,
    Devin,
    Cursor,
    ClaudeCode,
};

inline constexpr std::size_t kAgentCount = 5;
inline constexpr std::array<Agent, kAgentCount> kAllAgents = {
    Agent::OpenAICodex, Agent::Copilot, Agent::Devin, Agent::Cursor, Agent::ClaudeCode,
};

constexpr std::size_t agent_index(Agent a) { return static_cast<std::size_t>(a); }

std::string_view agent_name(Agent a);

/// Case-insensitive match against the canonical names. Spaces, underscores
/// and hyphens are ignored, so "OpenAI_Codex" and "claude code" resolve too.
std::optional<Agent> parse_agent(std::string_view text);

using Timestamp = std::chrono::sys_seconds;

/// RFC 3339 date-time ("2025-01-06T10:00:00Z", offsets and fractional
/// seconds accepted). Fractional seconds are truncated.
std::optional<Timestamp> parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp t);

struct CommitRecord {
    std::string message;
    std::string author_name;

    bool operator==(const CommitRecord&) const = default;
};

enum class FileOperation : std::uint8_t { Added, Modified, Removed, Renamed };

std::string_view operation_name(FileOperation op);
std::optional<FileOperation> parse_operation(std::string_view text);

struct FileChangeRecord {
    std::string path;
    FileOperation operation = FileOperation::Modified;
    std::int64_t additions = 0;
    std::int64_t deletions = 0;
    std::optional<std::string> patch;

    bool operator==(const FileChangeRecord&) const = default;
};

struct PullRequestRecord {
    std::string id;
    std::optional<Agent> agent;  // absent only for unlabeled prediction input
    std::string title;
    std::string body;
    Timestamp created_at{};
    std::vector<CommitRecord> commits;
    std::vector<FileChangeRecord> file_changes;

    bool operator==(const PullRequestRecord&) const = default;
};

struct IngestStats {
    std::size_t loaded = 0;
    std::size_t skipped_incomplete = 0;
    std::size_t skipped_malformed = 0;

    bool operator==(const IngestStats&) const = default;
};

struct LoadedCorpus {
    std::vector<PullRequestRecord> records;
    IngestStats stats;
};

/// Raised for unreadable input, and in strict mode for the first malformed
/// line. `line()` is 1-based, 0 when the failure is not tied to a line.
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& what, std::size_t line)
        : std::runtime_error(what)
        , m_line(line)
    {
    }

    std::size_t line() const { return m_line; }

private:
    std::size_t m_line;
};

enum class LabelPolicy { Required, Optional };

struct LoadOptions {
    bool strict = false;
    LabelPolicy labels = LabelPolicy::Required;
};

LoadedCorpus load_corpus(const std::filesystem::path& path, bool strict);
LoadedCorpus load_corpus(const std::filesystem::path& path, const LoadOptions& options);
LoadedCorpus load_corpus(std::istream& in, const LoadOptions& options);

/// Outcome of decoding one NDJSON object.
enum class RecordStatus { Ok, Incomplete, Malformed };

struct DecodeResult {
    RecordStatus status = RecordStatus::Malformed;
    PullRequestRecord record;
    std::string error;
};

DecodeResult decode_record(const nlohmann::json& object, LabelPolicy labels);
nlohmann::json encode_record(const PullRequestRecord& record);

/// True when every line of a patch starts with a hunk-content prefix
/// (' ', '+', '-', '\\', '@') or is empty.
bool patch_lines_valid(std::string_view patch);

using ClassCounts = std::array<std::size_t, kAgentCount>;

ClassCounts class_counts(const std::vector<PullRequestRecord>& corpus);

} // namespace agentprint
