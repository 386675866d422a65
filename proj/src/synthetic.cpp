#include <agentprint/synthetic.hpp>

#include <chrono>
#include <random>
#include <string_view>

namespace agentprint {

namespace {

constexpr std::array<std::string_view, 32> kWords = {
    "parser", "config", "handler", "cache", "request", "client", "token", "buffer",
    "schema", "router", "worker", "queue", "session", "index", "layout", "module",
    "retry", "timeout", "logging", "metrics", "widget", "record", "stream", "filter",
    "export", "import", "driver", "result", "payload", "header", "loader", "report",
};
constexpr std::array<std::string_view, 6> kVerbs = {"update", "add", "change", "improve", "remove", "adjust"};
constexpr std::array<std::string_view, 6> kTypes = {"feat", "fix", "refactor", "docs", "test", "chore"};
constexpr std::array<std::string_view, 5> kDirs = {"src", "lib", "pkg/core", "app/util", "internal/service"};

struct Lang {
    std::string_view ext;
    std::string_view comment;
    std::array<std::string_view, 8> code;
};

constexpr std::array<Lang, 3> kLangs = {{
    {"py", "#", {"value = compute(item, limit)", "return result", "if count > limit:", "for item in items:",
                    "def handle(request):", "result.append(value)", "total += item.size", "self.cache = {}"}},
    {"js", "//", {"const value = compute(item, limit);", "return result;", "if (count > limit) {", "for (const item of items) {",
                    "function handle(request) {", "result.push(value);", "total += item.size;", "}"}},
    {"go", "//", {"value := compute(item, limit)", "return result", "if count > limit {", "for _, item := range items {",
                    "func handle(req Request) error {", "result = append(result, value)", "total += item.Size", "}"}},
}};

// Portable helpers: std::uniform_*_distribution output differs between
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : m_engine(seed)
    {
    }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(m_engine() % n); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    double unit() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }

    template <typename T, std::size_t N>
    const T& pick(const std::array<T, N>& items) { return items[below(N)]; }

private:
    std::mt19937_64 m_engine;
};

std::string words(Rng& rng, std::size_t n)
{
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
            out += ' ';
        out += rng.pick(kWords);
    }
    return out;
}

CommitRecord make_commit(Rng& rng, Agent agent)
{
    const double multiline = agent == Agent::OpenAICodex ? 0.92 : 0.04;
    const double conventional = agent == Agent::Devin ? 0.92 : 0.04;
    std::string subject = rng.chance(conventional)
        ? std::string(rng.pick(kTypes)) + ": " + words(rng, rng.between(3, 6))
        : std::string(rng.pick(kVerbs)) + " " + words(rng, rng.between(3, 6));
    std::string detail = words(rng, rng.between(5, 12));
    CommitRecord c;
    c.message = subject + (rng.chance(multiline) ? "\n\n" : " ") + detail;
    c.author_name = std::string(agent_name(agent)) + " bot";
    return c;
}

std::string make_body(Rng& rng, Agent agent)
{
    const bool bullets = rng.chance(agent == Agent::Cursor ? 0.92 : 0.04);
    std::string body = "This change touches the " + words(rng, 2) + ".\n\n";
    const std::size_t items = rng.between(2, 7);
    for (std::size_t i = 0; i < items; ++i) {
        std::string item = words(rng, rng.between(4, 10));
        body += bullets ? "- " + item + "\n" : item + ".\n";
    }
    if (rng.chance(0.3))
        body += "\nSee https://example.com/" + std::string(rng.pick(kWords)) + " for context.\n";
    if (rng.chance(0.2))
        body += "\n```\nmake test\n```\n";
    return body;
}

std::string make_patch(Rng& rng, Agent agent, const Lang& lang, std::int64_t additions, std::int64_t deletions)
{
    const double comment_rate = agent == Agent::ClaudeCode ? 0.45 : 0.04;
    std::string patch = "@@ -1," + std::to_string(deletions + 1) + " +1," + std::to_string(additions + 1) + " @@\n";
    patch += " " + std::string(lang.code[0]) + "\n";
    for (std::int64_t i = 0; i < deletions; ++i)
        patch += "-    " + std::string(rng.pick(lang.code)) + "\n";
    for (std::int64_t i = 0; i < additions; ++i) {
        if (rng.chance(comment_rate))
            patch += "+    " + std::string(lang.comment) + " handle the " + words(rng, 2) + "\n";
        else
            patch += "+    " + std::string(rng.pick(lang.code)) + "\n";
    }
    return patch;
}

std::vector<FileChangeRecord> make_files(Rng& rng, Agent agent)
{
    const std::size_t n = rng.between(2, 6);
    const bool concentrated = rng.chance(agent == Agent::Copilot ? 0.92 : 0.04);
    const std::size_t heavy = rng.below(n);
    const Lang& lang = rng.pick(kLangs);
    std::vector<FileChangeRecord> files;
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t changed = concentrated
            ? (i == heavy ? static_cast<std::int64_t>(rng.between(25, 60)) : static_cast<std::int64_t>(rng.between(1, 2)))
            : static_cast<std::int64_t>(rng.between(5, 14));
        std::int64_t deletions = static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(changed) / 3 + 1));
        FileChangeRecord f;
        f.path = std::string(rng.pick(kDirs)) + "/" + std::string(rng.pick(kWords)) + "_" + std::to_string(i) + "." + std::string(lang.ext);
        f.operation = rng.chance(0.15) ? FileOperation::Added : FileOperation::Modified;
        if (f.operation == FileOperation::Added)
            deletions = 0;
        f.additions = changed - deletions;
        f.deletions = deletions;
        f.patch = make_patch(rng, agent, lang, f.additions, f.deletions);
        files.push_back(std::move(f));
    }
    return files;
}

} // namespace

const std::map<Agent, std::string>& synthetic_signatures()
{
    static const std::map<Agent, std::string> signatures = {
        {Agent::OpenAICodex, "commit_multiline_ratio"},
        {Agent::Copilot, "change_gini"},
        {Agent::Devin, "commit_conventional_ratio"},
        {Agent::Cursor, "body_bullet_count"},
        {Agent::ClaudeCode, "comment_density"},
    };
    return signatures;
}

std::vector<PullRequestRecord> generate_synthetic_corpus(const SyntheticConfig& config)
{
    using namespace std::chrono;
    Rng rng(config.seed);
    const sys_seconds epoch = sys_days{year{2025} / January / 1};

    std::vector<PullRequestRecord> out;
    for (Agent agent : kAllAgents) {
        for (std::size_t i = 0; i < config.counts[agent_index(agent)]; ++i) {
            PullRequestRecord pr;
            pr.id = "synth-" + std::string(agent_name(agent)) + "-" + std::to_string(i);
            pr.agent = agent;
            pr.title = std::string(rng.pick(kVerbs)) + " " + words(rng, rng.between(3, 8));
            if (rng.chance(0.1))
                pr.title = std::string(rng.pick(kTypes)) + ": " + pr.title;
            pr.body = make_body(rng, agent);
            pr.created_at = epoch + seconds{static_cast<std::int64_t>(rng.below(180 * 86400))};
            const std::size_t commits = rng.between(1, 4);
            for (std::size_t c = 0; c < commits; ++c)
                pr.commits.push_back(make_commit(rng, agent));
            pr.file_changes = make_files(rng, agent);
            out.push_back(std::move(pr));
        }
    }
    // Interleave agents so the file is not sorted by label.
    for (std::size_t i = out.size(); i > 1; --i)
        std::swap(out[i - 1], out[rng.below(i)]);
    return out;
}

} // namespace agentprint
