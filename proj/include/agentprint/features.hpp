#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <agentprint/corpus.hpp>

namespace agentprint {

enum class FeatureCategory { Commit, PRStructure, CodeChanges, PatchLevel, Temporal };

std::string_view category_name(FeatureCategory c);

struct FeatureInfo {
    std::string_view name;
    FeatureCategory category;
    std::string_view description;
    std::string_view unit;
    bool is_ratio; // value always in [0, 1]
};

inline constexpr std::size_t kCommitFeatureCount = 9;
inline constexpr std::size_t kStructureFeatureCount = 9;
inline constexpr std::size_t kChangeFeatureCount = 16;
inline constexpr std::size_t kPatchFeatureCount = 15;
inline constexpr std::size_t kTemporalFeatureCount = 4;
inline constexpr std::size_t kFeatureCount = 53;

/// The frozen, ordered feature registry.
std::span<const FeatureInfo> feature_registry();

/// Index in the registry, or -1.
int registry_index(std::string_view name);

std::vector<std::string> registry_names();

nlohmann::json registry_to_json();

using CommitFeatures = std::array<double, kCommitFeatureCount>;
using StructureFeatures = std::array<double, kStructureFeatureCount>;
using ChangeFeatures = std::array<double, kChangeFeatureCount>;
using PatchFeatures = std::array<double, kPatchFeatureCount>;
using TemporalFeatures = std::array<double, kTemporalFeatureCount>;

CommitFeatures extract_commit_features(const std::vector<CommitRecord>& commits);
StructureFeatures extract_structure_features(std::string_view title, std::string_view body);
ChangeFeatures extract_change_features(const std::vector<FileChangeRecord>& files);
PatchFeatures extract_patch_features(const std::vector<FileChangeRecord>& files);
TemporalFeatures extract_temporal_features(Timestamp created_at);

/// All 53 values in registry order.
std::vector<double> extract_features(const PullRequestRecord& record);

/// Gini coefficient  sum_i sum_j |x_i - x_j| / (2 n sum x); 0 for empty or
/// all-zero input.
double gini(std::span<const double> values);

enum class FileKind { Source, Test, Doc, Config };

/// Test > doc > config precedence; everything else is Source.
FileKind classify_file(std::string_view path);

/// Lower-cased text after the last '.' of the file name; "" for no
/// extension or a bare dotfile.
std::string file_extension(std::string_view path);

/// Number of directory components in a relative path.
std::size_t directory_depth(std::string_view path);

/// Rows = PRs, columns = named features. Values are stored row-major.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::vector<std::string> feature_names);

    void add_row(std::span<const double> values, Agent label, std::string pr_id);

    std::size_t n_rows() const { return m_labels.size(); }
    std::size_t n_features() const { return m_names.size(); }

    const std::vector<std::string>& feature_names() const { return m_names; }
    const std::vector<Agent>& labels() const { return m_labels; }
    const std::vector<std::string>& pr_ids() const { return m_ids; }

    double at(std::size_t row, std::size_t col) const { return m_values[row * m_names.size() + col]; }
    std::span<const double> row(std::size_t r) const
    {
        return {m_values.data() + r * m_names.size(), m_names.size()};
    }
    std::vector<double> column(std::size_t c) const;

    /// Column index by name, or -1.
    int feature_index(std::string_view name) const;

    /// Column subset in the given order. Throws std::invalid_argument for
    /// unknown names.
    FeatureMatrix select(const std::vector<std::string>& names) const;

    /// Row subset in the given order.
    FeatureMatrix rows_subset(std::span<const std::size_t> rows) const;

    bool operator==(const FeatureMatrix&) const = default;

private:
    std::vector<std::string> m_names;
    std::vector<double> m_values;
    std::vector<Agent> m_labels;
    std::vector<std::string> m_ids;
};

/// One row per record in corpus order. Throws std::invalid_argument for an
/// unlabeled record.
FeatureMatrix build_matrix(const std::vector<PullRequestRecord>& corpus);

/// Header = feature names, `label`, `pr_id`; values with 12 significant
/// digits.
void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix);

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inverse of write_matrix_csv. Throws SchemaError when the header lacks
/// `label`/`pr_id`, a row has the wrong width, a value is not a finite
/// number or a label is unknown.
FeatureMatrix read_matrix_csv(std::istream& in);

std::string format_number(double value);

} // namespace agentprint
