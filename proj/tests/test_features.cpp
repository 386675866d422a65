#include <agentprint/features.hpp>
#include <agentprint/synthetic.hpp>

#include <doctest.h>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace agentprint;

namespace {

double value(const std::vector<double>& v, std::string_view name)
{
    int idx = registry_index(name);
    REQUIRE(idx >= 0);
    return v[static_cast<std::size_t>(idx)];
}

template <std::size_t N>
double block_value(const std::array<double, N>& block, std::size_t offset, std::string_view name)
{
    int idx = registry_index(name);
    REQUIRE(idx >= static_cast<int>(offset));
    return block[static_cast<std::size_t>(idx) - offset];
}

constexpr std::size_t kChangeOffset = kCommitFeatureCount + kStructureFeatureCount;
constexpr std::size_t kPatchOffset = kChangeOffset + kChangeFeatureCount;

CommitRecord commit(std::string msg)
{
    return {std::move(msg), "a"};
}

FileChangeRecord file(std::string path, std::int64_t add, std::int64_t del, FileOperation op = FileOperation::Modified)
{
    FileChangeRecord f;
    f.path = std::move(path);
    f.additions = add;
    f.deletions = del;
    f.operation = op;
    return f;
}

FileChangeRecord patched(std::string path, std::string patch)
{
    FileChangeRecord f = file(std::move(path), 1, 0);
    f.patch = std::move(patch);
    return f;
}

} // namespace

TEST_CASE("registry shape")
{
    auto reg = feature_registry();
    CHECK(reg.size() == kFeatureCount);
    std::array<std::size_t, 5> per{};
    std::set<std::string_view> names;
    for (const auto& f : reg) {
        ++per[static_cast<std::size_t>(f.category)];
        names.insert(f.name);
        CHECK_FALSE(f.description.empty());
    }
    CHECK(per == std::array<std::size_t, 5>{9, 9, 16, 15, 4});
    CHECK(names.size() == kFeatureCount);
    CHECK(registry_index("commit_multiline_ratio") >= 0);
    CHECK(registry_index("nope") == -1);
    CHECK(registry_to_json().at("features").size() == kFeatureCount);
}

TEST_CASE("commit features")
{
    auto a = extract_commit_features({commit("feat: a")});
    CHECK(block_value(a, 0, "commit_count") == 1.0);
    CHECK(block_value(a, 0, "commit_conventional_ratio") == 1.0);
    CHECK(block_value(a, 0, "commit_multiline_ratio") == 0.0);

    auto b = extract_commit_features({commit("a\n\nb"), commit("c")});
    CHECK(block_value(b, 0, "commit_multiline_ratio") == 0.5);

    auto c = extract_commit_features({commit("Fix"), commit("fix: x")});
    CHECK(block_value(c, 0, "commit_capitalized_ratio") == 0.5);
    CHECK(block_value(c, 0, "commit_conventional_ratio") == 0.5);
    CHECK(block_value(c, 0, "commit_msg_len_avg") == 4.5);
    CHECK(block_value(c, 0, "commit_msg_len_min") == 3.0);
    CHECK(block_value(c, 0, "commit_msg_len_max") == 6.0);
    CHECK(block_value(c, 0, "commit_msg_len_std") == doctest::Approx(1.5)); // population std
    CHECK(block_value(c, 0, "commit_msg_word_count_avg") == 1.5);
}

TEST_CASE("structure features")
{
    auto a = extract_structure_features("fix: typo", "");
    CHECK(block_value(a, kCommitFeatureCount, "title_is_conventional") == 1.0);
    CHECK(block_value(a, kCommitFeatureCount, "body_length") == 0.0);
    CHECK(block_value(a, kCommitFeatureCount, "title_length") == 9.0);
    CHECK(block_value(a, kCommitFeatureCount, "title_word_count") == 2.0);

    auto b = extract_structure_features("t", "- one\n- two\n- three\nsee https://example.com");
    CHECK(block_value(b, kCommitFeatureCount, "body_bullet_count") == 3.0);
    CHECK(block_value(b, kCommitFeatureCount, "body_link_count") == 1.0);

    auto c = extract_structure_features("t", "word word");
    CHECK(block_value(c, kCommitFeatureCount, "body_word_count") == 2.0);
    CHECK(block_value(c, kCommitFeatureCount, "body_length") == 9.0);
}

TEST_CASE("change features")
{
    auto even = extract_change_features({file("a.py", 10, 0), file("b.py", 5, 5), file("c.py", 0, 10), file("d.py", 10, 0)});
    CHECK(block_value(even, kChangeOffset, "change_gini") == 0.0);

    auto skewed = extract_change_features({file("a.py", 100, 0), file("b.py", 0, 0), file("c.py", 0, 0), file("d.py", 0, 0)});
    CHECK(block_value(skewed, kChangeOffset, "change_gini") == doctest::Approx(0.75).epsilon(1e-15));

    auto tests = extract_change_features({file("src/a.py", 1, 0), file("tests/test_a.py", 1, 0)});
    CHECK(block_value(tests, kChangeOffset, "test_file_ratio") == 0.5);

    auto empty = extract_change_features({});
    for (double v : empty)
        CHECK(v == 0.0);

    auto mixed = extract_change_features({
        file("docs/guide.md", 4, 0, FileOperation::Added),
        file("config.yaml", 1, 1),
        file("src/deep/er/x.go", 3, 0, FileOperation::Removed),
        file("x.go", 0, 2, FileOperation::Renamed),
    });
    CHECK(block_value(mixed, kChangeOffset, "files_changed") == 4.0);
    CHECK(block_value(mixed, kChangeOffset, "distinct_extension_count") == 3.0);
    CHECK(block_value(mixed, kChangeOffset, "extension_entropy")
        == doctest::Approx(-(0.25 * std::log(0.25) * 2 + 0.5 * std::log(0.5))));
    CHECK(block_value(mixed, kChangeOffset, "doc_file_ratio") == 0.25);
    CHECK(block_value(mixed, kChangeOffset, "config_file_ratio") == 0.25);
    CHECK(block_value(mixed, kChangeOffset, "max_dir_depth") == 3.0);
    CHECK(block_value(mixed, kChangeOffset, "avg_dir_depth") == 1.0);
    CHECK(block_value(mixed, kChangeOffset, "op_added_ratio") == 0.25);
    CHECK(block_value(mixed, kChangeOffset, "op_removed_ratio") == 0.25);
    CHECK(block_value(mixed, kChangeOffset, "op_renamed_ratio") == 0.25);
    CHECK(block_value(mixed, kChangeOffset, "op_modified_ratio") == 0.25);
    CHECK(block_value(mixed, kChangeOffset, "total_additions") == 8.0);
    CHECK(block_value(mixed, kChangeOffset, "total_deletions") == 3.0);
    CHECK(block_value(mixed, kChangeOffset, "addition_deletion_ratio") == doctest::Approx(8.0 / 11.0));
}

TEST_CASE("file classification")
{
    CHECK(classify_file("tests/util.py") == FileKind::Test);
    CHECK(classify_file("src/foo_test.go") == FileKind::Test);
    CHECK(classify_file("web/app.spec.ts") == FileKind::Test);
    CHECK(classify_file("tests/guide.md") == FileKind::Test); // test wins over doc
    CHECK(classify_file("README.md") == FileKind::Doc);
    CHECK(classify_file("docs/conf.py") == FileKind::Doc);
    CHECK(classify_file(".gitignore") == FileKind::Config);
    CHECK(classify_file("pyproject.toml") == FileKind::Config);
    CHECK(classify_file("src/main.rs") == FileKind::Source);
    CHECK(file_extension("a/b.TAR.GZ") == "gz");
    CHECK(file_extension(".bashrc") == "");
    CHECK(file_extension("Makefile") == "");
    CHECK(directory_depth("a.py") == 0);
    CHECK(directory_depth("a/b/c.py") == 2);
}

TEST_CASE("patch features")
{
    auto none = extract_patch_features({file("a.py", 3, 1)});
    for (double v : none)
        CHECK(v == 0.0);

    auto comments = extract_patch_features({patched("a.py", "@@ -0,0 +1,2 @@\n+# a\n+x = 1")});
    CHECK(block_value(comments, kPatchOffset, "comment_density") == 0.5);
    CHECK(block_value(comments, kPatchOffset, "added_line_count") == 2.0);

    auto flow = extract_patch_features({patched("a.py", "@@ -0,0 +1,3 @@\n+if a:\n+  b()\n+for i in r:")});
    CHECK(block_value(flow, kPatchOffset, "conditional_count") == 1.0);
    CHECK(block_value(flow, kPatchOffset, "loop_count") == 1.0);
    CHECK(block_value(flow, kPatchOffset, "avg_indent_width") == 2.0);
    CHECK(block_value(flow, kPatchOffset, "tab_indent_ratio") == 0.0);

    auto style = extract_patch_features({patched("a.go", "@@ -1,2 +1,3 @@\n-old\n+\tx := 1 \n+\n+import \"os\"")});
    CHECK(block_value(style, kPatchOffset, "removed_line_count") == 1.0);
    CHECK(block_value(style, kPatchOffset, "trailing_whitespace_ratio") == doctest::Approx(1.0 / 3.0));
    CHECK(block_value(style, kPatchOffset, "tab_indent_ratio") == 1.0);
    CHECK(block_value(style, kPatchOffset, "blank_line_ratio") == doctest::Approx(1.0 / 3.0));
    CHECK(block_value(style, kPatchOffset, "import_density") == doctest::Approx(1.0 / 3.0));
    CHECK(block_value(style, kPatchOffset, "added_line_len_max") == 11.0);
}

TEST_CASE("temporal features")
{
    auto sat = extract_temporal_features(*parse_rfc3339("2025-01-04T10:00:00Z"));
    CHECK(sat[1] == 1.0);
    CHECK(sat[2] == 0.0);
    CHECK(sat[3] == 5.0);
    auto mon = extract_temporal_features(*parse_rfc3339("2025-01-06T10:00:00Z"));
    CHECK(mon[2] == 1.0);
    CHECK(mon[3] == 0.0);
    auto midnight = extract_temporal_features(*parse_rfc3339("2025-01-06T00:00:00Z"));
    CHECK(midnight[0] == 0.0);
    auto late = extract_temporal_features(*parse_rfc3339("2025-01-06T17:00:00Z"));
    CHECK(late[2] == 0.0);
    auto edge = extract_temporal_features(*parse_rfc3339("2025-01-06T16:59:59Z"));
    CHECK(edge[2] == 1.0);
}

TEST_CASE("gini matches the double-sum oracle")
{
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<std::size_t> len(0, 50);
    std::uniform_int_distribution<int> val(0, 10000);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(len(rng));
        for (auto& v : x)
            v = val(rng);
        CHECK(std::abs(gini(x) - oracles::gini(x)) <= 1e-12);
        auto doubled = x;
        for (auto& v : doubled)
            v *= 2;
        CHECK(std::abs(gini(doubled) - gini(x)) <= 1e-12);
    }
}

TEST_CASE("feature vectors are finite, ratios bounded, change block order-invariant")
{
    auto corpus = generate_synthetic_corpus({{40, 40, 40, 40, 40}, 9});
    std::mt19937_64 rng(2);
    for (const auto& pr : corpus) {
        auto v = extract_features(pr);
        REQUIRE(v.size() == kFeatureCount);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CAPTURE(feature_registry()[i].name);
            CHECK(std::isfinite(v[i]));
            CHECK(v[i] >= 0.0);
            if (feature_registry()[i].is_ratio)
                CHECK(v[i] <= 1.0);
        }
        auto files = pr.file_changes;
        std::shuffle(files.begin(), files.end(), rng);
        CHECK(extract_change_features(files) == extract_change_features(pr.file_changes));
    }
}

TEST_CASE("extension entropy is zero iff one extension")
{
    auto one = extract_change_features({file("a.py", 1, 0), file("b/c.py", 1, 0)});
    CHECK(block_value(one, kChangeOffset, "extension_entropy") == 0.0);
    auto two = extract_change_features({file("a.py", 1, 0), file("b/c.js", 1, 0)});
    CHECK(block_value(two, kChangeOffset, "extension_entropy") > 0.0);
}

TEST_CASE("matrix build, csv round trip and selection")
{
    auto corpus = generate_synthetic_corpus({{5, 5, 5, 5, 5}, 1});
    FeatureMatrix m = build_matrix(corpus);
    CHECK(m.n_rows() == 25);
    CHECK(m.n_features() == kFeatureCount);
    CHECK(m.feature_names() == registry_names());

    std::ostringstream a, b;
    write_matrix_csv(a, m);
    write_matrix_csv(b, build_matrix(corpus));
    CHECK(a.str() == b.str());

    std::istringstream in(a.str());
    FeatureMatrix back = read_matrix_csv(in);
    std::ostringstream c;
    write_matrix_csv(c, back);
    CHECK(c.str() == a.str());
    CHECK(back.labels() == m.labels());

    auto sel = m.select({"change_gini", "commit_count"});
    CHECK(sel.n_features() == 2);
    CHECK(sel.at(3, 1) == m.at(3, static_cast<std::size_t>(m.feature_index("commit_count"))));
    CHECK_THROWS_AS(m.select({"nope"}), std::invalid_argument);

    std::vector<std::size_t> rows = {4, 0};
    auto sub = m.rows_subset(rows);
    CHECK(sub.pr_ids() == std::vector<std::string>{m.pr_ids()[4], m.pr_ids()[0]});

    PullRequestRecord unlabeled = corpus[0];
    unlabeled.agent.reset();
    CHECK_THROWS_AS(build_matrix({unlabeled}), std::invalid_argument);
}

TEST_CASE("csv schema errors")
{
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        return read_matrix_csv(in);
    };
    CHECK_THROWS_AS(bad(""), SchemaError);
    CHECK_THROWS_AS(bad("a,b\n1,2\n"), SchemaError);
    CHECK_THROWS_AS(bad("a,label,pr_id\n1,Devin\n"), SchemaError);
    CHECK_THROWS_AS(bad("a,label,pr_id\nx,Devin,p\n"), SchemaError);
    CHECK_THROWS_AS(bad("a,label,pr_id\n1,Gemini,p\n"), SchemaError);
    CHECK_THROWS_AS(bad("a,label,pr_id\ninf,Devin,p\n"), SchemaError);
    auto ok = bad("a,label,pr_id\n1.5,Devin,\"p,1\"\n");
    CHECK(ok.at(0, 0) == 1.5);
    CHECK(ok.pr_ids()[0] == "p,1");
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}
