#include <agentprint/cli.hpp>

#include <agentprint/corpus.hpp>
#include <agentprint/eval.hpp>
#include <agentprint/features.hpp>
#include <agentprint/fingerprint.hpp>
#include <agentprint/hash.hpp>
#include <agentprint/learn.hpp>
#include <agentprint/reduce.hpp>
#include <agentprint/textparse.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace agentprint {

std::string_view tool_version()
{
#ifdef AGENTPRINT_VERSION
    return AGENTPRINT_VERSION;
#else
    return "0.0.0";
#endif
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;
    std::string out;
    std::string model;
    std::string config;
    std::string learner = "gbm";
    std::vector<std::string> compare;
    std::uint64_t seed = 42;
    int jobs = 1;
    bool strict = false;
    int folds = 5;
    double corr_threshold = 0.70;
    double r2_threshold = 0.90;
    std::size_t top_k = 3;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << content;
    if (!out)
        throw InputError("failed writing " + path.string());
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

fs::path out_dir(const Options& o)
{
    if (o.out.empty())
        throw InputError("--out is required");
    fs::create_directories(o.out);
    return o.out;
}

FeatureMatrix load_matrix(const std::string& path)
{
    if (path.empty())
        throw InputError("--input is required");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    return read_matrix_csv(in);
}

std::string matrix_csv(const FeatureMatrix& m)
{
    std::ostringstream ss;
    write_matrix_csv(ss, m);
    return ss.str();
}

LearnerConfig learner_config(const Options& o)
{
    if (o.learner == "gbm") {
        GbmConfig c;
        c.seed = o.seed;
        return c;
    }
    ForestConfig c;
    c.seed = o.seed;
    return c;
}

// Everything that can change an artifact except input contents and paths.
json meta(const Options& o, std::string_view command, json config)
{
    config["command"] = command;
    config["seed"] = o.seed;
    return {
        {"tool_version", tool_version()},
        {"seed", o.seed},
        {"config_hash", sha256_hex(config.dump())},
    };
}

std::string fixed(double v, int digits = 4)
{
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

int cmd_extract(const Options& o, std::ostream& out)
{
    if (o.input.empty() || o.out.empty())
        throw InputError("extract needs --input and --out");
    LoadedCorpus corpus = load_corpus(fs::path(o.input), o.strict);
    FeatureMatrix matrix = build_matrix(corpus.records);
    fs::path csv(o.out);
    write_file(csv, matrix_csv(matrix));

    json report = {
        {"meta", meta(o, "extract", {{"strict", o.strict}})},
        {"rows", matrix.n_rows()},
        {"features", matrix.n_features()},
        {"ingest", {
            {"loaded", corpus.stats.loaded},
            {"skipped_incomplete", corpus.stats.skipped_incomplete},
            {"skipped_malformed", corpus.stats.skipped_malformed},
        }},
    };
    write_file(csv.parent_path() / "extract.json", dump(report));
    out << "extracted " << matrix.n_rows() << " PRs x " << matrix.n_features() << " features"
        << " (skipped " << corpus.stats.skipped_incomplete << " incomplete, " << corpus.stats.skipped_malformed
        << " malformed) -> " << csv.string() << "\n";
    return kExitOk;
}

int cmd_reduce(const Options& o, std::ostream& out)
{
    FeatureMatrix matrix = load_matrix(o.input);
    ReductionConfig config;
    config.correlation_threshold = o.corr_threshold;
    config.r2_threshold = o.r2_threshold;
    ReductionReport report = reduce_features(matrix, config);

    fs::path dir = out_dir(o);
    json j = report_to_json(report);
    j["meta"] = meta(o, "reduce", j["config"]);
    write_file(dir / "reduce.json", dump(j));
    std::string kept;
    for (const auto& name : report.kept)
        kept += name + "\n";
    write_file(dir / "kept_features.txt", kept);
    write_file(dir / "reduced.csv", matrix_csv(matrix.select(report.kept)));

    out << "reduced " << report.features.size() << " -> " << report.kept.size() << " features ("
        << report.dropped_step1.size() << " by correlation clustering, " << report.dropped_step2.size()
        << " by R^2 redundancy)\n";
    for (const auto& [agent, e] : report.epv_table) {
        out << "  EPV " << std::left << std::setw(12) << agent_name(agent) << std::right << fixed(e.epv, 1)
            << (e.flagged ? "  below minimum" : "") << "\n";
    }
    return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out)
{
    FeatureMatrix matrix = load_matrix(o.input);
    LearnerConfig learner = learner_config(o);
    TreeEnsembleModel model = train(matrix, learner, o.jobs);
    fs::path dir = out_dir(o);
    json j = model_to_json(model);
    j["meta"] = meta(o, "train", config_to_json(learner));
    write_file(dir / "train.json", dump(j));

    out << "trained " << o.learner << " on " << matrix.n_rows() << " rows x " << matrix.n_features() << " features\n";
    if (!model.training_loss.empty())
        out << "  final training log-loss " << fixed(model.training_loss.back()) << "\n";
    if (model.oob_accuracy)
        out << "  out-of-bag accuracy " << fixed(*model.oob_accuracy) << "\n";
    out << "  top features:";
    for (const auto& s : importance(model, 5))
        out << " " << s.feature << " (" << fixed(100.0 * s.share, 1) << "%)";
    out << "\n";
    return kExitOk;
}

void print_metrics(std::ostream& out, const EvaluationReport& report)
{
    out << std::left << std::setw(12) << "class" << std::right << std::setw(10) << "precision" << std::setw(10) << "recall"
        << std::setw(10) << "f1" << std::setw(10) << "support" << "\n";
    for (std::size_t i = 0; i < report.metrics.classes.size(); ++i) {
        const auto& c = report.metrics.per_class[i];
        out << std::left << std::setw(12) << agent_name(report.metrics.classes[i]) << std::right << std::setw(10)
            << fixed(c.precision, 3) << std::setw(10) << fixed(c.recall, 3) << std::setw(10) << fixed(c.f1, 3)
            << std::setw(10) << c.support << "\n";
    }
    const auto& w = report.metrics.weighted;
    out << std::left << std::setw(12) << "weighted" << std::right << std::setw(10) << fixed(w.precision, 3)
        << std::setw(10) << fixed(w.recall, 3) << std::setw(10) << fixed(w.f1, 3) << "\n";
    out << "per-fold F1 spread " << fixed(report.f1_spread) << "\n";
}

int cmd_evaluate(const Options& o, std::ostream& out)
{
    LearnerConfig learner = learner_config(o);
    json config = config_to_json(learner);
    config["folds"] = o.folds;
    fs::path dir = out_dir(o);

    if (!o.compare.empty()) {
        FeatureMatrix full = load_matrix(o.compare.at(0));
        FeatureMatrix reduced = load_matrix(o.compare.at(1));
        FoldPlan plan = stratified_folds(full.labels(), o.folds, o.seed);
        FeatureSetComparison c = compare_feature_sets(full, reduced, learner, plan, o.jobs);
        json j = {{"comparison", comparison_to_json(c)}};
        config["compare"] = true;
        j["meta"] = meta(o, "evaluate", config);
        write_file(dir / "evaluate.json", dump(j));
        out << "weighted F1 full (" << c.features_full << " features) " << fixed(c.f1_full) << ", reduced ("
            << c.features_reduced << " features) " << fixed(c.f1_reduced) << ", delta F1 " << fixed(c.delta) << "\n";
        return kExitOk;
    }

    FeatureMatrix matrix = load_matrix(o.input);
    FoldPlan plan = stratified_folds(matrix.labels(), o.folds, o.seed);
    EvaluationReport report = cross_validate(matrix, learner, plan, o.jobs);
    json j = report_to_json(report);
    j["meta"] = meta(o, "evaluate", config);
    write_file(dir / "evaluate.json", dump(j));
    std::ostringstream csv;
    write_confusion_csv(csv, report.confusion);
    write_file(dir / "confusion.csv", csv.str());
    write_file(dir / "confusion.txt", confusion_to_text(report.confusion));

    print_metrics(out, report);
    out << confusion_to_text(report.confusion);
    return kExitOk;
}

std::optional<std::string> source_date()
{
    const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
    if (!epoch || !*epoch)
        return std::nullopt;
    try {
        return format_rfc3339(Timestamp{std::chrono::seconds{std::stoll(epoch)}});
    } catch (const std::exception&) {
        throw InputError("SOURCE_DATE_EPOCH is not an integer");
    }
}

int cmd_fingerprint(const Options& o, std::ostream& out)
{
    FeatureMatrix matrix = load_matrix(o.input);
    GbmConfig config;
    config.seed = o.seed;
    FingerprintReport report = build_fingerprints(matrix, config, o.top_k, o.jobs);
    report.generated_at = source_date();

    fs::path dir = out_dir(o);
    json j = fingerprint_to_json(report);
    json hashed = config_to_json(config);
    hashed["top_k"] = o.top_k;
    j["meta"] = meta(o, "fingerprint", hashed);
    write_file(dir / "fingerprint.json", dump(j));
    for (const auto& [agent, fp] : report.per_agent) {
        std::ostringstream csv;
        write_fingerprint_csv(csv, fp);
        write_file(dir / ("fingerprint_" + std::string(agent_name(agent)) + ".csv"), csv.str());
    }

    out << "global:";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, report.global_ranking.size()); ++i)
        out << " " << report.global_ranking[i].feature << " (" << fixed(100.0 * report.global_ranking[i].share, 1) << "%)";
    out << "\n";
    for (const auto& [agent, fp] : report.per_agent) {
        out << std::left << std::setw(12) << agent_name(agent) << std::right;
        const auto& shifts = report.rank_shifts.at(agent);
        for (std::size_t i = 0; i < fp.top_features.size(); ++i) {
            out << " " << fp.top_features[i].feature << " (" << fixed(100.0 * fp.top_features[i].share, 1) << "%, global #";
            out << (shifts[i].global_rank ? std::to_string(*shifts[i].global_rank) : std::string("-")) << ")";
        }
        out << "\n";
    }
    return kExitOk;
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

int cmd_predict(const Options& o, std::ostream& out)
{
    if (o.model.empty() || o.input.empty())
        throw InputError("predict needs --model and --input");
    json model_json;
    try {
        model_json = json::parse(read_file(o.model));
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("model file is not JSON: ") + e.what());
    }
    TreeEnsembleModel model = model_from_json(model_json);
    if (model.objective == Objective::Logistic)
        throw ModelMismatchError("predict needs a multi-class model, got a one-vs-rest model");

    std::vector<std::size_t> registry_columns;
    for (const auto& name : model.feature_names) {
        int idx = registry_index(name);
        if (idx < 0)
            throw ModelMismatchError("model feature '" + name + "' is not in the feature registry");
        registry_columns.push_back(static_cast<std::size_t>(idx));
    }

    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    if (ends_with(o.input, ".csv")) {
        FeatureMatrix m = load_matrix(o.input);
        if (m.feature_names() != model.feature_names)
            throw ModelMismatchError("input has " + std::to_string(m.n_features()) + " feature columns, model expects "
                + std::to_string(model.feature_names.size()) + " in model order");
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
            ids.push_back(m.pr_ids()[r]);
            rows.emplace_back(m.row(r).begin(), m.row(r).end());
        }
    } else {
        LoadOptions lo;
        lo.strict = o.strict;
        lo.labels = LabelPolicy::Optional;
        LoadedCorpus corpus = load_corpus(fs::path(o.input), lo);
        for (const auto& rec : corpus.records) {
            auto all = extract_features(rec);
            std::vector<double> x;
            for (auto c : registry_columns)
                x.push_back(all[c]);
            ids.push_back(rec.id);
            rows.push_back(std::move(x));
        }
    }

    const auto names = model.output_names();
    json predictions = json::array();
    std::map<std::string, std::size_t> tally;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto probs = predict(model, rows[i]);
        Agent predicted = predict_class(model, rows[i]);
        std::size_t slot = static_cast<std::size_t>(std::find(model.classes.begin(), model.classes.end(), predicted) - model.classes.begin());
        json p = json::object();
        for (std::size_t k = 0; k < probs.size(); ++k)
            p[names[k]] = probs[k];
        json contrib = json::array();
        for (const auto& s : path_contributions(model, rows[i], slot, o.top_k))
            contrib.push_back({{"feature", s.feature}, {"share", s.share}});
        predictions.push_back({
            {"pr_id", ids[i]},
            {"predicted_agent", std::string(agent_name(predicted))},
            {"probabilities", p},
            {"top_contributing_features", contrib},
        });
        ++tally[std::string(agent_name(predicted))];
    }

    fs::path dir = out_dir(o);
    json hashed = model_json.value("config", json::object());
    hashed["top_k"] = o.top_k;
    hashed["model_ref"] = sha256_hex(model_to_json(model).dump());
    json j = {{"meta", meta(o, "predict", hashed)}, {"predictions", predictions}};
    write_file(dir / "predict.json", dump(j));
    out << "predicted " << rows.size() << " PRs:";
    for (const auto& [name, n] : tally)
        out << " " << name << "=" << n;
    out << "\n";
    return kExitOk;
}

int cmd_dump(const json& j, const Options& o, std::ostream& out)
{
    if (o.out.empty())
        out << dump(j);
    else
        write_file(o.out, dump(j));
    return kExitOk;
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Appends `--key value` for every config-file entry the chosen subcommand
// accepts and the command line does not already set.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App& app)
{
    std::string config_path;
    CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!sub) {
            for (auto* s : app.get_subcommands([](CLI::App*) { return true; })) {
                if (s->get_name() == args[i])
                    sub = s;
            }
        }
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty() || !sub)
        return args;

    auto on_command_line = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };

    std::vector<std::string> merged = args;
    std::istringstream in(read_file(config_path));
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#')
            continue;
        auto eq = text.find('=');
        if (eq == std::string::npos)
            throw InputError(config_path + ":" + std::to_string(number) + ": expected key=value");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.rfind("--", 0) == 0)
            key = key.substr(2);
        if (key == "config")
            throw InputError(config_path + ":" + std::to_string(number) + ": nested config files are not supported");

        bool known = false;
        for (auto* s : app.get_subcommands([](CLI::App*) { return true; }))
            known = known || s->get_option_no_throw("--" + key) != nullptr;
        if (!known)
            throw InputError(config_path + ":" + std::to_string(number) + ": unknown key '" + key + "'");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || on_command_line("--" + key))
            continue;
        if (opt->get_expected_max() == 0) {
            if (value == "true" || value == "1" || value == "yes")
                merged.push_back("--" + key);
            continue;
        }
        merged.push_back("--" + key);
        std::istringstream values(value);
        for (std::string v; values >> v;)
            merged.push_back(v);
    }
    return merged;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Fingerprint AI coding agents from pull-request artifacts", "agentprint"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "key=value file; flags override it");
        sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    };
    auto add_learner = [&](CLI::App* sub) {
        sub->add_option("--learner", o.learner, "gbm or forest")->check(CLI::IsMember({"gbm", "forest"}))->capture_default_str();
    };

    auto* extract = app.add_subcommand("extract", "NDJSON corpus -> feature matrix CSV");
    extract->add_option("--input", o.input, "NDJSON corpus")->required();
    extract->add_option("--out", o.out, "output CSV")->required();
    extract->add_flag("--strict", o.strict, "fail on the first malformed line");
    add_common(extract);

    auto* reduce = app.add_subcommand("reduce", "correlation clustering + R^2 redundancy");
    reduce->add_option("--input", o.input, "feature matrix CSV")->required();
    reduce->add_option("--out", o.out, "output directory")->required();
    reduce->add_option("--corr-threshold", o.corr_threshold, "|rho| clustering threshold")->capture_default_str();
    reduce->add_option("--r2-threshold", o.r2_threshold, "R^2 redundancy threshold")->capture_default_str();
    add_common(reduce);

    auto* train_cmd = app.add_subcommand("train", "train a multi-class model");
    train_cmd->add_option("--input", o.input, "feature matrix CSV")->required();
    train_cmd->add_option("--out", o.out, "output directory")->required();
    add_learner(train_cmd);
    add_common(train_cmd);

    auto* evaluate = app.add_subcommand("evaluate", "stratified k-fold cross-validation");
    evaluate->add_option("--input", o.input, "feature matrix CSV");
    evaluate->add_option("--out", o.out, "output directory")->required();
    evaluate->add_option("--folds", o.folds, "number of folds")->check(CLI::Range(2, 1000))->capture_default_str();
    evaluate->add_option("--compare", o.compare, "full.csv reduced.csv")->expected(2);
    add_learner(evaluate);
    add_common(evaluate);

    auto* fingerprint = app.add_subcommand("fingerprint", "global and per-agent importance");
    fingerprint->add_option("--input", o.input, "reduced feature matrix CSV")->required();
    fingerprint->add_option("--out", o.out, "output directory")->required();
    fingerprint->add_option("--top-k", o.top_k, "features per agent")->check(CLI::PositiveNumber)->capture_default_str();
    add_common(fingerprint);

    auto* predict_cmd = app.add_subcommand("predict", "classify unlabeled PRs");
    predict_cmd->add_option("--model", o.model, "train.json")->required();
    predict_cmd->add_option("--input", o.input, "NDJSON corpus or feature matrix CSV")->required();
    predict_cmd->add_option("--out", o.out, "output directory")->required();
    predict_cmd->add_option("--top-k", o.top_k, "contributing features per PR")->check(CLI::PositiveNumber)->capture_default_str();
    predict_cmd->add_flag("--strict", o.strict, "fail on the first malformed line");
    add_common(predict_cmd);

    auto* dump_features = app.add_subcommand("dump-features", "print the feature registry as JSON");
    dump_features->add_option("--out", o.out, "write to a file instead of stdout");
    auto* dump_profiles = app.add_subcommand("dump-profiles", "print the syntax profile table as JSON");
    dump_profiles->add_option("--out", o.out, "write to a file instead of stdout");

    try {
        std::vector<std::string> args;
        for (int i = 1; i < argc; ++i)
            args.emplace_back(argv[i]);
        args = merge_config(args, app);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::CallForVersion&) {
            out << tool_version() << "\n";
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) {
                out << app.help();
                return kExitOk;
            }
            err << "error: " << e.what() << "\n";
            return kExitInput;
        }
        if (*evaluate && o.compare.empty() && o.input.empty())
            throw InputError("evaluate needs --input or --compare");

        if (*extract)
            return cmd_extract(o, out);
        if (*reduce)
            return cmd_reduce(o, out);
        if (*train_cmd)
            return cmd_train(o, out);
        if (*evaluate)
            return cmd_evaluate(o, out);
        if (*fingerprint)
            return cmd_fingerprint(o, out);
        if (*predict_cmd)
            return cmd_predict(o, out);
        if (*dump_features)
            return cmd_dump(registry_to_json(), o, out);
        if (*dump_profiles)
            return cmd_dump(profiles_to_json(), o, out);
        return kExitUnexpected;
    } catch (const IngestError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const ModelMismatchError& e) {
        err << "model mismatch: " << e.what() << "\n";
        return kExitModelMismatch;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return kExitUnexpected;
    }
}

} // namespace agentprint
