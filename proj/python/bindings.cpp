#include <agentprint/cli.hpp>
#include <agentprint/eval.hpp>
#include <agentprint/fingerprint.hpp>
#include <agentprint/reduce.hpp>
#include <agentprint/synthetic.hpp>
#include <agentprint/textparse.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace agentprint;

namespace {

// JSON crosses the boundary as text; the Python package parses it.
std::string dumps(const nlohmann::json& j)
{
    return j.dump();
}

Agent agent_from(const std::string& name)
{
    auto a = parse_agent(name);
    if (!a)
        throw std::invalid_argument("unknown agent '" + name + "'");
    return *a;
}

LearnerConfig learner_config(const std::string& learner, int estimators, std::uint64_t seed)
{
    if (learner == "gbm") {
        GbmConfig c;
        c.n_rounds = estimators;
        c.seed = seed;
        return c;
    }
    if (learner == "forest") {
        ForestConfig c;
        c.n_trees = estimators;
        c.seed = seed;
        return c;
    }
    throw std::invalid_argument("learner must be 'gbm' or 'forest'");
}

FeatureMatrix read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open " + path);
    return read_matrix_csv(in);
}

FeatureMatrix from_rows(const std::vector<std::string>& names, const std::vector<std::vector<double>>& rows,
    const std::vector<std::string>& labels, std::vector<std::string> ids)
{
    if (rows.size() != labels.size())
        throw std::invalid_argument("rows and labels differ in length");
    if (ids.empty())
        for (std::size_t i = 0; i < rows.size(); ++i)
            ids.push_back("row" + std::to_string(i));
    if (ids.size() != rows.size())
        throw std::invalid_argument("rows and pr_ids differ in length");
    FeatureMatrix m(names);
    for (std::size_t i = 0; i < rows.size(); ++i)
        m.add_row(rows[i], agent_from(labels[i]), ids[i]);
    return m;
}

py::list shares(const std::vector<FeatureShare>& s)
{
    py::list out;
    for (const auto& f : s)
        out.append(py::make_tuple(f.feature, f.share));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "agentprint core bindings";
    m.attr("__version__") = std::string(tool_version());

    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<IngestError>(m, "IngestError", PyExc_ValueError);
    py::register_exception<ModelMismatchError>(m, "ModelMismatchError", PyExc_ValueError);

    m.def("feature_names", &registry_names);
    m.def("registry_json", [] { return dumps(registry_to_json()); });
    m.def("gini", [](const std::vector<double>& v) { return gini(v); });

    m.def("parse_commit_message", [](const std::string& msg) {
        auto s = parse_commit_message(msg);
        py::dict d;
        d["first_line"] = s.first_line;
        d["nonblank_line_count"] = s.nonblank_line_count;
        d["total_length"] = s.total_length;
        d["is_multiline"] = s.is_multiline;
        d["is_conventional"] = s.is_conventional;
        d["first_char_capitalized"] = s.first_char_capitalized;
        return d;
    });
    m.def("parse_body", [](const std::string& body) {
        auto s = parse_body(body);
        py::dict d;
        d["length_chars"] = s.length_chars;
        d["word_count"] = s.word_count;
        d["checklist_items"] = s.checklist_items;
        d["fenced_code_blocks"] = s.fenced_code_blocks;
        d["links"] = s.links;
        d["bullet_lines"] = s.bullet_lines;
        return d;
    });
    m.def("parse_patch", [](const std::string& patch) {
        auto s = parse_patch(patch);
        py::dict d;
        d["added_lines"] = s.added_lines;
        d["removed_lines"] = s.removed_lines;
        d["context_line_count"] = s.context_line_count;
        d["ignored_line_count"] = s.ignored_line_count;
        return d;
    });

    m.def("extract_features", [](const std::string& record_json) {
        auto r = decode_record(nlohmann::json::parse(record_json), LabelPolicy::Optional);
        if (r.status != RecordStatus::Ok)
            throw IngestError(r.error, 0);
        return extract_features(r.record);
    }, py::arg("record_json"));

    m.def("synthetic_corpus", [](std::uint64_t seed, std::vector<std::size_t> counts) {
        SyntheticConfig cfg;
        cfg.seed = seed;
        if (!counts.empty()) {
            if (counts.size() != kAgentCount)
                throw std::invalid_argument("counts needs one entry per agent");
            std::copy(counts.begin(), counts.end(), cfg.counts.begin());
        }
        std::vector<std::string> lines;
        for (const auto& rec : generate_synthetic_corpus(cfg))
            lines.push_back(encode_record(rec).dump());
        return lines;
    }, py::arg("seed") = 42, py::arg("counts") = std::vector<std::size_t>{});

    py::class_<FeatureMatrix>(m, "FeatureMatrix")
        .def(py::init(&from_rows), py::arg("feature_names"), py::arg("rows"), py::arg("labels"), py::arg("pr_ids") = std::vector<std::string>{})
        .def_static("read_csv", &read_csv, py::arg("path"))
        .def("to_csv", [](const FeatureMatrix& self) {
            std::ostringstream s;
            write_matrix_csv(s, self);
            return s.str();
        })
        .def_property_readonly("feature_names", &FeatureMatrix::feature_names)
        .def_property_readonly("pr_ids", &FeatureMatrix::pr_ids)
        .def_property_readonly("labels", [](const FeatureMatrix& self) {
            std::vector<std::string> out;
            for (Agent a : self.labels())
                out.emplace_back(agent_name(a));
            return out;
        })
        .def_property_readonly("n_rows", &FeatureMatrix::n_rows)
        .def_property_readonly("n_features", &FeatureMatrix::n_features)
        .def("row", [](const FeatureMatrix& self, std::size_t r) {
            if (r >= self.n_rows())
                throw py::index_error("row out of range");
            auto row = self.row(r);
            return std::vector<double>(row.begin(), row.end());
        })
        .def("select", &FeatureMatrix::select, py::arg("names"))
        .def("__len__", &FeatureMatrix::n_rows);

    m.def("build_matrix", [](const std::vector<std::string>& record_lines) {
        std::vector<PullRequestRecord> records;
        for (std::size_t i = 0; i < record_lines.size(); ++i) {
            auto r = decode_record(nlohmann::json::parse(record_lines[i]), LabelPolicy::Required);
            if (r.status != RecordStatus::Ok)
                throw IngestError("record " + std::to_string(i) + ": " + r.error, i + 1);
            records.push_back(std::move(r.record));
        }
        return build_matrix(records);
    }, py::arg("record_lines"));

    m.def("reduce", [](const FeatureMatrix& matrix, double corr_threshold, double r2_threshold) {
        ReductionConfig cfg;
        cfg.correlation_threshold = corr_threshold;
        cfg.r2_threshold = r2_threshold;
        return dumps(report_to_json(reduce_features(matrix, cfg)));
    }, py::arg("matrix"), py::arg("corr_threshold") = 0.7, py::arg("r2_threshold") = 0.9);

    py::class_<TreeEnsembleModel>(m, "Model")
        .def_static("from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); })
        .def("to_json", [](const TreeEnsembleModel& self) { return dumps(model_to_json(self)); })
        .def_property_readonly("feature_names", [](const TreeEnsembleModel& self) { return self.feature_names; })
        .def_property_readonly("outputs", &TreeEnsembleModel::output_names)
        .def_property_readonly("training_loss", [](const TreeEnsembleModel& self) { return self.training_loss; })
        .def("predict_proba", [](const TreeEnsembleModel& self, const std::vector<double>& x) { return predict(self, x); })
        .def("predict", [](const TreeEnsembleModel& self, const std::vector<double>& x) {
            return std::string(agent_name(predict_class(self, x)));
        })
        .def("importance", [](const TreeEnsembleModel& self, std::size_t top_k) { return shares(importance(self, top_k)); },
            py::arg("top_k") = 0);

    m.def("train", [](const FeatureMatrix& matrix, const std::string& learner, int estimators, std::uint64_t seed, int jobs) {
        py::gil_scoped_release release;
        return train(matrix, learner_config(learner, estimators, seed), jobs);
    }, py::arg("matrix"), py::arg("learner") = "gbm", py::arg("estimators") = 100, py::arg("seed") = 42, py::arg("jobs") = 1);

    m.def("train_one_vs_rest", [](const FeatureMatrix& matrix, const std::string& target, int rounds) {
        GbmConfig cfg;
        cfg.n_rounds = rounds;
        Agent a = agent_from(target);
        py::gil_scoped_release release;
        return train_one_vs_rest(matrix, a, cfg);
    }, py::arg("matrix"), py::arg("target"), py::arg("rounds") = 100);

    m.def("cross_validate", [](const FeatureMatrix& matrix, const std::string& learner, int folds, std::uint64_t seed, int jobs) {
        auto cfg = learner_config(learner, 100, seed);
        auto plan = stratified_folds(matrix.labels(), folds, seed);
        EvaluationReport report;
        {
            py::gil_scoped_release release;
            report = cross_validate(matrix, cfg, plan, jobs);
        }
        return dumps(report_to_json(report));
    }, py::arg("matrix"), py::arg("learner") = "gbm", py::arg("folds") = 5, py::arg("seed") = 42, py::arg("jobs") = 1);

    m.def("fingerprint", [](const FeatureMatrix& matrix, std::size_t top_k, int jobs) {
        FingerprintReport report;
        {
            py::gil_scoped_release release;
            report = build_fingerprints(matrix, GbmConfig{}, top_k, jobs);
        }
        return dumps(fingerprint_to_json(report));
    }, py::arg("matrix"), py::arg("top_k") = 3, py::arg("jobs") = 1);

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "agentprint");
        std::vector<const char*> argv;
        for (const auto& a : args)
            argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
