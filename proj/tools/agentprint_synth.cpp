// Writes the synthetic five-agent fixture corpus as NDJSON.
#include <agentprint/corpus.hpp>
#include <agentprint/synthetic.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    agentprint::SyntheticConfig config;
    std::string out;
    CLI::App app{"Generate the synthetic five-agent fixture corpus", "agentprint-synth"};
    app.add_option("--out", out, "NDJSON output file")->required();
    app.add_option("--seed", config.seed, "generator seed")->capture_default_str();
    for (agentprint::Agent a : agentprint::kAllAgents) {
        std::string flag = "--" + std::string(agentprint::agent_name(a));
        app.add_option(flag, config.counts[agentprint::agent_index(a)], "PRs for this agent")->capture_default_str();
    }
    CLI11_PARSE(app, argc, argv);

    std::ofstream file(out, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot write " << out << "\n";
        return 2;
    }
    std::size_t n = 0;
    for (const auto& record : agentprint::generate_synthetic_corpus(config)) {
        file << agentprint::encode_record(record).dump() << "\n";
        ++n;
    }
    std::cout << "wrote " << n << " records to " << out << "\n";
    return 0;
}
