#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cwc/compiler.hpp"
#include "cwc/gillespie.hpp"
#include "cwc/monitor.hpp"
#include "cwc/surface.hpp"

namespace {

enum Exit { Ok = 0, Usage = 1, Invalid = 2, Runtime = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print(const std::string& path, const std::vector<cwc::Diagnostic>& diags)
{
    for (const auto& d : diags) std::cerr << path << ":" << d.str() << "\n";
}

// Parse and validate; prints diagnostics. nullopt on any error.
std::optional<cwc::SurfaceModel> load(const std::string& path)
{
    auto parsed = cwc::parse_model(read_file(path));
    print(path, parsed.diagnostics);
    if (!parsed.model) return std::nullopt;
    const auto diags = cwc::validate(*parsed.model);
    print(path, diags);
    if (cwc::has_errors(diags)) return std::nullopt;
    return parsed.model;
}

unsigned thread_count()
{
    const char* env = std::getenv("CWC_THREADS");
    if (!env || !*env) return 0;
    try {
        std::size_t used = 0;
        const unsigned long n = std::stoul(env, &used);
        if (used != std::string(env).size() || n > 4096) throw std::invalid_argument(env);
        return static_cast<unsigned>(n);
    } catch (const std::exception&) {
        throw UsageError(std::string("CWC_THREADS must be a nonnegative integer, got '") + env + "'");
    }
}

std::size_t count_cells(const cwc::CompiledModel& m)
{
    return static_cast<std::size_t>(m.initial.compartments.size());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spatial CWC models: validate, compile to ground rules, simulate"};
    app.require_subcommand(1);

    std::string input;
    bool emit_ground = false;
    std::string output;
    std::size_t runs = 1;
    double horizon = 0.0;
    double interval = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    auto* validate_cmd = app.add_subcommand("validate", "Check a model and print diagnostics");
    validate_cmd->add_option("file", input, "Model file")->required()->check(CLI::ExistingFile);

    auto* compile_cmd = app.add_subcommand("compile", "Compile a model to ground rules");
    compile_cmd->add_option("file", input, "Model file")->required()->check(CLI::ExistingFile);
    compile_cmd->add_flag("--emit-ground", emit_ground, "Write the ground model text");
    compile_cmd->add_option("-o,--output", output, "Ground model path (default: stdout)");

    auto* run_cmd = app.add_subcommand("run", "Simulate an ensemble and write CSVs");
    run_cmd->add_option("file", input, "Model file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
    run_cmd->add_option("--horizon", horizon, "Simulated time")->required()->check(CLI::PositiveNumber);
    run_cmd->add_option("--interval", interval, "Sampling interval (default: horizon/100)")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", seed, "Base seed");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_flag("--emit-ground", emit_ground, "Also write <model>.ground");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Usage;
    }

    try {
        const auto model = load(input);
        if (!model) return Invalid;
        if (validate_cmd->parsed()) return Ok;

        const auto compiled = cwc::compile(*model);
        if (compile_cmd->parsed()) {
            if (!emit_ground) {
                std::cout << compiled.name << ": " << compiled.rules.size() << " rules, " << count_cells(compiled)
                          << " compartments, " << compiled.monitors.size() << " monitors\n";
                return Ok;
            }
            const auto text = cwc::emit_ground_model(compiled);
            if (output.empty()) {
                std::cout << text;
            } else {
                cwc::write_text_file(text, output);
            }
            return Ok;
        }

        const unsigned threads = thread_count();
        if (interval <= 0.0) interval = horizon / 100.0;
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        if (emit_ground) cwc::write_text_file(cwc::emit_ground_model(compiled), dir / (compiled.name + ".ground"));
        const auto trajectories = cwc::run_trajectories(compiled, runs, horizon, interval, seed, threads);
        for (std::size_t i = 0; i < trajectories.size(); ++i) {
            cwc::write_run_csv(trajectories[i], dir / (compiled.name + "_run" + std::to_string(i) + ".csv"));
        }
        cwc::write_ensemble_csv(cwc::aggregate(trajectories), dir / (compiled.name + "_ensemble.csv"));
        return Ok;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    } catch (const cwc::CompileError& e) {
        print(input, e.diagnostics());
        return Invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Runtime;
    }
}
