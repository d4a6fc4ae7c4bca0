// qcorr: command-line harness for the correlation-learning experiments.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcorr/lab/experiments.hpp"

namespace {

using nlohmann::json;
using namespace qcorr;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "run";
  std::optional<std::string> noise;
  std::string model = "all";
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "Root seed (overrides the config)");
  cmd->add_option("--out", opt.out, "Run directory for inputs and outputs");
  cmd->add_option("--noise", opt.noise, "Count noise model")->check(CLI::IsMember({"poisson", "none"}));
  cmd->add_option("--model", opt.model, "Model selection")->check(CLI::IsMember({"ann", "svm", "dt", "all"}));
}

lab::RunConfig resolve_config(const Options& opt) {
  lab::RunConfig config = opt.config_path.empty() ? lab::RunConfig{} : lab::load_config(opt.config_path);
  if (opt.seed) config.seed = *opt.seed;
  if (opt.noise) config.noise = parse_noise(*opt.noise);
  config.validate();
  lab::apply_thread_setting(config);
  return config;
}

std::vector<ml::ModelKind> resolve_models(const Options& opt) {
  if (opt.model == "all") return {std::begin(ml::kAllModels), std::end(ml::kAllModels)};
  return {ml::parse_model(opt.model)};
}

int fail(std::string_view type, const std::string& message, int code, const json& extra = nullptr) {
  json err = {{"error", {{"type", type}, {"message", message}}}};
  if (!extra.is_null()) err["error"]["report"] = extra;
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate, label and learn two-qubit correlation classes"};
  app.require_subcommand(1);
  Options opt;
  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"gen-data", "Write train.jsonl and test.jsonl"},
      {"train-eval", "Train the models and write evaluation reports and phase diagrams"},
      {"mismatch-study", "Compare noiseless-trained and noise-matched models on noisy test data"},
      {"bench", "Time labeling against model inference"},
      {"sdp-run", "Classify random states with the symmetric-extension test"},
      {"phase-export", "Write phase-diagram CSVs for saved models"},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    const lab::RunConfig config = resolve_config(opt);
    const std::string command = app.get_subcommands().front()->get_name();
    const std::filesystem::path dir = opt.out;
    json report;
    if (command == "gen-data") {
      report = lab::cmd_gen_data(config, dir, config.noise);
    } else if (command == "train-eval") {
      report = lab::cmd_train_eval(config, dir, resolve_models(opt));
    } else if (command == "mismatch-study") {
      report = lab::cmd_mismatch_study(config, dir, resolve_models(opt));
    } else if (command == "bench") {
      report = lab::cmd_bench(config, dir);
    } else if (command == "sdp-run") {
      report = lab::cmd_sdp_run(config, dir);
    } else {
      report = lab::cmd_phase_export(config, dir, resolve_models(opt));
    }
    std::cout << report.dump(2) << '\n';
    return 0;
  } catch (const lab::OrderingViolation& e) {
    return fail("ordering", e.what(), 3, e.report);
  } catch (const lab::HarnessError& e) {
    return fail("input", e.what(), 1);
  } catch (const std::invalid_argument& e) {
    return fail("invalid-argument", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
}
