#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "passlens/config.hpp"
#include "passlens/pipeline.hpp"
#include "passlens/synthetic.hpp"

namespace {

namespace fs = std::filesystem;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CommonFlags {
  std::string config_path;
  double sigma = 0.0;
  double window = 0.0;
  int k = 0;
  std::uint64_t seed = 0;
  int restarts = 0;
  std::string grid;
  int jobs = 0;
  CLI::Option* o_config = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_window = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_restarts = nullptr;
  CLI::Option* o_grid = nullptr;
  CLI::Option* o_jobs = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  f.o_config = cmd->add_option("--config", f.config_path, "JSON config file; flags override it");
  f.o_sigma = cmd->add_option("--sigma", f.sigma, "density kernel bandwidth in metres");
  f.o_window = cmd->add_option("--window", f.window, "outcome window in seconds");
  f.o_k = cmd->add_option("--k", f.k, "number of clusters");
  f.o_seed = cmd->add_option("--seed", f.seed, "clustering seed");
  f.o_restarts = cmd->add_option("--restarts", f.restarts, "independent clustering restarts");
  f.o_grid = cmd->add_option("--grid", f.grid, "heatmap bins as NXxNY (width x length)");
  f.o_jobs = cmd->add_option("--jobs", f.jobs, "worker threads for match-level stages");
}

void parse_grid(const std::string& s, int& nx, int& ny) {
  const auto sep = s.find_first_of("xX");
  if (sep == std::string::npos)
    throw passlens::ConfigError("--grid expects NXxNY, e.g. 8x12, got '" + s + "'");
  try {
    nx = std::stoi(s.substr(0, sep));
    ny = std::stoi(s.substr(sep + 1));
  } catch (const std::exception&) {
    throw passlens::ConfigError("--grid expects NXxNY, e.g. 8x12, got '" + s + "'");
  }
}

passlens::AnalysisConfig resolve_config(const CommonFlags& f) {
  passlens::AnalysisConfig cfg;
  if (f.o_config->count() > 0) cfg = passlens::AnalysisConfig::load(f.config_path);
  if (f.o_sigma->count() > 0) cfg.density.sigma = f.sigma;
  if (f.o_window->count() > 0) cfg.window_s = f.window;
  if (f.o_k->count() > 0) cfg.k = f.k;
  if (f.o_seed->count() > 0) cfg.seed = f.seed;
  if (f.o_restarts->count() > 0) cfg.restarts = f.restarts;
  if (f.o_grid->count() > 0) parse_grid(f.grid, cfg.grid_nx, cfg.grid_ny);
  if (f.o_jobs->count() > 0) cfg.jobs = f.jobs;
  cfg.validate();
  return cfg;
}

int cmd_ingest(const std::string& input, const std::string& output, std::string report_path,
               const CommonFlags& flags) {
  const passlens::AnalysisConfig cfg = resolve_config(flags);
  passlens::IngestReport report;
  passlens::PassStore store = passlens::ingest_tree(input, cfg, report);
  store.save(output);
  if (report_path.empty()) report_path = output + ".report.json";
  {
    nlohmann::json j = report.to_json();
    j["tool"] = "passlens";
    j["command"] = "ingest";
    j["input"] = input;
    j["output"] = output;
    j["created_utc"] = utc_now();
    std::ofstream out(report_path, std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + report_path);
  }
  std::cout << "ingested " << report.matches.size() << " matches, " << report.total_passes()
            << " passes -> " << output << "\n";
  for (const auto& [dir, err] : report.failures) {
    std::cerr << "error: " << dir << ": " << err << "\n";
  }
  return report.failures.empty() ? 0 : 2;
}

int cmd_analyze(const std::string& input, const std::string& output, const CommonFlags& flags) {
  const passlens::AnalysisConfig cfg = resolve_config(flags);
  const passlens::PassStore store = passlens::PassStore::load(input);
  const std::string hash = passlens::fnv1a64_hex(input);
  const passlens::AnalysisResult result = passlens::analyze(store, cfg);
  passlens::write_outputs(result, cfg, output, hash, input, utc_now(), "analyze");
  std::cout << "analyzed " << result.passes.size() << " passes from " << store.matches.size()
            << " matches -> " << output << "\n";
  return 0;
}

int cmd_score(const std::string& input, const std::string& model_path, const std::string& output,
              const CommonFlags& flags) {
  passlens::AnalysisConfig cfg = resolve_config(flags);
  std::ifstream in(model_path);
  if (!in) throw passlens::ConfigError("cannot open model: " + model_path);
  nlohmann::json model_json;
  try {
    in >> model_json;
  } catch (const nlohmann::json::exception& e) {
    throw passlens::ConfigError("model: " + std::string(e.what()));
  }
  std::optional<double> requested_sigma;
  if (flags.o_sigma->count() > 0) requested_sigma = flags.sigma;
  const passlens::PassStore store = passlens::PassStore::load(input);
  const std::string hash = passlens::fnv1a64_hex(input);
  const passlens::AnalysisResult result = passlens::score(store, model_json, cfg, requested_sigma);
  passlens::write_outputs(result, cfg, output, hash, input, utc_now(), "score");
  std::cout << "scored " << result.passes.size() << " passes -> " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structural pass analysis pipeline"};
  app.require_subcommand(1);

  std::string in_dir, out_path, report_path, model_path, out_dir;

  CLI::App* ingest = app.add_subcommand("ingest", "parse match directories into a pass store");
  CommonFlags ingest_flags;
  ingest->add_option("--input", in_dir, "match directory or directory of matches")->required();
  ingest->add_option("--output", out_path, "pass store file to write")->required();
  ingest->add_option("--report", report_path, "ingest report path (default: <output>.report.json)");
  add_common_flags(ingest, ingest_flags);

  CLI::App* analyze = app.add_subcommand("analyze", "fit the archetype model and write reports");
  CommonFlags analyze_flags;
  std::string analyze_in, analyze_out;
  analyze->add_option("--input", analyze_in, "pass store file")->required();
  analyze->add_option("--output", analyze_out, "results directory")->required();
  add_common_flags(analyze, analyze_flags);

  CLI::App* score = app.add_subcommand("score", "apply a frozen model to a pass store");
  CommonFlags score_flags;
  std::string score_in, score_out;
  score->add_option("--input", score_in, "pass store file")->required();
  score->add_option("--model", model_path, "model.json from a previous analyze")->required();
  score->add_option("--output", score_out, "results directory")->required();
  add_common_flags(score, score_flags);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  passlens::ScenarioSpec spec;
  std::string synth_out, template_name = "two_lines_4_4", mix_str;
  double synth_sigma = spec.sigma;
  synth->add_option("--output", synth_out, "corpus directory to create")->required();
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--matches", spec.n_matches, "number of matches");
  synth->add_option("--passes", spec.passes_per_match, "passes per match");
  synth->add_option("--teams", spec.teams, "number of team identities to rotate");
  synth->add_option("--noise", spec.noise_sd, "defender position jitter sd in metres");
  synth->add_option("--template", template_name,
                    "defense template: two_lines_4_4, flat_back_four, compact_block, stretched_block");
  synth->add_option("--mix", mix_str,
                    "intent shares as circ,dest,lb,se (default 0.25,0.25,0.25,0.25)");
  synth->add_option("--sigma", synth_sigma, "kernel bandwidth used for reference metrics");

  int exit_code = 0;
  try {
    app.parse(argc, argv);
    if (ingest->parsed()) {
      exit_code = cmd_ingest(in_dir, out_path, report_path, ingest_flags);
    } else if (analyze->parsed()) {
      exit_code = cmd_analyze(analyze_in, analyze_out, analyze_flags);
    } else if (score->parsed()) {
      exit_code = cmd_score(score_in, model_path, score_out, score_flags);
    } else if (synth->parsed()) {
      spec.defense = passlens::defense_template_from_string(template_name);
      spec.sigma = synth_sigma;
      if (!mix_str.empty()) {
        std::array<double, 4> mix{};
        std::size_t pos = 0;
        for (int i = 0; i < 4; ++i) {
          const std::size_t comma = i == 3 ? mix_str.size() : mix_str.find(',', pos);
          if (comma == std::string::npos) throw passlens::ConfigError("--mix expects 4 comma-separated shares");
          mix[static_cast<std::size_t>(i)] = std::stod(mix_str.substr(pos, comma - pos));
          pos = comma + 1;
        }
        spec.pass_mix = mix;
      }
      spec.validate();
      const passlens::SynthSummary s = passlens::generate(spec, synth_out);
      std::cout << "generated " << s.matches << " matches, " << s.passes << " passes -> "
                << synth_out << "\n";
    }
  } catch (const CLI::ParseError& e) {
    // CLI11's own exit codes leak past the documented 0/1/2 contract; keep
    // its message, clamp the code (0 stays 0 so --help works).
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const passlens::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const passlens::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
