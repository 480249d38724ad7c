#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qmpc/harness.hpp"

using namespace qmpc;

namespace {

int run(const std::string& path, const std::optional<uint64_t>& seed, const std::optional<size_t>& trials,
        const std::optional<size_t>& n, const std::optional<int>& k, const std::string& backend,
        const std::string& out, const std::string& format) {
  ExperimentConfig cfg = load_config(path);
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  if (n) cfg.n = *n;
  if (k) cfg.k = *k;
  if (!backend.empty()) cfg.backend = parse_backend(backend);
  if (!out.empty()) cfg.out = out;
  if (!format.empty()) cfg.format = format;
  cfg.validate();
  auto records = run_experiment(cfg);
  if (cfg.out.empty()) {
    std::cout << (cfg.format == "csv" ? to_csv(records) : to_jsonl(records));
    return exit_code(records);
  }
  return emit(records, cfg.out, cfg.format);
}

int verify_all(uint64_t seed) {
  int code = 0;
  for (const Criterion& c : criteria()) {
    auto records = run_criterion(c.id, seed);
    bool pass = exit_code(records) == 0;
    std::printf("criterion %d %s: %s\n", c.id, c.name.c_str(), pass ? "PASS" : "FAIL");
    for (const ResultRecord& r : records) {
      if (!r.pass) std::printf("  %s", to_jsonl({r}).c_str());
    }
    std::fflush(stdout);
    if (!pass) code = 1;
  }
  return code;
}

int check_circuit(const std::string& path) {
  CircuitIR c = parse_circuit(path);
  std::printf("ok: %d players, %zu wires, %zu ops, %zu T gates\n", c.players, c.wires().size(), c.ops.size(),
              c.t_count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmpc experiment harness"};
  app.require_subcommand(1);

  std::string config, backend, out, format;
  std::optional<uint64_t> seed;
  std::optional<size_t> trials, n;
  std::optional<int> k;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config, "experiment config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed);
  run_cmd->add_option("--trials", trials);
  run_cmd->add_option("--n", n);
  run_cmd->add_option("--k", k);
  run_cmd->add_option("--backend", backend)->check(CLI::IsMember({"tableau", "dense", "authwire"}));
  run_cmd->add_option("--out", out);
  run_cmd->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}));

  uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify-all", "run every acceptance criterion");
  verify_cmd->add_option("--seed", verify_seed);

  std::string circuit;
  auto* circuit_cmd = app.add_subcommand("circuit", "circuit file tools");
  circuit_cmd->require_subcommand(1);
  auto* check_cmd = circuit_cmd->add_subcommand("check", "parse and validate a circuit file");
  check_cmd->add_option("file", circuit)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run(config, seed, trials, n, k, backend, out, format);
    if (*verify_cmd) return verify_all(verify_seed);
    if (*check_cmd) return check_circuit(circuit);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const PartitionViolation& e) {
    std::cerr << "partition error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
