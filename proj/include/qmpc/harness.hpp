#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmpc/protocol.hpp"

namespace qmpc {

// Experiment configuration

struct ExperimentConfig {
  std::string experiment;
  int k = 3;
  size_t n = 4;
  size_t t = 2;
  size_t trials = 1000;
  uint64_t seed = 1;
  BackendKind backend = BackendKind::Tableau;
  std::set<PlayerId> corrupted;
  std::string adversary;
  std::string circuit;
  std::string out;
  std::string format = "jsonl";
  std::string target;
  std::vector<double> eps;
  size_t circuits = 0;
  size_t samples = 0;
  size_t states = 0;
  size_t workers = 0;

  void set(const std::string& key, const std::string& value);
  void validate() const;
};

const std::vector<std::string>& experiment_names();

// Flat key=value lines; "include <path>" pulls in another file relative to the current one.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::string_view text, const std::string& base_dir = ".");

// Circuit files

CircuitIR parse_circuit_text(std::string_view text);
CircuitIR parse_circuit(const std::string& path);

// At most max_wires wires and max_gates operations, measurements included.
CircuitIR random_circuit(Rng& rng, int players, size_t max_wires = 4, size_t max_gates = 20);
std::map<int, InputState> random_inputs(const CircuitIR& c, Rng& rng);

// Adversary scripts, one rule per line:
//   attack <phase> <point> [player=P] [wire=W] [hop=H] [stage=S] [limit=L] pauli=<label> [pos=0,1]
//   attack <phase> <point> ... clifford=<hex> [pos=...]
//   lie <phase> flip=<bits> [wire=W] [stage=S]
//   abort <tag> [player=P]
ScriptedAdversary parse_adversary_text(std::string_view text);
ScriptedAdversary parse_adversary(const std::string& path);

// Results

struct ResultRecord {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;
  double estimate = 0.0;
  double ci = 0.0;
  double bound = 0.0;
  std::string reference;
  bool pass = false;
  double wall_clock = 0.0;

  bool operator==(const ResultRecord&) const = default;
};

std::string to_jsonl(const std::vector<ResultRecord>& records);
std::string to_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> from_jsonl(std::string_view text);

// Writes the records and returns the exit code: 0 iff every record passes.
int emit(const std::vector<ResultRecord>& records, const std::string& path, const std::string& format);
int exit_code(const std::vector<ResultRecord>& records);

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

// Per-trial streams derived from (seed, index); results do not depend on the worker count.
uint64_t trial_seed(uint64_t seed, uint64_t index);
size_t parallel_count(size_t trials, size_t workers, const std::function<bool(size_t)>& trial);

// Acceptance suite

struct Criterion {
  int id = 0;
  std::string name;
  double time_limit = 0.0;
};

const std::vector<Criterion>& criteria();
std::vector<ResultRecord> run_criterion(int id, uint64_t seed);

}  // namespace qmpc
