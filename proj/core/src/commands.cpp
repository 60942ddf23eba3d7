#include "netavg/commands.hpp"

#include <iostream>
#include <optional>

#include <json.hpp>

#include "netavg/averaging.hpp"
#include "netavg/error.hpp"
#include "netavg/evaluation.hpp"
#include "netavg/io.hpp"

namespace netavg {

namespace {

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    write_text_file(out_path, content);
  }
}

const char* algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::HillClimb: return "hc";
    case Algorithm::Iamb: return "iamb";
    case Algorithm::Mmhc: return "mmhc";
  }
  return "?";
}

nlohmann::ordered_json structure_json(const NodeSet& nodes, const Dag& dag) {
  nlohmann::ordered_json doc;
  doc["nodes"] = nodes.names();
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& [parent, child] : dag.edges()) {
    edges.push_back({nodes.name(parent), nodes.name(child)});
  }
  return doc;
}

nlohmann::ordered_json report_json(const NodeSet& nodes, const ThresholdReport& report) {
  nlohmann::ordered_json doc;
  doc["method"] = report.method;
  doc["t_hat"] = report.t_hat;
  doc["cutoff"] = report.cutoff;
  doc["l1_value"] = report.l1_value;
  auto& selected = doc["selected"] = nlohmann::ordered_json::array();
  for (int idx : report.selected) {
    const auto [a, b] = pair_from_index(nodes.size(), idx);
    selected.push_back({nodes.name(a), nodes.name(b)});
  }
  return doc;
}

}  // namespace

void cmd_sample(const SampleArgs& args) {
  if (args.out_csv.empty()) throw UsageError("sample needs an output path");
  const DiscreteBayesNet net = read_network_json(args.network_file);
  const Dataset data = forward_sample(net, args.n, args.seed);
  emit(args.out_csv, to_csv(data));
}

void cmd_learn(const LearnArgs& args) {
  const Dataset data = read_csv(args.data_csv);
  const LearnedStructure result = learn_structure(data, args.learner);

  nlohmann::ordered_json doc = structure_json(data.node_set(), result.dag);
  doc["algorithm"] = algorithm_name(args.learner.algorithm);
  auto& diag = doc["diagnostics"];
  diag["score_evaluations"] = result.diagnostics.score_evaluations;
  diag["ci_tests"] = result.diagnostics.ci_tests;
  if (result.diagnostics.final_score) diag["final_score"] = *result.diagnostics.final_score;
  emit(args.out, doc.dump(2) + "\n");
}

void cmd_avgnet(const AvgnetArgs& args) {
  const bool from_file = !args.confidences_file.empty();
  if (from_file == !args.data_csv.empty()) {
    throw UsageError("avgnet needs exactly one of --data and --confidences-file");
  }

  std::optional<Dataset> data;
  ConfidenceProfile profile;
  if (from_file) {
    profile = read_profile_json(args.confidences_file);
  } else {
    data = read_csv(args.data_csv);
    profile = edge_confidence(*data, args.learner, args.m, args.seed, args.jobs);
  }

  const ThresholdReport report =
      apply_threshold_method(args.method, profile, data ? &*data : nullptr, args.learner,
                             args.m, args.seed, args.jobs);
  const AveragedNetwork averaged = assign_directions(profile, report.selected);

  nlohmann::ordered_json doc;
  doc["profile"] = nlohmann::ordered_json::parse(profile_to_json(profile));
  doc["report"] = report_json(profile.nodes, report);
  doc["network"] = structure_json(profile.nodes, averaged.dag);
  emit(args.out, doc.dump(2) + "\n");
}

void cmd_experiment(const ExperimentArgs& args) {
  ExperimentConfig config = read_experiment_config(args.config_file);
  config.spec.jobs = args.jobs;
  const DiscreteBayesNet truth = read_network_json(config.network_path);

  const ExperimentTable table = run_experiment(truth, config.spec);
  std::vector<AggregateRow> rows = aggregate_rows(table);
  const bool has_l1 =
      std::find(config.spec.methods.begin(), config.spec.methods.end(), "l1") !=
      config.spec.methods.end();
  if (has_l1 && config.spec.methods.size() > 1) {
    const std::vector<AggregateRow> deltas = threshold_delta_rows(table);
    rows.insert(rows.end(), deltas.begin(), deltas.end());
  }
  emit(args.out, to_tsv(rows));
}

}  // namespace netavg
