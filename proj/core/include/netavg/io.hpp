#pragma once

#include <string>
#include <vector>

#include "netavg/averaging.hpp"
#include "netavg/bayes_net.hpp"
#include "netavg/dataset.hpp"
#include "netavg/evaluation.hpp"

namespace netavg {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Comma-separated, UTF-8, header row of variable names, one label per cell.
// No quoting: a comma is always a separator. Empty cells are rejected. When
// `variables` is given, the header must match their names in order and every
// cell must be a declared level; otherwise levels are the sorted distinct
// labels per column.
Dataset parse_csv(const std::string& text, const std::vector<Variable>* variables = nullptr);
Dataset read_csv(const std::string& path, const std::vector<Variable>* variables = nullptr);
std::string to_csv(const Dataset& data);

// Network document: {"nodes": [{"name", "levels", "parents", "cpt"}, ...]}.
// Node order defines the canonical indices. "cpt" is flat row-major over the
// listed parent order (first parent slowest), one probability row per parent
// configuration; rows are reordered internally if the parent list is not in
// index order.
DiscreteBayesNet parse_network_json(const std::string& text);
DiscreteBayesNet read_network_json(const std::string& path);

// Confidence document: {"nodes", "m", "p_hat", "direction_counts"}.
// direction_counts may be omitted, in which case each pair's presence count
// is attributed to the low->high orientation.
ConfidenceProfile parse_profile_json(const std::string& text);
ConfidenceProfile read_profile_json(const std::string& path);
std::string profile_to_json(const ConfidenceProfile& profile);

struct ExperimentConfig {
  std::string network_path;  // resolved against the config file's directory
  ExperimentSpec spec;
};

// Validation reports every problem at once, not just the first.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& base_dir);
ExperimentConfig read_experiment_config(const std::string& path);

}  // namespace netavg
