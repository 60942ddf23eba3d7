#include "netavg/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netavg/error.hpp"

namespace netavg {

namespace {

using nlohmann::json;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string::size_type start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  // A trailing newline leaves one empty tail entry; drop it.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

json parse_json_text(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw DataError(std::string(what) + ": not valid JSON");
  return doc;
}

const json& require_key(const json& doc, const char* key, const char* what) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw DataError(std::string(what) + ": missing \"" + key + "\"");
  return *it;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw DataError("cannot read " + path);
  return std::move(buffer).str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("cannot write " + path);
}

Dataset parse_csv(const std::string& text, const std::vector<Variable>* variables) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw DataError("CSV is empty");

  const std::vector<std::string> names = split_fields(lines[0]);
  const std::size_t n_cols = names.size();
  if (n_cols < 1) throw DataError("CSV header is empty");
  {
    std::set<std::string> seen;
    for (const auto& name : names) {
      if (name.empty()) throw DataError("CSV header has an empty column name");
      if (!seen.insert(name).second) throw DataError("duplicate column name: " + name);
    }
  }
  if (variables) {
    if (variables->size() != n_cols) {
      throw DataError("CSV has " + std::to_string(n_cols) + " columns, expected " +
                      std::to_string(variables->size()));
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      if ((*variables)[c].name != names[c]) {
        throw DataError("CSV column " + std::to_string(c + 1) + " is '" + names[c] +
                        "', expected '" + (*variables)[c].name + "'");
      }
    }
  }
  if (lines.size() < 2) throw DataError("CSV has no data rows");

  const std::size_t n_rows = lines.size() - 1;
  std::vector<std::vector<std::string>> cells(n_cols, std::vector<std::string>(n_rows));
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::vector<std::string> fields = split_fields(lines[r + 1]);
    if (fields.size() != n_cols) {
      throw DataError("line " + std::to_string(r + 2) + ": expected " + std::to_string(n_cols) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (fields[c].empty()) {
        throw DataError("line " + std::to_string(r + 2) + ": missing value in column '" +
                        names[c] + "'");
      }
      cells[c][r] = std::move(fields[c]);
    }
  }

  std::vector<Variable> vars;
  std::vector<std::vector<std::int32_t>> columns(n_cols, std::vector<std::int32_t>(n_rows));
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (variables) {
      const Variable& var = (*variables)[c];
      for (std::size_t r = 0; r < n_rows; ++r) {
        const int level = var.level_index(cells[c][r]);
        if (level < 0) {
          throw DataError("line " + std::to_string(r + 2) + ": unknown level '" + cells[c][r] +
                          "' in column '" + var.name + "'");
        }
        columns[c][r] = level;
      }
      vars.push_back(var);
    } else {
      std::map<std::string, std::int32_t> index;
      for (std::size_t r = 0; r < n_rows; ++r) index.emplace(cells[c][r], 0);
      if (index.size() < 2) {
        throw DataError("column '" + names[c] + "' has a single distinct level");
      }
      std::vector<std::string> levels;
      levels.reserve(index.size());
      for (auto& [label, idx] : index) {
        idx = static_cast<std::int32_t>(levels.size());
        levels.push_back(label);
      }
      for (std::size_t r = 0; r < n_rows; ++r) columns[c][r] = index[cells[c][r]];
      vars.emplace_back(names[c], std::move(levels));
    }
  }
  return Dataset(std::move(vars), std::move(columns));
}

Dataset read_csv(const std::string& path, const std::vector<Variable>* variables) {
  try {
    return parse_csv(read_text_file(path), variables);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string to_csv(const Dataset& data) {
  const auto check_label = [](const std::string& label) {
    if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos ||
        label.find('\r') != std::string::npos) {
      throw DataError("label '" + label + "' cannot be written to unquoted CSV");
    }
  };
  std::string out;
  for (int c = 0; c < data.column_count(); ++c) {
    check_label(data.variable(c).name);
    for (const auto& level : data.variable(c).levels) check_label(level);
    if (c > 0) out += ',';
    out += data.variable(c).name;
  }
  out += '\n';
  for (int r = 0; r < data.row_count(); ++r) {
    for (int c = 0; c < data.column_count(); ++c) {
      if (c > 0) out += ',';
      out += data.variable(c).levels[static_cast<std::size_t>(data.value(r, c))];
    }
    out += '\n';
  }
  return out;
}

DiscreteBayesNet parse_network_json(const std::string& text) {
  const json doc = parse_json_text(text, "network file");
  const json& nodes = require_key(doc, "nodes", "network file");
  if (!nodes.is_array() || nodes.empty()) {
    throw DataError("network file: \"nodes\" must be a non-empty array");
  }

  std::vector<std::string> names;
  for (const auto& node : nodes) {
    const json& name = require_key(node, "name", "network node");
    if (!name.is_string()) throw DataError("network node: \"name\" must be a string");
    names.push_back(name.get<std::string>());
  }
  NodeSet node_set(names);

  std::vector<Variable> variables;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& levels = require_key(nodes[i], "levels", "network node");
    if (!levels.is_array()) throw DataError("node '" + names[i] + "': \"levels\" must be an array");
    std::vector<std::string> labels;
    for (const auto& level : levels) {
      if (!level.is_string()) throw DataError("node '" + names[i] + "': levels must be strings");
      labels.push_back(level.get<std::string>());
    }
    variables.emplace_back(names[i], std::move(labels));
  }

  Dag dag(node_set);
  std::vector<std::vector<int>> listed_parents(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& parents = require_key(nodes[i], "parents", "network node");
    if (!parents.is_array()) {
      throw DataError("node '" + names[i] + "': \"parents\" must be an array");
    }
    for (const auto& parent : parents) {
      if (!parent.is_string()) throw DataError("node '" + names[i] + "': parents must be names");
      const int p = node_set.index_of(parent.get<std::string>());
      if (p < 0) {
        throw DataError("node '" + names[i] + "': unknown parent '" +
                        parent.get<std::string>() + "'");
      }
      listed_parents[i].push_back(p);
    }
    try {
      for (int p : listed_parents[i]) dag.add_edge(p, static_cast<int>(i));
    } catch (const UsageError& e) {
      throw DataError("node '" + names[i] + "': " + e.what());
    }
  }

  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& cpt = require_key(nodes[i], "cpt", "network node");
    if (!cpt.is_array()) throw DataError("node '" + names[i] + "': \"cpt\" must be an array");
    std::vector<double> flat;
    for (const auto& value : cpt) {
      if (!value.is_number()) throw DataError("node '" + names[i] + "': cpt entries must be numbers");
      flat.push_back(value.get<double>());
    }

    const int r = variables[i].cardinality();
    const std::vector<int>& listed = listed_parents[i];
    std::vector<int> listed_cards;
    std::int64_t q = 1;
    for (int p : listed) {
      listed_cards.push_back(variables[static_cast<std::size_t>(p)].cardinality());
      q *= listed_cards.back();
    }
    if (static_cast<std::int64_t>(flat.size()) != q * r) {
      throw DataError("node '" + names[i] + "': cpt has " + std::to_string(flat.size()) +
                      " entries, expected " + std::to_string(q * r));
    }

    // The net stores parents in index order; permute the file's rows if the
    // listed order differs.
    const std::vector<int>& canonical = dag.parents(static_cast<int>(i));
    std::vector<int> canonical_cards;
    for (int p : canonical) {
      canonical_cards.push_back(variables[static_cast<std::size_t>(p)].cardinality());
    }
    std::vector<double> table(flat.size());
    std::vector<int> assignment(canonical.size());
    for (std::int64_t config = 0; config < q; ++config) {
      std::int64_t rest = config;
      for (std::size_t pi = canonical.size(); pi-- > 0;) {
        assignment[pi] = static_cast<int>(rest % canonical_cards[pi]);
        rest /= canonical_cards[pi];
      }
      std::int64_t file_config = 0;
      for (std::size_t pi = 0; pi < listed.size(); ++pi) {
        const auto where =
            std::find(canonical.begin(), canonical.end(), listed[pi]) - canonical.begin();
        file_config = file_config * listed_cards[pi] + assignment[static_cast<std::size_t>(where)];
      }
      for (int level = 0; level < r; ++level) {
        table[static_cast<std::size_t>(config) * r + level] =
            flat[static_cast<std::size_t>(file_config) * r + level];
      }
    }

    try {
      cpts.emplace_back(static_cast<int>(i), canonical, canonical_cards, r, std::move(table));
    } catch (const UsageError& e) {
      throw DataError("node '" + names[i] + "': " + e.what());
    }
  }

  return DiscreteBayesNet(std::move(dag), std::move(variables), std::move(cpts));
}

DiscreteBayesNet read_network_json(const std::string& path) {
  try {
    return parse_network_json(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

ConfidenceProfile parse_profile_json(const std::string& text) {
  const json doc = parse_json_text(text, "confidence file");

  const json& nodes = require_key(doc, "nodes", "confidence file");
  if (!nodes.is_array() || nodes.size() < 2) {
    throw DataError("confidence file: \"nodes\" must list at least 2 names");
  }
  std::vector<std::string> names;
  for (const auto& name : nodes) {
    if (!name.is_string()) throw DataError("confidence file: node names must be strings");
    names.push_back(name.get<std::string>());
  }

  ConfidenceProfile profile;
  profile.nodes = NodeSet(std::move(names));

  const json& m = require_key(doc, "m", "confidence file");
  if (!m.is_number_integer() || m.get<std::int64_t>() < 1) {
    throw DataError("confidence file: \"m\" must be a positive integer");
  }
  profile.m = m.get<int>();

  const json& p_hat = require_key(doc, "p_hat", "confidence file");
  const auto k = static_cast<std::size_t>(possible_edge_count(profile.nodes.size()));
  if (!p_hat.is_array() || p_hat.size() != k) {
    throw DataError("confidence file: \"p_hat\" must have one value per possible edge (" +
                    std::to_string(k) + ")");
  }
  for (const auto& value : p_hat) {
    if (!value.is_number()) throw DataError("confidence file: p_hat entries must be numbers");
    const double p = value.get<double>();
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DataError("confidence file: p_hat entries must lie in [0, 1]");
    }
    profile.p_hat.push_back(p);
  }

  profile.direction_counts.assign(k, {0, 0});
  if (doc.contains("direction_counts")) {
    const json& counts = doc["direction_counts"];
    if (!counts.is_array() || counts.size() != k) {
      throw DataError("confidence file: \"direction_counts\" must have one pair per edge");
    }
    for (std::size_t i = 0; i < k; ++i) {
      const json& pair = counts[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_number_integer()) {
        throw DataError("confidence file: direction counts must be [forward, reverse] integers");
      }
      const auto fwd = pair[0].get<std::int64_t>();
      const auto rev = pair[1].get<std::int64_t>();
      if (fwd < 0 || rev < 0 || fwd + rev > profile.m) {
        throw DataError("confidence file: direction counts must be nonnegative and sum to at most m");
      }
      profile.direction_counts[i] = {fwd, rev};
    }
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      profile.direction_counts[i][0] = std::llround(profile.p_hat[i] * profile.m);
    }
  }
  return profile;
}

ConfidenceProfile read_profile_json(const std::string& path) {
  try {
    return parse_profile_json(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string profile_to_json(const ConfidenceProfile& profile) {
  nlohmann::ordered_json doc;
  doc["nodes"] = profile.nodes.names();
  doc["m"] = profile.m;
  doc["p_hat"] = profile.p_hat;
  auto& counts = doc["direction_counts"] = nlohmann::ordered_json::array();
  for (const auto& pair : profile.direction_counts) {
    counts.push_back({pair[0], pair[1]});
  }
  return doc.dump(2) + "\n";
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& base_dir) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw UsageError("experiment config: not valid JSON");
  if (!doc.is_object()) throw UsageError("experiment config: expected a JSON object");

  std::vector<std::string> problems;
  const auto complain = [&problems](const std::string& what) { problems.push_back(what); };

  ExperimentConfig config;

  if (!doc.contains("network") || !doc["network"].is_string() ||
      doc["network"].get<std::string>().empty()) {
    complain("\"network\" must name the reference network file");
  } else {
    const std::filesystem::path path(doc["network"].get<std::string>());
    config.network_path =
        path.is_absolute() ? path.string() : (std::filesystem::path(base_dir) / path).string();
  }

  if (doc.contains("sample_sizes")) {
    if (!doc["sample_sizes"].is_array() || doc["sample_sizes"].empty()) {
      complain("\"sample_sizes\" must be a non-empty array");
    } else {
      for (const auto& n : doc["sample_sizes"]) {
        if (!n.is_number_integer() || n.get<std::int64_t>() < 1) {
          complain("\"sample_sizes\" entries must be positive integers");
          break;
        }
        config.spec.sample_sizes.push_back(n.get<int>());
      }
    }
  } else {
    complain("\"sample_sizes\" is required");
  }

  const auto read_positive_int = [&](const char* key, int fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc[key].is_number_integer() || doc[key].get<std::int64_t>() < 1) {
      complain(std::string("\"") + key + "\" must be a positive integer");
      return fallback;
    }
    return doc[key].get<int>();
  };
  config.spec.m = read_positive_int("m", 200);
  config.spec.repeats = read_positive_int("repeats", 10);

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0) {
      complain("\"seed\" must be a nonnegative integer");
    } else {
      config.spec.seed = doc["seed"].get<std::uint64_t>();
    }
  }

  if (doc.contains("methods")) {
    if (!doc["methods"].is_array() || doc["methods"].empty()) {
      complain("\"methods\" must be a non-empty array");
    } else {
      config.spec.methods.clear();
      for (const auto& method : doc["methods"]) {
        if (!method.is_string()) {
          complain("\"methods\" entries must be strings");
          continue;
        }
        const std::string name = method.get<std::string>();
        const std::string problem = check_threshold_method(name);
        if (!problem.empty()) {
          complain(problem);
        } else {
          config.spec.methods.push_back(name);
        }
      }
    }
  }

  if (doc.contains("learner")) {
    const json& learner = doc["learner"];
    if (!learner.is_object()) {
      complain("\"learner\" must be an object");
    } else {
      if (learner.contains("algorithm")) {
        const std::string algo =
            learner["algorithm"].is_string() ? learner["algorithm"].get<std::string>() : "";
        if (algo == "hc") {
          config.spec.learner.algorithm = Algorithm::HillClimb;
        } else if (algo == "iamb") {
          config.spec.learner.algorithm = Algorithm::Iamb;
        } else if (algo == "mmhc") {
          config.spec.learner.algorithm = Algorithm::Mmhc;
        } else {
          complain("learner.algorithm must be one of hc, iamb, mmhc");
        }
      }
      if (learner.contains("test")) {
        const std::string test =
            learner["test"].is_string() ? learner["test"].get<std::string>() : "";
        if (test == "shrinkage-mi") {
          config.spec.learner.test = CiTestKind::ShrinkageMi;
        } else if (test == "ml-g2") {
          config.spec.learner.test = CiTestKind::MlG2;
        } else {
          complain("learner.test must be shrinkage-mi or ml-g2");
        }
      }
      if (learner.contains("alpha")) {
        if (!learner["alpha"].is_number() || !(learner["alpha"].get<double>() > 0.0) ||
            !(learner["alpha"].get<double>() < 1.0)) {
          complain("learner.alpha must lie strictly between 0 and 1");
        } else {
          config.spec.learner.alpha = learner["alpha"].get<double>();
        }
      }
      if (learner.contains("ess")) {
        if (!learner["ess"].is_number() || !(learner["ess"].get<double>() > 0.0)) {
          complain("learner.ess must be positive");
        } else {
          config.spec.learner.ess = learner["ess"].get<double>();
        }
      }
      const auto read_knob = [&](const char* key, int& target) {
        if (!learner.contains(key)) return;
        if (!learner[key].is_number_integer() || learner[key].get<std::int64_t>() < 0) {
          complain(std::string("learner.") + key + " must be a nonnegative integer");
        } else {
          target = learner[key].get<int>();
        }
      };
      read_knob("restarts", config.spec.learner.restarts);
      read_knob("tabu", config.spec.learner.tabu);
      if (learner.contains("max_parents") && !learner["max_parents"].is_null()) {
        if (!learner["max_parents"].is_number_integer() ||
            learner["max_parents"].get<std::int64_t>() < 0) {
          complain("learner.max_parents must be a nonnegative integer or null");
        } else {
          config.spec.learner.max_parents = learner["max_parents"].get<int>();
        }
      }
    }
  }

  if (!problems.empty()) {
    std::string message = "experiment config: " + problems[0];
    for (std::size_t i = 1; i < problems.size(); ++i) message += "; " + problems[i];
    throw UsageError(message);
  }
  return config;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  const std::string text = read_text_file(path);
  return parse_experiment_config(text,
                                 std::filesystem::path(path).parent_path().string());
}

}  // namespace netavg
