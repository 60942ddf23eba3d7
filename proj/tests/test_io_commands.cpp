#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "netavg/commands.hpp"
#include "netavg/error.hpp"
#include "netavg/io.hpp"
#include "test_support.hpp"

using namespace netavg;
using netavg::test_support::fixture_path;

namespace {

namespace fs = std::filesystem;

// Per-case scratch directory, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("netavg_io_test_" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Two-parent node written with both parent orders; the rows are permuted to
// keep the distribution identical, so the loader must agree on the joint.
const char* kColliderAB = R"({"nodes": [
  {"name": "A", "levels": ["a0", "a1"], "parents": [], "cpt": [0.3, 0.7]},
  {"name": "B", "levels": ["b0", "b1", "b2"], "parents": [], "cpt": [0.2, 0.5, 0.3]},
  {"name": "C", "levels": ["c0", "c1"], "parents": ["A", "B"],
   "cpt": [0.9, 0.1, 0.8, 0.2, 0.7, 0.3, 0.4, 0.6, 0.3, 0.7, 0.2, 0.8]}
]})";

const char* kColliderBA = R"({"nodes": [
  {"name": "A", "levels": ["a0", "a1"], "parents": [], "cpt": [0.3, 0.7]},
  {"name": "B", "levels": ["b0", "b1", "b2"], "parents": [], "cpt": [0.2, 0.5, 0.3]},
  {"name": "C", "levels": ["c0", "c1"], "parents": ["B", "A"],
   "cpt": [0.9, 0.1, 0.4, 0.6, 0.8, 0.2, 0.3, 0.7, 0.7, 0.3, 0.2, 0.8]}
]})";

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("io_commands") {

TEST_CASE("csv parsing accepts unix, dos, and unterminated endings") {
  const Dataset base = parse_csv("x,y\nlo,one\nhi,two\nlo,two\n");
  CHECK(base.row_count() == 3);
  CHECK(base.column_count() == 2);
  CHECK(base.variable(0).levels == std::vector<std::string>{"hi", "lo"});  // sorted distinct
  CHECK(base.value(0, 0) == 1);
  CHECK(base.value(1, 0) == 0);
  CHECK(base.value(0, 1) == 0);

  const std::string canonical = to_csv(base);
  CHECK(to_csv(parse_csv("x,y\r\nlo,one\r\nhi,two\r\nlo,two\r\n")) == canonical);
  CHECK(to_csv(parse_csv("x,y\nlo,one\nhi,two\nlo,two")) == canonical);
}

TEST_CASE("csv header problems are rejected") {
  CHECK_THROWS_AS(parse_csv(""), DataError);
  CHECK_THROWS_AS(parse_csv("x,y\n"), DataError);  // no data rows
  CHECK_THROWS_WITH_AS(parse_csv("x,x\na,b\nb,a\n"), "duplicate column name: x", DataError);
  CHECK_THROWS_WITH_AS(parse_csv("x,,y\na,b,c\nc,a,b\n"), "CSV header has an empty column name",
                       DataError);
}

TEST_CASE("csv cell problems name the offending line") {
  CHECK_THROWS_WITH_AS(parse_csv("x,y\nlo,one\nhi\n"), "line 3: expected 2 fields, found 1",
                       DataError);
  CHECK_THROWS_WITH_AS(parse_csv("x,y\nlo,\nhi,two\n"), "line 2: missing value in column 'y'",
                       DataError);
  CHECK_THROWS_WITH_AS(parse_csv("x,y\nlo,one\nlo,two\n"),
                       "column 'x' has a single distinct level", DataError);
}

TEST_CASE("fixed variable mode pins names, order, and levels") {
  const std::vector<Variable> vars{Variable("x", {"lo", "hi"}),
                                   Variable("y", {"two", "one", "zero"})};

  // Declared level order wins over lexicographic order.
  const Dataset data = parse_csv("x,y\nlo,zero\nhi,two\nlo,zero\n", &vars);
  CHECK(data.variable(1).levels == std::vector<std::string>{"two", "one", "zero"});
  CHECK(data.value(0, 1) == 2);
  CHECK(data.value(1, 1) == 0);
  // Constant columns are fine here: the level set is declared, not inferred.
  CHECK(data.variable(0).cardinality() == 2);

  CHECK_THROWS_WITH_AS(parse_csv("x\nlo\n", &vars), "CSV has 1 columns, expected 2", DataError);
  CHECK_THROWS_WITH_AS(parse_csv("x,z\nlo,zero\n", &vars), "CSV column 2 is 'z', expected 'y'",
                       DataError);
  CHECK_THROWS_WITH_AS(parse_csv("x,y\nlo,zero\nlo,three\n", &vars),
                       "line 3: unknown level 'three' in column 'y'", DataError);
}

TEST_CASE("csv writing round trips and rejects unwritable labels") {
  const std::string text = "x,y\nhi,one\nlo,two\nhi,one\n";
  const Dataset data = parse_csv(text);
  CHECK(to_csv(data) == text);
  const Dataset again = parse_csv(to_csv(data));
  CHECK(again.row_count() == data.row_count());
  for (int r = 0; r < data.row_count(); ++r)
    for (int c = 0; c < data.column_count(); ++c) CHECK(again.value(r, c) == data.value(r, c));

  // A label containing a comma cannot come from parse_csv, so build directly.
  const std::vector<Variable> bad{Variable("x", {"a,b", "c"}), Variable("y", {"u", "v"})};
  const Dataset direct(bad, {std::vector<std::int32_t>{0, 1}, std::vector<std::int32_t>{0, 1}});
  CHECK_THROWS_WITH_AS(to_csv(direct), "label 'a,b' cannot be written to unquoted CSV", DataError);
}

TEST_CASE("network json loads the bundled chain") {
  const DiscreteBayesNet net = read_network_json(fixture_path("three_node.json"));
  CHECK(net.node_count() == 3);
  CHECK(net.variable(0).name == "A");
  CHECK(net.variable(1).cardinality() == 3);
  CHECK(net.dag().edges() == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
  CHECK(net.cpt(0).probability(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(net.cpt(1).probability(1, 2) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(parameter_count(net) == 8);
}

TEST_CASE("listed parent order does not change the distribution") {
  const DiscreteBayesNet ab = parse_network_json(kColliderAB);
  const DiscreteBayesNet ba = parse_network_json(kColliderBA);
  const JointDistribution joint_ab = exact_joint(ab);
  const JointDistribution joint_ba = exact_joint(ba);
  REQUIRE(joint_ab.size() == 12);
  REQUIRE(joint_ba.size() == 12);
  for (std::size_t config = 0; config < joint_ab.size(); ++config) {
    CHECK(joint_ab.probability(config) ==
          doctest::Approx(joint_ba.probability(config)).epsilon(1e-12));
  }
}

TEST_CASE("network json rejects malformed documents") {
  CHECK_THROWS_AS(parse_network_json("not json at all"), DataError);
  CHECK_THROWS_AS(parse_network_json(R"({"edges": []})"), DataError);
  CHECK_THROWS_AS(parse_network_json(R"({"nodes": []})"), DataError);

  const std::string base(kColliderAB);
  // duplicate node name
  CHECK_THROWS_AS(parse_network_json(replace_once(base, R"("name": "B")", R"("name": "A")")),
                  DataError);
  // unknown parent
  CHECK_THROWS_AS(parse_network_json(replace_once(base, R"(["A", "B"])", R"(["A", "Q"])")),
                  DataError);
  // cpt length no longer matches the parent configurations
  CHECK_THROWS_AS(parse_network_json(replace_once(base, "0.2, 0.8]", "0.2]")), DataError);
  // row off by 0.02 is past the renormalization band
  CHECK_THROWS_AS(parse_network_json(replace_once(base, "[0.3, 0.7]", "[0.32, 0.7]")), DataError);

  // a two-node cycle through the parent lists
  CHECK_THROWS_AS(parse_network_json(R"({"nodes": [
    {"name": "A", "levels": ["0", "1"], "parents": ["B"], "cpt": [0.5, 0.5, 0.5, 0.5]},
    {"name": "B", "levels": ["0", "1"], "parents": ["A"], "cpt": [0.5, 0.5, 0.5, 0.5]}
  ]})"),
                  DataError);
}

TEST_CASE("network reader prefixes the file path") {
  TempDir tmp;
  write_text_file(tmp.file("broken.json"), R"({"nodes": []})");
  try {
    read_network_json(tmp.file("broken.json"));
    CHECK(false);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind(tmp.file("broken.json"), 0) == 0);
  }
}

TEST_CASE("profile json round trips exactly") {
  const ConfidenceProfile profile = test_support::worked_profile();
  const ConfidenceProfile parsed = parse_profile_json(profile_to_json(profile));
  CHECK(parsed.nodes.names() == profile.nodes.names());
  CHECK(parsed.m == profile.m);
  CHECK(parsed.p_hat == profile.p_hat);
  CHECK(parsed.direction_counts == profile.direction_counts);
}

TEST_CASE("absent direction counts default to the low-to-high orientation") {
  const ConfidenceProfile profile = parse_profile_json(
      R"({"nodes": ["A", "B", "C"], "m": 100, "p_hat": [0.25, 0.5, 0.75]})");
  CHECK(profile.direction_counts[0] == std::array<std::int64_t, 2>{25, 0});
  CHECK(profile.direction_counts[1] == std::array<std::int64_t, 2>{50, 0});
  CHECK(profile.direction_counts[2] == std::array<std::int64_t, 2>{75, 0});
}

TEST_CASE("profile json rejects malformed documents") {
  // one p_hat entry short
  CHECK_THROWS_AS(
      parse_profile_json(R"({"nodes": ["A", "B", "C"], "m": 10, "p_hat": [0.5, 0.5]})"),
      DataError);
  // confidence outside the unit interval
  CHECK_THROWS_AS(
      parse_profile_json(R"({"nodes": ["A", "B"], "m": 10, "p_hat": [1.5]})"), DataError);
  // m must be positive
  CHECK_THROWS_AS(parse_profile_json(R"({"nodes": ["A", "B"], "m": 0, "p_hat": [0.5]})"),
                  DataError);
  // fewer than two nodes
  CHECK_THROWS_AS(parse_profile_json(R"({"nodes": ["A"], "m": 10, "p_hat": []})"), DataError);
  // negative count
  CHECK_THROWS_AS(parse_profile_json(
                      R"({"nodes": ["A", "B"], "m": 10, "p_hat": [0.5],
                          "direction_counts": [[-1, 3]]})"),
                  DataError);
  // orientation counts exceeding the replicate count
  CHECK_THROWS_AS(parse_profile_json(
                      R"({"nodes": ["A", "B"], "m": 10, "p_hat": [0.5],
                          "direction_counts": [[8, 8]]})"),
                  DataError);
}

TEST_CASE("experiment config fills defaults and resolves relative paths") {
  const ExperimentConfig config = parse_experiment_config(
      R"({"network": "net.json", "sample_sizes": [100, 500]})", "/cfg/dir");
  CHECK(config.network_path == "/cfg/dir/net.json");
  CHECK(config.spec.sample_sizes == std::vector<int>{100, 500});
  CHECK(config.spec.m == 200);
  CHECK(config.spec.repeats == 10);
  CHECK(config.spec.methods == std::vector<std::string>{"l1"});

  const ExperimentConfig absolute = parse_experiment_config(
      R"({"network": "/elsewhere/net.json", "sample_sizes": [50]})", "/cfg/dir");
  CHECK(absolute.network_path == "/elsewhere/net.json");
}

TEST_CASE("experiment config reports every problem at once") {
  try {
    parse_experiment_config(
        R"({"sample_sizes": [], "repeats": 0, "methods": ["l1", "warp"]})", ".");
    CHECK(false);
  } catch (const UsageError& e) {
    const std::string what = e.what();
    CHECK(what.rfind("experiment config: ", 0) == 0);
    CHECK(what.find("\"network\"") != std::string::npos);
    CHECK(what.find("\"sample_sizes\"") != std::string::npos);
    CHECK(what.find("\"repeats\"") != std::string::npos);
    CHECK(what.find("warp") != std::string::npos);
    CHECK(std::count(what.begin(), what.end(), ';') == 3);
  }
}

TEST_CASE("sample command writes a parseable deterministic csv") {
  TempDir tmp;
  SampleArgs args;
  args.network_file = fixture_path("three_node.json");
  args.n = 40;
  args.seed = 7;

  args.out_csv = "";
  CHECK_THROWS_WITH_AS(cmd_sample(args), "sample needs an output path", UsageError);

  args.out_csv = tmp.file("zero.csv");
  args.n = 0;
  CHECK_THROWS_AS(cmd_sample(args), UsageError);

  args.n = 40;
  args.out_csv = tmp.file("sample.csv");
  cmd_sample(args);
  const DiscreteBayesNet net = read_network_json(args.network_file);
  const Dataset data = read_csv(args.out_csv, &net.variables());
  CHECK(data.row_count() == 40);
  CHECK(data.column_count() == 3);

  const std::string first = read_text_file(args.out_csv);
  args.out_csv = tmp.file("again.csv");
  cmd_sample(args);
  CHECK(read_text_file(args.out_csv) == first);
}

TEST_CASE("sample command handles deterministic networks via declared levels") {
  TempDir tmp;
  // Every probability is 0 or 1, so each column is constant. The declared
  // level sets keep such a file loadable.
  write_text_file(tmp.file("onehot.json"), R"({"nodes": [
    {"name": "A", "levels": ["a0", "a1"], "parents": [], "cpt": [1.0, 0.0]},
    {"name": "B", "levels": ["b0", "b1"], "parents": ["A"], "cpt": [0.0, 1.0, 1.0, 0.0]}
  ]})");
  SampleArgs args;
  args.network_file = tmp.file("onehot.json");
  args.n = 5;
  args.seed = 1;
  args.out_csv = tmp.file("onehot.csv");
  cmd_sample(args);

  const DiscreteBayesNet net = read_network_json(args.network_file);
  const Dataset data = read_csv(args.out_csv, &net.variables());
  for (int r = 0; r < data.row_count(); ++r) {
    CHECK(data.value(r, 0) == 0);
    CHECK(data.value(r, 1) == 1);
  }
  // Without the declared variables the constant columns are rejected.
  CHECK_THROWS_AS(read_csv(args.out_csv), DataError);
}

TEST_CASE("learn command emits the structure with diagnostics") {
  TempDir tmp;
  SampleArgs sample;
  sample.network_file = fixture_path("three_node.json");
  sample.n = 1500;
  sample.seed = 7;
  sample.out_csv = tmp.file("chain.csv");
  cmd_sample(sample);

  LearnArgs args;
  args.data_csv = sample.out_csv;
  args.learner.ess = 10.0;
  args.out = tmp.file("learned.json");
  cmd_learn(args);

  const nlohmann::json doc = nlohmann::json::parse(read_text_file(args.out));
  CHECK(doc["nodes"] == nlohmann::json({"A", "B", "C"}));
  CHECK(doc["algorithm"] == "hc");
  CHECK(doc["diagnostics"]["score_evaluations"].get<std::int64_t>() > 0);
  CHECK(doc["diagnostics"].contains("final_score"));

  std::vector<std::pair<std::string, std::string>> skeleton;
  for (const auto& edge : doc["edges"]) {
    std::string a = edge[0].get<std::string>(), b = edge[1].get<std::string>();
    if (a > b) std::swap(a, b);
    skeleton.emplace_back(a, b);
  }
  std::sort(skeleton.begin(), skeleton.end());
  CHECK(skeleton == std::vector<std::pair<std::string, std::string>>{{"A", "B"}, {"B", "C"}});
}

TEST_CASE("learn command surfaces input problems") {
  TempDir tmp;
  write_text_file(tmp.file("one.csv"), "x\na\nb\n");
  LearnArgs args;
  args.data_csv = tmp.file("one.csv");
  CHECK_THROWS_AS(cmd_learn(args), UsageError);  // needs at least 2 columns

  write_text_file(tmp.file("ragged.csv"), "x,y\na,b\nc\n");
  args.data_csv = tmp.file("ragged.csv");
  try {
    cmd_learn(args);
    CHECK(false);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("avgnet command reproduces the stored-confidence selection") {
  TempDir tmp;
  AvgnetArgs args;
  args.confidences_file = fixture_path("example_profile.json");
  args.out = tmp.file("avgnet.json");
  cmd_avgnet(args);

  const nlohmann::json doc = nlohmann::json::parse(read_text_file(args.out));
  CHECK(doc["report"]["method"] == "l1");
  CHECK(doc["report"]["cutoff"].get<double>() == 0.3921);
  CHECK(std::abs(doc["report"]["t_hat"].get<double>() - 0.4999816) < 1e-3);
  CHECK(doc["report"]["selected"] ==
        nlohmann::json::parse(R"([["A", "D"], ["B", "D"], ["C", "D"]])"));
  CHECK(doc["network"]["edges"] ==
        nlohmann::json::parse(R"([["A", "D"], ["B", "D"], ["C", "D"]])"));

  // the embedded profile is the input, byte-for-byte through the round trip
  const nlohmann::json original =
      nlohmann::json::parse(read_text_file(args.confidences_file));
  CHECK(doc["profile"]["p_hat"] == original["p_hat"]);
  CHECK(doc["profile"]["m"] == original["m"]);
  CHECK(doc["profile"]["nodes"] == original["nodes"]);

  // and it parses back through the profile reader
  const ConfidenceProfile reparsed = parse_profile_json(doc["profile"].dump());
  CHECK(reparsed.p_hat == read_profile_json(args.confidences_file).p_hat);
}

TEST_CASE("avgnet command needs exactly one input source") {
  AvgnetArgs args;
  CHECK_THROWS_AS(cmd_avgnet(args), UsageError);
  args.data_csv = "a.csv";
  args.confidences_file = "b.json";
  CHECK_THROWS_AS(cmd_avgnet(args), UsageError);
}

TEST_CASE("avgnet command end to end on data") {
  TempDir tmp;
  const Dataset data = forward_sample(test_support::strong_pair_net(), 200, 11);
  write_text_file(tmp.file("pair.csv"), to_csv(data));

  AvgnetArgs args;
  args.data_csv = tmp.file("pair.csv");
  args.m = 10;
  args.seed = 3;
  args.method = "adhoc:0.5";
  args.jobs = 2;
  args.out = tmp.file("out.json");
  cmd_avgnet(args);

  const nlohmann::json doc = nlohmann::json::parse(read_text_file(args.out));
  CHECK(doc.contains("profile"));
  CHECK(doc["report"]["method"] == "adhoc:0.5");
  CHECK(doc["report"]["selected"] == nlohmann::json::parse(R"([["A", "B"]])"));
  CHECK(doc["network"]["nodes"] == nlohmann::json({"A", "B"}));

  const std::string first = read_text_file(args.out);
  args.jobs = 1;
  args.out = tmp.file("serial.json");
  cmd_avgnet(args);
  CHECK(read_text_file(args.out) == first);
}

TEST_CASE("experiment command writes a deterministic tsv") {
  TempDir tmp;
  fs::copy_file(fixture_path("three_node.json"), tmp.file("net.json"));
  write_text_file(tmp.file("config.json"),
                  R"({"network": "net.json", "sample_sizes": [100], "m": 6,
                      "repeats": 2, "seed": 9, "methods": ["l1", "adhoc:0.9"]})");

  ExperimentArgs args;
  args.config_file = tmp.file("config.json");
  args.jobs = 2;
  args.out = tmp.file("table.tsv");
  cmd_experiment(args);

  const std::string tsv = read_text_file(args.out);
  CHECK(tsv.rfind("n\tn_over_p\tmethod\tmetric\tmean\tci_low\tci_high\n", 0) == 0);
  CHECK(tsv.find("\tl1\tsensitivity\t") != std::string::npos);
  CHECK(tsv.find("delta:l1-adhoc:0.9") != std::string::npos);

  args.jobs = 1;
  args.out = tmp.file("serial.tsv");
  cmd_experiment(args);
  CHECK(read_text_file(args.out) == tsv);
}

}  // TEST_SUITE("io_commands")
