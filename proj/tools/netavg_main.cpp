#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "netavg/commands.hpp"
#include "netavg/error.hpp"

namespace {

void add_learner_flags(CLI::App& cmd, netavg::LearnerConfig& learner) {
  const std::map<std::string, netavg::Algorithm> algorithms{
      {"hc", netavg::Algorithm::HillClimb},
      {"iamb", netavg::Algorithm::Iamb},
      {"mmhc", netavg::Algorithm::Mmhc}};
  const std::map<std::string, netavg::CiTestKind> tests{
      {"shrinkage-mi", netavg::CiTestKind::ShrinkageMi},
      {"ml-g2", netavg::CiTestKind::MlG2}};
  cmd.add_option("--algorithm", learner.algorithm, "structure learner: hc, iamb, mmhc")
      ->transform(CLI::CheckedTransformer(algorithms, CLI::ignore_case));
  cmd.add_option("--alpha", learner.alpha, "test size for constraint methods")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  cmd.add_option("--ess", learner.ess, "equivalent sample size of the score prior");
  cmd.add_option("--test", learner.test, "independence test: shrinkage-mi, ml-g2")
      ->transform(CLI::CheckedTransformer(tests, CLI::ignore_case));
  cmd.add_option("--restarts", learner.restarts, "random restarts after the greedy pass")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--tabu", learner.tabu, "tabu walk length (0 disables)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--max-parents", learner.max_parents, "cap on parents per node");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bootstrap-averaged structure learning for discrete Bayesian networks"};
  app.require_subcommand(1);

  netavg::SampleArgs sample;
  CLI::App* cmd_sample = app.add_subcommand("sample", "draw rows from a network file");
  cmd_sample->add_option("--network", sample.network_file, "network JSON file")
      ->required();
  cmd_sample->add_option("--n", sample.n, "number of rows")->required();
  cmd_sample->add_option("--seed", sample.seed, "master seed")->envname("NETAVG_SEED");
  cmd_sample->add_option("--out", sample.out_csv, "output CSV path")->required();

  netavg::LearnArgs learn;
  CLI::App* cmd_learn = app.add_subcommand("learn", "learn one structure from a CSV");
  cmd_learn->add_option("--data", learn.data_csv, "input CSV")->required();
  add_learner_flags(*cmd_learn, learn.learner);
  cmd_learn->add_option("--seed", learn.learner.seed, "master seed")->envname("NETAVG_SEED");
  cmd_learn->add_option("--out", learn.out, "output path (default stdout)");

  netavg::AvgnetArgs avgnet;
  CLI::App* cmd_avgnet =
      app.add_subcommand("avgnet", "bootstrap edge confidences and select significant edges");
  auto* avgnet_data = cmd_avgnet->add_option("--data", avgnet.data_csv, "input CSV");
  auto* avgnet_conf = cmd_avgnet->add_option("--confidences-file", avgnet.confidences_file,
                                             "skip learning, select on stored confidences");
  avgnet_data->excludes(avgnet_conf);
  avgnet_conf->excludes(avgnet_data);
  add_learner_flags(*cmd_avgnet, avgnet.learner);
  cmd_avgnet->add_option("--m", avgnet.m, "bootstrap replicate count")
      ->check(CLI::PositiveNumber);
  cmd_avgnet->add_option("--method", avgnet.method,
                         "threshold method: l1, adhoc:<t>, noisefloor");
  cmd_avgnet->add_option("--seed", avgnet.seed, "master seed")->envname("NETAVG_SEED");
  cmd_avgnet->add_option("--jobs", avgnet.jobs, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd_avgnet->add_option("--out", avgnet.out, "output path (default stdout)");

  netavg::ExperimentArgs experiment;
  CLI::App* cmd_experiment =
      app.add_subcommand("experiment", "run a sample-size grid against a reference network");
  cmd_experiment->add_option("--config", experiment.config_file, "experiment config JSON")
      ->required();
  cmd_experiment->add_option("--jobs", experiment.jobs, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd_experiment->add_option("--out", experiment.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_sample->parsed()) {
      netavg::cmd_sample(sample);
    } else if (cmd_learn->parsed()) {
      netavg::cmd_learn(learn);
    } else if (cmd_avgnet->parsed()) {
      avgnet.learner.seed = avgnet.seed;
      netavg::cmd_avgnet(avgnet);
    } else if (cmd_experiment->parsed()) {
      netavg::cmd_experiment(experiment);
    }
    return 0;
  } catch (const netavg::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const netavg::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
