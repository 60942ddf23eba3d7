#pragma once

#include <cstdint>
#include <string>

#include "netavg/learn.hpp"

namespace netavg {

// Command bundles mirror the CLI flags; empty `out` means stdout. Every
// command validates and loads its inputs before any computation starts.

struct SampleArgs {
  std::string network_file;
  int n = 0;
  std::uint64_t seed = 0;
  std::string out_csv;
};

struct LearnArgs {
  std::string data_csv;
  LearnerConfig learner;
  std::string out;
};

struct AvgnetArgs {
  std::string data_csv;          // exactly one of data_csv /
  std::string confidences_file;  // confidences_file is set
  LearnerConfig learner;
  int m = 200;
  std::uint64_t seed = 0;
  std::string method = "l1";
  int jobs = 0;
  std::string out;
};

struct ExperimentArgs {
  std::string config_file;
  int jobs = 0;
  std::string out;
};

void cmd_sample(const SampleArgs& args);
void cmd_learn(const LearnArgs& args);
void cmd_avgnet(const AvgnetArgs& args);
void cmd_experiment(const ExperimentArgs& args);

}  // namespace netavg
