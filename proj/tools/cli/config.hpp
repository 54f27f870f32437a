#pragma once

#include "quenchlab/evolution.hpp"
#include "quenchlab/model.hpp"
#include "quenchlab/stationary.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quenchlab::cli {

// Bad or unknown configuration key; key() is "section.name".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct DomainSpec {
  int dimension = 1;
  Extent x{0.0, 1.0};
  int nx = 199;
  Extent y{0.0, 1.0};
  int ny = 49;

  Grid grid() const;
};

struct RunConfig {
  DomainSpec domain;
  Model model;
  ParamPoint params;
  InitialData initial = initial::Zero{};
  StepperConfig stepper;
  double horizon = 5.0;
  double coupling_scale = 1.0;
  std::vector<double> lambda_samples;
  CurveOptions curve;
  MonotoneOptions monotone;
  SecondSolutionOptions second;

  // Every known key with its effective value, in table order.
  std::vector<std::pair<std::string, std::string>> resolved;

  nlohmann::json echo() const;
  std::vector<std::string> comment_lines() const;
};

// INI file with sections [domain], [model], [init], [run]; overrides are
// "section.key=value" and win over the file. An empty path uses defaults.
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);

// Same, from INI text.
RunConfig parse_config(const std::string& ini_text, const std::vector<std::string>& overrides);

}  // namespace quenchlab::cli
