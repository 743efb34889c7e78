#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ifslab/ifs_core.hpp"

namespace ifslab {

using Json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

struct ExperimentReport {
  std::string experiment;
  Json config = Json::object();
  Json aggregates = Json::object();
  std::vector<std::pair<std::string, Table>> tables;
  std::uint64_t censored = 0;
  double wall_time_s = 0.0;

  const Table& table(const std::string& name) const;
  double aggregate(const std::string& name) const;
};

/// Powers of ten below n, then n itself.
std::vector<std::uint64_t> decade_checkpoints(std::uint64_t n);

struct PairStart {
  double x = 0.0;
  double y = 0.0;
};

ExperimentReport sync_experiment(const SystemParams& sys, std::uint64_t trials, std::uint64_t n,
                                 std::uint64_t seed, std::optional<PairStart> start = std::nullopt);

ExperimentReport intermittency_experiment(const SystemParams& sys, double eps, double beta, std::uint64_t n,
                                          std::uint64_t trials, std::uint64_t seed,
                                          std::optional<PairStart> start = std::nullopt);

ExperimentReport divergence_experiment(const SystemParams& sys, const std::vector<double>& eps_grid,
                                       std::uint64_t n, std::uint64_t trials, std::uint64_t seed);

ExperimentReport equidistribution_test(const SystemParams& sys, int bins, std::uint64_t n, std::uint64_t seed);

ExperimentReport two_point_histogram(const SystemParams& sys, int grid_res, std::uint64_t n, std::uint64_t seed);

/// Occupation frequencies of the reflected walk (down k w.p. p0, up l otherwise)
/// over n steps from 0, on states 0..max_state (the last entry collects the rest).
std::vector<double> walk_occupation(double p0, int k, int l, std::uint64_t n, std::size_t max_state,
                                    std::uint64_t seed);

Json system_json(const SystemParams& sys);

}  // namespace ifslab
