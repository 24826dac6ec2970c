#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sarena/common/feature_table.hpp"
#include "sarena/rating/votes.hpp"

namespace sarena::rating {

struct PlantedFeature {
  std::string name;
  double beta = 0;     // effect per unit of the raw feature
  double loading = 0;  // feature mean for a workbook is loading * theta(model)
  double noise = 1;    // standard deviation around that mean
  std::map<std::string, double> model_offset;   // added to the mean for a model
  std::map<std::string, double> category_beta;  // overrides beta inside a category
};

struct SimulationSpec {
  std::vector<std::string> models;  // empty: m01..mK
  int model_count = 16;
  std::vector<double> theta;        // empty: evenly spaced over [theta_low, theta_high]
  double theta_low = -2;
  double theta_high = 2;
  std::vector<PlantedFeature> features;
  std::vector<std::string> categories;  // empty: every arena category
  double tie_rate = 0;
  double both_bad_rate = 0;
  std::size_t n_votes = 5000;
  std::uint64_t seed = 1;
};

struct SimulationResult {
  std::vector<std::string> models;
  std::vector<double> theta;
  std::vector<VoteRecord> votes;
  FeatureTable features;
  std::string truth_json;
};

// Throws InputError on an inconsistent spec.
SimulationResult simulate_arena(const SimulationSpec& spec);

SimulationSpec simulation_spec_from_json(const std::string& text);

}  // namespace sarena::rating
