#include "sarena/rating/simulate.hpp"

#include <cstdio>
#include <random>

#include "json.hpp"
#include "sarena/rating/bradley_terry.hpp"

namespace sarena::rating {
namespace {

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

std::string timestamp_for(std::size_t i) {
  // One vote per minute from a fixed epoch keeps output reproducible.
  std::size_t minutes = i;
  std::size_t day = minutes / 1440;
  std::size_t hh = (minutes / 60) % 24;
  std::size_t mm = minutes % 60;
  char buf[32];
  std::snprintf(buf, sizeof buf, "2025-%02zu-%02zuT%02zu:%02zu:00Z", 1 + (day / 28) % 12,
                1 + day % 28, hh, mm);
  return buf;
}

}  // namespace

SimulationResult simulate_arena(const SimulationSpec& spec) {
  SimulationResult out;
  out.models = spec.models;
  if (out.models.empty()) {
    if (spec.model_count < 2) throw InputError("simulation needs at least 2 models");
    for (int i = 1; i <= spec.model_count; ++i) out.models.push_back(numbered("m", i, 2));
  }
  const std::size_t k = out.models.size();
  if (k < 2) throw InputError("simulation needs at least 2 models");
  if (spec.n_votes < 1) throw InputError("simulation needs at least 1 vote");
  if (spec.tie_rate < 0 || spec.both_bad_rate < 0 || spec.tie_rate + spec.both_bad_rate > 1)
    throw InputError("tie and both-bad rates must be non-negative and sum to at most 1");

  out.theta = spec.theta;
  if (out.theta.empty()) {
    for (std::size_t i = 0; i < k; ++i)
      out.theta.push_back(spec.theta_low +
                          (spec.theta_high - spec.theta_low) * static_cast<double>(i) /
                              static_cast<double>(k - 1));
  }
  if (out.theta.size() != k) throw InputError("theta length does not match the model count");

  std::vector<std::string> categories = spec.categories;
  if (categories.empty()) categories = arena_categories();

  for (const auto& f : spec.features) {
    if (f.name.empty()) throw InputError("planted feature needs a name");
    out.features.names.push_back(f.name);
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick_model(0, k - 1);
  std::uniform_int_distribution<std::size_t> pick_other(0, k - 2);
  std::uniform_int_distribution<std::size_t> pick_category(0, categories.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int width = spec.n_votes >= 1000000 ? 7 : 6;
  for (std::size_t n = 0; n < spec.n_votes; ++n) {
    std::size_t a = pick_model(rng);
    std::size_t b = pick_other(rng);
    if (b >= a) ++b;
    const std::string& category = categories[pick_category(rng)];

    VoteRecord v;
    v.battle_id = numbered("b", n + 1, width);
    v.prompt_id = numbered("p", n / 4 + 1, width);
    v.category = category;
    v.model_a = out.models[a];
    v.model_b = out.models[b];
    v.workbook_a = v.battle_id + "-a";
    v.workbook_b = v.battle_id + "-b";
    v.timestamp = timestamp_for(n);

    double logit = out.theta[a] - out.theta[b];
    std::vector<double> xa, xb;
    for (const auto& f : spec.features) {
      auto offset = [&](std::size_t m) {
        auto it = f.model_offset.find(out.models[m]);
        return it == f.model_offset.end() ? 0.0 : it->second;
      };
      double va = f.loading * out.theta[a] + offset(a) + f.noise * normal(rng);
      double vb = f.loading * out.theta[b] + offset(b) + f.noise * normal(rng);
      auto it = f.category_beta.find(category);
      double beta = it == f.category_beta.end() ? f.beta : it->second;
      logit += beta * (va - vb);
      xa.push_back(va);
      xb.push_back(vb);
    }
    if (!spec.features.empty()) {
      out.features.rows[v.workbook_a] = std::move(xa);
      out.features.rows[v.workbook_b] = std::move(xb);
    }

    double u = unit(rng);
    double w = unit(rng);
    if (u < spec.tie_rate) {
      v.outcome = Outcome::Tie;
    } else if (u < spec.tie_rate + spec.both_bad_rate) {
      v.outcome = Outcome::BothBad;
    } else {
      v.outcome = w < sigmoid(logit) ? Outcome::AWins : Outcome::BWins;
    }
    out.votes.push_back(std::move(v));
  }

  nlohmann::ordered_json truth;
  truth["seed"] = spec.seed;
  truth["n_votes"] = spec.n_votes;
  truth["models"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < k; ++i)
    truth["models"].push_back({{"model", out.models[i]}, {"theta", out.theta[i]}});
  truth["features"] = nlohmann::ordered_json::array();
  for (const auto& f : spec.features) {
    nlohmann::ordered_json jf;
    jf["name"] = f.name;
    jf["beta"] = f.beta;
    jf["loading"] = f.loading;
    jf["noise"] = f.noise;
    if (!f.category_beta.empty()) jf["category_beta"] = f.category_beta;
    if (!f.model_offset.empty()) jf["model_offset"] = f.model_offset;
    truth["features"].push_back(jf);
  }
  truth["categories"] = categories;
  truth["tie_rate"] = spec.tie_rate;
  truth["both_bad_rate"] = spec.both_bad_rate;
  out.truth_json = truth.dump(2);
  return out;
}

SimulationSpec simulation_spec_from_json(const std::string& text) {
  SimulationSpec s;
  try {
    auto j = nlohmann::json::parse(text);
    s.models = j.value("models", s.models);
    s.model_count = j.value("model_count", s.model_count);
    s.theta = j.value("theta", s.theta);
    s.theta_low = j.value("theta_low", s.theta_low);
    s.theta_high = j.value("theta_high", s.theta_high);
    s.categories = j.value("categories", s.categories);
    s.tie_rate = j.value("tie_rate", s.tie_rate);
    s.both_bad_rate = j.value("both_bad_rate", s.both_bad_rate);
    s.n_votes = j.value("n_votes", s.n_votes);
    s.seed = j.value("seed", s.seed);
    if (j.contains("features")) {
      for (const auto& jf : j.at("features")) {
        PlantedFeature f;
        f.name = jf.at("name").get<std::string>();
        f.beta = jf.value("beta", 0.0);
        f.loading = jf.value("loading", 0.0);
        f.noise = jf.value("noise", 1.0);
        f.category_beta = jf.value("category_beta", f.category_beta);
        f.model_offset = jf.value("model_offset", f.model_offset);
        s.features.push_back(std::move(f));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad simulation spec: ") + e.what());
  }
  return s;
}

}  // namespace sarena::rating
