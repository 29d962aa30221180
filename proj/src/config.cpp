#include "pvx/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pvx/error.hpp"

using nlohmann::json;

namespace pvx {

void PipelineConfig::finalize() {
  if (!spacing_explicit) vectorizer.spacing = propagation.eps_d / 2.0;
  if (deterministic) threads = 1;
  train.threads = threads;

  train.disable_position_input = false;
  train.disable_freq_encoding = false;
  train.disable_layering = false;
  propagation.schedule = PropagationConfig::Schedule::kFull;
  if (ablation == "wo-pos") {
    train.disable_position_input = true;
  } else if (ablation == "wo-U") {
    train.disable_freq_encoding = true;
  } else if (ablation == "wo-layer") {
    train.disable_layering = true;
  } else if (ablation == "F") {
    propagation.schedule = PropagationConfig::Schedule::kFirstOnly;
  } else if (ablation == "FL") {
    propagation.schedule = PropagationConfig::Schedule::kFirstLast;
  } else if (ablation != "full") {
    throw InvalidInput("unknown ablation: " + ablation);
  }
}

void apply_paper_scale(PipelineConfig& config) {
  config.decoder.code_dim = 128;
  config.decoder.hidden = 256;
  config.decoder.layers = 8;
  config.decoder.n_freq = 9;
  config.train.steps = 10000;
}

namespace {

void from_json_obj(const json& j, PipelineConfig& c) {
  auto get = [&](const char* section, const char* key, auto& dst) {
    if (j.count(section) && j.at(section).count(key)) dst = j.at(section).at(key).get<std::decay_t<decltype(dst)>>();
  };
  if (j.count("preset") && j.at("preset").get<std::string>() == "paper") apply_paper_scale(c);

  get("vectorizer", "simplify_tol", c.vectorizer.simplify_tol);
  get("vectorizer", "min_area", c.vectorizer.min_area);
  if (j.count("vectorizer") && j.at("vectorizer").count("spacing")) {
    c.vectorizer.spacing = j.at("vectorizer").at("spacing").get<double>();
    c.spacing_explicit = true;
  }
  get("vectorizer", "max_seed_nodes", c.vectorizer.max_seed_nodes);
  get("vectorizer", "max_interior", c.vectorizer.max_interior);

  get("propagation", "eps_d", c.propagation.eps_d);
  get("propagation", "conf_threshold", c.propagation.conf_threshold);
  get("propagation", "k_nn", c.propagation.k_nn);
  get("propagation", "max_nodes", c.propagation.max_nodes);

  get("lk", "levels", c.lk.levels);
  get("lk", "window", c.lk.window);
  get("lk", "iterations", c.lk.iterations);
  get("lk", "eig_ref", c.lk.eig_ref);

  get("decoder", "code_dim", c.decoder.code_dim);
  get("decoder", "hidden", c.decoder.hidden);
  get("decoder", "layers", c.decoder.layers);
  get("decoder", "n_freq", c.decoder.n_freq);
  get("decoder", "include_raw", c.decoder.include_raw);

  get("train", "steps", c.train.steps);
  get("train", "batch_size", c.train.batch_size);
  get("train", "learning_rate", c.train.learning_rate);
  get("train", "beta1", c.train.beta1);
  get("train", "beta2", c.train.beta2);
  get("train", "adam_eps", c.train.adam_eps);
  get("train", "seed", c.train.seed);

  if (j.count("tracker")) c.tracker = j.at("tracker").get<std::string>();
  if (j.count("ablation")) c.ablation = j.at("ablation").get<std::string>();
  if (j.count("threads")) c.threads = j.at("threads").get<int>();
  if (j.count("deterministic")) c.deterministic = j.at("deterministic").get<bool>();
}

// Minimal TOML subset: [section] headers, key = value scalars (numbers,
// booleans, quoted strings), # comments. Enough for flat pipeline configs.
json toml_subset_to_json(const std::string& text, const std::string& path) {
  json root = json::object();
  json* section = &root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw IoError(path + ":" + std::to_string(lineno) + ": malformed table header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      section = &root[name];
      if (section->is_null()) *section = json::object();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw IoError(path + ":" + std::to_string(lineno) + ": empty key or value");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw IoError(path + ":" + std::to_string(lineno) + ": unterminated string");
      (*section)[key] = value.substr(1, value.size() - 2);
    } else if (value == "true" || value == "false") {
      (*section)[key] = (value == "true");
    } else {
      try {
        if (value.find_first_of(".eE") != std::string::npos)
          (*section)[key] = std::stod(value);
        else
          (*section)[key] = static_cast<int64_t>(std::stoll(value));
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) + ": cannot parse value '" + value + "'");
      }
    }
  }
  return root;
}

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed config JSON: ") + e.what());
  }
  PipelineConfig c;
  try {
    from_json_obj(j, c);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const bool is_toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  if (!is_toml) return config_from_json_text(text);
  PipelineConfig c;
  try {
    from_json_obj(toml_subset_to_json(text, path), c);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["vectorizer"] = {{"simplify_tol", c.vectorizer.simplify_tol},
                     {"min_area", c.vectorizer.min_area},
                     {"spacing", c.vectorizer.spacing},
                     {"max_seed_nodes", c.vectorizer.max_seed_nodes},
                     {"max_interior", c.vectorizer.max_interior}};
  j["propagation"] = {{"eps_d", c.propagation.eps_d},
                      {"conf_threshold", c.propagation.conf_threshold},
                      {"k_nn", c.propagation.k_nn},
                      {"max_nodes", c.propagation.max_nodes}};
  j["lk"] = {{"levels", c.lk.levels},
             {"window", c.lk.window},
             {"iterations", c.lk.iterations},
             {"eig_ref", c.lk.eig_ref}};
  j["decoder"] = {{"code_dim", c.decoder.code_dim},
                  {"hidden", c.decoder.hidden},
                  {"layers", c.decoder.layers},
                  {"n_freq", c.decoder.n_freq},
                  {"include_raw", c.decoder.include_raw}};
  j["train"] = {{"steps", c.train.steps},
                {"batch_size", c.train.batch_size},
                {"learning_rate", c.train.learning_rate},
                {"beta1", c.train.beta1},
                {"beta2", c.train.beta2},
                {"adam_eps", c.train.adam_eps},
                {"seed", c.train.seed}};
  j["tracker"] = c.tracker;
  j["ablation"] = c.ablation;
  j["threads"] = c.threads;
  j["deterministic"] = c.deterministic;
  return j.dump();
}

}  // namespace pvx
