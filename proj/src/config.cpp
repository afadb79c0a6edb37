#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dfrc/harness.hpp"

namespace dfrc {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kSic: return "sic";
    case Scheme::kProjection: return "projection";
    case Scheme::kJointMl: return "joint_ml";
    case Scheme::kGenie: return "genie";
  }
  return "unknown";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  if (name == "sic") return Scheme::kSic;
  if (name == "projection") return Scheme::kProjection;
  if (name == "joint_ml") return Scheme::kJointMl;
  if (name == "genie") return Scheme::kGenie;
  return std::nullopt;
}

std::vector<Scheme> parse_schemes(const std::string& csv) {
  std::vector<Scheme> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) {
      throw std::invalid_argument("empty scheme name in \"" + csv + "\"");
    }
    const auto s = scheme_from_name(item);
    if (!s) {
      throw std::invalid_argument("unknown scheme \"" + item + "\"");
    }
    out.push_back(*s);
  }
  if (out.empty()) {
    throw std::invalid_argument("schemes list is empty");
  }
  return out;
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec spec;
  if (text.empty() || text == "none") {
    return spec;
  }
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("sweep \"" + text +
                                "\" is not VAR=START:STOP:STEP or VAR=v1,v2");
  }
  spec.variable = text.substr(0, eq);
  if (spec.variable != "L" && spec.variable != "P_r_dB" &&
      spec.variable != "M_r") {
    throw std::invalid_argument("unknown sweep variable \"" + spec.variable +
                                "\"");
  }
  const std::string body = text.substr(eq + 1);
  spec.values.clear();
  try {
    if (body.find(',') != std::string::npos ||
        body.find(':') == std::string::npos) {
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) spec.values.push_back(std::stod(item));
      }
    } else {
      std::stringstream ss(body);
      std::string a, b, c;
      if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
          !std::getline(ss, c)) {
        throw std::invalid_argument("bad range");
      }
      const double start = std::stod(a), stop = std::stod(b),
                   step = std::stod(c);
      if (step <= 0.0 || stop < start) {
        throw std::invalid_argument("bad range");
      }
      for (double v = start; v <= stop + 1e-9; v += step) {
        spec.values.push_back(v);
      }
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("sweep \"" + text + "\" has malformed values");
  }
  if (spec.values.empty()) {
    throw std::invalid_argument("sweep \"" + text + "\" resolves to no points");
  }
  return spec;
}

SystemConfig apply_sweep_value(const SystemConfig& base,
                               const std::string& variable, double value) {
  SystemConfig sys = base;
  const auto as_int = [&](const char* name) {
    const double r = std::round(value);
    if (std::abs(value - r) > 1e-9 || r < 1.0) {
      throw std::invalid_argument(std::string("sweep value for ") + name +
                                  " must be a positive integer");
    }
    return static_cast<int>(r);
  };
  if (variable == "none") {
    return sys;
  } else if (variable == "L") {
    sys.L = as_int("L");
  } else if (variable == "M_r") {
    sys.M_r = as_int("M_r");
  } else if (variable == "P_r_dB") {
    sys.P_r = std::pow(10.0, value / 10.0);
  } else {
    throw std::invalid_argument("unknown sweep variable \"" + variable + "\"");
  }
  return sys;
}

void ExperimentConfig::validate() const {
  system.validate();
  if (scene.num_paths < 1) {
    throw std::invalid_argument("scene.num_paths must be at least 1");
  }
  if (scene.max_angle_deg <= 0.0 || scene.max_angle_deg > 90.0) {
    throw std::invalid_argument("scene.max_angle_deg must be in (0, 90]");
  }
  if (trials < 1) {
    throw std::invalid_argument("trials must be at least 1");
  }
  if (sinr_probe_trials < 1) {
    throw std::invalid_argument("sinr_probe_trials must be at least 1");
  }
  if (schemes.empty()) {
    throw std::invalid_argument("schemes list is empty");
  }
  if (format != "csv" && format != "json") {
    throw std::invalid_argument("format must be \"csv\" or \"json\"");
  }
  if (nmse_aggregation != "mean_of_ratios" &&
      nmse_aggregation != "ratio_of_means") {
    throw std::invalid_argument(
        "metrics.nmse_aggregation must be mean_of_ratios or ratio_of_means");
  }
  if (sic_stage1 != "ml" && sic_stage1 != "mmse") {
    throw std::invalid_argument("sic_stage1 must be \"ml\" or \"mmse\"");
  }
  if (sdr.rounding_samples < 1) {
    throw std::invalid_argument("sdr.rounding_samples must be at least 1");
  }
  if (sdr.tol <= 0.0) {
    throw std::invalid_argument("sdr.tol must be positive");
  }
  if (sdr.max_sweeps < 1) {
    throw std::invalid_argument("sdr.max_sweeps must be at least 1");
  }
  if (sdr.rank < 0) {
    throw std::invalid_argument("sdr.rank must be >= 0");
  }
  for (double v : sweep.values) {
    const SystemConfig sys = apply_sweep_value(system, sweep.variable, v);
    sys.validate();
    const int alphabet = sys.make_constellation().size();
    for (Scheme s : schemes) {
      if (s == Scheme::kJointMl &&
          !within_enum_budget(alphabet, sys.L * sys.N_t, kJointEnumBudget)) {
        throw std::invalid_argument(
            "schemes: joint_ml exceeds the enumeration budget at a sweep "
            "point");
      }
      if (s == Scheme::kProjection &&
          detector == DetectorStrategy::kExhaustive &&
          !within_enum_budget(alphabet, sys.L * sys.N_t, kJointEnumBudget)) {
        throw std::invalid_argument(
            "detector: exhaustive projection detection exceeds the "
            "enumeration budget at a sweep point");
      }
    }
  }
}

namespace {

using nlohmann::json;

class KeyReader {
 public:
  explicit KeyReader(const json& j) : j_(j) {}

  template <typename T>
  void get(const char* key, T& out) {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.push_back(key);
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string("config key \"") + key +
                                  "\" has the wrong type");
    }
  }

  void check_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw std::invalid_argument("unknown config key \"" + key + "\"");
      }
    }
  }

 private:
  const json& j_;
  std::vector<std::string> seen_;
};

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }

  ExperimentConfig cfg;
  KeyReader r(j);
  r.get("system.M_t", cfg.system.M_t);
  r.get("system.M_r", cfg.system.M_r);
  r.get("system.N_t", cfg.system.N_t);
  r.get("system.L", cfg.system.L);
  r.get("system.P_c", cfg.system.P_c);
  r.get("system.P_r", cfg.system.P_r);
  r.get("system.sigma2", cfg.system.sigma2);
  r.get("system.d_over_lambda", cfg.system.d_over_lambda);
  r.get("system.constellation", cfg.system.constellation);
  r.get("scene.num_paths", cfg.scene.num_paths);
  r.get("scene.max_angle_deg", cfg.scene.max_angle_deg);

  std::string sweep_text = "none";
  r.get("sweep", sweep_text);
  cfg.sweep = parse_sweep(sweep_text);

  r.get("trials", cfg.trials);
  r.get("seed", cfg.master_seed);

  std::string schemes_text;
  r.get("schemes", schemes_text);
  if (!schemes_text.empty()) cfg.schemes = parse_schemes(schemes_text);

  std::string detector_text;
  r.get("detector", detector_text);
  if (!detector_text.empty()) {
    if (detector_text == "exhaustive") {
      cfg.detector = DetectorStrategy::kExhaustive;
    } else if (detector_text == "sdr") {
      cfg.detector = DetectorStrategy::kSdr;
    } else {
      throw std::invalid_argument("detector must be \"exhaustive\" or \"sdr\"");
    }
  }

  r.get("out", cfg.out);
  r.get("format", cfg.format);
  r.get("sic_stage1", cfg.sic_stage1);
  r.get("sdr.rounding_samples", cfg.sdr.rounding_samples);
  r.get("sdr.tol", cfg.sdr.tol);
  r.get("sdr.max_sweeps", cfg.sdr.max_sweeps);
  r.get("sdr.rank", cfg.sdr.rank);
  r.get("metrics.nmse_aggregation", cfg.nmse_aggregation);
  r.get("sinr_probe_trials", cfg.sinr_probe_trials);
  r.check_unknown();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

}  // namespace dfrc
