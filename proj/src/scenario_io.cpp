#include "distopt/scenario_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "distopt/errors.hpp"

namespace distopt {
namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

double to_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, line_of(node), "expected a number");
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) throw ConfigError(field, line_of(node), "must be finite");
    return v;
  } catch (const YAML::BadConversion&) {
    throw ConfigError(field, line_of(node),
                      "expected a number, got '" + node.Scalar() + "'");
  }
}

std::size_t to_size(const YAML::Node& node, const std::string& field) {
  const double v = to_double(node, field);
  if (v < 0.0 || v != std::floor(v)) {
    throw ConfigError(field, line_of(node), "expected a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

std::string to_string(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, line_of(node), "expected a string");
  return node.Scalar();
}

std::vector<double> to_doubles(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(field, line_of(node), "expected a list");
  std::vector<double> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(to_double(node[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<std::string> to_strings(const YAML::Node& node,
                                    const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(field, line_of(node), "expected a list");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(to_string(node[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

// Each pole is a real number or a [re, im] pair.
std::vector<std::complex<double>> to_poles(const YAML::Node& node,
                                           const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(field, line_of(node), "expected a list");
  std::vector<std::complex<double>> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    const std::string f = field + "[" + std::to_string(k) + "]";
    const YAML::Node& p = node[k];
    if (p.IsSequence()) {
      const auto pair = to_doubles(p, f);
      if (pair.size() != 2) {
        throw ConfigError(f, line_of(p), "complex pole must be [re, im]");
      }
      out.emplace_back(pair[0], pair[1]);
    } else {
      out.emplace_back(to_double(p, f), 0.0);
    }
  }
  return out;
}

// Map accessor that records which keys were read and rejects the rest.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) {
      throw ConfigError(path_, line_of(node_), "expected a mapping");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  std::optional<YAML::Node> get(const std::string& key) {
    known_.insert(key);
    const YAML::Node child = node_[key];
    if (!child.IsDefined() || child.IsNull()) return std::nullopt;
    return child;
  }

  YAML::Node require(const std::string& key) {
    auto child = get(key);
    if (!child) throw ConfigError(field(key), line_of(node_), "is required");
    return *child;
  }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.Scalar();
      if (!known_.contains(key)) {
        throw ConfigError(field(key), line_of(kv.first), "unknown key");
      }
    }
  }

  int line() const { return line_of(node_); }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> known_;
};

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
}

void check_format(MapReader& root) {
  const YAML::Node fmt = root.require("format");
  if (to_size(fmt, "format") != static_cast<std::size_t>(kScenarioFormat)) {
    throw ConfigError("format", line_of(fmt),
                      "unsupported format (expected " +
                          std::to_string(kScenarioFormat) + ")");
  }
}

void parse_costs(MapReader& root, ScenarioSpec& spec) {
  const YAML::Node costs = root.require("costs");
  if (!costs.IsSequence()) {
    throw ConfigError("costs", line_of(costs), "expected a list");
  }
  for (std::size_t k = 0; k < costs.size(); ++k) {
    MapReader c(costs[k], "costs[" + std::to_string(k) + "]");
    CostSpec cs;
    cs.kind = to_string(c.require("kind"), c.field("kind"));
    if (auto p = c.get("params")) cs.params = to_doubles(*p, c.field("params"));
    c.finish();
    spec.costs.push_back(std::move(cs));
  }
  if (auto opt = root.get("optimum")) {
    MapReader o(*opt, "optimum");
    if (auto b = o.get("bracket")) {
      const auto v = to_doubles(*b, o.field("bracket"));
      if (v.size() != 2 || !(v[0] < v[1])) {
        throw ConfigError(o.field("bracket"), line_of(*b),
                          "expected [lo, hi] with lo < hi");
      }
      spec.optimum_bracket = {v[0], v[1]};
    }
    o.finish();
  }
}

AgentSpec parse_agent(const YAML::Node& node, const std::string& path) {
  MapReader a(node, path);
  AgentSpec spec;
  spec.line = a.line();
  if (auto preset = a.get("preset")) {
    spec.preset = to_string(*preset, a.field("preset"));
    if (*spec.preset != "vdp") {
      throw ConfigError(a.field("preset"), line_of(*preset),
                        "unknown preset '" + *spec.preset + "'");
    }
    spec.order = 2;
    if (auto v = a.get("a")) spec.a = to_double(*v, a.field("a"));
    if (auto v = a.get("b")) spec.b = to_double(*v, a.field("b"));
    if (auto v = a.get("v0")) {
      spec.v0 = to_doubles(*v, a.field("v0"));
      if (spec.v0.size() != 2) {
        throw ConfigError(a.field("v0"), line_of(*v), "expected two entries");
      }
    }
  } else {
    spec.order = to_size(a.require("order"), a.field("order"));
    spec.basis = to_strings(a.require("basis"), a.field("basis"));
    spec.theta = to_doubles(a.require("theta"), a.field("theta"));
  }
  spec.x0 = to_doubles(a.require("x0"), a.field("x0"));
  if (auto v = a.get("r0")) spec.r0 = to_double(*v, a.field("r0"));
  if (auto v = a.get("lambda0")) spec.lambda0 = to_double(*v, a.field("lambda0"));
  if (auto v = a.get("theta_hat0")) {
    spec.theta_hat0 = to_doubles(*v, a.field("theta_hat0"));
  }
  if (auto v = a.get("poles")) spec.poles = to_poles(*v, a.field("poles"));
  a.finish();
  return spec;
}

}  // namespace

ScenarioSpec parse_cost_section(const std::string& text) {
  const YAML::Node doc = parse_yaml(text);
  MapReader root(doc, "");
  check_format(root);
  ScenarioSpec spec;
  parse_costs(root, spec);
  // Other sections are not interpreted here.
  for (const char* key :
       {"name", "graph", "agents", "controller", "integrator", "pe"}) {
    root.get(key);
  }
  root.finish();
  return spec;
}

ScenarioSpec parse_scenario_spec(const std::string& text) {
  const YAML::Node doc = parse_yaml(text);
  MapReader root(doc, "");
  check_format(root);

  ScenarioSpec spec;
  if (auto n = root.get("name")) spec.name = to_string(*n, "name");

  {
    MapReader g(root.require("graph"), "graph");
    spec.n_agents = to_size(g.require("agents"), g.field("agents"));
    if (auto edges = g.get("edges")) {
      if (!edges->IsSequence()) {
        throw ConfigError(g.field("edges"), line_of(*edges), "expected a list");
      }
      for (std::size_t k = 0; k < edges->size(); ++k) {
        const std::string f = g.field("edges") + "[" + std::to_string(k) + "]";
        const auto e = to_doubles((*edges)[k], f);
        if (e.size() != 3 || e[0] < 1 || e[1] < 1 || e[0] != std::floor(e[0]) ||
            e[1] != std::floor(e[1])) {
          throw ConfigError(f, line_of((*edges)[k]),
                            "expected [i, j, weight] with 1-based indices");
        }
        spec.edges.emplace_back(static_cast<std::size_t>(e[0]),
                                static_cast<std::size_t>(e[1]), e[2]);
      }
    }
    g.finish();
  }

  parse_costs(root, spec);

  const YAML::Node agents = root.require("agents");
  if (!agents.IsSequence()) {
    throw ConfigError("agents", line_of(agents), "expected a list");
  }
  for (std::size_t k = 0; k < agents.size(); ++k) {
    spec.agents.push_back(
        parse_agent(agents[k], "agents[" + std::to_string(k) + "]"));
  }

  if (auto c = root.get("controller")) {
    MapReader ctrl(*c, "controller");
    if (auto v = ctrl.get("variant")) {
      const std::string name = to_string(*v, ctrl.field("variant"));
      try {
        spec.controller.variant = parse_variant(name);
      } catch (const ValidationError& e) {
        throw ConfigError(ctrl.field("variant"), line_of(*v), e.what());
      }
    }
    if (auto v = ctrl.get("epsilon")) {
      spec.controller.epsilon = to_double(*v, ctrl.field("epsilon"));
    }
    if (auto v = ctrl.get("poles")) {
      spec.controller.poles = to_poles(*v, ctrl.field("poles"));
    }
    if (auto v = ctrl.get("lambda_gain")) {
      spec.controller.lambda_gain = to_double(*v, ctrl.field("lambda_gain"));
    }
    if (auto v = ctrl.get("sigma")) {
      spec.controller.sigma = to_double(*v, ctrl.field("sigma"));
    }
    ctrl.finish();
  }

  if (auto i = root.get("integrator")) {
    MapReader integ(*i, "integrator");
    if (auto v = integ.get("step")) {
      spec.integrator.step = to_double(*v, integ.field("step"));
    }
    if (auto v = integ.get("t_end")) {
      spec.integrator.t_end = to_double(*v, integ.field("t_end"));
    }
    if (auto v = integ.get("decimation")) {
      spec.decimation = to_size(*v, integ.field("decimation"));
    }
    integ.finish();
  }

  if (auto p = root.get("pe")) {
    MapReader pe(*p, "pe");
    if (auto v = pe.get("window")) spec.pe.window = to_double(*v, pe.field("window"));
    if (auto v = pe.get("start")) spec.pe.start = to_double(*v, pe.field("start"));
    if (auto v = pe.get("floor")) spec.pe.floor = to_double(*v, pe.field("floor"));
    pe.finish();
  }

  root.finish();
  return spec;
}

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_spec(buf.str());
}

CostSet build_costs(const ScenarioSpec& spec) {
  CostSet costs;
  for (std::size_t k = 0; k < spec.costs.size(); ++k) {
    try {
      costs.push_back(builtin_cost(spec.costs[k].kind, spec.costs[k].params));
    } catch (const ValidationError& e) {
      throw ValidationError("costs[" + std::to_string(k) + "]: " + e.what());
    }
  }
  return costs;
}

Scenario build_scenario(const ScenarioSpec& spec) {
  const auto& ctrl = spec.controller;
  if (!(ctrl.epsilon > 0.0)) {
    throw ValidationError("controller.epsilon: epsilon must be positive");
  }
  if (!(ctrl.lambda_gain > 0.0)) {
    throw ValidationError(
        "controller.lambda_gain: adaptation gain must be positive definite");
  }
  if (ctrl.variant == AdaptiveVariant::kSigmaMod && !(ctrl.sigma > 0.0)) {
    throw ValidationError("controller.sigma: sigma must be positive");
  }
  if (spec.agents.size() != spec.n_agents) {
    throw ValidationError("graph.agents is " + std::to_string(spec.n_agents) +
                          " but " + std::to_string(spec.agents.size()) +
                          " agents are listed");
  }
  if (spec.costs.size() != spec.n_agents) {
    throw ValidationError("costs must list one entry per agent");
  }

  Scenario s;
  s.name = spec.name;
  s.topology = Topology::from_edges(spec.n_agents, spec.edges);
  s.costs = build_costs(spec);
  s.integrator = spec.integrator;
  s.decimation = spec.decimation;
  s.pe = spec.pe;
  s.optimum_bracket = spec.optimum_bracket;

  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    const auto& a = spec.agents[i];
    const std::string label = "agents[" + std::to_string(i) + "]";
    try {
      AgentModel model;
      if (a.preset) {
        Exosystem exo;
        exo.v0 = Eigen::Vector2d(a.v0[0], a.v0[1]);
        model = vdp_preset(a.a, a.b, exo);
      } else {
        if (a.order == 0) throw ValidationError("order must be at least 1");
        model.order = a.order;
        model.basis = BasisVector::from_names(a.basis);
        model.true_theta = Eigen::Map<const Eigen::VectorXd>(
            a.theta.data(), static_cast<Eigen::Index>(a.theta.size()));
      }
      model.validate();

      std::vector<std::complex<double>> poles(model.order, -2.0);
      if (a.poles) {
        poles = *a.poles;
      } else if (ctrl.poles) {
        poles = *ctrl.poles;
      }
      AgentController controller{
          GainSet::design(model.order, poles, ctrl.epsilon),
          AdaptiveLaw::make(ctrl.variant, model.n_theta(), ctrl.lambda_gain,
                            ctrl.sigma)};

      if (a.x0.size() != model.order) {
        throw ValidationError("x0 has " + std::to_string(a.x0.size()) +
                              " entries, order is " +
                              std::to_string(model.order));
      }
      InitialState init;
      init.x = Eigen::Map<const Eigen::VectorXd>(
          a.x0.data(), static_cast<Eigen::Index>(a.x0.size()));
      init.r = a.r0.value_or(a.x0[0]);
      init.lambda = a.lambda0.value_or(0.0);
      if (a.theta_hat0) {
        if (a.theta_hat0->size() != model.n_theta()) {
          throw ValidationError("theta_hat0 length differs from basis size");
        }
        init.theta_hat = Eigen::Map<const Eigen::VectorXd>(
            a.theta_hat0->data(),
            static_cast<Eigen::Index>(a.theta_hat0->size()));
      } else {
        init.theta_hat =
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.n_theta()));
      }

      s.agents.push_back(std::move(model));
      s.controllers.push_back(std::move(controller));
      s.initial.push_back(std::move(init));
    } catch (const ValidationError& e) {
      std::string where = label;
      if (a.line > 0) where += " (line " + std::to_string(a.line) + ")";
      throw ValidationError(where + ": " + e.what());
    }
  }
  s.validate();
  return s;
}

std::filesystem::path bundled_scenario_dir() {
  if (const char* env = std::getenv("DISTOPT_SCENARIO_DIR")) return env;
  return DISTOPT_SCENARIO_DIR;
}

std::filesystem::path resolve_scenario(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (name_or_path.empty()) throw IoError("no scenario given");
  const fs::path direct(name_or_path);
  if (fs::is_regular_file(direct)) return direct;
  for (const char* ext : {".yaml", ".yml"}) {
    const fs::path bundled = bundled_scenario_dir() / (name_or_path + ext);
    if (fs::is_regular_file(bundled)) return bundled;
  }
  throw IoError("scenario '" + name_or_path +
                "' is neither a file nor a bundled scenario in " +
                bundled_scenario_dir().string());
}

}  // namespace distopt
