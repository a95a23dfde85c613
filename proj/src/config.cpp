#include "tfsrc/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tfsrc/errors.hpp"

namespace tfsrc {

using nlohmann::json;

namespace {

struct SourceEntry {
  const char* kind;
  int dim;  // 0: any dimension
  double (*eval)(const Point&);
};

constexpr double kPi = std::numbers::pi;

const std::vector<SourceEntry>& source_table() {
  static const std::vector<SourceEntry> table = {
      {"sin(pi x/2)+x^2+1", 1, [](const Point& p) { return std::sin(kPi * p[0] / 2) + p[0] * p[0] + 1; }},
      {"sin(pi x)-2", 1, [](const Point& p) { return std::sin(kPi * p[0]) - 2; }},
      {"-sin(pi x)+x+4", 1, [](const Point& p) { return -std::sin(kPi * p[0]) + p[0] + 4; }},
      {"sin(pi x)", 1, [](const Point& p) { return std::sin(kPi * p[0]); }},
      {"sin(x1)+sin(x2)+1", 2, [](const Point& p) { return std::sin(p[0]) + std::sin(p[1]) + 1; }},
      {"cos(pi x1)cos(pi x2)+2", 2,
       [](const Point& p) { return std::cos(kPi * p[0]) * std::cos(kPi * p[1]) + 2; }},
      {"exp((x1+x2)/4)+1", 2, [](const Point& p) { return std::exp((p[0] + p[1]) / 4) + 1; }},
  };
  return table;
}

const char* mode_name(LMode mode) {
  switch (mode) {
    case LMode::fixed: return "fixed";
    case LMode::estimate: return "estimate";
    case LMode::safeguard: return "safeguard";
  }
  return "safeguard";
}

LMode mode_from_name(const std::string& name) {
  if (name == "fixed") return LMode::fixed;
  if (name == "estimate") return LMode::estimate;
  if (name == "safeguard") return LMode::safeguard;
  throw ValidationError("config field 'L_mode': expected fixed, estimate or safeguard, got '" + name + "'");
}

AdjointScheme scheme_from_name(const std::string& name) {
  if (name == "transposed") return AdjointScheme::transposed;
  if (name == "mirrored") return AdjointScheme::mirrored;
  throw ValidationError("config field 'adjoint': expected transposed or mirrored, got '" + name + "'");
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

json omega_to_json(const BoxComplement& omega) {
  if (omega.full_domain()) return nullptr;
  json box = json::array();
  for (const Interval& side : omega.box) box.push_back({side.lo, side.hi});
  return box;
}

BoxComplement omega_from_json(const json& j) {
  BoxComplement omega;
  if (j.is_null()) return omega;
  if (!j.is_array()) throw ValidationError("config field 'omega': expected null or [[lo,hi],...]");
  for (const json& side : j) {
    if (!side.is_array() || side.size() != 2 || !side[0].is_number() || !side[1].is_number()) {
      throw ValidationError("config field 'omega': each side must be [lo, hi]");
    }
    omega.box.push_back({side[0].get<double>(), side[1].get<double>()});
  }
  return omega;
}

ExperimentConfig one_d(std::string id, double alpha, const char* source, double delta, double lo) {
  ExperimentConfig cfg;
  cfg.id = std::move(id);
  cfg.dim = 1;
  cfg.n = 40;
  cfg.M = 40;
  cfg.alpha = alpha;
  cfg.mu = {5.0, 10.0, 0.0};
  cfg.f_true = {source, 0.0};
  cfg.omega.box = {{lo, 1.0 - lo}};
  cfg.delta = delta;
  cfg.L = 1.0;
  cfg.eps = 2e-3;
  return cfg;
}

ExperimentConfig two_d(std::string id, double alpha, const char* source, double delta,
                       std::vector<Interval> box, double eps_divisor) {
  ExperimentConfig cfg;
  cfg.id = std::move(id);
  cfg.dim = 2;
  cfg.n = 40;
  cfg.M = 20;
  cfg.alpha = alpha;
  cfg.mu = {1.0, 0.0, 10.0 * kPi};
  cfg.f_true = {source, 0.0};
  cfg.omega.box = std::move(box);
  cfg.delta = delta;
  cfg.L = 2.0;
  cfg.eps = delta / eps_divisor;
  return cfg;
}

}  // namespace

const std::vector<std::string>& source_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> out{"constant"};
    for (const auto& e : source_table()) out.emplace_back(e.kind);
    return out;
  }();
  return kinds;
}

std::function<double(const Point&)> make_source(const SourceSpec& spec, int dim) {
  if (spec.kind == "constant") {
    const double c = spec.value;
    return [c](const Point&) { return c; };
  }
  for (const auto& e : source_table()) {
    if (spec.kind != e.kind) continue;
    if (e.dim != 0 && e.dim != dim) {
      throw ValidationError("config field 'f_true': source '" + spec.kind + "' is not defined in " +
                            std::to_string(dim) + "D");
    }
    return e.eval;
  }
  throw ValidationError("config field 'f_true': unknown source '" + spec.kind + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [this](const std::string& field, const std::string& why) {
    throw ValidationError("experiment '" + id + "', field '" + field + "': " + why);
  };
  if (dim != 1 && dim != 2) fail("dim", "must be 1 or 2");
  if (n < 2) fail("n", "must be >= 2");
  if (M < 1) fail("M", "must be >= 1");
  if (!(T > 0.0)) fail("T", "must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha", "must lie in (0,1)");
  if (!(delta >= 0.0)) fail("delta", "must be >= 0");
  if (!(beta >= 0.0)) fail("beta", "must be >= 0");
  if (!(L > 0.0)) fail("L", "must be > 0");
  if (!(eps > 0.0)) fail("eps", "must be > 0");
  if (max_iters < 1) fail("max_iters", "must be >= 1");
  if (data_refine < 1) fail("data_refine", "must be >= 1");
  if (power_iters < 1) fail("power_iters", "must be >= 1");
  if (!omega.full_domain() && static_cast<int>(omega.box.size()) != dim) {
    fail("omega", "box needs one [lo, hi] per dimension");
  }
  for (const Interval& side : omega.box) {
    if (!(0.0 <= side.lo && side.lo < side.hi && side.hi <= 1.0)) fail("omega", "needs 0 <= lo < hi <= 1");
  }
  try {
    make_source(f_true, dim);
  } catch (const ValidationError& e) {
    fail("f_true", e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["id"] = cfg.id;
  j["dim"] = cfg.dim;
  j["n"] = cfg.n;
  j["M"] = cfg.M;
  j["T"] = cfg.T;
  j["alpha"] = cfg.alpha;
  j["mu"] = {{"c0", cfg.mu.c0}, {"c1", cfg.mu.c1}, {"c2", cfg.mu.c2}};
  j["f_true"] = {{"kind", cfg.f_true.kind}, {"value", cfg.f_true.value}};
  j["omega"] = omega_to_json(cfg.omega);
  j["delta"] = cfg.delta;
  j["seed"] = cfg.seed;
  j["beta"] = cfg.beta;
  j["L"] = cfg.L;
  j["L_mode"] = mode_name(cfg.L_mode);
  j["adjoint"] = cfg.adjoint == AdjointScheme::mirrored ? "mirrored" : "transposed";
  j["eps"] = cfg.eps;
  j["f0"] = cfg.f0;
  j["max_iters"] = cfg.max_iters;
  j["data_refine"] = cfg.data_refine;
  j["power_iters"] = cfg.power_iters;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: each experiment must be a JSON object");
  ExperimentConfig cfg;
  if (j.contains("extends")) {
    const auto base = find_experiments(j.at("extends").get<std::string>());
    if (base.size() != 1) throw ValidationError("config field 'extends': must name a single experiment");
    cfg = base.front();
  }
  read_field(j, "id", cfg.id);
  read_field(j, "dim", cfg.dim);
  read_field(j, "n", cfg.n);
  read_field(j, "M", cfg.M);
  read_field(j, "T", cfg.T);
  read_field(j, "alpha", cfg.alpha);
  if (j.contains("mu")) {
    const json& mu = j.at("mu");
    read_field(mu, "c0", cfg.mu.c0);
    read_field(mu, "c1", cfg.mu.c1);
    read_field(mu, "c2", cfg.mu.c2);
  }
  if (j.contains("f_true")) {
    const json& f = j.at("f_true");
    if (f.is_string()) {
      cfg.f_true.kind = f.get<std::string>();
    } else {
      read_field(f, "kind", cfg.f_true.kind);
      read_field(f, "value", cfg.f_true.value);
    }
  }
  if (j.contains("omega")) cfg.omega = omega_from_json(j.at("omega"));
  read_field(j, "delta", cfg.delta);
  read_field(j, "seed", cfg.seed);
  read_field(j, "beta", cfg.beta);
  read_field(j, "L", cfg.L);
  if (j.contains("L_mode")) cfg.L_mode = mode_from_name(j.at("L_mode").get<std::string>());
  if (j.contains("adjoint")) cfg.adjoint = scheme_from_name(j.at("adjoint").get<std::string>());
  read_field(j, "eps", cfg.eps);
  read_field(j, "f0", cfg.f0);
  read_field(j, "max_iters", cfg.max_iters);
  read_field(j, "data_refine", cfg.data_refine);
  read_field(j, "power_iters", cfg.power_iters);
  cfg.validate();
  return cfg;
}

std::vector<ExperimentConfig> parse_configs(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("experiments")) doc = doc.at("experiments");
  std::vector<ExperimentConfig> out;
  if (doc.is_array()) {
    for (const json& item : doc) out.push_back(config_from_json(item));
  } else {
    out.push_back(config_from_json(doc));
  }
  if (out.empty()) throw ValidationError("config: no experiments given");
  return out;
}

std::string serialize_configs(const std::vector<ExperimentConfig>& cfgs) {
  json doc = json::array();
  for (const auto& cfg : cfgs) doc.push_back(to_json(cfg));
  return json{{"experiments", doc}}.dump(2);
}

const std::vector<ExperimentConfig>& experiment_registry() {
  static const std::vector<ExperimentConfig> registry = [] {
    std::vector<ExperimentConfig> r;
    // One-dimensional: 40 x 40 space-time grid, mu = 5 + 10 t, L = 1, eps = 2e-3.
    r.push_back(one_d("line-a", 0.3, "sin(pi x/2)+x^2+1", 0.01, 1.0 / 20));
    r.push_back(one_d("line-b", 0.5, "sin(pi x)-2", 0.01, 1.0 / 20));
    r.push_back(one_d("line-sweep-1", 0.8, "-sin(pi x)+x+4", 0.01, 1.0 / 10));
    r.push_back(one_d("line-sweep-2", 0.8, "-sin(pi x)+x+4", 0.01, 1.0 / 20));
    r.push_back(one_d("line-sweep-3", 0.8, "-sin(pi x)+x+4", 0.01, 1.0 / 40));
    r.push_back(one_d("line-sweep-4", 0.8, "-sin(pi x)+x+4", 0.005, 1.0 / 20));
    r.push_back(one_d("line-sweep-5", 0.8, "-sin(pi x)+x+4", 0.02, 1.0 / 20));
    r.push_back(one_d("line-sweep-6", 0.8, "-sin(pi x)+x+4", 0.04, 1.0 / 20));

    // Two-dimensional: 40 x 40 x 20 grid, mu = 1 + 10 pi t^2, L = 2.
    const std::vector<Interval> b10 = {{0.1, 0.9}, {0.1, 0.9}};
    const std::vector<Interval> b20 = {{0.05, 0.95}, {0.05, 0.95}};
    const std::vector<Interval> b_side = {{0.0, 0.9}, {0.1, 0.9}};
    r.push_back(two_d("square-a", 0.3, "sin(x1)+sin(x2)+1", 0.01, b10, 3.0));
    r.push_back(two_d("square-b", 0.5, "cos(pi x1)cos(pi x2)+2", 0.01, b10, 3.0));
    const char* f_sweep = "exp((x1+x2)/4)+1";
    r.push_back(two_d("square-sweep-1", 0.8, f_sweep, 0.01, b10, 5.0));
    r.push_back(two_d("square-sweep-2", 0.8, f_sweep, 0.01, b20, 5.0));
    r.push_back(two_d("square-sweep-3", 0.8, f_sweep, 0.01, b_side, 5.0));
    r.push_back(two_d("square-sweep-4", 0.8, f_sweep, 0.005, b10, 5.0));
    // Same settings as square-sweep-1 with a second noise draw.
    r.push_back(two_d("square-sweep-5", 0.8, f_sweep, 0.01, b10, 5.0));
    r.back().seed = 2;
    r.push_back(two_d("square-sweep-6", 0.8, f_sweep, 0.02, b10, 5.0));
    r.push_back(two_d("square-sweep-7", 0.8, f_sweep, 0.04, b10, 5.0));
    return r;
  }();
  return registry;
}

std::vector<ExperimentConfig> find_experiments(const std::string& id) {
  const auto& reg = experiment_registry();
  auto select = [&](auto&& pred) {
    std::vector<ExperimentConfig> out;
    for (const auto& cfg : reg) {
      if (pred(cfg)) out.push_back(cfg);
    }
    return out;
  };
  auto prefixed = [](const std::string& prefix) {
    return [prefix](const ExperimentConfig& c) { return c.id.rfind(prefix, 0) == 0; };
  };
  auto either = [](std::string a, std::string b) {
    return [a, b](const ExperimentConfig& c) { return c.id == a || c.id == b; };
  };
  std::vector<ExperimentConfig> out;
  if (id == "all") out = reg;
  else if (id == "1d") out = select([](const ExperimentConfig& c) { return c.dim == 1; });
  else if (id == "2d") out = select([](const ExperimentConfig& c) { return c.dim == 2; });
  else if (id == "line-pair") out = select(either("line-a", "line-b"));
  else if (id == "line-sweep") out = select(prefixed("line-sweep-"));
  else if (id == "square-pair") out = select(either("square-a", "square-b"));
  else if (id == "square-sweep") out = select(prefixed("square-sweep-"));
  else out = select([&](const ExperimentConfig& c) { return c.id == id; });
  if (out.empty()) throw ValidationError("unknown experiment id '" + id + "'");
  return out;
}

std::string describe_omega(const BoxComplement& omega) {
  if (omega.full_domain()) return "full";
  std::ostringstream os;
  os << "complement";
  for (std::size_t a = 0; a < omega.box.size(); ++a) {
    os << (a == 0 ? "" : "x") << '[' << omega.box[a].lo << ':' << omega.box[a].hi << ']';
  }
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace tfsrc
