#include "run_config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "ifslab/errors.hpp"
#include "ifslab/multivalued.hpp"

namespace ifslab::cli {

namespace {

struct KeySpec {
  const char* name;
  const char* help;
};

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> keys = {
      {"M", "number of contractions (>= 2)"},
      {"N", "expansion factor of f_0 (>= 2)"},
      {"p0", "probability of f_0"},
      {"n", "number of steps"},
      {"trials", "number of independent trials"},
      {"cap", "per-trial step cap for stopping rules"},
      {"points", "number of test points"},
      {"word", "symbol word, e.g. 3020020 or 3,0,2"},
      {"starts", "comma-separated initial points"},
      {"eta", "binary word of symbol classes (0 expanding, 1 contracting)"},
      {"step-down", "negative walk step (taken with probability p0)"},
      {"step-up", "positive walk step"},
      {"z0", "initial walk position"},
      {"K", "upper exit level"},
      {"kind", "stopping rule: T, TK, S, W or V"},
      {"eps", "threshold eps"},
      {"eps-grid", "comma-separated list of eps values"},
      {"beta", "excursion level"},
      {"xJ", "initial point for rule W"},
      {"pattern", "symbol pattern for rule V"},
      {"k", "down step of the reflected walk (N = kappa^k)"},
      {"l", "up step of the reflected walk (M = kappa^l)"},
      {"kappa", "common base of M and N"},
      {"H", "truncation level of the coefficient sequence"},
      {"bins", "number of histogram bins"},
      {"grid", "histogram resolution per axis"},
      {"x0", "fixed first start point"},
      {"y0", "fixed second start point"},
      {"criteria", "comma-separated acceptance criterion ids (default: all)"},
      {"seed", "RNG seed (default: $IFSLAB_SEED, else 1)"},
      {"out", "output path, '-' for stdout"},
      {"format", "csv or json"},
      {"table", "table written in CSV mode"},
  };
  return keys;
}

const char* help_of(const std::string& key) {
  for (const auto& k : key_specs())
    if (key == k.name) return k.help;
  return "";
}

struct CommandSpec {
  std::string name;  // "experiment sync" for experiment kinds
  std::string help;
  std::vector<std::string> keys;
};

const std::vector<std::string> kCommonKeys = {"seed", "out", "format", "table"};

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> cmds = {
      {"system-info", "probabilities, Lyapunov exponent and regime of a system", {"M", "N", "p0"}},
      {"orbit", "iterate starting points under a word or a sampled symbol sequence",
       {"M", "N", "p0", "n", "word", "starts"}},
      {"transfer-check", "stationarity of Lebesgue measure on a uniform grid", {"M", "N", "p0", "points"}},
      {"gamma-check", "round trip and factor property of the skew-product extension", {"M", "N", "p0", "points"}},
      {"fiber", "distribution of f^n(0) over the words projecting onto a binary word", {"M", "N", "p0", "eta"}},
      {"strip", "kappa-adic strip containing the image of [0,1) under a word", {"M", "N", "p0", "word"}},
      {"walk", "sample path of a random walk (the derivative walk when M/N are given)",
       {"M", "N", "p0", "step-down", "step-up", "z0", "n"}},
      {"stopping", "first-passage and stopping-time samples",
       {"kind", "M", "N", "p0", "step-down", "step-up", "z0", "K", "eps", "xJ", "pattern", "trials", "cap"}},
      {"stationary", "coefficients b_h of the stationary measure", {"M", "N", "p0", "k", "l", "H"}},
      {"roots", "roots of the characteristic polynomial", {"M", "N", "p0", "k", "l"}},
      {"delta-mass", "mass of the eps-neighbourhood of the diagonal",
       {"M", "N", "p0", "k", "l", "kappa", "H", "eps-grid"}},
      {"experiment sync", "two-point synchronization (negative exponent)",
       {"M", "N", "p0", "trials", "n", "x0", "y0"}},
      {"experiment intermit", "intermittency at zero exponent",
       {"M", "N", "p0", "eps", "beta", "n", "trials", "x0", "y0"}},
      {"experiment diverge", "scaling of the diagonal mass (positive exponent)",
       {"M", "N", "p0", "eps-grid", "n", "trials"}},
      {"experiment equi", "equidistribution of a single orbit", {"M", "N", "p0", "bins", "n"}},
      {"experiment hist2d", "two-point histogram (positive exponent)", {"M", "N", "p0", "grid", "n"}},
      {"verify-all", "run the acceptance suite", {"criteria"}},
  };
  return cmds;
}

std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw UsageError("--" + key + ": unbalanced brackets in '" + text + "'");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw UsageError("--" + key + ": expected a finite real number, got '" + text + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& text, long long lo, long long hi) {
  const std::string s = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    // Accept integral values written in floating notation such as 1e7.
    const double d = to_double(key, s);
    if (d != std::floor(d) || std::abs(d) > 9.0e18)
      throw UsageError("--" + key + ": expected an integer, got '" + text + "'");
    v = static_cast<long long>(d);
  }
  if (v < lo || v > hi)
    throw UsageError("--" + key + ": value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  return v;
}

Word to_word(const std::string& key, const std::string& text) {
  Word w;
  const std::string s = trim(text);
  const bool listed = s.find_first_of(", []") != std::string::npos;
  if (listed) {
    for (const auto& item : split_list(key, s)) w.push_back(static_cast<Symbol>(to_int(key, item, 0, 1 << 20)));
  } else {
    for (char c : s) {
      if (c < '0' || c > '9') throw UsageError("--" + key + ": expected digits, got '" + text + "'");
      w.push_back(c - '0');
    }
  }
  return w;
}

class Values {
 public:
  explicit Values(const std::map<std::string, std::string>& raw) : raw_(raw) {}
  bool has(const std::string& k) const { return raw_.count(k) != 0; }
  const std::string& str(const std::string& k) const { return raw_.at(k); }
  double real(const std::string& k, double def) const { return has(k) ? to_double(k, str(k)) : def; }
  long long integer(const std::string& k, long long def, long long lo, long long hi) const {
    return has(k) ? to_int(k, str(k), lo, hi) : def;
  }
  std::vector<double> reals(const std::string& k) const {
    std::vector<double> v;
    if (has(k))
      for (const auto& item : split_list(k, str(k))) v.push_back(to_double(k, item));
    return v;
  }

 private:
  const std::map<std::string, std::string>& raw_;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("IFSLAB_SEED");
  if (!env || !*env) return 1;
  return static_cast<std::uint64_t>(to_int("seed", env, 0, INT64_MAX));
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  if (f.bad()) throw IoError("failed reading config file '" + path + "'");
  return os.str();
}

void require_regime(const SystemParams& sys, LyapRegime want, const std::string& what) {
  if (lyap_regime(sys) != want)
    throw PreconditionError(what + " needs a " + to_string(want) + " Lyapunov exponent, got lyap = " +
                            std::to_string(sys.lyap) + " (" + to_string(lyap_regime(sys)) + ")");
}

// (p0, k, l) either given directly or derived from multiplicatively dependent M, N.
void resolve_walk_shape(RunConfig& c, const Values& v, bool need_kappa) {
  c.p0 = v.real("p0", 0.5);
  if (v.has("k") || v.has("l")) {
    if (!v.has("k") || !v.has("l")) throw UsageError("--k and --l must be given together");
    c.k = static_cast<int>(v.integer("k", 0, 1, 64));
    c.l = static_cast<int>(v.integer("l", 0, 1, 64));
    c.kappa = static_cast<int>(v.integer("kappa", 0, 2, 1 << 20));
    if (need_kappa && c.kappa == 0) throw UsageError("--kappa is required with --k/--l");
    if (v.has("M") || v.has("N")) throw UsageError("give either --M/--N or --k/--l, not both");
    if (!(c.p0 > 0.0 && c.p0 < 1.0)) throw DomainError("p0 must lie in (0,1)");
    return;
  }
  if (v.has("kappa")) throw UsageError("--kappa only applies together with --k/--l");
  c.sys = make_system(static_cast<int>(v.integer("M", 2, -(1 << 20), 1 << 20)),
                      static_cast<int>(v.integer("N", 2, -(1 << 20), 1 << 20)), c.p0);
  c.multdep = mult_dependence(c.sys->M, c.sys->N);
  if (!c.multdep)
    throw PreconditionError("M = " + std::to_string(c.sys->M) + " and N = " + std::to_string(c.sys->N) +
                            " are not powers of a common base");
  c.k = c.multdep->k;
  c.l = c.multdep->l;
  c.kappa = c.multdep->kappa;
}

void require_nonnegative_exponent(const RunConfig& c) {
  const double t = static_cast<double>(c.l) / (c.k + c.l);
  if (c.p0 < t - 1e-12)
    throw PreconditionError("negative Lyapunov exponent: p0 = " + std::to_string(c.p0) + " < l/(k+l) = " +
                            std::to_string(t) + "; only the diagonal measure is stationary");
}

void require_strip(const RunConfig& c) {
  const double t = static_cast<double>(c.l) / (c.k + c.l);
  if (!(c.p0 > t + 1e-12))
    throw PreconditionError("needs positive Lyapunov exponent: p0 = " + std::to_string(c.p0) + " must exceed l/(k+l) = " +
                            std::to_string(t));
  if (std::gcd(c.k, c.l) != 1) throw PreconditionError("k and l must be coprime");
}

SystemParams system_from(const Values& v) {
  return make_system(static_cast<int>(v.integer("M", 2, -(1 << 20), 1 << 20)),
                     static_cast<int>(v.integer("N", 2, -(1 << 20), 1 << 20)), v.real("p0", 0.5));
}

// Walk taken from the system's derivative when M or N is given, else from explicit steps.
WalkParams walk_from(const Values& v, std::optional<SystemParams>& sys) {
  if (v.has("M") || v.has("N")) {
    if (v.has("step-down") || v.has("step-up")) throw UsageError("give either --M/--N or --step-down/--step-up");
    sys = system_from(v);
    return derivative_walk(*sys);
  }
  return make_walk(v.real("step-down", -1.0), v.real("step-up", 1.0), v.real("p0", 0.5));
}

void validate(RunConfig& c) {
  const Values v(c.raw);
  c.seed = v.has("seed") ? static_cast<std::uint64_t>(v.integer("seed", 0, 0, INT64_MAX)) : default_seed();
  c.out = v.has("out") ? v.str("out") : "-";
  if (c.out.empty()) throw UsageError("--out must not be empty");
  c.format = v.has("format") ? parse_format(v.str("format")) : Format::json;
  c.table = v.has("table") ? v.str("table") : "";

  const std::string& cmd = c.command;
  if (cmd == "system-info") {
    c.sys = system_from(v);
    c.multdep = mult_dependence(c.sys->M, c.sys->N);
  } else if (cmd == "orbit") {
    c.sys = system_from(v);
    c.n = static_cast<std::uint64_t>(v.integer("n", 20, 0, 100'000'000));
    if (v.has("word")) {
      c.word = to_word("word", v.str("word"));
      for (Symbol s : c.word)
        if (s > c.sys->M) throw DomainError("--word: symbol " + std::to_string(s) + " outside 0..M");
      if (v.has("n")) throw UsageError("give either --word or --n, not both");
    }
    c.starts = v.has("starts") ? v.reals("starts") : std::vector<double>{0.1, 0.6};
    if (c.starts.empty()) throw UsageError("--starts must list at least one point");
    for (double x : c.starts)
      if (!(x >= 0.0 && x < 1.0)) throw DomainError("--starts: points must lie in [0,1)");
  } else if (cmd == "transfer-check" || cmd == "gamma-check") {
    c.sys = system_from(v);
    c.points = static_cast<std::uint64_t>(v.integer("points", cmd == "gamma-check" ? 100000 : 10000, 1, 100'000'000));
  } else if (cmd == "fiber") {
    c.sys = system_from(v);
    if (!v.has("eta")) throw UsageError("--eta is required");
    for (Symbol s : to_word("eta", v.str("eta"))) {
      if (s > 1) throw DomainError("--eta: entries must be 0 or 1");
      c.eta.push_back(static_cast<std::uint8_t>(s));
    }
  } else if (cmd == "strip") {
    c.sys = system_from(v);
    c.multdep = mult_dependence(c.sys->M, c.sys->N);
    if (!c.multdep) throw PreconditionError("strip needs M and N to be powers of a common base");
    c.word = v.has("word") ? to_word("word", v.str("word")) : Word{};
    for (Symbol s : c.word)
      if (s > c.sys->M) throw DomainError("--word: symbol " + std::to_string(s) + " outside 0..M");
  } else if (cmd == "walk") {
    c.walk = walk_from(v, c.sys);
    c.z0 = v.real("z0", 0.0);
    c.n = static_cast<std::uint64_t>(v.integer("n", 100, 0, 100'000'000));
  } else if (cmd == "stopping") {
    c.kind = v.has("kind") ? v.str("kind") : "T";
    c.trials = static_cast<std::uint64_t>(v.integer("trials", 1000, 1, 1'000'000'000));
    c.cap = static_cast<std::uint64_t>(v.integer("cap", static_cast<long long>(kDefaultCap), 1, INT64_MAX));
    c.z0 = v.real("z0", 0.0);
    if (c.kind == "T" || c.kind == "TK" || c.kind == "S") {
      c.walk = walk_from(v, c.sys);
      if (c.kind == "TK") {
        if (!v.has("K")) throw UsageError("--K is required for kind TK");
        c.K = v.real("K", 0.0);
        if (!(c.z0 >= 0.0 && c.z0 <= *c.K)) throw DomainError("kind TK needs 0 <= z0 <= K");
      } else if (c.kind == "T") {
        if (!(c.z0 >= 0.0)) throw DomainError("z0 must be >= 0");
      } else {
        c.eps = v.real("eps", 0.009);
        const LevelSchedule sched = LevelSchedule::from_eps(c.eps);
        if (!c.walk->zero_drift()) throw PreconditionError("kind S needs a zero-drift walk");
        if (!(c.z0 > sched.level(0))) throw PreconditionError("kind S needs z0 above the level K_0");
      }
    } else if (c.kind == "W") {
      c.sys = system_from(v);
      c.eps = v.real("eps", 0.009);
      LevelSchedule::from_eps(c.eps);
      c.xJ = v.real("xJ", 1.0 / 256.0);
      if (!(c.xJ >= 0.0 && c.xJ < 1.0)) throw DomainError("--xJ must lie in [0,1)");
    } else if (c.kind == "V") {
      c.sys = system_from(v);
      if (!v.has("pattern")) throw UsageError("--pattern is required for kind V");
      c.word = to_word("pattern", v.str("pattern"));
      if (c.word.empty()) throw DomainError("--pattern must be nonempty");
      for (Symbol s : c.word)
        if (s < 1 || s > c.sys->M) throw DomainError("--pattern: symbols must lie in 1..M");
    } else {
      throw UsageError("--kind: expected T, TK, S, W or V, got '" + c.kind + "'");
    }
  } else if (cmd == "stationary") {
    resolve_walk_shape(c, v, false);
    if (std::gcd(c.k, c.l) != 1) throw PreconditionError("k and l must be coprime");
    require_nonnegative_exponent(c);
    if (v.has("H")) c.H = static_cast<int>(v.integer("H", 0, c.k + c.l, 10'000'000));
  } else if (cmd == "roots") {
    resolve_walk_shape(c, v, false);
    require_strip(c);
  } else if (cmd == "delta-mass") {
    resolve_walk_shape(c, v, true);
    require_strip(c);
    if (v.has("H")) c.H = static_cast<int>(v.integer("H", 0, c.k + c.l, 10'000'000));
    c.eps_grid = v.reals("eps-grid");
    if (c.eps_grid.empty())
      for (int j = 1; j <= 6; ++j) c.eps_grid.push_back(std::pow(static_cast<double>(c.kappa), -j));
    for (double e : c.eps_grid)
      if (!(e > 0.0 && e <= 1.0)) throw DomainError("--eps-grid: values must lie in (0,1]");
  } else if (cmd == "experiment") {
    c.sys = system_from(v);
    const SystemParams& sys = *c.sys;
    const std::string what = "experiment " + c.experiment;
    if (v.has("x0") != v.has("y0")) throw UsageError("--x0 and --y0 must be given together");
    if (v.has("x0")) {
      c.x0 = v.real("x0", 0.0);
      c.y0 = v.real("y0", 0.0);
      if (!(*c.x0 >= 0.0 && *c.x0 < 1.0 && *c.y0 >= 0.0 && *c.y0 < 1.0))
        throw DomainError("--x0/--y0 must lie in [0,1)");
    }
    if (c.experiment == "sync") {
      require_regime(sys, LyapRegime::negative, what);
      c.trials = static_cast<std::uint64_t>(v.integer("trials", 1000, 1, 1'000'000'000));
      c.n = static_cast<std::uint64_t>(v.integer("n", 2000, 1, INT64_MAX));
    } else if (c.experiment == "intermit") {
      require_regime(sys, LyapRegime::zero, what);
      c.eps = v.real("eps", 0.1);
      c.beta = v.real("beta", 0.5);
      if (!(c.eps > 0.0 && c.eps < 1.0)) throw DomainError("--eps must lie in (0,1)");
      if (!(c.beta > 0.0 && c.beta < 1.0)) throw DomainError("--beta must lie in (0,1)");
      c.trials = static_cast<std::uint64_t>(v.integer("trials", 20, 1, 1'000'000'000));
      c.n = static_cast<std::uint64_t>(v.integer("n", 100000, 1, INT64_MAX));
    } else if (c.experiment == "diverge") {
      require_regime(sys, LyapRegime::positive, what);
      c.eps_grid = v.reals("eps-grid");
      if (c.eps_grid.empty())
        for (int j = 1; j <= 6; ++j) c.eps_grid.push_back(std::pow(3.0, -j));
      for (double e : c.eps_grid)
        if (!(e > 0x1.0p-1000 && e <= 1.0)) throw DomainError("--eps-grid: values must lie in (2^-1000, 1]");
      c.trials = static_cast<std::uint64_t>(v.integer("trials", 4, 1, 1'000'000'000));
      c.n = static_cast<std::uint64_t>(v.integer("n", 1'000'000, 1, INT64_MAX));
    } else if (c.experiment == "equi") {
      c.bins = static_cast<int>(v.integer("bins", 20, 2, 1 << 24));
      c.n = static_cast<std::uint64_t>(v.integer("n", 1'000'000, 1, INT64_MAX));
    } else if (c.experiment == "hist2d") {
      require_regime(sys, LyapRegime::positive, what);
      c.grid = static_cast<int>(v.integer("grid", 81, 1, 4096));
      c.n = static_cast<std::uint64_t>(v.integer("n", 1'000'000, 1, INT64_MAX));
    }
  } else if (cmd == "verify-all") {
    for (double id : v.reals("criteria")) {
      if (id != std::floor(id) || id < 1 || id > 12) throw UsageError("--criteria: ids must be integers in 1..12");
      c.criteria.push_back(static_cast<int>(id));
    }
  }
}

}  // namespace

std::map<std::string, std::string> read_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError(std::string("config: invalid JSON: ") + e.what());
    }
    for (const auto& [key, val] : doc.items()) {
      auto scalar = [&key](const nlohmann::json& x) -> std::string {
        if (x.is_string()) return x.get<std::string>();
        if (x.is_number() || x.is_boolean()) return x.dump();
        throw UsageError("config: key '" + key + "' must hold a scalar or a list of scalars");
      };
      if (val.is_array()) {
        std::string joined;
        for (const auto& item : val) joined += (joined.empty() ? "" : ",") + scalar(item);
        out[normalize_key(key)] = joined;
      } else {
        out[normalize_key(key)] = scalar(val);
      }
    }
    return out;
  }
  std::istringstream is(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(is);
  } catch (const CLI::Error& e) {
    throw UsageError(std::string("config: invalid TOML: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty()) throw UsageError("config: unknown key '" + item.fullname() + "' (sections are not used)");
    std::string joined;
    for (const auto& in : item.inputs) joined += (joined.empty() ? "" : ",") + in;
    out[normalize_key(item.name)] = joined;
  }
  return out;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Random interval-map IFS laboratory", "ifslab"};
  app.require_subcommand(1);
  app.fallthrough(false);

  struct Bound {
    std::string command;
    std::string key;
    CLI::Option* opt;
  };
  std::map<std::string, std::string> slots;  // "command|key" -> flag text
  std::vector<Bound> bound;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> apps;

  CLI::App* experiment = app.add_subcommand("experiment", "Monte Carlo experiments");
  experiment->require_subcommand(1);
  for (const auto& spec : command_specs()) {
    CLI::App* sub = nullptr;
    if (spec.name.rfind("experiment ", 0) == 0)
      sub = experiment->add_subcommand(spec.name.substr(11), spec.help);
    else
      sub = app.add_subcommand(spec.name, spec.help);
    apps[spec.name] = sub;
    std::vector<std::string> keys = spec.keys;
    keys.insert(keys.end(), kCommonKeys.begin(), kCommonKeys.end());
    for (const auto& key : keys) {
      auto& slot = slots[spec.name + "|" + key];
      bound.push_back({spec.name, key, sub->add_option("--" + key, slot, help_of(key))});
    }
    sub->add_option("--config", config_paths[spec.name], "TOML or JSON document; its keys override flags");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream out, err;
    app.exit(e, out, err);
    throw HelpRequested{out.str()};
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream out, err;
    app.exit(e, out, err);
    throw HelpRequested{out.str()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig c;
  std::string spec_name;
  for (const auto& [name, sub] : apps)
    if (sub->parsed()) spec_name = name;
  if (spec_name.empty()) throw UsageError("no command given");
  if (spec_name.rfind("experiment ", 0) == 0) {
    c.command = "experiment";
    c.experiment = spec_name.substr(11);
  } else {
    c.command = spec_name;
  }

  for (const auto& b : bound)
    if (b.command == spec_name && b.opt->count() > 0) c.raw[b.key] = slots[spec_name + "|" + b.key];

  const std::string& cfg_path = config_paths[spec_name];
  if (!cfg_path.empty()) {
    const auto& spec = *std::find_if(command_specs().begin(), command_specs().end(),
                                     [&](const CommandSpec& s) { return s.name == spec_name; });
    std::set<std::string> allowed(spec.keys.begin(), spec.keys.end());
    allowed.insert(kCommonKeys.begin(), kCommonKeys.end());
    for (const auto& [key, value] : read_config_text(read_file(cfg_path))) {
      if (!allowed.count(key)) throw UsageError("config: unknown key '" + key + "' for command " + spec_name);
      c.raw[key] = value;
    }
  }

  validate(c);
  return c;
}

}  // namespace ifslab::cli
