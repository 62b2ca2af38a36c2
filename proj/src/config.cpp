#include "nsplab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nsplab {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(path + "/" + it.key(), "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_num(const json& obj, const char* key, const std::string& path, double dflt) {
  const json* v = find(obj, key);
  if (!v) return dflt;
  if (!v->is_number()) fail(path + "/" + key, "expected a number");
  return v->get<double>();
}

int get_int(const json& obj, const char* key, const std::string& path, int dflt) {
  const json* v = find(obj, key);
  if (!v) return dflt;
  if (!v->is_number_integer()) fail(path + "/" + key, "expected an integer");
  return v->get<int>();
}

bool get_bool(const json& obj, const char* key, const std::string& path, bool dflt) {
  const json* v = find(obj, key);
  if (!v) return dflt;
  if (!v->is_boolean()) fail(path + "/" + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_str(const json& obj, const char* key, const std::string& path,
                    const std::string& dflt) {
  const json* v = find(obj, key);
  if (!v) return dflt;
  if (!v->is_string()) fail(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

FitWindow get_window(const json& obj, const char* key, const std::string& path,
                     FitWindow dflt) {
  const json* v = find(obj, key);
  if (!v) return dflt;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
    fail(path + "/" + key, "expected [t_min, t_max]");
  FitWindow w{(*v)[0].get<double>(), (*v)[1].get<double>()};
  if (!(w.t_min > 0.0) || !(w.t_max > w.t_min))
    fail(path + "/" + key, "need 0 < t_min < t_max");
  return w;
}

FluidParams parse_params(const json& obj) {
  const std::string path = "/params";
  check_keys(obj, path,
             {"mu", "nu", "sound_speed", "debye", "rho_bar", "gamma", "poisson"});
  FluidParams p;
  p.mu = get_num(obj, "mu", path, p.mu);
  p.nu = get_num(obj, "nu", path, p.nu);
  p.sound_speed = get_num(obj, "sound_speed", path, p.sound_speed);
  p.debye = get_num(obj, "debye", path, p.debye);
  p.rho_bar = get_num(obj, "rho_bar", path, p.rho_bar);
  p.gamma = get_num(obj, "gamma", path, p.gamma);
  p.poisson = get_bool(obj, "poisson", path, p.poisson);
  if (!(p.mu > 0.0)) fail(path + "/mu", "mu must be > 0");
  if (2.0 / 3.0 * p.mu + p.nu < 0.0) fail(path + "/nu", "(2/3)mu + nu must be >= 0");
  if (!(p.sound_speed > 0.0)) fail(path + "/sound_speed", "sound_speed must be > 0");
  if (!(p.debye > 0.0)) fail(path + "/debye", "debye must be > 0");
  if (!(p.rho_bar > 0.0)) fail(path + "/rho_bar", "rho_bar must be > 0");
  if (!(p.gamma >= 1.0)) fail(path + "/gamma", "gamma must be >= 1");
  p.validate();
  return p;
}

void parse_experiment(const json& obj, Config& cfg) {
  const std::string path = "/experiment";
  const json* kind = find(obj, "kind");
  if (!kind || !kind->is_string()) fail(path + "/kind", "required string");
  cfg.kind = kind_from_name(kind->get<std::string>());

  switch (cfg.kind) {
    case ExperimentKind::eigen: {
      check_keys(obj, path, {"kind", "r_min", "r_max", "samples"});
      auto& e = cfg.eigen;
      e.r_min = get_num(obj, "r_min", path, e.r_min);
      e.r_max = get_num(obj, "r_max", path, e.r_max);
      e.samples = get_int(obj, "samples", path, e.samples);
      if (!(e.r_min > 0.0) || !(e.r_max > e.r_min)) fail(path, "need 0 < r_min < r_max");
      if (e.samples < 16) fail(path + "/samples", "need >= 16 samples");
      break;
    }
    case ExperimentKind::green_check: {
      check_keys(obj, path, {"kind", "r_min", "r_max", "t_max", "r_samples", "t_samples"});
      auto& g = cfg.green_check;
      g.r_min = get_num(obj, "r_min", path, g.r_min);
      g.r_max = get_num(obj, "r_max", path, g.r_max);
      g.t_max = get_num(obj, "t_max", path, g.t_max);
      g.r_samples = get_int(obj, "r_samples", path, g.r_samples);
      g.t_samples = get_int(obj, "t_samples", path, g.t_samples);
      if (!(g.r_min > 0.0) || !(g.r_max > g.r_min)) fail(path, "need 0 < r_min < r_max");
      if (!(g.t_max > 0.0)) fail(path + "/t_max", "need t_max > 0");
      if (g.r_samples < 2 || g.t_samples < 2) fail(path, "need >= 2 samples per axis");
      break;
    }
    case ExperimentKind::decay: {
      check_keys(obj, path, {"kind", "window", "k_values", "linf", "l4"});
      auto& d = cfg.decay;
      d.window = get_window(obj, "window", path, d.window);
      d.linf = get_bool(obj, "linf", path, d.linf);
      d.l4 = get_bool(obj, "l4", path, d.l4);
      if (const json* kv = find(obj, "k_values")) {
        if (!kv->is_array()) fail(path + "/k_values", "expected an array of integers");
        d.k_values.clear();
        for (const auto& e : *kv) {
          if (!e.is_number_integer()) fail(path + "/k_values", "expected an array of integers");
          const int k = e.get<int>();
          if (k < 0 || k > 2) fail(path + "/k_values", "k must be in [0, 2]");
          d.k_values.push_back(k);
        }
        if (d.k_values.empty() || d.k_values[0] != 0)
          fail(path + "/k_values", "first entry must be 0");
      }
      break;
    }
    case ExperimentKind::lower_bound: {
      check_keys(obj, path, {"kind", "R", "band_window"});
      auto& l = cfg.lower_bound;
      l.R = get_num(obj, "R", path, l.R);
      l.band_window = get_window(obj, "band_window", path, l.band_window);
      if (!(l.R > 0.0)) fail(path + "/R", "need R > 0");
      break;
    }
    case ExperimentKind::compare_ns: {
      check_keys(obj, path, {"kind", "window"});
      cfg.compare_ns.window = get_window(obj, "window", path, cfg.compare_ns.window);
      break;
    }
    case ExperimentKind::kernel_lp: {
      check_keys(obj, path, {"kind", "lp", "alpha", "r_cut", "window"});
      auto& k = cfg.kernel_lp;
      k.r_cut = get_num(obj, "r_cut", path, k.r_cut);
      k.window = get_window(obj, "window", path, k.window);
      if (!(k.r_cut > 0.0)) fail(path + "/r_cut", "need r_cut > 0");
      if (const json* lp = find(obj, "lp")) {
        if (!lp->is_array() || lp->empty()) fail(path + "/lp", "expected a nonempty array");
        k.lp.clear();
        for (const auto& e : *lp) {
          double v;
          if (e.is_number()) v = e.get<double>();
          else if (e.is_string() && e.get<std::string>() == "inf")
            v = std::numeric_limits<double>::infinity();
          else
            fail(path + "/lp", "entries must be numbers or \"inf\"");
          if (!(v >= 2.0)) fail(path + "/lp", "need p >= 2");
          k.lp.push_back(v);
        }
      }
      if (const json* al = find(obj, "alpha")) {
        if (!al->is_array() || al->empty()) fail(path + "/alpha", "expected a nonempty array");
        k.alpha.clear();
        for (const auto& e : *al) {
          if (!e.is_number_integer()) fail(path + "/alpha", "expected integers");
          const int a = e.get<int>();
          if (a < 0 || a > 2) fail(path + "/alpha", "alpha must be in [0, 2]");
          k.alpha.push_back(a);
        }
      }
      break;
    }
    case ExperimentKind::simulate: {
      check_keys(obj, path,
                 {"kind", "n", "box", "dealias_fraction", "dt", "t_end", "scheme",
                  "series_stride", "snapshot_stride", "nonlinear", "vacuum_floor",
                  "blowup_factor", "initial", "eps", "seed", "write_final_grid"});
      auto& s = cfg.simulate;
      s.grid.n = get_int(obj, "n", path, s.grid.n);
      s.grid.box = get_num(obj, "box", path, s.grid.box);
      s.grid.dealias_fraction =
          get_num(obj, "dealias_fraction", path, s.grid.dealias_fraction);
      s.stepper.dt = get_num(obj, "dt", path, s.stepper.dt);
      s.stepper.t_end = get_num(obj, "t_end", path, s.stepper.t_end);
      s.stepper.scheme = get_int(obj, "scheme", path, s.stepper.scheme);
      s.stepper.series_stride = get_int(obj, "series_stride", path, s.stepper.series_stride);
      s.stepper.snapshot_stride =
          get_int(obj, "snapshot_stride", path, s.stepper.snapshot_stride);
      s.stepper.nonlinear = get_bool(obj, "nonlinear", path, s.stepper.nonlinear);
      s.stepper.vacuum_floor = get_num(obj, "vacuum_floor", path, s.stepper.vacuum_floor);
      s.stepper.blowup_factor = get_num(obj, "blowup_factor", path, s.stepper.blowup_factor);
      s.initial = get_str(obj, "initial", path, s.initial);
      s.eps = get_num(obj, "eps", path, s.eps);
      if (const json* v = find(obj, "seed")) {
        if (!v->is_number_unsigned() && !v->is_number_integer())
          fail(path + "/seed", "expected an unsigned integer");
        s.seed = v->get<std::uint64_t>();
      }
      s.write_final_grid = get_bool(obj, "write_final_grid", path, s.write_final_grid);
      if (s.initial != "trig" && s.initial != "seeded")
        fail(path + "/initial", "must be \"trig\" or \"seeded\"");
      if (!(s.eps >= 0.0)) fail(path + "/eps", "need eps >= 0");
      try {
        s.grid.validate();
        s.stepper.validate();
      } catch (const std::exception& ex) {
        fail(path, ex.what());
      }
      break;
    }
  }
}

}  // namespace

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::eigen: return "eigen";
    case ExperimentKind::green_check: return "green-check";
    case ExperimentKind::decay: return "decay";
    case ExperimentKind::lower_bound: return "lower-bound";
    case ExperimentKind::compare_ns: return "compare-ns";
    case ExperimentKind::kernel_lp: return "kernel-lp";
    case ExperimentKind::simulate: return "simulate";
  }
  throw std::logic_error("kind_name: bad enum");
}

ExperimentKind kind_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::eigen, ExperimentKind::green_check, ExperimentKind::decay,
        ExperimentKind::lower_bound, ExperimentKind::compare_ns, ExperimentKind::kernel_lp,
        ExperimentKind::simulate})
    if (kind_name(k) == name) return k;
  throw std::invalid_argument("config /experiment/kind: unknown kind \"" + name + "\"");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string canonical_json(const nlohmann::ordered_json& j) {
  // Reparse into the map-backed document, which sorts keys.
  return nlohmann::json::parse(j.dump()).dump();
}

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw std::invalid_argument(std::string("config parse error: ") + ex.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config /: expected an object");
  check_keys(doc, "", {"params", "experiment", "output"});

  Config cfg;
  if (const json* p = find(doc, "params")) {
    if (!p->is_object()) fail("/params", "expected an object");
    cfg.params = parse_params(*p);
  }
  const json* e = find(doc, "experiment");
  if (!e || !e->is_object()) fail("/experiment", "required object");
  parse_experiment(*e, cfg);
  if (const json* o = find(doc, "output")) {
    if (!o->is_object()) fail("/output", "expected an object");
    check_keys(*o, "/output", {"directory", "formats"});
    cfg.output_dir = get_str(*o, "directory", "/output", cfg.output_dir);
    if (const json* f = find(*o, "formats")) {
      if (!f->is_array()) fail("/output/formats", "expected an array");
      for (const auto& entry : *f) {
        if (!entry.is_string() ||
            (entry.get<std::string>() != "csv" && entry.get<std::string>() != "json"))
          fail("/output/formats", "entries must be \"csv\" or \"json\"");
      }
    }
  }

  cfg.echo = doc;
  cfg.hash = fnv1a(canonical_json(doc));
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace nsplab
