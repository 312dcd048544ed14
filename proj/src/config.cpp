#include "spinhom/config.hpp"

#include <algorithm>
#include <cctype>

#include "spinhom/io.hpp"

namespace spinhom {

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool eol() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
};

nlohmann::json parse_value(Cursor& c);

nlohmann::json parse_string(Cursor& c) {
  ++c.pos;  // opening quote
  std::string out;
  while (!c.eol() && c.peek() != '"') {
    if (c.peek() == '\\') {
      ++c.pos;
      if (c.eol()) c.fail("dangling escape");
      char e = c.peek();
      if (e == '"' || e == '\\')
        out.push_back(e);
      else if (e == 'n')
        out.push_back('\n');
      else if (e == 't')
        out.push_back('\t');
      else
        c.fail("unsupported escape");
      ++c.pos;
    } else {
      out.push_back(c.peek());
      ++c.pos;
    }
  }
  if (c.eol()) c.fail("unterminated string");
  ++c.pos;  // closing quote
  return out;
}

nlohmann::json parse_array(Cursor& c) {
  ++c.pos;  // '['
  nlohmann::json arr = nlohmann::json::array();
  c.skip_ws();
  if (!c.eol() && c.peek() == ']') {
    ++c.pos;
    return arr;
  }
  for (;;) {
    arr.push_back(parse_value(c));
    c.skip_ws();
    if (c.eol()) c.fail("unterminated array");
    if (c.peek() == ',') {
      ++c.pos;
      c.skip_ws();
      continue;
    }
    if (c.peek() == ']') {
      ++c.pos;
      return arr;
    }
    c.fail("expected ',' or ']' in array");
  }
}

nlohmann::json parse_value(Cursor& c) {
  c.skip_ws();
  if (c.eol()) c.fail("missing value");
  char ch = c.peek();
  if (ch == '"') return parse_string(c);
  if (ch == '[') return parse_array(c);
  size_t start = c.pos;
  while (!c.eol() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' && c.peek() != ' ' &&
         c.peek() != '\t')
    ++c.pos;
  std::string tok = c.s.substr(start, c.pos - start);
  if (tok == "true") return true;
  if (tok == "false") return false;
  // integer or float
  bool is_int = !tok.empty();
  for (size_t i = 0; i < tok.size(); ++i) {
    char d = tok[i];
    if (i == 0 && (d == '+' || d == '-')) continue;
    if (!std::isdigit(static_cast<unsigned char>(d))) {
      is_int = false;
      break;
    }
  }
  try {
    if (is_int) return static_cast<int64_t>(std::stoll(tok));
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) c.fail("bad value '" + tok + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    c.fail("bad value '" + tok + "'");
  }
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char ch : k)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') return false;
  return true;
}

}  // namespace

nlohmann::json parse_toml_lite(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // strip comment (strings are quoted; a '#' inside quotes stays)
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line = line.substr(0, i);
        break;
      }
    }
    // trim
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": bad table header");
      std::string path = line.substr(1, line.size() - 2);
      table = &root;
      size_t p = 0;
      while (p <= path.size()) {
        size_t d = path.find('.', p);
        std::string part = path.substr(p, d == std::string::npos ? std::string::npos : d - p);
        if (!valid_key(part))
          throw ConfigError("config line " + std::to_string(line_no) + ": bad table name '" + part + "'");
        table = &(*table)[part];
        if (!table->is_object()) *table = nlohmann::json::object();
        p = d == std::string::npos ? path.size() + 1 : d + 1;
      }
      continue;
    }

    size_t eq = std::string::npos;
    bool q = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') q = !q;
      if (line[i] == '=' && !q) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = line.substr(0, eq);
    size_t ke = key.find_last_not_of(" \t");
    key = key.substr(0, ke == std::string::npos ? 0 : ke + 1);
    if (!valid_key(key)) throw ConfigError("config line " + std::to_string(line_no) + ": bad key '" + key + "'");
    if (table->contains(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

    std::string vtext = line.substr(eq + 1);
    Cursor c{vtext, 0, line_no};
    nlohmann::json v = parse_value(c);
    c.skip_ws();
    if (!c.eol()) c.fail("trailing characters after value");
    (*table)[key] = v;
  }
  return root;
}

namespace {

class SchemaReader {
 public:
  SchemaReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {}

  ~SchemaReader() = default;

  const nlohmann::json* get(const std::string& key) {
    seen_.push_back(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const nlohmann::json& require(const std::string& key) {
    const nlohmann::json* v = get(key);
    if (!v) throw ConfigError(path_ + ": missing required key '" + key + "'");
    return *v;
  }

  void finish() const {
    for (auto& [key, _] : j_.items())
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        throw ConfigError(path_ + ": unknown key '" + key + "'");
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

double as_number(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

std::vector<double> as_number_list(const nlohmann::json& v, const std::string& what) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
    return out;
  }
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a number or non-empty array");
  for (const auto& x : v) out.push_back(as_number(x, what + " entry"));
  return out;
}

Vec as_vec(const nlohmann::json& v, int dim, const std::string& what) {
  if (!v.is_array() || v.size() != static_cast<size_t>(dim))
    throw ConfigError(what + " must be an array of " + std::to_string(dim) + " numbers");
  Vec out;
  for (int k = 0; k < dim; ++k) out[k] = as_number(v[static_cast<size_t>(k)], what);
  return out;
}

}  // namespace

RunConfig run_config_from_text(const std::string& text) {
  nlohmann::json j = parse_toml_lite(text);
  RunConfig cfg;
  cfg.raw_text = text;

  SchemaReader top(j, "config");
  const nlohmann::json& exp = top.require("experiment");
  {
    SchemaReader r(exp, "experiment");
    std::string type = r.require("type").get<std::string>();
    if (type == "phi")
      cfg.type = ExperimentType::phi;
    else if (type == "sweep")
      cfg.type = ExperimentType::sweep;
    else if (type == "translation")
      cfg.type = ExperimentType::translation;
    else if (type == "subadd")
      cfg.type = ExperimentType::subadd;
    else if (type == "gamma")
      cfg.type = ExperimentType::gamma;
    else if (type == "lattice-audit")
      cfg.type = ExperimentType::lattice_audit;
    else
      throw ConfigError("experiment.type: unknown experiment '" + type + "'");
    r.finish();
  }

  const nlohmann::json& lat = top.require("lattice");
  {
    SchemaReader r(lat, "lattice");
    cfg.lattice.model = r.require("model").get<std::string>();
    if (cfg.lattice.model != "square" && cfg.lattice.model != "triangular" &&
        cfg.lattice.model != "perturbed" && cfg.lattice.model != "parking")
      throw ConfigError("lattice.model: unknown model '" + cfg.lattice.model + "'");
    if (const auto* v = r.get("dim")) cfg.lattice.dim = static_cast<int>(as_number(*v, "lattice.dim"));
    if (cfg.lattice.dim != 2 && cfg.lattice.dim != 3) throw ConfigError("lattice.dim must be 2 or 3");
    if (const auto* v = r.get("a")) cfg.lattice.a = as_number(*v, "lattice.a");
    if (!(cfg.lattice.a >= 0.0 && cfg.lattice.a < 0.5))
      throw ConfigError("lattice.a must satisfy 0 <= a < 1/2");
    if (const auto* v = r.get("diameter")) cfg.lattice.diameter = as_number(*v, "lattice.diameter");
    if (!(cfg.lattice.diameter > 0.0)) throw ConfigError("lattice.diameter must be positive");
    if (const auto* v = r.get("defects")) cfg.lattice.defects = static_cast<int>(as_number(*v, "lattice.defects"));
    if (cfg.lattice.defects < 0) throw ConfigError("lattice.defects must be non-negative");
    if (const auto* v = r.get("seeds")) {
      if (!v->is_array() || v->empty()) throw ConfigError("lattice.seeds must be a non-empty array");
      for (const auto& s : *v) cfg.seeds.push_back(s.get<uint64_t>());
    }
    if (const auto* v = r.get("box")) {
      auto b = as_number_list(*v, "lattice.box");
      if (b.size() != 2) throw ConfigError("lattice.box must be [lo, hi]");
      cfg.gen_box.dim = cfg.lattice.dim;
      for (int k = 0; k < cfg.lattice.dim; ++k) {
        cfg.gen_box.lo[k] = b[0];
        cfg.gen_box.hi[k] = b[1];
      }
      cfg.has_gen_box = true;
    }
    r.finish();
  }
  if (cfg.seeds.empty()) cfg.seeds.push_back(1);

  if (const auto* model = top.get("model")) {
    SchemaReader r(*model, "model");
    if (const auto* v = r.get("L")) cfg.model.L = as_number(*v, "model.L");
    if (const auto* c = r.get("c_nn")) {
      SchemaReader rn(*c, "model.c_nn");
      cfg.model.nn_const = as_number(rn.require("const"), "model.c_nn.const");
      rn.finish();
    }
    if (const auto* c = r.get("c_lr")) {
      SchemaReader rl(*c, "model.c_lr");
      std::string family = rl.require("family").get<std::string>();
      if (family == "zero") {
        cfg.model.family = LrKernel::zero;
      } else if (family == "power") {
        cfg.model.family = LrKernel::power;
        cfg.model.beta = as_number(rl.require("beta"), "model.c_lr.beta");
        cfg.model.p = as_number(rl.require("p"), "model.c_lr.p");
      } else if (family == "exp") {
        cfg.model.family = LrKernel::exponential;
        cfg.model.beta = as_number(rl.require("beta"), "model.c_lr.beta");
        cfg.model.lambda = as_number(rl.require("lambda"), "model.c_lr.lambda");
      } else {
        throw ConfigError("model.c_lr.family: unknown family '" + family + "'");
      }
      rl.finish();
    }
    r.finish();
  }
  try {
    validate_model(cfg.model, cfg.lattice.dim);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  bool needs_cell = cfg.type == ExperimentType::phi || cfg.type == ExperimentType::sweep ||
                    cfg.type == ExperimentType::translation || cfg.type == ExperimentType::subadd;
  if (const auto* cell = top.get("cell")) {
    SchemaReader r(*cell, "cell");
    if (const auto* v = r.get("nu")) {
      // a single direction or a list of directions
      cfg.nu_list.clear();
      if (v->is_array() && !v->empty() && (*v)[0].is_array()) {
        for (const auto& row : *v) cfg.nu_list.push_back(as_vec(row, cfg.lattice.dim, "cell.nu entry"));
      } else {
        cfg.nu_list.push_back(as_vec(*v, cfg.lattice.dim, "cell.nu"));
      }
      for (Vec& d : cfg.nu_list) {
        double n = norm(d);
        if (!(n > 0.0)) throw ConfigError("cell.nu must be a non-zero vector");
        d = d * (1.0 / n);
      }
      cfg.nu = cfg.nu_list.front();
    }
    if (const auto* v = r.get("t")) cfg.t_list = as_number_list(*v, "cell.t");
    if (const auto* v = r.get("center")) cfg.center = as_vec(*v, cfg.lattice.dim, "cell.center");
    if (const auto* v = r.get("l")) cfg.l_override = as_number(*v, "cell.l");
    if (const auto* v = r.get("directions"))
      cfg.directions = static_cast<int>(as_number(*v, "cell.directions"));
    r.finish();
  } else if (needs_cell) {
    throw ConfigError("config: missing required table [cell]");
  }

  if (cfg.type == ExperimentType::translation) {
    const nlohmann::json& tr = top.require("translation");
    SchemaReader r(tr, "translation");
    const nlohmann::json& offs = r.require("offsets");
    if (!offs.is_array() || offs.empty()) throw ConfigError("translation.offsets must be a non-empty array");
    for (const auto& o : offs) cfg.offsets.push_back(as_vec(o, cfg.lattice.dim, "translation.offsets entry"));
    r.finish();
  } else if (top.get("translation")) {
    throw ConfigError("config: [translation] table only applies to the translation experiment");
  }

  if (cfg.type == ExperimentType::subadd) {
    const nlohmann::json& sa = top.require("subadd");
    SchemaReader r(sa, "subadd");
    cfg.K = as_number(r.require("K"), "subadd.K");
    r.finish();
  } else if (top.get("subadd")) {
    throw ConfigError("config: [subadd] table only applies to the subadd experiment");
  }

  if (cfg.type == ExperimentType::gamma) {
    const nlohmann::json& ga = top.require("gamma");
    SchemaReader r(ga, "gamma");
    cfg.eps_list = as_number_list(r.require("eps"), "gamma.eps");
    for (size_t k = 1; k < cfg.eps_list.size(); ++k)
      if (!(cfg.eps_list[k] < cfg.eps_list[k - 1])) throw ConfigError("gamma.eps must be strictly decreasing");
    if (const auto* v = r.get("domain_side")) cfg.domain_side = as_number(*v, "gamma.domain_side");
    if (!(cfg.domain_side > 0.0)) throw ConfigError("gamma.domain_side must be positive");
    if (const auto* v = r.get("phi")) cfg.phi_source = v->get<std::string>();
    r.finish();
  } else if (top.get("gamma")) {
    throw ConfigError("config: [gamma] table only applies to the gamma experiment");
  }

  if (const auto* outp = top.get("output")) {
    SchemaReader r(*outp, "output");
    if (const auto* v = r.get("dir")) cfg.out_dir = v->get<std::string>();
    r.finish();
  }
  if (const auto* run = top.get("run")) {
    SchemaReader r(*run, "run");
    if (const auto* v = r.get("jobs")) cfg.jobs = static_cast<int>(as_number(*v, "run.jobs"));
    if (cfg.jobs < 0) throw ConfigError("run.jobs must be non-negative");
    if (const auto* v = r.get("quiet")) {
      if (!v->is_boolean()) throw ConfigError("run.quiet must be a boolean");
      cfg.quiet = v->get<bool>();
    }
    r.finish();
  }
  top.finish();

  // Cross-field checks, before any computation.
  if (needs_cell || cfg.type == ExperimentType::gamma) {
    if (needs_cell) {
      if (cfg.t_list.empty()) throw ConfigError("cell.t: at least one cube size required");
      if (!std::is_sorted(cfg.t_list.begin(), cfg.t_list.end()) ||
          std::adjacent_find(cfg.t_list.begin(), cfg.t_list.end()) != cfg.t_list.end())
        throw ConfigError("cell.t must be strictly increasing");
      double r_lat = lattice_r(cfg.lattice);
      for (double t : cfg.t_list) {
        double l = cfg.l_override;
        if (l <= 0.0) {
          if (!(t > 4.0 * (cfg.model.L + r_lat)) || !(t > 4.0))
            throw ConfigError("cell.t: t must exceed max(4, 4(L+r)) for the boundary-width schedule");
          l = boundary_width(t, cfg.model.L, r_lat);
        }
        if (!(l >= cfg.model.L + r_lat)) throw ConfigError("cell.l violates l >= L + r");
        if (!(l < t / 2.0)) throw ConfigError("cell.l violates l < t/2 (empty free set)");
      }
    }
    if (cfg.type == ExperimentType::sweep && cfg.directions < 1)
      throw ConfigError("cell.directions: sweep needs at least one direction");
    if (cfg.type == ExperimentType::gamma) {
      double r_lat = lattice_r(cfg.lattice);
      for (double eps : cfg.eps_list) {
        if (!(eps > 0.0)) throw ConfigError("gamma.eps entries must be positive");
        double l = std::sqrt(1.0 / eps);
        double side = cfg.domain_side / eps;
        if (!(l >= cfg.model.L + r_lat)) throw ConfigError("gamma.eps: boundary layer below L + r");
        if (!(l < side / 2.0)) throw ConfigError("gamma.eps: boundary layer l must satisfy l < side/2");
      }
      if (cfg.phi_source == "auto") {
        if (cfg.t_list.empty())
          throw ConfigError("gamma with phi = \"auto\" needs cell.t for the phi estimate");
        for (double t : cfg.t_list)
          if (!(t > 4.0 * (cfg.model.L + r_lat)) || !(t > 4.0))
            throw ConfigError("cell.t: t must exceed max(4, 4(L+r)) for the boundary-width schedule");
      }
    }
  }
  if (cfg.type == ExperimentType::lattice_audit && !cfg.has_gen_box)
    throw ConfigError("lattice-audit requires lattice.box");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return run_config_from_text(text);
}

}  // namespace spinhom
