#include "spinhom/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spinhom {

std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string lattice_to_json(const PointSet& ps) {
  // Hand-rolled so coordinates keep 17 significant digits.
  std::ostringstream out;
  std::vector<double> lo(ps.box.lo.c.begin(), ps.box.lo.c.begin() + ps.dim);
  std::vector<double> hi(ps.box.hi.c.begin(), ps.box.hi.c.begin() + ps.dim);
  nlohmann::json box = {{"lo", lo}, {"hi", hi}};
  nlohmann::json prov = {
      {"model", ps.provenance.model}, {"seed", ps.provenance.seed}, {"params", ps.provenance.params}};

  out << "{\n";
  out << "\"dim\": " << ps.dim << ",\n";
  out << "\"box\": " << box.dump() << ",\n";
  out << "\"r\": " << fmt_coord(ps.r_declared) << ",\n";
  out << "\"R\": " << fmt_coord(ps.R_declared) << ",\n";
  out << "\"provenance\": " << prov.dump() << ",\n";
  out << "\"points\": [";
  for (size_t i = 0; i < ps.points.size(); ++i) {
    if (i) out << ",";
    out << "\n[";
    for (int k = 0; k < ps.dim; ++k) {
      if (k) out << ",";
      out << fmt_coord(ps.points[i][k]);
    }
    out << "]";
  }
  out << "\n]\n}\n";
  return out.str();
}

PointSet lattice_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  for (auto& [key, _] : j.items())
    if (key != "dim" && key != "box" && key != "r" && key != "R" && key != "provenance" && key != "points")
      throw std::invalid_argument("lattice file: unknown key '" + key + "'");
  PointSet ps;
  ps.dim = j.at("dim").get<int>();
  if (ps.dim != 2 && ps.dim != 3) throw std::invalid_argument("lattice file: dim must be 2 or 3");
  auto lo = j.at("box").at("lo").get<std::vector<double>>();
  auto hi = j.at("box").at("hi").get<std::vector<double>>();
  if (lo.size() != static_cast<size_t>(ps.dim) || hi.size() != static_cast<size_t>(ps.dim))
    throw std::invalid_argument("lattice file: box arity mismatch");
  ps.box.dim = ps.dim;
  for (int k = 0; k < ps.dim; ++k) {
    ps.box.lo[k] = lo[static_cast<size_t>(k)];
    ps.box.hi[k] = hi[static_cast<size_t>(k)];
  }
  ps.r_declared = j.at("r").get<double>();
  ps.R_declared = j.at("R").get<double>();
  ps.provenance.model = j.at("provenance").at("model").get<std::string>();
  ps.provenance.seed = j.at("provenance").at("seed").get<uint64_t>();
  ps.provenance.params = j.at("provenance").value("params", nlohmann::json::object());
  for (const auto& row : j.at("points")) {
    if (row.size() != static_cast<size_t>(ps.dim))
      throw std::invalid_argument("lattice file: point arity mismatch");
    Vec p;
    for (int k = 0; k < ps.dim; ++k) p[k] = row[static_cast<size_t>(k)].get<double>();
    ps.points.push_back(p);
  }
  return ps;
}

void write_lattice_file(const PointSet& ps, const std::string& path) {
  write_text_file(path, lattice_to_json(ps));
}

PointSet read_lattice_file(const std::string& path) { return lattice_from_json(read_text_file(path)); }

std::string graph_to_json(const NeighborGraph& g) {
  nlohmann::json j;
  j["L"] = g.L;
  auto& nn = j["nn"] = nlohmann::json::array();
  for (const NnPair& p : g.nn) nn.push_back({p.i, p.j, p.facet_measure});
  auto& lr = j["lr"] = nlohmann::json::array();
  for (const LrPair& p : g.lr) lr.push_back({p.i, p.j});
  return j.dump(1) + "\n";
}

NeighborGraph graph_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NeighborGraph g;
  g.L = j.at("L").get<double>();
  for (const auto& row : j.at("nn"))
    g.nn.push_back({row[0].get<int32_t>(), row[1].get<int32_t>(), row[2].get<double>()});
  for (const auto& row : j.at("lr")) g.lr.push_back({row[0].get<int32_t>(), row[1].get<int32_t>()});
  return g;
}

std::string phi_table_to_csv(const PhiTable& table) {
  std::ostringstream out;
  out << "angle_rad,phi\n";
  for (size_t i = 0; i < table.angles().size(); ++i)
    out << fmt_double(table.angles()[i]) << "," << fmt_double(table.values()[i]) << "\n";
  return out.str();
}

PhiTable phi_table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("angle_rad,phi", 0) != 0)
    throw std::invalid_argument("phi table csv: bad header");
  std::vector<double> angles, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("phi table csv: bad row");
    angles.push_back(std::stod(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return PhiTable(std::move(angles), std::move(values));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace spinhom
