#include <filesystem>

#include "doctest.h"
#include "spinhom/io.hpp"

using namespace spinhom;

TEST_CASE("coordinate formatting keeps full precision") {
  for (double v : {1.0 / 3.0, 0.1, 123456.789, -2.5e-7}) {
    std::string s = fmt_coord(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(std::stod(fmt_double(0.1)) == 0.1);
}

TEST_CASE("lattice file round trip is lossless") {
  Box box{2, Vec(0, 0), Vec(16, 16)};
  PointSet ps = generate_perturbed(2, box, 0.25, 7);
  std::string text = lattice_to_json(ps);
  PointSet back = lattice_from_json(text);

  CHECK(back.dim == ps.dim);
  CHECK(back.r_declared == ps.r_declared);
  CHECK(back.R_declared == ps.R_declared);
  CHECK(back.provenance.model == ps.provenance.model);
  CHECK(back.provenance.seed == ps.provenance.seed);
  REQUIRE(back.points.size() == ps.points.size());
  for (size_t i = 0; i < ps.points.size(); ++i) CHECK(back.points[i] == ps.points[i]);

  CHECK_THROWS(lattice_from_json("{\"dim\": 2}"));
  CHECK_THROWS_WITH(lattice_from_json("{\"dim\": 2, \"bogus\": 1}"),
                    doctest::Contains("unknown key"));
}

TEST_CASE("lattice file on disk") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "spinhom_io_test";
  fs::create_directories(dir);
  Box box{3, Vec(0, 0, 0), Vec(6, 6, 6)};
  PointSet ps = generate_deterministic(DeterministicModel::square, 3, box);
  std::string path = (dir / "lat.json").string();
  write_lattice_file(ps, path);
  PointSet back = read_lattice_file(path);
  CHECK(back.points.size() == ps.points.size());
  CHECK(back.dim == 3);
  fs::remove_all(dir);
}

TEST_CASE("neighbor graph serialization") {
  Box box{2, Vec(0, 0), Vec(10, 10)};
  PointSet ps = generate_deterministic(DeterministicModel::square, 2, box);
  NeighborGraph g = neighbor_graph(ps, 1.5);
  NeighborGraph back = graph_from_json(graph_to_json(g));
  CHECK(back.L == g.L);
  REQUIRE(back.nn.size() == g.nn.size());
  REQUIRE(back.lr.size() == g.lr.size());
  for (size_t i = 0; i < g.nn.size(); ++i) {
    CHECK(back.nn[i].i == g.nn[i].i);
    CHECK(back.nn[i].j == g.nn[i].j);
    CHECK(back.nn[i].facet_measure == g.nn[i].facet_measure);
  }
  for (size_t i = 0; i < g.lr.size(); ++i) {
    CHECK(back.lr[i].i == g.lr[i].i);
    CHECK(back.lr[i].j == g.lr[i].j);
  }
}

TEST_CASE("phi table csv round trip") {
  PhiTable t({0.0, 0.7, 2.0}, {1.5, 2.0, 1.25});
  PhiTable back = phi_table_from_csv(phi_table_to_csv(t));
  CHECK(back.angles() == t.angles());
  CHECK(back.values() == t.values());
  CHECK_THROWS(phi_table_from_csv("bad header\n1,2\n"));
}
