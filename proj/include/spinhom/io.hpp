#pragma once

#include <string>

#include "spinhom/continuum.hpp"
#include "spinhom/voronoi.hpp"

namespace spinhom {

// Shortest exact decimal for CSV/JSON values; locale-independent.
std::string fmt_double(double v);
// Fixed 17-significant-digit form used for lattice coordinates.
std::string fmt_coord(double v);

std::string lattice_to_json(const PointSet& ps);
PointSet lattice_from_json(const std::string& text);
void write_lattice_file(const PointSet& ps, const std::string& path);
PointSet read_lattice_file(const std::string& path);

std::string graph_to_json(const NeighborGraph& g);
NeighborGraph graph_from_json(const std::string& text);

std::string phi_table_to_csv(const PhiTable& table);
PhiTable phi_table_from_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace spinhom
