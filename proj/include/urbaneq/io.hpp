#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "urbaneq/analysis.hpp"
#include "urbaneq/equilibrium.hpp"
#include "urbaneq/sustainability.hpp"

namespace urbaneq::io {

using Json = nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

//! Number or sentinel string for non-finite values.
Json number(double v);

Json tessellation_json(const DomainGrid& grid, const std::vector<int>& labels);
Json solution_json(const EquilibriumSolution& sol, const Geography& geo);
Json regime_json(const RegimeReport& rep);
Json existence_json(const ExistenceReport& rep);
Json probe_json(const ProbeReport& rep);
Json sustainability_json(const SustainabilityReport& rep);
Json catalog_json(const EquilibriumCatalog& cat);
Json validation_json(const ValidationReport& rep);

std::string site_csv(const EquilibriumSolution& sol, const Geography& geo);
std::string catalog_csv(const EquilibriumCatalog& cat);
std::string sweep_csv(const SweepResult& sweep);

//! Binary PGM, one byte per cell: label position or 255 outside; top row first.
void write_label_pgm(const std::string& path, const DomainGrid& grid, const std::vector<int>& labels);

struct MapSite {
  Point position;
  double mass = 0.0;
  bool active = true;
};

//! Everything needed to draw a tessellation.
struct MapView {
  BBox bbox;
  int nx = 0, ny = 0;
  std::vector<int> labels;
  std::vector<MapSite> sites;
};

MapView map_view(const EquilibriumSolution& sol, const Geography& geo);
//! Rebuilds a view from a saved solution document.
MapView map_view(const Json& solution);

std::string tessellation_svg(const MapView& view, int pixel_width = 640);
std::string sweep_svg(const SweepResult& sweep, int pixel_width = 640);

}  // namespace urbaneq::io
