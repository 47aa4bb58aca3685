#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "scherk/domain.hpp"
#include "scherk/profiles.hpp"
#include "scherk/solver.hpp"

namespace scherk {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct SolverBlock {
  double h = 1.0 / 32.0;
  std::vector<double> levels = {2, 4, 8, 16, 32};
  std::vector<int> generations = {0};
  ChartKind chart = ChartKind::HalfPlane;
  bool has_box = false;
  double box[4] = {0, 0, 0, 0};
  double truncation = 8.0;
  int max_iterations = 200;
  double cap_r0 = 1.5, cap_step = 0.5;
  std::vector<HPoint> probes;
};

struct DomainFile {
  ScherkDomain domain;
  SolverBlock solver;
  json raw;
  std::map<std::string, int> vertex_ids;
};

// Parses a schema-1 domain file; disk-model input is converted to the
// half-plane. Throws std::runtime_error with a location string on schema
// violations.
DomainFile parse_domain_file(const std::string& path);
DomainFile parse_domain_json(const json& j);

// report.json payload wrapper; timings are written separately so the report
// is byte-identical across runs.
struct Report {
  std::string subcommand;
  std::string input_hash;
  ordered_json payload;
};

void write_report(const Report& r, const std::string& out_dir);
void write_timings(const std::vector<std::pair<std::string, double>>& timings,
                   const std::string& out_dir);

void write_grid_csv(const DiscreteSolution& sol, const std::string& path);
void write_profile_csv(const CmcProfile& prof, const std::string& path);

struct FluxCsvRow {
  std::string arc;
  double value, arc_length, error;
};
void write_flux_csv(const std::vector<FluxCsvRow>& rows,
                    const std::string& path);

ordered_json verdict_to_json(const Verdict& v);

}  // namespace scherk
