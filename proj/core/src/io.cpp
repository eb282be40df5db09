#include "qchaos/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "qchaos/errors.hpp"

#ifndef QCHAOS_VERSION
#define QCHAOS_VERSION "unknown"
#endif

namespace qchaos {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; add byte swapping for this target");

namespace {

// JSON has no infinity or NaN; keep them readable instead of emitting null.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

const char* version_string() { return QCHAOS_VERSION; }

nlohmann::json provenance(const ExperimentConfig& cfg) {
  return {{"version", version_string()}, {"config", cfg.resolved()}};
}

NdjsonWriter::NdjsonWriter(const std::filesystem::path& path, const nlohmann::json& header)
    : path_(path), out_(path) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  out_ << nlohmann::json{{"qchaos", header}}.dump() << '\n';
}

void NdjsonWriter::write(const nlohmann::json& row) {
  out_ << row.dump() << '\n';
  ++rows_;
}

std::vector<nlohmann::json> read_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<nlohmann::json> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (first && j.contains("qchaos")) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(std::move(j));
  }
  return rows;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_field(const std::filesystem::path& dir, const std::string& name,
                 const PhaseSpaceField& field, const nlohmann::json& extra_meta) {
  const auto bin = dir / ("field-" + name + ".bin");
  const auto meta = dir / ("field-" + name + ".meta.json");
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw Error("cannot open " + bin.string() + " for writing");
    out.write(reinterpret_cast<const char*>(field.f.data()),
              static_cast<std::streamsize>(field.f.size() * sizeof(double)));
  }
  const auto& g = field.grid;
  nlohmann::json m = extra_meta;
  m["file"] = bin.filename().string();
  m["dtype"] = "float64";
  m["byte_order"] = "little";
  m["layout"] = "row-major [ix][ip]";
  m["shape"] = {g.n_x(), g.n_p()};
  m["x_min"] = g.x_grid().x_min();
  m["x_max"] = g.x_grid().x_max();
  m["n_x"] = g.n_x();
  m["dx"] = g.dx();
  m["p_min"] = g.p_min();
  m["p_max"] = g.p_max();
  m["n_p"] = g.n_p();
  m["dp"] = g.dp();
  m["t"] = field.t;
  write_json(meta, m);
}

PhaseSpaceField read_field(const std::filesystem::path& bin_path) {
  auto meta_path = bin_path;
  meta_path.replace_extension(".meta.json");
  const auto m = read_json(meta_path);
  const SpatialGrid xg(m.at("x_min").get<double>(), m.at("x_max").get<double>(),
                       m.at("n_x").get<std::size_t>());
  PhaseSpaceField f(PhaseSpaceGrid(xg, m.at("p_min").get<double>(), m.at("p_max").get<double>(),
                                   m.at("n_p").get<std::size_t>()));
  f.t = m.at("t").get<double>();
  std::ifstream in(bin_path, std::ios::binary);
  in.read(reinterpret_cast<char*>(f.f.data()), static_cast<std::streamsize>(f.f.size() * sizeof(double)));
  if (!in) throw Error("short read from " + bin_path.string());
  return f;
}

nlohmann::json trajectory_row(const MomentSet& m, double dy) {
  return {{"t", m.t}, {"x", m.x}, {"p", m.p}, {"Vx", m.vx}, {"Vp", m.vp}, {"Cxp", m.cxp}, {"dy", dy}};
}

nlohmann::json to_json(const QctEntry& e) {
  return {{"name", e.name},       {"lhs", number(e.lhs)},
          {"rhs", number(e.rhs)}, {"margin", number(e.margin)},
          {"threshold", e.threshold}, {"relation", e.relation},
          {"satisfied", e.satisfied}};
}

nlohmann::json to_json(const QctReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  return {{"point", {{"x", r.point.x}, {"p", r.point.p}, {"t", r.point.t}}},
          {"orbit_average", r.orbit_average},
          {"all_satisfied", r.all_satisfied()},
          {"entries", entries}};
}

}  // namespace qchaos
