#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qchaos/config.hpp"
#include "qchaos/phase_space.hpp"
#include "qchaos/qct.hpp"
#include "qchaos/quantum.hpp"

namespace qchaos {

const char* version_string();

/// {"version": ..., "config": {section: {key: value}}}
nlohmann::json provenance(const ExperimentConfig& cfg);

/// Line-delimited JSON. The first line is a header object
/// {"qchaos": provenance}; every following line is one record.
class NdjsonWriter {
 public:
  NdjsonWriter(const std::filesystem::path& path, const nlohmann::json& header);

  void write(const nlohmann::json& row);
  std::size_t rows() const { return rows_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t rows_ = 0;
};

/// Records of an NDJSON file written by NdjsonWriter, header skipped.
std::vector<nlohmann::json> read_ndjson(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes <dir>/field-<name>.bin (row-major [ix][ip], little-endian float64)
/// and <dir>/field-<name>.meta.json describing the grid.
void write_field(const std::filesystem::path& dir, const std::string& name,
                 const PhaseSpaceField& field, const nlohmann::json& extra_meta);

/// Inverse of write_field; takes the .bin path and finds the sidecar.
PhaseSpaceField read_field(const std::filesystem::path& bin_path);

nlohmann::json trajectory_row(const MomentSet& m, double dy);
nlohmann::json to_json(const QctEntry& e);
nlohmann::json to_json(const QctReport& r);

}  // namespace qchaos
