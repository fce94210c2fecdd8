#pragma once

// On-disk formats: field CSVs, run manifests and the reference cache.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinuq/bench/config.hpp"
#include "kinuq/uq/fields.hpp"

namespace kinuq::bench {

inline constexpr const char* kSoftwareVersion = "0.1.0";

std::string hex64(std::uint64_t v);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::uint64_t fields_hash(const uq::FieldSet& f);

// "%.17g"
std::string format_double(double v);

// Columns x, rho, ux, uy, T[, std_*][, err_*] after a "# manifest_hash=" line.
void write_fields_csv(std::ostream& os, std::span<const double> x, const uq::FieldSet& mean,
                      const uq::FieldSet* stddev, const uq::FieldSet* err,
                      const std::string& manifest_hash);
void write_fields_csv(const std::string& path, std::span<const double> x, const uq::FieldSet& mean,
                      const uq::FieldSet* stddev, const uq::FieldSet* err,
                      const std::string& manifest_hash);

struct CsvTable {
  std::string manifest_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
CsvTable read_fields_csv(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Manifest skeleton: config echo, config hash, software block.
nlohmann::json manifest_base(const ExperimentConfig& cfg);
nlohmann::json warnings_json();

// KINUQ_CACHE, or fallback when unset.
std::string cache_dir(const std::string& fallback);

// Returns the cached fields when the file exists, its key matches and its
// content hash verifies; otherwise nullopt (a corrupt entry is reported).
std::optional<uq::FieldSet> load_cached(const std::string& dir, const std::string& key);
void store_cached(const std::string& dir, const std::string& key, const uq::FieldSet& f,
                  const nlohmann::json& params);

}  // namespace kinuq::bench
