#include "kinuq/bench/output.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinuq/error.hpp"
#include "kinuq/hash.hpp"
#include "kinuq/log.hpp"
#include "kinuq/simd/kernels.hpp"

namespace kinuq::bench {

using nlohmann::json;
namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  Fnv1a h;
  h.add(std::string_view(to_json(cfg).dump()));
  return h.value();
}

std::uint64_t fields_hash(const uq::FieldSet& f) {
  Fnv1a h;
  for (const auto& q : f.q) {
    h.add(q.size());
    for (double x : q) h.add(x);
  }
  return h.value();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_fields_csv(std::ostream& os, std::span<const double> x, const uq::FieldSet& mean,
                      const uq::FieldSet* stddev, const uq::FieldSet* err,
                      const std::string& manifest_hash) {
  const std::size_t n = x.size();
  auto check = [n](const uq::FieldSet& f) {
    for (const auto& q : f.q) {
      if (q.size() != n) throw Error(ErrorKind::Shape, "CSV column length differs from the grid");
    }
  };
  check(mean);
  if (stddev) check(*stddev);
  if (err) check(*err);

  os << "# manifest_hash=" << manifest_hash << '\n';
  os << "x";
  for (auto name : uq::kQuantityNames) os << ',' << name;
  if (stddev)
    for (auto name : uq::kQuantityNames) os << ",std_" << name;
  if (err)
    for (auto name : uq::kQuantityNames) os << ",err_" << name;
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << format_double(x[i]);
    for (const auto& q : mean.q) os << ',' << format_double(q[i]);
    if (stddev)
      for (const auto& q : stddev->q) os << ',' << format_double(q[i]);
    if (err)
      for (const auto& q : err->q) os << ',' << format_double(q[i]);
    os << '\n';
  }
}

void write_fields_csv(const std::string& path, std::span<const double> x, const uq::FieldSet& mean,
                      const uq::FieldSet* stddev, const uq::FieldSet* err,
                      const std::string& manifest_hash) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
  write_fields_csv(os, x, mean, stddev, err, manifest_hash);
}

CsvTable read_fields_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  const std::string tag = "# manifest_hash=";
  while (std::getline(in, line)) {
    if (line.rfind(tag, 0) == 0) {
      t.manifest_hash = line.substr(tag.size());
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.columns.size()) throw Error(ErrorKind::Shape, path + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(const std::string& path, const json& j) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
  os << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
}

json manifest_base(const ExperimentConfig& cfg) {
  json m;
  m["config"] = to_json(cfg);
  m["config_hash"] = hex64(config_hash(cfg));
  const auto isa = simd::kernels().isa;
  Fnv1a h;
  h.add(std::string_view(kSoftwareVersion));
  h.add(std::string_view(simd::isa_name(isa)));
  m["software"] = {{"name", "kinuq"},
                   {"version", kSoftwareVersion},
                   {"isa", std::string(simd::isa_name(isa))},
                   {"hash", hex64(h.value())}};
  return m;
}

json warnings_json() {
  json w = json::object();
  for (const auto& [tag, n] : log::warning_counts()) w[tag] = n;
  return w;
}

std::string cache_dir(const std::string& fallback) {
  const char* env = std::getenv("KINUQ_CACHE");
  return (env && *env) ? std::string(env) : fallback;
}

std::optional<uq::FieldSet> load_cached(const std::string& dir, const std::string& key) {
  const fs::path p = fs::path(dir) / (key + ".json");
  if (!fs::exists(p)) return std::nullopt;
  try {
    const json j = read_json(p.string());
    if (j.at("key").get<std::string>() != key) {
      log::warn("reference-cache", p.string() + ": key mismatch, recomputing");
      return std::nullopt;
    }
    uq::FieldSet f;
    for (std::size_t k = 0; k < uq::kNumQuantities; ++k) {
      f[k] = j.at("fields").at(std::string(uq::kQuantityNames[k])).get<std::vector<double>>();
    }
    if (hex64(fields_hash(f)) != j.at("content_hash").get<std::string>()) {
      log::warn("reference-cache", p.string() + ": content hash mismatch, recomputing");
      return std::nullopt;
    }
    return f;
  } catch (const std::exception& e) {
    log::warn("reference-cache", p.string() + ": unreadable (" + e.what() + "), recomputing");
    return std::nullopt;
  }
}

void store_cached(const std::string& dir, const std::string& key, const uq::FieldSet& f,
                  const json& params) {
  json j;
  j["key"] = key;
  j["params"] = params;
  json fields;
  for (std::size_t k = 0; k < uq::kNumQuantities; ++k) fields[std::string(uq::kQuantityNames[k])] = f[k];
  j["fields"] = fields;
  j["content_hash"] = hex64(fields_hash(f));
  // Write then rename so concurrent readers never see a partial file.
  fs::create_directories(dir);
  const fs::path final_path = fs::path(dir) / (key + ".json");
  const fs::path tmp = fs::path(dir) / (key + ".json.tmp");
  {
    std::ofstream os(tmp);
    if (!os) throw Error(ErrorKind::Config, "cannot write '" + tmp.string() + "'");
    os << j.dump() << '\n';
  }
  fs::rename(tmp, final_path);
}

}  // namespace kinuq::bench
