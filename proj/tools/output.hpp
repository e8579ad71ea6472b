#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace hmix::cli {

/// Opens `dir/name` for writing; CSV files start with a `# config:` line.
inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name,
                                 const nlohmann::json& config) {
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  if (name.ends_with(".csv")) out << "# config: " << config.dump() << '\n';
  return out;
}

inline void write_json_file(const std::filesystem::path& dir, const std::string& name, const nlohmann::json& j) {
  auto out = open_output(dir, name, j);
  out << j.dump(2) << '\n';
}

}  // namespace hmix::cli
