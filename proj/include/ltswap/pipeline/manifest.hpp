#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ltswap/digest.hpp"
#include "ltswap/io.hpp"
#include "ltswap/llm/gateway.hpp"

namespace ltswap::pipeline {

namespace fs = std::filesystem;

/// Record of one completed stage run. Keys of `inputs` are "file:<path>" or
/// "param:<name>"; keys of `outputs` are paths relative to the work dir.
struct StageManifest {
  std::string stage;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::string started, finished;
};

inline fs::path manifest_path(const fs::path& work, const std::string& stage) {
  return work / ".manifest" / (stage + ".json");
}

inline io::json to_json(const StageManifest& m) {
  io::json j;
  j["stage"] = m.stage;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["started"] = m.started;
  j["finished"] = m.finished;
  return j;
}

inline std::optional<StageManifest> load_manifest(const fs::path& work, const std::string& stage) {
  const auto p = manifest_path(work, stage);
  if (!fs::exists(p)) return std::nullopt;
  try {
    const auto j = io::json::parse(io::read_file(p));
    StageManifest m;
    m.stage = j.at("stage").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    return m;
  } catch (const io::json::exception&) {
    return std::nullopt;  // unreadable manifest: treat the stage as never run
  }
}

inline void save_manifest(const fs::path& work, const StageManifest& m) {
  io::write_atomic(manifest_path(work, m.stage), to_json(m).dump(2) + "\n");
}

inline std::string param_hash(const io::json& params) { return sha256_hex(nlohmann::json(params).dump()); }

/// A stage is current iff its recorded inputs equal `inputs` and every
/// recorded output still exists with the recorded content hash.
inline bool up_to_date(const std::optional<StageManifest>& prev, const std::map<std::string, std::string>& inputs,
                       const fs::path& work) {
  if (!prev || prev->inputs != inputs || prev->outputs.empty()) return false;
  for (const auto& [rel, hash] : prev->outputs) {
    const auto p = work / rel;
    if (!fs::is_regular_file(p) || sha256_file(p) != hash) return false;
  }
  return true;
}

}  // namespace ltswap::pipeline
