// Copyright 2026 The QRDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "qrdr/errors.hpp"

namespace qrdr {

struct ReportRecord {
  std::string experiment;
  std::string timestamp;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<std::string> artifacts;

  bool operator==(const ReportRecord&) const = default;
};

inline void to_json(nlohmann::json& j, const ReportRecord& r) {
  j = nlohmann::json{{"experiment", r.experiment},
                     {"timestamp", r.timestamp},
                     {"config", r.config},
                     {"metrics", r.metrics},
                     {"artifacts", r.artifacts}};
}

inline void from_json(const nlohmann::json& j, ReportRecord& r) {
  j.at("experiment").get_to(r.experiment);
  j.at("timestamp").get_to(r.timestamp);
  r.config = j.at("config");
  r.metrics = j.at("metrics");
  j.at("artifacts").get_to(r.artifacts);
}

/// UTC ISO-8601. SOURCE_DATE_EPOCH, when set, replaces the wall clock.
inline std::string report_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

/// Keys come out sorted, so equal records serialize to equal bytes.
inline std::string serialize_report(const ReportRecord& r) {
  return nlohmann::json(r).dump(2) + "\n";
}

inline void emit_report(const ReportRecord& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open report file " + path);
  out << serialize_report(r);
  out.close();
  if (!out) throw Error("failed writing report file " + path);
}

inline ReportRecord load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report file " + path);
  try {
    return nlohmann::json::parse(in).get<ReportRecord>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

}  // namespace qrdr
