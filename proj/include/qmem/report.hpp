#pragma once

// Versioned JSON run report.

#include <qmem/error.hpp>
#include <qmem/io.hpp>
#include <qmem/readout.hpp>
#include <qmem/reservoir.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qmem {

using json = nlohmann::json;

inline constexpr int kReportSchema = 1;

inline json rule_to_json(const FeedbackRule& rule) {
  if (const auto* ma = std::get_if<MovingAverage>(&rule)) {
    return {{"kind", "ma"},
            {"window", ma->window},
            {"gain", ma->gain},
            {"offset", ma->offset},
            {"literal_bounds", ma->literal_bounds}};
  }
  if (const auto* ema = std::get_if<ExpMovingAverage>(&rule)) return {{"kind", "ema"}, {"decay", ema->decay}};
  return {{"kind", "frozen"}, {"r", std::get<Frozen>(rule).r}};
}

inline FeedbackRule rule_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ma") {
    return MovingAverage{j.at("window").get<std::size_t>(), j.at("gain").get<double>(), j.at("offset").get<double>(),
                         j.value("literal_bounds", false)};
  }
  if (kind == "ema") return ExpMovingAverage{j.at("decay").get<double>()};
  if (kind == "frozen") return Frozen{j.at("r").get<double>()};
  throw DomainError("unknown feedback rule kind: " + kind);
}

inline json config_to_json(const ReservoirConfig& c) {
  json j = {{"scheme", to_string(c.scheme)},
            {"u1", {{"theta", c.u1.theta}, {"psi", c.u1.psi}}},
            {"u2", {{"theta", c.u2.theta}, {"psi", c.u2.psi}}},
            {"rule", rule_to_json(c.rule)},
            {"r0", c.r0},
            {"convention", to_string(c.convention)},
            {"shots", nullptr},
            {"seed", c.seed}};
  if (c.shots) j["shots"] = *c.shots;
  return j;
}

inline ReservoirConfig config_from_json(const json& j) {
  ReservoirConfig c;
  c.scheme = encoding_from_string(j.at("scheme").get<std::string>());
  c.u1 = {j.at("u1").at("theta").get<double>(), j.at("u1").at("psi").get<double>()};
  c.u2 = {j.at("u2").at("theta").get<double>(), j.at("u2").at("psi").get<double>()};
  c.rule = rule_from_json(j.at("rule"));
  c.r0 = j.at("r0").get<double>();
  c.convention = convention_from_string(j.at("convention").get<std::string>());
  if (!j.at("shots").is_null()) c.shots = j.at("shots").get<std::uint64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

struct RunReport {
  std::string task;
  ReservoirConfig config;
  SplitSpec split;
  std::uint64_t seed = 0;
  double mse_train = 0.0;
  double mse_test = 0.0;
  std::size_t clamp_events = 0;
  ReadoutModel model;
  std::vector<std::string> artifact_paths;
  json extras = json::object();  // task parameters and derived figures
};

inline json report_to_json(const RunReport& r) {
  return {{"schema", kReportSchema},
          {"task", r.task},
          {"config", config_to_json(r.config)},
          {"split", {{"washout", r.split.washout}, {"train", r.split.train}, {"test", r.split.test}}},
          {"seed", r.seed},
          {"mse_train", r.mse_train},
          {"mse_test", r.mse_test},
          {"clamp_events", r.clamp_events},
          {"readout",
           {{"weights", r.model.weights},
            {"intercept", r.model.intercept},
            {"ridge", r.model.ridge},
            {"rank_deficient", r.model.rank_deficient}}},
          {"artifact_paths", r.artifact_paths},
          {"extras", r.extras}};
}

inline RunReport report_from_json(const json& j) {
  const int schema = j.at("schema").get<int>();
  if (schema != kReportSchema) throw IoError("unsupported report schema " + std::to_string(schema));
  RunReport r;
  r.task = j.at("task").get<std::string>();
  r.config = config_from_json(j.at("config"));
  const json& s = j.at("split");
  r.split = {s.at("washout").get<std::size_t>(), s.at("train").get<std::size_t>(), s.at("test").get<std::size_t>()};
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mse_train = j.at("mse_train").get<double>();
  r.mse_test = j.at("mse_test").get<double>();
  r.clamp_events = j.at("clamp_events").get<std::size_t>();
  const json& m = j.at("readout");
  r.model.weights = m.at("weights").get<std::vector<double>>();
  r.model.intercept = m.at("intercept").get<double>();
  r.model.ridge = m.at("ridge").get<double>();
  r.model.rank_deficient = m.at("rank_deficient").get<bool>();
  r.artifact_paths = j.at("artifact_paths").get<std::vector<std::string>>();
  r.extras = j.at("extras");
  return r;
}

inline std::string report_dump(const RunReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline RunReport report_parse(const std::string& text) {
  try {
    return report_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

inline void write_report(const std::filesystem::path& path, const RunReport& r) {
  write_file_atomic(path, report_dump(r));
}

}  // namespace qmem
