/*
 * Copyright 2026 The dpfl-pareto Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dpfl/io.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace dpfl {
namespace {

using nlohmann::json;

json NumberJson(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

absl::StatusOr<double> NumberFromJson(const json& j, absl::string_view key) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing field \"", key, "\""));
  }
  if (it->is_number()) return it->get<double>();
  if (it->is_string()) return ParseDouble(it->get<std::string>());
  return absl::InvalidArgumentError(
      absl::StrCat("field \"", key, "\" is not a number"));
}

constexpr absl::string_view kObjectiveHeader =
    "T,sigma,q,utility,privacy,efficiency,feasible";

}  // namespace

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

absl::StatusOr<double> ParseDouble(absl::string_view text) {
  text = absl::StripAsciiWhitespace(text);
  if (text == "inf" || text == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a number: \"", text, "\""));
  }
  return v;
}

absl::Status WriteFileAtomic(const std::string& path, absl::string_view data) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
    if (ec) {
      return absl::UnavailableError(absl::StrCat(
          "cannot create ", target.parent_path().string(), ": ", ec.message()));
    }
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", tmp));
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) return absl::DataLossError(absl::StrCat("short write to ", tmp));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot rename ", tmp, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string TraceCsv(std::span<const double> test_loss, int participants) {
  std::string out = "round,mean_test_loss,n_participants\n";
  for (size_t t = 0; t < test_loss.size(); ++t) {
    absl::StrAppend(&out, t + 1, ",", FormatDouble(test_loss[t]), ",",
                    participants, "\n");
  }
  return out;
}

std::vector<ObjectiveRow> MakeObjectiveRows(
    std::span<const ObjectivePoint> points, const TheoryParams& tp) {
  std::vector<ObjectiveRow> rows;
  rows.reserve(points.size());
  for (const ObjectivePoint& p : points) {
    rows.push_back({p, Efficiency(p.origin.rounds, tp.round_time),
                    IsFeasible(p.origin.rounds, tp)});
  }
  return rows;
}

std::string ObjectiveCsv(std::span<const ObjectiveRow> rows) {
  std::string out = absl::StrCat(kObjectiveHeader, "\n");
  for (const ObjectiveRow& r : rows) {
    const ObjectivePoint& p = r.point;
    absl::StrAppend(&out, p.origin.rounds, ",", FormatDouble(p.origin.sigma),
                    ",", FormatDouble(p.origin.sample_ratio), ",",
                    FormatDouble(p.utility), ",", FormatDouble(p.privacy), ",",
                    FormatDouble(r.efficiency), ",", r.feasible ? 1 : 0, "\n");
  }
  return out;
}

absl::StatusOr<std::vector<ObjectiveRow>> ParseObjectiveCsv(
    absl::string_view text, ObjectiveSource source) {
  std::vector<ObjectiveRow> rows;
  int line_no = 0;
  bool saw_header = false;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripTrailingAsciiWhitespace(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kObjectiveHeader) {
        return absl::InvalidArgumentError(
            absl::StrCat("objective CSV header must be \"", kObjectiveHeader,
                         "\", got \"", line, "\""));
      }
      saw_header = true;
      continue;
    }
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (cells.size() != 7) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected 7 fields, got ", cells.size()));
    }
    double v[6];
    for (int i = 0; i < 6; ++i) {
      auto parsed = ParseDouble(cells[i]);
      if (!parsed.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": ", parsed.status().message()));
      }
      v[i] = *parsed;
    }
    if (v[0] != std::floor(v[0]) || v[0] < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": T must be a positive integer"));
    }
    if (cells[6] != "0" && cells[6] != "1") {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": feasible must be 0 or 1"));
    }
    ObjectiveRow row;
    row.point.origin = {static_cast<int>(v[0]), v[1], v[2]};
    row.point.utility = v[3];
    row.point.privacy = v[4];
    row.point.source = source;
    row.efficiency = v[5];
    row.feasible = cells[6] == "1";
    rows.push_back(row);
  }
  if (!saw_header) return absl::InvalidArgumentError("empty objective CSV");
  return rows;
}

json ParetoJson(std::span<const ObjectivePoint> members) {
  json arr = json::array();
  for (const ObjectivePoint& p : members) {
    arr.push_back({{"T", p.origin.rounds},
                   {"sigma", NumberJson(p.origin.sigma)},
                   {"q", NumberJson(p.origin.sample_ratio)},
                   {"utility", NumberJson(p.utility)},
                   {"privacy", NumberJson(p.privacy)}});
  }
  return arr;
}

absl::StatusOr<std::vector<ObjectivePoint>> ParseParetoJson(
    const json& j, ObjectiveSource source) {
  if (!j.is_array()) {
    return absl::InvalidArgumentError("Pareto JSON must be an array");
  }
  std::vector<ObjectivePoint> out;
  for (const json& e : j) {
    if (!e.is_object() || !e.contains("T") || !e["T"].is_number_integer()) {
      return absl::InvalidArgumentError(
          "each Pareto member needs an integer \"T\"");
    }
    ObjectivePoint p;
    p.source = source;
    p.origin.rounds = e["T"].get<int>();
    for (auto [key, dst] :
         {std::pair<const char*, double*>{"sigma", &p.origin.sigma},
          {"q", &p.origin.sample_ratio},
          {"utility", &p.utility},
          {"privacy", &p.privacy}}) {
      auto v = NumberFromJson(e, key);
      if (!v.ok()) return v.status();
      *dst = *v;
    }
    out.push_back(p);
  }
  return out;
}

json FittedLawJson(const FittedLaw& law) {
  json j = {{"k", law.k},
            {"fit_r2", law.fit_r2},
            {"n_points", law.n_points},
            {"excluded_points", law.excluded_points},
            {"source_config", {{"q0", law.q0}, {"K0", law.num_clients0}}}};
  if (law.free_slope.has_value()) {
    j["free_fit"] = {{"slope", *law.free_slope},
                     {"intercept", *law.free_intercept},
                     {"r2", *law.free_r2}};
  }
  return j;
}

absl::StatusOr<FittedLaw> ParseFittedLawJson(const json& j) {
  if (!j.is_object() || !j.contains("k") || !j["k"].is_number()) {
    return absl::InvalidArgumentError("fitted law JSON needs a numeric \"k\"");
  }
  FittedLaw law;
  law.k = j["k"].get<double>();
  if (!(law.k > 0.0)) return absl::InvalidArgumentError("k must be > 0");
  law.fit_r2 = j.value("fit_r2", 0.0);
  law.n_points = j.value("n_points", 0);
  law.excluded_points = j.value("excluded_points", 0);
  if (j.contains("source_config")) {
    law.q0 = j["source_config"].value("q0", 1.0);
    law.num_clients0 = j["source_config"].value("K0", 1);
  }
  if (j.contains("free_fit")) {
    law.free_slope = j["free_fit"].value("slope", 0.0);
    law.free_intercept = j["free_fit"].value("intercept", 0.0);
    law.free_r2 = j["free_fit"].value("r2", 0.0);
  }
  return law;
}

json SegmentsJson(std::span<const SolutionSegment> segments,
                  double sample_ratio) {
  json arr = json::array();
  for (const SolutionSegment& s : segments) {
    json e = {{"T_first", s.first_round},
              {"T_last", s.last_round},
              {"rule", SigmaRuleName(s.rule)}};
    switch (s.rule) {
      case SigmaRule::kFixed:
        e["sigma"] = s.sigma_hi;
        e["sigma2_over_q"] = s.sigma_hi * s.sigma_hi / sample_ratio;
        break;
      case SigmaRule::kCurve:
        // sigma^2 T = qK/k, and sigma^2/q * T = K/k.
        e["sigma2_T"] = s.curve_scale;
        e["sigma2_over_q_T"] = s.curve_scale / sample_ratio;
        break;
      case SigmaRule::kInterval:
        e["sigma_lo"] = s.sigma_lo;
        e["sigma_hi"] = NumberJson(s.sigma_hi);
        e["sigma2_over_q_lo"] = s.sigma_lo * s.sigma_lo / sample_ratio;
        e["sigma2_over_q_hi"] =
            NumberJson(s.sigma_hi * s.sigma_hi / sample_ratio);
        break;
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

json ComplexityReportJson(const ComplexityReport& r) {
  json j = {
      {"n_sigma", r.n_sigma},
      {"n_q", r.n_q},
      {"T_r", r.rounds},
      {"guiding_design",
       {{"our_method",
         {{"form", r.our_design_form}, {"rounds", r.our_design_rounds}}},
        {"training_with_budget",
         {{"form", r.budget_design_form}, {"rounds", r.budget_design_rounds}}},
        {"training_until_convergence",
         {{"form", r.convergence_design_form},
          {"rounds", r.convergence_design_rounds}}}}},
      {"pareto_set",
       {{"our_method",
         {{"form", r.our_pareto_form}, {"rounds", r.our_pareto_rounds}}},
        {"training_with_budget",
         {{"form", r.budget_pareto_form}, {"rounds", r.budget_pareto_rounds}}},
        {"training_until_convergence",
         {{"form", r.convergence_pareto_form},
          {"rounds", r.convergence_pareto_rounds}}}}},
      {"simulations",
       {{"ours", r.our_simulations},
        {"pre_experiment", r.pre_experiment_simulations},
        {"baseline", r.baseline_simulations},
        {"ratio", r.simulation_ratio}}}};
  if (r.t0_seconds.has_value()) j["t0_seconds"] = *r.t0_seconds;
  return j;
}

std::string DumpJson(const json& j) { return j.dump(2) + "\n"; }

}  // namespace dpfl
