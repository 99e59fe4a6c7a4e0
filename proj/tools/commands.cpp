// Copyright 2026 The proxycal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

#include "proxycal/correct.hpp"
#include "proxycal/error.hpp"
#include "proxycal/met.hpp"
#include "proxycal/proxy.hpp"
#include "proxycal/sim.hpp"

namespace proxycal::cli {

namespace {

void require(const std::filesystem::path& p, std::string_view flag, std::string_view why) {
  if (p.empty()) throw Error(ErrorCode::kInvalidInput, std::string(flag) + " is required " + std::string(why));
}

void emit(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  io::write_text(dir / name, content);
}

std::vector<ProxyAssignment> sorted_by_site(std::vector<ProxyAssignment> v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.site_id < b.site_id; });
  return v;
}

struct Loaded {
  io::AnalysisConfig config;
  NetworkDataset data;
  std::vector<ProxyAssignment> assignments;
};

Loaded load_pipeline_inputs(const AnalysisFlags& flags) {
  require(flags.sites, "--sites", "for this command");
  require(flags.obs, "--obs", "for this command");
  require(flags.assignments, "--assignments", "for this command");
  Loaded in;
  in.config = resolve_config(flags);
  in.data = io::load_dataset(flags.sites, flags.obs, {in.config.clamp_negative});
  in.assignments = sorted_by_site(io::read_assignments(flags.assignments));
  return in;
}

std::string join_spans(const std::vector<drift::Span>& spans) {
  std::string out;
  for (const auto& s : spans) {
    if (!out.empty()) out += ';';
    out += to_iso8601(s.start) + '/' + to_iso8601(s.end);
  }
  return out;
}

std::string hours_or_blank(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

io::AnalysisConfig resolve_config(const AnalysisFlags& flags) {
  io::AnalysisConfig c;
  if (!flags.config.empty()) c = io::load_analysis_config(flags.config);
  if (flags.stride) c.framework.stride = *flags.stride;
  if (flags.bin_width) c.kl.bin_width = *flags.bin_width;
  if (flags.clamp_negative) c.clamp_negative = true;
  c.framework.validate();
  if (!(c.kl.bin_width > 0.0)) throw Error(ErrorCode::kInvalidInput, "--bin-width must be > 0");
  return c;
}

void cmd_select_proxy(const AnalysisFlags& flags, const std::string& method, std::ostream& out) {
  require(flags.sites, "--sites", "for select-proxy");
  const bool all = method == "all";
  const bool want_kl = all || method == "min_kl";
  if (!all && method != "knn" && method != "nearest" && method != "min_kl")
    throw Error(ErrorCode::kInvalidInput, "--method must be one of knn, nearest, min_kl, all");
  if (want_kl && flags.obs.empty())
    throw Error(ErrorCode::kInvalidInput, "--method " + method + " needs --obs for the min_kl histograms");

  const auto config = resolve_config(flags);
  const auto sites = io::read_sites(flags.sites);

  std::map<std::string, std::vector<ProxyAssignment>> results;
  if (all || method == "knn") results["knn"] = proxy::select_knn(sites);
  if (all || method == "nearest") results["nearest"] = proxy::select_nearest_geo(sites);
  if (want_kl) {
    auto data = io::read_observations(flags.obs).dataset;
    data.sites = sites;
    data = validated_or_throw(std::move(data), {config.clamp_negative});
    auto kl = proxy::select_min_kl(data, config.kl);
    if (!kl.errors.empty()) {
      std::string msg = "min_kl could not assign";
      for (const auto& e : kl.errors) msg += " " + e.site_id + " (" + e.reason + ")";
      throw Error(ErrorCode::kInsufficientData, msg);
    }
    results["min_kl"] = std::move(kl.assignments);
  }

  for (const auto& [name, list] : results) emit(flags.out_dir, "assignments_" + name + ".csv", io::assignments_csv(list));

  if (!all) {
    out << io::assignments_csv(results.begin()->second);
    return;
  }

  // Table layout: one row per site, one proxy column per method.
  std::map<std::string, std::array<std::string, 3>> table;
  const char* order[] = {"nearest", "knn", "min_kl"};
  for (int c = 0; c < 3; ++c) {
    for (const auto& a : results.at(order[c])) table[a.site_id][c] = a.proxy_id;
  }
  std::string csv = "site_id,nearest,knn,min_kl\n";
  for (const auto& [site, row] : table) csv += site + ',' + row[0] + ',' + row[1] + ',' + row[2] + '\n';
  emit(flags.out_dir, "comparison.csv", csv);
  out << csv;
  const std::pair<const char*, const char*> pairs[] = {{"knn", "min_kl"}, {"nearest", "knn"}, {"nearest", "min_kl"}};
  for (const auto& [a, b] : pairs) {
    const auto rep = proxy::compare_assignments(results.at(a), results.at(b));
    out << "# agreement " << a << " vs " << b << ": " << rep.matches << "/" << rep.total() << "\n";
  }
}

std::vector<PairRun> run_pairs(const NetworkDataset& data, const std::vector<ProxyAssignment>& assignments,
                               const drift::FrameworkConfig& cfg) {
  for (const auto& a : assignments) {
    if (!data.series.contains(a.site_id))
      throw Error(ErrorCode::kMismatch, "assignment names unknown site '" + a.site_id + "'");
    if (!data.series.contains(a.proxy_id))
      throw Error(ErrorCode::kMismatch, "unknown proxy id '" + a.proxy_id + "' for site '" + a.site_id + "'");
  }
  std::vector<std::future<drift::FrameworkState>> jobs;
  jobs.reserve(assignments.size());
  for (const auto& a : assignments) {
    jobs.push_back(std::async(std::launch::async, [&data, &cfg, a] {
      return drift::run_framework(data.series.at(a.site_id), data.series.at(a.proxy_id), cfg);
    }));
  }
  // Futures are drained in input order, so output order never depends on
  // thread scheduling.
  std::vector<PairRun> out;
  out.reserve(assignments.size());
  for (std::size_t i = 0; i < jobs.size(); ++i)
    out.push_back({assignments[i].site_id, assignments[i].proxy_id, jobs[i].get()});
  return out;
}

void cmd_detect(const AnalysisFlags& flags, std::ostream& out) {
  const auto in = load_pipeline_inputs(flags);
  const auto runs = run_pairs(in.data, in.assignments, in.config.framework);

  std::string summary =
      "site_id,proxy_id,entries,evaluable,ks_alarm_fraction,slope_alarm_fraction,int_alarm_fraction,"
      "any_alarm_fraction,ks_failure_spans,slope_failure_spans,int_failure_spans,correction_hours\n";
  std::string spans = "site_id,proxy_id,test,start,end\n";
  for (const auto& r : runs) {
    const auto s = drift::alarm_summary(r.state);
    summary += r.site_id + ',' + r.proxy_id + ',' + std::to_string(s.entries) + ',' + std::to_string(s.evaluable) +
               ',' + io::format_double(s.alarm_fraction[0]) + ',' + io::format_double(s.alarm_fraction[1]) + ',' +
               io::format_double(s.alarm_fraction[2]) + ',' + io::format_double(s.any_alarm_fraction) + ',' +
               std::to_string(s.failure_span_count[0]) + ',' + std::to_string(s.failure_span_count[1]) + ',' +
               std::to_string(s.failure_span_count[2]) + ',' + std::to_string(s.correction_hours_total) + '\n';
    for (drift::Test t : drift::kAllTests) {
      for (const auto& sp : r.state.spans(t)) {
        spans += r.site_id + ',' + r.proxy_id + ',' + std::string(drift::to_string(t)) + ',' + to_iso8601(sp.start) +
                 ',' + to_iso8601(sp.end) + '\n';
      }
    }
    const auto rows = io::trail_rows(r.state);
    emit(flags.out_dir, "trail_" + r.site_id + ".csv", io::trail_csv(rows));
  }
  emit(flags.out_dir, "alarm_summary.csv", summary);
  emit(flags.out_dir, "failure_spans.csv", spans);
  out << summary;
}

void cmd_correct(const AnalysisFlags& flags, std::ostream& out) {
  const auto in = load_pipeline_inputs(flags);
  const auto runs = run_pairs(in.data, in.assignments, in.config.framework);
  std::vector<std::future<correct::CorrectionResult>> jobs;
  for (const auto& r : runs) {
    jobs.push_back(std::async(std::launch::async, [&in, &r] {
      return correct::apply_correction(in.data.series.at(r.site_id), r.state, in.data.series.at(r.proxy_id),
                                       in.config.framework);
    }));
  }
  std::string summary = "site_id,proxy_id,corrected_hours,clamped_hours,active_spans\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto res = jobs[i].get();
    summary += runs[i].site_id + ',' + runs[i].proxy_id + ',' + std::to_string(res.corrected_hours()) + ',' +
               std::to_string(res.clamped_hours()) + ',' + join_spans(runs[i].state.correction_active_spans) + '\n';
    emit(flags.out_dir, "corrected_" + runs[i].site_id + ".csv", io::corrected_csv(res.rows));
  }
  out << summary;
}

void cmd_wind_bins(const AnalysisFlags& flags, std::ostream& out) {
  const auto in = load_pipeline_inputs(flags);
  const auto runs = run_pairs(in.data, in.assignments, in.config.framework);
  std::string rings = "site_id,speed_bin_low,n_hours,mean_alarm_sum\n";
  for (const auto& r : runs) {
    const auto grid = met::bin_alarms_by_wind(r.state, in.data.series.at(r.site_id), in.config.wind);
    const auto rows = io::polar_grid_rows(grid);
    emit(flags.out_dir, "polar_" + r.site_id + ".csv", io::polar_grid_csv(rows));
    for (const auto& ring : met::speed_ring_means(grid)) {
      rings += r.site_id + ',' + io::format_double(ring.speed_low) + ',' + std::to_string(ring.n_hours) + ',' +
               io::format_double(ring.mean_alarm_sum) + '\n';
    }
  }
  out << rings;
}

void cmd_simulate(const SimulateFlags& flags, std::ostream& out) {
  require(flags.scenario, "--scenario", "for simulate");
  require(flags.out_dir, "--out-dir", "for simulate");
  auto spec = io::load_scenario(flags.scenario);
  if (flags.seed) spec.seed = *flags.seed;
  const auto scenario = sim::generate(spec);

  const auto& data = scenario.dataset;
  emit(flags.out_dir, "sites.csv", io::sites_csv(data.sites));
  emit(flags.out_dir, "observations.csv", io::observations_csv(data));
  emit(flags.out_dir, "truth.csv", io::truth_csv(scenario.truth));
  emit(flags.out_dir, "drift_schedule.csv", io::drift_schedule_csv(scenario.truth.schedule));
  out << "wrote " << data.sites.size() << " sites x " << spec.hours << " hours to " << flags.out_dir.string()
      << "\n";
  if (!flags.score) return;

  if (data.sites.size() < 2) throw Error(ErrorCode::kInvalidInput, "--score needs at least two sites");
  AnalysisFlags af;
  af.config = flags.config;
  af.stride = flags.stride;
  const auto config = resolve_config(af);
  const auto assignments = sorted_by_site(proxy::select_knn(data.sites));
  emit(flags.out_dir, "assignments.csv", io::assignments_csv(assignments));
  const auto runs = run_pairs(data, assignments, config.framework);

  std::string csv =
      "site_id,proxy_id,clean_evaluable_hours,clean_alarm_hours,false_alarm_rate,event_site,kind,onset_utc,"
      "latency_hours,ks_latency_hours,slope_latency_hours,int_latency_hours\n";
  for (const auto& r : runs) {
    const auto score = sim::score_detection(r.state, scenario.truth.schedule);
    const std::string head = r.site_id + ',' + r.proxy_id + ',' + std::to_string(score.clean_evaluable_hours) + ',' +
                             std::to_string(score.clean_alarm_hours) + ',' + io::format_double(score.false_alarm_rate);
    if (score.events.empty()) csv += head + ",,,,,,,\n";
    for (const auto& e : score.events) {
      csv += head + ',' + e.event.site_id + ',' + std::string(sim::to_string(e.event.kind)) + ',' +
             to_iso8601(scenario.truth.schedule.epoch_start + e.event.onset_hour) + ',' +
             hours_or_blank(e.latency_hours) + ',' + hours_or_blank(e.latency_by_test[0]) + ',' +
             hours_or_blank(e.latency_by_test[1]) + ',' + hours_or_blank(e.latency_by_test[2]) + '\n';
    }
  }
  emit(flags.out_dir, "score.csv", csv);
  out << csv;
}

void cmd_report(const AnalysisFlags& flags, std::ostream& out) {
  require(flags.obs, "--obs", "for report");
  const auto config = resolve_config(flags);
  auto ingest = io::read_observations(flags.obs);
  std::string text = io::ingest_report_csv(ingest.report);
  if (!flags.sites.empty()) {
    ingest.dataset.sites = io::read_sites(flags.sites);
    const auto outcome = validate_dataset(std::move(ingest.dataset), {config.clamp_negative});
    text += "summary,violations," + std::to_string(outcome.violations.size()) + '\n';
    for (const auto& v : outcome.violations) {
      std::string d = v.describe();
      std::replace(d.begin(), d.end(), '"', '\'');
      text += "violation," + v.site_id + ",\"" + d + "\"\n";
    }
  }
  emit(flags.out_dir, "ingest_report.csv", text);
  out << text;
}

}  // namespace proxycal::cli
