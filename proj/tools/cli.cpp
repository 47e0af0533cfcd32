#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "loadsched/errors.hpp"
#include "loadsched/instances.hpp"
#include "loadsched/io.hpp"
#include "loadsched/kernels.hpp"
#include "loadsched/scheduler.hpp"

namespace loadsched::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kFormats = R"(File formats:
  catalog (CSV)   id,name,power_rate_watts,load_class,duration_slots,
                  baseline_start,baseline_end[,allowed_start_min,allowed_start_max]
                  load_class: common-nonshiftable | selective-nonshiftable |
                              common-shiftable | selective-shiftable
                  Rows sharing an id are runs of one appliance. Shiftable rows
                  without bounds may start anywhere in the day. '#' comments.
  tariff (text)   key = value per line, '#' comments.
                  kind = tou        peak_rate, normal_rate, [peak_periods]
                  kind = quadratic  a, [b], [c]
                  kind = step       threshold, low_rate, high_rate
                  kind = aclps      [r1] [r2] [r3] [ladder_base] [ladder_step]
                                    [ladder_max] [ca_plus] [ca_minus]
                                    [peak_periods] [initial_level]
                  peak_periods = 07:00-11:00,18:00-22:00 (default)
                  initial_level = baseline-mean (default) | kW
                  slot_minutes = 5 (default, any divisor of 1440)
  report (JSON)   scenario, tariff, baseline/optimized metrics, reductions,
                  per-run baseline and assigned slots.
  profile (CSV)   slot,clock,<profile>... demand in kW per slot.
Exit codes: 0 success, 1 input or validation error, 2 infeasible run window.)";

struct Options {
  std::string catalog;
  std::string tariff;
  std::string output;
  std::string profile;
  std::string report;
  std::string scenario = "household";
  std::string objective = "total-cost";
  int max_sweeps = 100;
  unsigned threads = 1;
  double target = 0.0;
  int self_test = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> reports;
};

std::string fixed(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Prefixes input errors with the file they came from.
template <typename F>
auto from_file(const std::string& path, F&& load) {
  try {
    return load();
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void require_dir(const std::string& path) {
  const auto parent = fs::absolute(fs::path(path)).parent_path();
  if (!fs::is_directory(parent)) throw Error("cannot write " + path + ": directory does not exist");
}

Problem load_problem(const Options& o) {
  const auto tariff = from_file(o.tariff, [&] { return io::load_tariff_config(o.tariff); });
  Problem p;
  p.grid = tariff.grid;
  p.tariff = tariff.tariff;
  p.appliances = from_file(o.catalog, [&] { return io::load_catalog(o.catalog, p.grid); });
  p.objective = parse_objective(o.objective);
  p.max_sweeps = o.max_sweeps;
  p.threads = o.threads;
  return p;
}

void summary(std::ostream& out, const io::ReportDocument& doc) {
  out << "scenario=" << doc.scenario << " baseline_cost=" << fixed(doc.baseline.total_cost)
      << " optimized_cost=" << fixed(doc.optimized.total_cost) << " cost_reduction_pct=" << fixed(doc.reductions.cost_pct, 2)
      << " peak_kw=" << fixed(doc.baseline.peak.kw) << "->" << fixed(doc.optimized.peak.kw)
      << " peak_reduction_pct=" << fixed(doc.reductions.peak_pct, 2) << "\n";
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  require_dir(o.output);
  const auto p = load_problem(o);
  Solution base;
  base.schedule = Schedule::baseline(p.appliances);
  base.report = evaluate(p, base.schedule);
  const auto doc = io::make_report(o.scenario, p, base.report, base);
  io::write_report(doc, o.output);
  out << "scenario=" << doc.scenario << " total_cost=" << fixed(doc.baseline.total_cost)
      << " total_energy_kwh=" << fixed(doc.baseline.total_energy)
      << " peak_period_kwh=" << fixed(doc.baseline.period_energy.peak_kwh)
      << " normal_period_kwh=" << fixed(doc.baseline.period_energy.normal_kwh)
      << " peak_kw=" << fixed(doc.baseline.peak.kw) << "@" << doc.baseline.peak.slot << "\n";
  return kOk;
}

int cmd_self_test(const Options& o, std::ostream& out) {
  int mismatches = 0;
  for (int k = 0; k < o.self_test; ++k) {
    const auto seed = o.seed + static_cast<std::uint64_t>(k);
    const auto problem = random_instance(seed);
    const auto fast = optimize(problem);
    const auto exact = brute_force(problem);
    if (std::abs(fast.report.total_cost - exact.report.total_cost) > 1e-9) {
      ++mismatches;
      out << "seed " << seed << ": optimize " << fixed(fast.report.total_cost, 9) << " brute_force "
          << fixed(exact.report.total_cost, 9) << "\n";
    }
  }
  out << "self-test instances=" << o.self_test << " mismatches=" << mismatches << "\n";
  return mismatches == 0 ? kOk : kInputError;
}

int cmd_optimize(const Options& o, std::ostream& out) {
  if (o.self_test > 0) return cmd_self_test(o, out);
  if (o.catalog.empty() || o.tariff.empty() || o.output.empty())
    throw Error("optimize requires --catalog, --tariff and --output");
  require_dir(o.output);
  if (!o.profile.empty()) require_dir(o.profile);
  const auto p = load_problem(o);
  const auto baseline = Schedule::baseline(p.appliances);
  const auto sol = optimize(p);
  const auto doc = io::make_report(o.scenario, p, evaluate(p, baseline), sol);
  std::string profile_csv;
  if (!o.profile.empty())
    profile_csv = io::format_profiles({{"baseline", build_load_profile(p.appliances, baseline, p.grid)},
                                       {"optimized", build_load_profile(p.appliances, sol.schedule, p.grid)}},
                                      p.grid);
  io::write_report(doc, o.output);
  if (!o.profile.empty()) io::write_file_atomic(o.profile, profile_csv);
  summary(out, doc);
  return kOk;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  require_dir(o.output);
  const auto p = load_problem(o);
  const auto* config = std::get_if<AclpsConfig>(&p.tariff);
  if (!config) throw Error("calibrate needs an aclps tariff, got: " + describe(p.tariff));
  const auto baseline = build_load_profile(p.appliances, Schedule::baseline(p.appliances), p.grid);
  const double before = bill_total(*config, baseline, p.grid);
  const auto calibrated = calibrate_revenue(*config, baseline, o.target, p.grid);
  io::write_file_atomic(o.output, io::format_tariff_config(calibrated, p.grid));
  out << "baseline_bill=" << fixed(before, 6) << " target=" << fixed(o.target, 6)
      << " scale=" << fixed(o.target / before, 9) << " calibrated_bill=" << fixed(bill_total(calibrated, baseline, p.grid), 6)
      << "\n";
  return kOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  if (!o.output.empty()) require_dir(o.output);
  std::string csv = "scenario,tariff,baseline_cost,optimized_cost,cost_reduction_pct,baseline_peak_kw,"
                    "optimized_peak_kw,peak_reduction_pct\n";
  std::vector<std::string> lines;
  for (const auto& path : o.reports) {
    const auto doc = io::read_report(path);
    const auto r = compare(doc.baseline, doc.optimized);
    lines.push_back(doc.scenario + ": cost " + fixed(doc.baseline.total_cost) + " -> " +
                    fixed(doc.optimized.total_cost) + " (" + fixed(r.cost_pct, 2) + "%), peak " +
                    fixed(doc.baseline.peak.kw) + " -> " + fixed(doc.optimized.peak.kw) + " kW (" +
                    fixed(r.peak_pct, 2) + "%)");
    std::string tariff = doc.tariff;
    for (auto& ch : tariff)
      if (ch == ',' || ch == '"') ch = ';';
    csv += doc.scenario + "," + tariff + "," + fixed(doc.baseline.total_cost, 6) + "," +
           fixed(doc.optimized.total_cost, 6) + "," + fixed(r.cost_pct, 6) + "," + fixed(doc.baseline.peak.kw, 6) +
           "," + fixed(doc.optimized.peak.kw, 6) + "," + fixed(r.peak_pct, 6) + "\n";
  }
  if (!o.output.empty()) io::write_file_atomic(o.output, csv);
  for (const auto& line : lines) out << line << "\n";
  return kOk;
}

int cmd_export(const Options& o, std::ostream& out) {
  require_dir(o.output);
  TimeGrid grid;
  if (!o.tariff.empty()) grid = io::load_tariff_config(o.tariff).grid;
  const auto appliances = from_file(o.catalog, [&] { return io::load_catalog(o.catalog, grid); });
  const auto doc = io::read_report(o.report);
  const auto baseline = build_load_profile(appliances, Schedule::baseline(appliances), grid);
  const auto optimized = build_load_profile(appliances, io::schedule_of(doc), grid);
  io::export_profile({{"baseline", baseline}, {"optimized", optimized}}, o.output, grid);
  out << "rows=" << grid.slot_count << " baseline_kwh=" << fixed(total_energy_kwh(baseline, grid))
      << " optimized_kwh=" << fixed(total_energy_kwh(optimized, grid)) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Residential appliance scheduling under time-of-use, quadratic, step and "
               "consumption-level tariffs."};
  app.footer(kFormats);
  app.require_subcommand(1);
  Options o;

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Bill the baseline schedule of a catalog");
  evaluate_cmd->add_option("--catalog", o.catalog, "Appliance catalog CSV")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--tariff", o.tariff, "Tariff config")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("-o,--output", o.output, "Report JSON to write")->required();
  evaluate_cmd->add_option("--scenario", o.scenario, "Scenario name stored in the report");

  auto* optimize_cmd = app.add_subcommand("optimize", "Schedule shiftable runs for minimum cost");
  optimize_cmd->add_option("--catalog", o.catalog, "Appliance catalog CSV")->check(CLI::ExistingFile);
  optimize_cmd->add_option("--tariff", o.tariff, "Tariff config")->check(CLI::ExistingFile);
  optimize_cmd->add_option("-o,--output", o.output, "Report JSON to write");
  optimize_cmd->add_option("--profile", o.profile, "Also write baseline/optimized profile CSV");
  optimize_cmd->add_option("--scenario", o.scenario, "Scenario name stored in the report");
  optimize_cmd->add_option("--objective", o.objective, "total-cost | extended-consumption")
      ->check(CLI::IsMember({"total-cost", "extended-consumption"}));
  optimize_cmd->add_option("--max-sweeps", o.max_sweeps, "Coordinate-descent sweep limit")
      ->check(CLI::Range(1, 1000000));
  optimize_cmd->add_option("--threads", o.threads, "Workers per candidate scan")->check(CLI::Range(1u, 256u));
  optimize_cmd->add_option("--self-test", o.self_test,
                           "Compare optimize with brute force on N random instances instead")
      ->check(CLI::Range(1, 1000000));
  optimize_cmd->add_option("--seed", o.seed, "First seed for --self-test");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Scale an aclps tariff to a baseline revenue");
  calibrate_cmd->add_option("--catalog", o.catalog, "Appliance catalog CSV")->required()->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--tariff", o.tariff, "aclps tariff config")->required()->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--target", o.target, "Baseline bill to reach")
      ->required()
      ->check(CLI::PositiveNumber);
  calibrate_cmd->add_option("-o,--output", o.output, "Calibrated tariff config to write")->required();

  auto* compare_cmd = app.add_subcommand("compare", "Re-derive cost and peak reductions from reports");
  compare_cmd->add_option("reports", o.reports, "Report JSON files")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("-o,--output", o.output, "Comparison CSV to write");

  auto* export_cmd = app.add_subcommand("export-profile", "Write per-slot baseline and optimized demand");
  export_cmd->add_option("--catalog", o.catalog, "Appliance catalog CSV")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--report", o.report, "Report JSON from optimize")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--tariff", o.tariff, "Tariff config (only its slot length is used)")
      ->check(CLI::ExistingFile);
  export_cmd->add_option("-o,--output", o.output, "Profile CSV to write")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  try {
    if (*evaluate_cmd) return cmd_evaluate(o, out);
    if (*optimize_cmd) return cmd_optimize(o, out);
    if (*calibrate_cmd) return cmd_calibrate(o, out);
    if (*compare_cmd) return cmd_compare(o, out);
    if (*export_cmd) return cmd_export(o, out);
  } catch (const InfeasibleError& e) {
    err << "error: infeasible run " << e.run() << ": " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace loadsched::cli
