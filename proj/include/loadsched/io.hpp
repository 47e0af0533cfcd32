#pragma once

// File formats:
//   catalog  CSV  id,name,power_rate_watts,load_class,duration_slots,
//                 baseline_start,baseline_end[,allowed_start_min,allowed_start_max]
//                 Rows sharing an id are runs of one appliance. '#' starts a
//                 comment line; a header row beginning with "id," is skipped.
//   tariff   key = value lines, '#' comments; see README for the keys.
//   report   JSON document (ReportDocument).
//   profile  CSV  slot,clock,<name>... with kW values.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "loadsched/scheduler.hpp"
#include "loadsched/tariff.hpp"
#include "loadsched/timegrid.hpp"

namespace loadsched::io {

/// Parses catalog text; `grid` supplies the day length for default windows.
std::vector<Appliance> parse_catalog(const std::string& text, const TimeGrid& grid = {});
std::vector<Appliance> load_catalog(const std::filesystem::path& path, const TimeGrid& grid = {});
std::string format_catalog(const std::vector<Appliance>& appliances);
void save_catalog(const std::vector<Appliance>& appliances, const std::filesystem::path& path);

struct TariffFile {
  Tariff tariff;
  TimeGrid grid;
};

TariffFile parse_tariff_config(const std::string& text);
TariffFile load_tariff_config(const std::filesystem::path& path);
/// Text accepted by parse_tariff_config; doubles are written round-trip exact.
std::string format_tariff_config(const Tariff& tariff, const TimeGrid& grid = {});

struct RunAssignment {
  std::string appliance_id;
  std::string name;
  int run_index = 0;
  Slot baseline_start = 0;
  Slot baseline_end = 0;
  Slot start = 0;
  Slot end = 0;

  friend bool operator==(const RunAssignment&, const RunAssignment&) = default;
};

struct ReportDocument {
  std::string scenario;
  std::string tariff;
  ScheduleReport baseline;
  ScheduleReport optimized;
  Reduction reductions;
  std::vector<RunAssignment> runs;
};

bool operator==(const ScheduleReport& a, const ScheduleReport& b);
bool operator==(const ReportDocument& a, const ReportDocument& b);

/// Assembles a document; reductions come from compare().
ReportDocument make_report(std::string scenario, const Problem& problem, const ScheduleReport& baseline,
                           const Solution& optimized);

std::string format_report(const ReportDocument& doc);
ReportDocument parse_report(const std::string& text);
/// Throws ValidationError for an empty scenario name.
void write_report(const ReportDocument& doc, const std::filesystem::path& path);
ReportDocument read_report(const std::filesystem::path& path);

/// Schedule recorded in a report's run table.
Schedule schedule_of(const ReportDocument& doc);

using NamedProfile = std::pair<std::string, LoadProfile>;

std::string format_profiles(const std::vector<NamedProfile>& profiles, const TimeGrid& grid = {});
/// Throws DomainError when lengths differ.
void export_profile(const std::vector<NamedProfile>& profiles, const std::filesystem::path& path,
                    const TimeGrid& grid = {});

/// Writes via a sibling temporary file and rename, so readers never see a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace loadsched::io
