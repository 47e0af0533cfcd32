#include "loadsched/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "loadsched/errors.hpp"

namespace loadsched::io {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_csv(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw ParseError(lineno, "unterminated quote");
  fields.push_back(trim(cur));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

double to_double(const std::string& text, std::size_t lineno, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ParseError(lineno, what + ": '" + text + "' is not a number");
  return v;
}

int to_int(const std::string& text, std::size_t lineno, const std::string& what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ParseError(lineno, what + ": '" + text + "' is not an integer");
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("cannot write " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot write " + path.string());
  }
}

// ---------------------------------------------------------------- catalog

std::vector<Appliance> parse_catalog(const std::string& text, const TimeGrid& grid) {
  std::vector<Appliance> out;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::size_t> first_line;
  const auto lines = lines_of(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t lineno = n + 1;
    const auto line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("id,", 0) == 0) continue;
    const auto f = split_csv(line, lineno);
    if (f.size() != 7 && f.size() != 9)
      throw ParseError(lineno, "expected 7 or 9 fields, found " + std::to_string(f.size()));
    const std::string& id = f[0];
    if (id.empty()) throw ParseError(lineno, "empty appliance id");
    const std::string row = "line " + std::to_string(lineno) + ": row '" + id + "'";

    Appliance a;
    a.id = id;
    a.name = f[1];
    a.power_rate_watts = to_double(f[2], lineno, "power_rate_watts");
    try {
      a.load_class = parse_load_class(f[3]);
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    }
    RunSpec r;
    r.duration_slots = to_int(f[4], lineno, "duration_slots");
    r.baseline_start = to_int(f[5], lineno, "baseline_start");
    const int baseline_end = to_int(f[6], lineno, "baseline_end");
    if (baseline_end - r.baseline_start + 1 != r.duration_slots)
      throw ValidationError(row + ": baseline " + f[5] + "-" + f[6] + " spans " +
                            std::to_string(baseline_end - r.baseline_start + 1) + " slots but duration is " +
                            f[4]);
    const bool explicit_window = f.size() == 9 && !(f[7].empty() && f[8].empty());
    if (explicit_window) {
      r.allowed_start_min = to_int(f[7], lineno, "allowed_start_min");
      r.allowed_start_max = to_int(f[8], lineno, "allowed_start_max");
    } else if (a.shiftable()) {
      r.allowed_start_min = 1;
      r.allowed_start_max = grid.slot_count - r.duration_slots + 1;
    } else {
      r.allowed_start_min = r.allowed_start_max = r.baseline_start;
    }
    a.runs.push_back(r);

    try {
      check_appliance(a, grid);
    } catch (const ValidationError& e) {
      throw ValidationError(row + ": " + e.what());
    }
    if (auto it = index.find(id); it != index.end()) {
      auto& existing = out[it->second];
      if (existing.name != a.name || existing.power_rate_watts != a.power_rate_watts ||
          existing.load_class != a.load_class)
        throw ValidationError(row + ": conflicts with the row for '" + id + "' on line " +
                              std::to_string(first_line[id]));
      existing.runs.push_back(r);
    } else {
      index[id] = out.size();
      first_line[id] = lineno;
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<Appliance> load_catalog(const std::filesystem::path& path, const TimeGrid& grid) {
  return parse_catalog(read_file(path), grid);
}

std::string format_catalog(const std::vector<Appliance>& appliances) {
  std::string out =
      "id,name,power_rate_watts,load_class,duration_slots,baseline_start,baseline_end,allowed_start_min,"
      "allowed_start_max\n";
  for (const auto& a : appliances)
    for (const auto& r : a.runs)
      out += csv_field(a.id) + "," + csv_field(a.name) + "," + shortest(a.power_rate_watts) + "," +
             std::string(to_string(a.load_class)) + "," + std::to_string(r.duration_slots) + "," +
             std::to_string(r.baseline_start) + "," + std::to_string(r.baseline_end()) + "," +
             std::to_string(r.allowed_start_min) + "," + std::to_string(r.allowed_start_max) + "\n";
  return out;
}

void save_catalog(const std::vector<Appliance>& appliances, const std::filesystem::path& path) {
  write_file_atomic(path, format_catalog(appliances));
}

// ----------------------------------------------------------------- tariff

TariffFile parse_tariff_config(const std::string& text) {
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  const auto lines = lines_of(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(n + 1, "expected key = value");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(n + 1, "empty key");
    if (!kv.emplace(key, std::make_pair(value, n + 1)).second)
      throw ParseError(n + 1, "duplicate key '" + key + "'");
  }

  std::set<std::string> used;
  auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>* {
    used.insert(key);
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto number = [&](const std::string& key, std::optional<double> fallback) {
    if (const auto* v = get(key)) return to_double(v->first, v->second, key);
    if (!fallback) throw ParseError(0, "missing required key '" + key + "'");
    return *fallback;
  };

  TariffFile out{QuadraticTariff(QuadraticParams{}), TimeGrid{}};
  if (const auto* v = get("slot_minutes"))
    out.grid = TimeGrid::with_slot_minutes(to_int(v->first, v->second, "slot_minutes"));
  const auto* kind = get("kind");
  if (!kind) throw ParseError(0, "missing required key 'kind'");
  auto calendar = [&]() {
    const auto* v = get("peak_periods");
    return v ? PeriodCalendar::from_clock_ranges(v->first, out.grid) : PeriodCalendar::standard(out.grid);
  };

  if (kind->first == "tou") {
    out.tariff = ToUTariff(number("normal_rate", std::nullopt), number("peak_rate", std::nullopt), calendar());
  } else if (kind->first == "quadratic") {
    QuadraticParams p{number("a", std::nullopt), number("b", 0.0), number("c", 0.0)};
    out.tariff = QuadraticTariff(p, out.grid.slot_count);
  } else if (kind->first == "step") {
    StepTariff s{number("threshold", std::nullopt), number("low_rate", std::nullopt),
                 number("high_rate", std::nullopt)};
    s.check();
    out.tariff = s;
  } else if (kind->first == "aclps") {
    AclpsConfig c;
    c.r1 = number("r1", 1.0);
    c.r2 = number("r2", 0.0);
    c.r3 = number("r3", 0.0);
    c.ladder.base = number("ladder_base", 0.02);
    c.ladder.step = number("ladder_step", 0.07);
    c.ladder.max_level = number("ladder_max", 11.0);
    c.ca_plus = number("ca_plus", 0.07);
    c.ca_minus = number("ca_minus", 0.07);
    c.calendar = calendar();
    if (const auto* v = get("initial_level"); v && v->first != "baseline-mean")
      c.initial_level = to_double(v->first, v->second, "initial_level");
    c.check();
    out.tariff = c;
  } else {
    throw ParseError(kind->second, "unknown tariff kind '" + kind->first + "'");
  }

  for (const auto& [key, value] : kv)
    if (!used.count(key)) throw ParseError(value.second, "unknown key '" + key + "' for kind " + kind->first);
  return out;
}

TariffFile load_tariff_config(const std::filesystem::path& path) { return parse_tariff_config(read_file(path)); }

std::string format_tariff_config(const Tariff& tariff, const TimeGrid& grid) {
  std::string out;
  auto put = [&](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  if (grid.slot_minutes != TimeGrid{}.slot_minutes) put("slot_minutes", std::to_string(grid.slot_minutes));
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ToUTariff>) {
          put("kind", "tou");
          put("peak_rate", shortest(t.peak_rate()));
          put("normal_rate", shortest(t.normal_rate()));
          put("peak_periods", t.calendar().clock_ranges(grid));
        } else if constexpr (std::is_same_v<T, QuadraticTariff>) {
          if (!t.day_constant()) throw Error("per-slot quadratic tariffs have no config representation");
          put("kind", "quadratic");
          put("a", shortest(t.at(1).a));
          put("b", shortest(t.at(1).b));
          put("c", shortest(t.at(1).c));
        } else if constexpr (std::is_same_v<T, StepTariff>) {
          put("kind", "step");
          put("threshold", shortest(t.threshold));
          put("low_rate", shortest(t.low_rate));
          put("high_rate", shortest(t.high_rate));
        } else {
          put("kind", "aclps");
          put("r1", shortest(t.r1));
          put("r2", shortest(t.r2));
          put("r3", shortest(t.r3));
          put("ladder_base", shortest(t.ladder.base));
          put("ladder_step", shortest(t.ladder.step));
          put("ladder_max", shortest(t.ladder.max_level));
          put("ca_plus", shortest(t.ca_plus));
          put("ca_minus", shortest(t.ca_minus));
          put("peak_periods", t.calendar.clock_ranges(grid));
          put("initial_level", t.initial_level ? shortest(*t.initial_level) : std::string("baseline-mean"));
        }
      },
      tariff);
  return out;
}

// ----------------------------------------------------------------- report

namespace {

json to_json(const ScheduleReport& r) {
  return json{{"total_cost", r.total_cost},
              {"total_energy_kwh", r.total_energy},
              {"peak_kw", r.peak.kw},
              {"peak_slot", r.peak.slot},
              {"peak_period_kwh", r.period_energy.peak_kwh},
              {"normal_period_kwh", r.period_energy.normal_kwh},
              {"desired_cost", r.desired_cost},
              {"actual_cost", r.actual_cost},
              {"extended_energy_kwh", r.extended_energy},
              {"extension_factor", r.extension_factor},
              {"pib_events", r.pib_events}};
}

ScheduleReport report_from_json(const json& j) {
  ScheduleReport r;
  r.total_cost = j.at("total_cost").get<double>();
  r.total_energy = j.at("total_energy_kwh").get<double>();
  r.peak.kw = j.at("peak_kw").get<double>();
  r.peak.slot = j.at("peak_slot").get<int>();
  r.period_energy.peak_kwh = j.at("peak_period_kwh").get<double>();
  r.period_energy.normal_kwh = j.at("normal_period_kwh").get<double>();
  r.desired_cost = j.at("desired_cost").get<double>();
  r.actual_cost = j.at("actual_cost").get<double>();
  r.extended_energy = j.at("extended_energy_kwh").get<double>();
  r.extension_factor = j.at("extension_factor").get<double>();
  r.pib_events = j.at("pib_events").get<int>();
  return r;
}

}  // namespace

bool operator==(const ScheduleReport& a, const ScheduleReport& b) { return to_json(a) == to_json(b); }

bool operator==(const ReportDocument& a, const ReportDocument& b) {
  return a.scenario == b.scenario && a.tariff == b.tariff && a.baseline == b.baseline &&
         a.optimized == b.optimized && a.reductions.cost_pct == b.reductions.cost_pct &&
         a.reductions.peak_pct == b.reductions.peak_pct && a.runs == b.runs;
}

ReportDocument make_report(std::string scenario, const Problem& problem, const ScheduleReport& baseline,
                           const Solution& optimized) {
  ReportDocument doc;
  doc.scenario = std::move(scenario);
  doc.tariff = describe(problem.tariff);
  doc.baseline = baseline;
  doc.optimized = optimized.report;
  doc.reductions = compare(baseline, optimized.report);
  for (const auto& a : problem.appliances) {
    const auto& starts = optimized.schedule.assignments.at(a.id);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      const auto& r = a.runs[i];
      doc.runs.push_back({a.id, a.name, static_cast<int>(i), r.baseline_start, r.baseline_end(), starts[i],
                          starts[i] + r.duration_slots - 1});
    }
  }
  return doc;
}

std::string format_report(const ReportDocument& doc) {
  json runs = json::array();
  for (const auto& r : doc.runs)
    runs.push_back(json{{"id", r.appliance_id},
                        {"name", r.name},
                        {"run", r.run_index},
                        {"baseline_start", r.baseline_start},
                        {"baseline_end", r.baseline_end},
                        {"start", r.start},
                        {"end", r.end}});
  const json j{{"scenario", doc.scenario},
               {"tariff", doc.tariff},
               {"baseline", to_json(doc.baseline)},
               {"optimized", to_json(doc.optimized)},
               {"reductions", {{"cost_pct", doc.reductions.cost_pct}, {"peak_pct", doc.reductions.peak_pct}}},
               {"runs", runs}};
  return j.dump(2) + "\n";
}

ReportDocument parse_report(const std::string& text) {
  try {
    const auto j = json::parse(text);
    ReportDocument doc;
    doc.scenario = j.at("scenario").get<std::string>();
    doc.tariff = j.at("tariff").get<std::string>();
    doc.baseline = report_from_json(j.at("baseline"));
    doc.optimized = report_from_json(j.at("optimized"));
    doc.reductions.cost_pct = j.at("reductions").at("cost_pct").get<double>();
    doc.reductions.peak_pct = j.at("reductions").at("peak_pct").get<double>();
    for (const auto& r : j.at("runs"))
      doc.runs.push_back({r.at("id").get<std::string>(), r.at("name").get<std::string>(), r.at("run").get<int>(),
                          r.at("baseline_start").get<int>(), r.at("baseline_end").get<int>(),
                          r.at("start").get<int>(), r.at("end").get<int>()});
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("report: ") + e.what());
  }
}

void write_report(const ReportDocument& doc, const std::filesystem::path& path) {
  if (doc.scenario.empty()) throw ValidationError("report scenario name must not be empty");
  write_file_atomic(path, format_report(doc));
}

ReportDocument read_report(const std::filesystem::path& path) { return parse_report(read_file(path)); }

Schedule schedule_of(const ReportDocument& doc) {
  Schedule s;
  for (const auto& r : doc.runs) {
    auto& starts = s.assignments[r.appliance_id];
    if (static_cast<int>(starts.size()) <= r.run_index) starts.resize(static_cast<std::size_t>(r.run_index) + 1);
    starts[static_cast<std::size_t>(r.run_index)] = r.start;
  }
  return s;
}

// ---------------------------------------------------------------- profile

std::string format_profiles(const std::vector<NamedProfile>& profiles, const TimeGrid& grid) {
  for (const auto& [name, p] : profiles)
    if (static_cast<int>(p.demand.size()) != grid.slot_count)
      throw DomainError("profile '" + name + "' has " + std::to_string(p.demand.size()) + " slots, expected " +
                        std::to_string(grid.slot_count));
  std::string out = "slot,clock";
  for (const auto& [name, p] : profiles) out += "," + csv_field(name);
  out += "\n";
  char buf[64];
  for (Slot t = 1; t <= grid.slot_count; ++t) {
    out += std::to_string(t) + "," + slot_label(t, grid);
    for (const auto& [name, p] : profiles) {
      std::snprintf(buf, sizeof buf, ",%.6f", p.at(t));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void export_profile(const std::vector<NamedProfile>& profiles, const std::filesystem::path& path,
                    const TimeGrid& grid) {
  write_file_atomic(path, format_profiles(profiles, grid));
}

}  // namespace loadsched::io
