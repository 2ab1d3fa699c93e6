#include "pmsched/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>

namespace pmsched {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw FormatError(path + ": " + what);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

int as_small_int(const json& v, const std::string& path) {
  const std::int64_t x = as_int(v, path);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(path, "out of range");
  return static_cast<int>(x);
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

int parse_day(const std::string& token, const std::string& path) {
  static const std::array<const char*, 7> names{"MON", "TUE", "WED", "THU", "FRI", "SAT", "SUN"};
  std::string up = token;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (std::size_t d = 0; d < names.size(); ++d) {
    if (up == names[d]) return static_cast<int>(d);
  }
  fail(path, "unknown day '" + token + "'");
}

int parse_clock(const std::string& text, const std::string& path) {
  int h = 0, m = 0;
  char colon = 0;
  if (std::sscanf(text.c_str(), "%d%c%d", &h, &colon, &m) != 3 || colon != ':' || h < 0 || h > 24 || m < 0 ||
      m > 59 || (h == 24 && m != 0)) {
    fail(path, "expected HH:MM, got '" + text + "'");
  }
  return h * 60 + m;
}

}  // namespace

WeeklyPattern parse_weekly_pattern(const std::string& days, const std::string& start, const std::string& end) {
  WeeklyPattern p;
  std::size_t pos = 0;
  while (pos <= days.size()) {
    std::size_t comma = days.find(',', pos);
    if (comma == std::string::npos) comma = days.size();
    const std::string part = days.substr(pos, comma - pos);
    const std::size_t range = part.find("..");
    if (range != std::string::npos) {
      const int a = parse_day(part.substr(0, range), "days");
      const int b = parse_day(part.substr(range + 2), "days");
      for (int d = a;; d = (d + 1) % 7) {
        p.days[static_cast<std::size_t>(d)] = true;
        if (d == b) break;
      }
    } else {
      p.days[static_cast<std::size_t>(parse_day(part, "days"))] = true;
    }
    pos = comma + 1;
  }
  p.start_minute = parse_clock(start, "start");
  p.end_minute = parse_clock(end, "end");
  if (p.end_minute <= p.start_minute) fail("end", "must be after start");
  return p;
}

json instance_to_json(const Instance& instance) {
  json doc;
  doc["machines"] = instance.machine_ids();
  json columns = json::array();
  for (const ColumnType& ct : instance.column_types()) columns.push_back({{"family", ct.family}, {"units", ct.units}});
  doc["column_types"] = std::move(columns);
  json windows = json::array();
  for (const Interval& iv : instance.operator_windows().windows()) {
    json b = iv.begin == std::numeric_limits<TimePoint>::min() ? json(nullptr) : json(iv.begin);
    json e = iv.end == kUnbounded ? json(nullptr) : json(iv.end);
    windows.push_back(json::array({b, e}));
  }
  doc["operator_windows"] = std::move(windows);
  if (instance.horizon_origin() != 0) doc["horizon_origin"] = instance.horizon_origin();
  json jobs = json::array();
  for (const JobSpec& js : instance.job_specs()) {
    json ops = json::array();
    for (const OperationSpec& os : js.operations) {
      ops.push_back({{"id", os.id}, {"family", os.family}, {"p", os.processing}, {"s", os.setup}, {"eligible", os.eligible}});
    }
    jobs.push_back({{"id", js.id}, {"release", js.release}, {"due", js.due}, {"operations", std::move(ops)}});
  }
  doc["jobs"] = std::move(jobs);
  return doc;
}

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) fail("$", "expected an object");
  std::vector<int> machines;
  const json& jm = as_array(field(doc, "$", "machines"), "machines");
  for (std::size_t k = 0; k < jm.size(); ++k) machines.push_back(as_small_int(jm[k], "machines[" + std::to_string(k) + "]"));

  std::vector<ColumnType> columns;
  const json& jc = as_array(field(doc, "$", "column_types"), "column_types");
  for (std::size_t k = 0; k < jc.size(); ++k) {
    const std::string path = "column_types[" + std::to_string(k) + "]";
    const int units = as_small_int(field(jc[k], path, "units"), path + ".units");
    if (units < 1) fail(path + ".units", "must be >= 1");
    columns.push_back(ColumnType{as_small_int(field(jc[k], path, "family"), path + ".family"), units});
  }

  std::vector<JobSpec> jobs;
  const json& jj = as_array(field(doc, "$", "jobs"), "jobs");
  for (std::size_t k = 0; k < jj.size(); ++k) {
    const std::string path = "jobs[" + std::to_string(k) + "]";
    JobSpec js;
    js.id = as_small_int(field(jj[k], path, "id"), path + ".id");
    js.release = as_int(field(jj[k], path, "release"), path + ".release");
    js.due = as_int(field(jj[k], path, "due"), path + ".due");
    if (js.due < js.release) fail(path + ".due", "before release date");
    const json& jo = as_array(field(jj[k], path, "operations"), path + ".operations");
    if (jo.empty()) fail(path + ".operations", "must not be empty");
    for (std::size_t i = 0; i < jo.size(); ++i) {
      const std::string opath = path + ".operations[" + std::to_string(i) + "]";
      OperationSpec os;
      os.id = as_small_int(field(jo[i], opath, "id"), opath + ".id");
      os.family = as_small_int(field(jo[i], opath, "family"), opath + ".family");
      os.processing = as_int(field(jo[i], opath, "p"), opath + ".p");
      if (os.processing <= 0) fail(opath + ".p", "must be > 0");
      os.setup = as_int(field(jo[i], opath, "s"), opath + ".s");
      if (os.setup < 0) fail(opath + ".s", "must be >= 0");
      const json& je = as_array(field(jo[i], opath, "eligible"), opath + ".eligible");
      if (je.empty()) fail(opath + ".eligible", "must not be empty");
      for (std::size_t e = 0; e < je.size(); ++e) {
        os.eligible.push_back(as_small_int(je[e], opath + ".eligible[" + std::to_string(e) + "]"));
      }
      js.operations.push_back(std::move(os));
    }
    jobs.push_back(std::move(js));
  }

  TimeWindowSet windows;
  const json& jw = field(doc, "$", "operator_windows");
  if (jw.is_array()) {
    std::vector<Interval> ivs;
    for (std::size_t k = 0; k < jw.size(); ++k) {
      const std::string path = "operator_windows[" + std::to_string(k) + "]";
      if (!jw[k].is_array() || jw[k].size() != 2) fail(path, "expected a [start, end] pair");
      Interval iv;
      iv.begin = jw[k][0].is_null() ? std::numeric_limits<TimePoint>::min() : as_int(jw[k][0], path + "[0]");
      iv.end = jw[k][1].is_null() ? kUnbounded : as_int(jw[k][1], path + "[1]");
      if (iv.end <= iv.begin) fail(path, "end must be after start");
      ivs.push_back(iv);
    }
    windows = TimeWindowSet(std::move(ivs));
  } else if (jw.is_object()) {
    auto text = [&](const char* key) {
      const json& v = field(jw, "operator_windows", key);
      if (!v.is_string()) fail(std::string("operator_windows.") + key, "expected a string");
      return v.get<std::string>();
    };
    WeeklyPattern pattern;
    try {
      pattern = parse_weekly_pattern(text("days"), text("start"), text("end"));
    } catch (const FormatError& e) {
      throw FormatError(std::string("operator_windows.") + e.what());
    }
    TimePoint min_release = 0, max_release = 0;
    for (const JobSpec& js : jobs) {
      min_release = std::min(min_release, js.release);
      max_release = std::max(max_release, js.release);
    }
    TimePoint from = min_release - (((min_release % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay);
    TimePoint to = max_release + 60 * kMinutesPerDay;
    if (jw.contains("from")) from = as_int(jw["from"], "operator_windows.from");
    if (jw.contains("to")) to = as_int(jw["to"], "operator_windows.to");
    windows = TimeWindowSet::weekly(pattern, from, to);
  } else {
    fail("operator_windows", "expected an array of [start, end] pairs or a weekly pattern object");
  }

  TimePoint origin = 0;
  if (doc.contains("horizon_origin")) origin = as_int(doc["horizon_origin"], "horizon_origin");
  try {
    return Instance(std::move(machines), std::move(columns), std::move(windows), jobs, origin);
  } catch (const InstanceError& e) {
    throw FormatError(std::string("$: ") + e.what());
  }
}

json schedule_to_json(const Schedule& schedule, const Instance& instance) {
  json out = json::array();
  for (const PlacedOperation& p : schedule.placements) {
    out.push_back({{"operation", instance.operation(p.operation).id},
                   {"machine", instance.machine_ids().at(p.machine)},
                   {"setup", p.setup},
                   {"start", p.start},
                   {"completion", p.completion}});
  }
  return out;
}

Schedule schedule_from_json(const json& doc, const Instance& instance) {
  as_array(doc, "$");
  Schedule s;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const std::string path = "[" + std::to_string(k) + "]";
    const int op_id = as_small_int(field(doc[k], path, "operation"), path + ".operation");
    const int machine_id = as_small_int(field(doc[k], path, "machine"), path + ".machine");
    auto op = instance.find_operation(op_id);
    if (!op) fail(path + ".operation", "unknown operation id " + std::to_string(op_id));
    auto m = instance.find_machine(machine_id);
    if (!m) fail(path + ".machine", "unknown machine id " + std::to_string(machine_id));
    const json& setup = field(doc[k], path, "setup");
    if (!setup.is_boolean()) fail(path + ".setup", "expected a boolean");
    s.placements.push_back(PlacedOperation{*op, *m, setup.get<bool>(),
                                           as_int(field(doc[k], path, "start"), path + ".start"),
                                           as_int(field(doc[k], path, "completion"), path + ".completion")});
  }
  return s;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

Instance load_instance(const std::filesystem::path& path) { return instance_from_json(read_json_file(path)); }

}  // namespace pmsched
