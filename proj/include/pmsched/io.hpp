#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pmsched/model.hpp"

namespace pmsched {

/// Malformed input document. The message starts with the JSON path of the
/// offending field, e.g. "jobs[3].operations[0].p: ...".
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "MON..FRI", "MON,WED,FRI" or "SAT" style day lists and "HH:MM"
/// times. Throws FormatError.
WeeklyPattern parse_weekly_pattern(const std::string& days, const std::string& start,
                                   const std::string& end);

nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

nlohmann::json schedule_to_json(const Schedule& schedule, const Instance& instance);
Schedule schedule_from_json(const nlohmann::json& doc, const Instance& instance);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

Instance load_instance(const std::filesystem::path& path);

}  // namespace pmsched
