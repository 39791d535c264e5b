#pragma once

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace steklov {

/// One row of a study.
struct ExperimentRecord
{
    std::string experiment;
    std::map<std::string, double> parameters;
    std::map<std::string, double> observables;
    /// Threshold the record was judged against.
    double tolerance = 0.0;
    bool pass = false;

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

bool all_pass(std::span<const ExperimentRecord> records);

// CSV layout: experiment, one "param.<name>" column per parameter, one
// "obs.<name>" column per observable, tolerance, pass. Columns are the union
// over all records; a record without a value leaves the cell empty.
void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records);
std::vector<ExperimentRecord> read_records_csv(std::istream& in);

nlohmann::json to_json(const ExperimentRecord& record);
ExperimentRecord record_from_json(const nlohmann::json& j);
nlohmann::json records_to_json(std::span<const ExperimentRecord> records);
std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace steklov
