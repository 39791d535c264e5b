#include "steklov/records.hpp"
#include "steklov/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace steklov {

bool all_pass(std::span<const ExperimentRecord> records)
{
    return std::all_of(records.begin(), records.end(), [](const ExperimentRecord& r) { return r.pass; });
}

std::string format_double(double value)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& text, int line)
{
    double value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) {
        throw FormatError("line " + std::to_string(line) + ": malformed number '" + text + "'");
    }
    return value;
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records)
{
    std::set<std::string> params, obs;
    for (const auto& r : records) {
        for (const auto& [k, v] : r.parameters) params.insert(k);
        for (const auto& [k, v] : r.observables) obs.insert(k);
    }
    out << "experiment";
    for (const auto& k : params) out << ",param." << k;
    for (const auto& k : obs) out << ",obs." << k;
    out << ",tolerance,pass\n";
    for (const auto& r : records) {
        out << r.experiment;
        for (const auto& k : params) {
            out << ',';
            if (auto it = r.parameters.find(k); it != r.parameters.end()) out << format_double(it->second);
        }
        for (const auto& k : obs) {
            out << ',';
            if (auto it = r.observables.find(k); it != r.observables.end()) out << format_double(it->second);
        }
        out << ',' << format_double(r.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
    }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw FormatError("line 1: empty records file");
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header.front() != "experiment" || header[header.size() - 2] != "tolerance" ||
        header.back() != "pass") {
        throw FormatError("line 1: expected header 'experiment,...,tolerance,pass'");
    }
    for (std::size_t c = 1; c + 2 < header.size(); ++c) {
        if (header[c].rfind("param.", 0) != 0 && header[c].rfind("obs.", 0) != 0) {
            throw FormatError("line 1: column '" + header[c] + "' is neither param.* nor obs.*");
        }
    }

    std::vector<ExperimentRecord> records;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw FormatError("line " + std::to_string(number) + ": expected " + std::to_string(header.size()) +
                              " cells, got " + std::to_string(cells.size()));
        }
        ExperimentRecord r;
        r.experiment = cells.front();
        for (std::size_t c = 1; c + 2 < header.size(); ++c) {
            if (cells[c].empty()) continue;
            const double v = parse_double(cells[c], number);
            if (header[c].rfind("param.", 0) == 0) {
                r.parameters[header[c].substr(6)] = v;
            } else {
                r.observables[header[c].substr(4)] = v;
            }
        }
        r.tolerance = parse_double(cells[cells.size() - 2], number);
        const std::string& pass = cells.back();
        if (pass != "true" && pass != "false") throw FormatError("line " + std::to_string(number) + ": pass must be true or false");
        r.pass = pass == "true";
        records.push_back(std::move(r));
    }
    return records;
}

nlohmann::json to_json(const ExperimentRecord& record)
{
    return {{"experiment", record.experiment},
            {"parameters", record.parameters},
            {"observables", record.observables},
            {"tolerance", record.tolerance},
            {"pass", record.pass}};
}

ExperimentRecord record_from_json(const nlohmann::json& j)
{
    ExperimentRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.parameters = j.at("parameters").get<std::map<std::string, double>>();
    r.observables = j.at("observables").get<std::map<std::string, double>>();
    r.tolerance = j.at("tolerance").get<double>();
    r.pass = j.at("pass").get<bool>();
    return r;
}

nlohmann::json records_to_json(std::span<const ExperimentRecord> records)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : records) rows.push_back(to_json(r));
    return {{"records", rows}, {"pass", all_pass(records)}};
}

std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j)
{
    std::vector<ExperimentRecord> out;
    for (const auto& row : j.at("records")) out.push_back(record_from_json(row));
    return out;
}

}  // namespace steklov
