#include "gek/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gek::io {

GridSpec GridSpec::parse(const std::string& text) {
    GridSpec g;
    size_t a = text.find(':');
    size_t b = (a == std::string::npos) ? std::string::npos : text.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos)
        throw std::invalid_argument("grid: expected MIN:MAX:STEPS, got '" + text + "'");
    try {
        g.min = std::stod(text.substr(0, a));
        g.max = std::stod(text.substr(a + 1, b - a - 1));
        g.steps = std::stoi(text.substr(b + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("grid: could not parse '" + text + "'");
    }
    if (g.steps < 2) throw std::invalid_argument("grid: steps must be >= 2");
    if (!(g.max > g.min)) throw std::invalid_argument("grid: max must exceed min");
    return g;
}

std::vector<double> GridSpec::points() const {
    std::vector<double> out(steps);
    for (int i = 0; i < steps; ++i)
        out[i] = min + (max - min) * static_cast<double>(i) / (steps - 1);
    return out;
}

void CurveRecord::add_meta(const std::string& key, const std::string& value) {
    meta.emplace_back(key, value);
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(const CurveRecord& rec, std::ostream& out) {
    for (const auto& [k, v] : rec.meta) out << "# " << k << "=" << v << "\n";
    for (size_t i = 0; i < rec.columns.size(); ++i)
        out << rec.columns[i] << (i + 1 < rec.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : rec.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

void write_json(const CurveRecord& rec, std::ostream& out) {
    nlohmann::json j;
    j["meta"] = nlohmann::json::object();
    for (const auto& [k, v] : rec.meta) j["meta"][k] = v;
    j["columns"] = rec.columns;
    j["rows"] = rec.rows;
    out << j.dump(1) << "\n";
}

void write_file(const CurveRecord& rec, const std::string& path, const std::string& format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (format == "json")
        write_json(rec, out);
    else if (format == "csv")
        write_csv(rec, out);
    else
        throw std::invalid_argument("unknown format: " + format);
}

CurveRecord read_csv(std::istream& in) {
    CurveRecord rec;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            size_t eq = line.find('=');
            if (eq != std::string::npos)
                rec.add_meta(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        std::stringstream ss(line);
        std::string tok;
        if (!header_done) {
            while (std::getline(ss, tok, ',')) rec.columns.push_back(tok);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        rec.rows.push_back(std::move(row));
    }
    return rec;
}

CurveRecord read_json(std::istream& in) {
    nlohmann::json j;
    in >> j;
    CurveRecord rec;
    for (auto it = j["meta"].begin(); it != j["meta"].end(); ++it)
        rec.add_meta(it.key(), it.value().get<std::string>());
    rec.columns = j["columns"].get<std::vector<std::string>>();
    rec.rows = j["rows"].get<std::vector<std::vector<double>>>();
    return rec;
}

} // namespace gek::io
