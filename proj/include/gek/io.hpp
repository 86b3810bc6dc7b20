#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace gek::io {

inline constexpr const char* kVersion = "gek 0.1.0";

// "MIN:MAX:STEPS" axis specification with STEPS evenly spaced points,
// endpoints included.
struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int steps = 2;

    static GridSpec parse(const std::string& text);
    std::vector<double> points() const;
};

// A plot-ready table: ordered metadata, a header, numeric rows.
struct CurveRecord {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(const std::string& key, const std::string& value);
};

// shortest decimal that round-trips to the same double
std::string format_double(double v);

void write_csv(const CurveRecord& rec, std::ostream& out);
void write_json(const CurveRecord& rec, std::ostream& out);
void write_file(const CurveRecord& rec, const std::string& path, const std::string& format);

CurveRecord read_csv(std::istream& in);
CurveRecord read_json(std::istream& in);

} // namespace gek::io
