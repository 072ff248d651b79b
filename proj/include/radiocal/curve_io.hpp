#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "radiocal/curve.hpp"
#include "radiocal/errors.hpp"

namespace radiocal {

/// Plain-text curve format: one header line "x,g", then 100 comma-separated
/// rows on the shared grid. 17 significant digits, enough to reproduce the
/// doubles bit-for-bit on read.
inline void write_curve(const CrfCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << "x,g\n";
    const auto& grid = curve_grid();
    char line[96];
    for (int i = 0; i < kCurveSamples; ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", grid[i], curve.values[i]);
        out << line;
    }
    if (!out)
        throw IoError("failed writing " + path);
}

inline CrfCurve read_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);

    auto strip_cr = [](std::string& s) {
        if (!s.empty() && s.back() == '\r')
            s.pop_back();
    };

    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path + ": empty curve file");
    strip_cr(line);
    if (line != "x,g")
        throw FormatError(path + ": expected header 'x,g'");

    CrfCurve curve;
    const auto& grid = curve_grid();
    int row = 0;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty())
            continue;
        if (row >= kCurveSamples)
            throw FormatError(path + ": more than " + std::to_string(kCurveSamples) + " rows");
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError(path + ": row " + std::to_string(row + 1) + " is not 'x,g'");
        std::size_t used = 0;
        double x = 0.0, g = 0.0;
        try {
            x = std::stod(line.substr(0, comma), &used);
            if (used != comma)
                throw std::invalid_argument("trailing junk");
            const std::string rest = line.substr(comma + 1);
            g = std::stod(rest, &used);
            if (used != rest.size())
                throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw FormatError(path + ": non-numeric entry in row " + std::to_string(row + 1));
        }
        if (std::abs(x - grid[row]) > 1e-9)
            throw FormatError(path + ": abscissa mismatch in row " + std::to_string(row + 1));
        curve.values[row] = g;
        ++row;
    }
    if (row != kCurveSamples)
        throw FormatError(path + ": expected " + std::to_string(kCurveSamples) +
                          " rows, found " + std::to_string(row));
    return curve;
}

} // namespace radiocal
