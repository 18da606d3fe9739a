#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdefft/errors.hpp"
#include "kdefft/estimators.hpp"
#include "kdefft/grid.hpp"
#include "kdefft/linalg.hpp"

namespace kdefft {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, delim)) out.push_back(tok);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::optional<double> parse_double(const std::string& tok) {
    const std::string t = trim(tok);
    if (t.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// split on commas and/or runs of whitespace
inline std::vector<std::string> split_loose(const std::string& s) {
    std::vector<std::string> out;
    std::string tok;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) out.push_back(tok);
            tok.clear();
        } else {
            tok += c;
        }
    }
    if (!tok.empty()) out.push_back(tok);
    return out;
}

}  // namespace detail

/// Delimited numeric rows; a single leading non-numeric row is treated as a header.
inline SampleMatrix load_samples(const std::string& path, char delimiter = ',') {
    std::ifstream in(path);
    if (!in) throw FileNotFound("cannot open " + path);

    SampleMatrix m;
    std::string line;
    std::size_t lineno = 0;
    std::size_t cols = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto toks = detail::split(line, delimiter);
        std::vector<double> row;
        row.reserve(toks.size());
        bool numeric = true;
        for (const auto& t : toks) {
            if (auto v = detail::parse_double(t)) row.push_back(*v);
            else { numeric = false; break; }
        }
        if (!numeric) {
            if (first_data_row) continue;  // header row
            throw ParseError(lineno, "non-numeric field");
        }
        if (first_data_row) {
            cols = row.size();
            if (cols == 0) throw ParseError(lineno, "empty row");
            first_data_row = false;
        } else if (row.size() != cols) {
            throw InconsistentColumns(lineno, cols, row.size());
        }
        m.points.insert(m.points.end(), row.begin(), row.end());
        ++m.n;
    }
    if (m.n == 0) throw ParseError(lineno, "no data rows");
    m.dim = static_cast<int>(cols);
    return m;
}

/// Inline bandwidth syntax: rows separated by ';', entries by ',' or whitespace.
inline BandwidthMatrix parse_bandwidth(const std::string& text) {
    std::vector<std::vector<double>> rows;
    for (const auto& rtext : detail::split(text, ';')) {
        std::vector<double> row;
        for (const auto& t : detail::split_loose(rtext)) {
            if (auto v = detail::parse_double(t)) row.push_back(*v);
            else throw ParseError(rows.size() + 1, "non-numeric bandwidth entry '" + t + "'");
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(1, "empty bandwidth matrix");
    return BandwidthMatrix::validate(rows);
}

/// Plain-text bandwidth file: d lines of d whitespace/comma-separated numbers.
inline BandwidthMatrix load_bandwidth_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& t : detail::split_loose(line)) {
            if (auto v = detail::parse_double(t)) row.push_back(*v);
            else throw ParseError(lineno, "non-numeric bandwidth entry '" + t + "'");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(lineno, "empty bandwidth file");
    return BandwidthMatrix::validate(rows);
}

/// Normal-scale rule H = n^{-2/(d+4)} * sample covariance. A convenience default,
/// not a tuned selector.
inline BandwidthMatrix rule_of_thumb_bandwidth(const SampleMatrix& data) {
    if (data.n < 2) throw DegenerateCovariance("need at least two samples");
    const int d = data.dim;
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < data.n; ++i)
        for (int k = 0; k < d; ++k) mean[k] += data.points[i * d + k];
    for (double& v : mean) v /= static_cast<double>(data.n);

    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    for (std::size_t i = 0; i < data.n; ++i)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                cov[static_cast<std::size_t>(a) * d + b] +=
                    (data.points[i * d + a] - mean[a]) * (data.points[i * d + b] - mean[b]);
    const double factor = std::pow(static_cast<double>(data.n), -2.0 / (d + 4)) /
                          static_cast<double>(data.n - 1);
    for (double& v : cov) v *= factor;
    try {
        return BandwidthMatrix::validate(d, std::move(cov));
    } catch (const NotPositiveDefinite&) {
        throw DegenerateCovariance("sample covariance is singular");
    }
}

inline nlohmann::json density_to_json(const DensityGrid& dg, double tau,
                                      const std::vector<int>& support) {
    nlohmann::json j;
    j["dim"] = dg.grid.dim;
    j["method"] = method_name(dg.method);
    j["tau"] = tau;
    j["support"] = support;
    j["grid"] = {{"lower", dg.grid.lower},
                 {"upper", dg.grid.upper},
                 {"sizes", dg.grid.sizes},
                 {"binwidths", dg.grid.binwidths}};
    std::vector<double> vals(dg.values.data(), dg.values.data() + dg.values.size());
    j["values"] = std::move(vals);  // row-major
    return j;
}

inline void write_density_json(const std::string& path, const DensityGrid& dg, double tau,
                               const std::vector<int>& support) {
    std::ofstream out(path);
    if (!out) throw FileNotFound("cannot write " + path);
    out << density_to_json(dg, tau, support).dump(2) << "\n";
}

struct DensityFile {
    GridSpec grid;
    std::vector<double> values;
    std::string method;
    double tau = 0.0;
    std::vector<int> support;
};

inline DensityFile read_density_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("cannot open " + path);
    nlohmann::json j;
    in >> j;
    DensityFile f;
    f.grid.dim = j.at("dim").get<int>();
    f.grid.lower = j.at("grid").at("lower").get<std::vector<double>>();
    f.grid.upper = j.at("grid").at("upper").get<std::vector<double>>();
    f.grid.sizes = j.at("grid").at("sizes").get<std::vector<std::size_t>>();
    f.grid.binwidths = j.at("grid").at("binwidths").get<std::vector<double>>();
    f.values = j.at("values").get<std::vector<double>>();
    f.method = j.at("method").get<std::string>();
    f.tau = j.at("tau").get<double>();
    f.support = j.at("support").get<std::vector<int>>();
    return f;
}

/// One row per node: d coordinate columns then the density, 17 significant digits.
inline void write_density_csv(const std::string& path, const DensityGrid& dg) {
    std::ofstream out(path);
    if (!out) throw FileNotFound("cannot write " + path);
    for (int k = 0; k < dg.grid.dim; ++k) out << "x" << (k + 1) << ",";
    out << "density\n";
    std::vector<std::size_t> idx(dg.grid.dim, 0);
    std::size_t flat = 0;
    char buf[32];
    do {
        for (int k = 0; k < dg.grid.dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", dg.grid.node(k, idx[k]));
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", dg.values[flat++]);
        out << buf << "\n";
    } while (NdArray<double>::next_index(idx, dg.grid.sizes));
}

inline Method parse_method(const std::string& name) {
    if (name == "naive") return Method::naive;
    if (name == "binned-direct") return Method::binned_direct;
    if (name == "fft-wand") return Method::fft_wand;
    if (name == "fft-corrected") return Method::fft_corrected;
    throw ConfigError("unknown method '" + name + "'");
}

}  // namespace kdefft
